//! Latin squares, MOLS, affine planes, and orthogonal mates.
//!
//! A complete family of `n - 1` mutually orthogonal Latin squares (MOLS) of
//! order `n` is the combinatorial skeleton behind the simplex inscription:
//! it is equivalent to an affine plane of order `n`. Prime-power orders get
//! the classical family `L_a(r, c) = a r + c` over `GF(q)`. Away from prime
//! powers the picture darkens: the Bruck-Ryser criterion rules out infinitely
//! many orders, and order 6 famously admits not even a single orthogonal
//! pair. That last fact is re-proved here by machine: enumerate all 9408
//! reduced squares of order 6 and show, square by square, that the cells
//! cannot be partitioned into six disjoint transversals.
//!
//! Mate search is exact cover: one column per cell, one row per transversal,
//! solved with column-minimum branching over bitmask rows (same search tree
//! a dancing-links solver would walk, with node counts reported so
//! nonexistence claims carry a replayable certificate).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{self, FieldSpec};
use crate::mub::{factorize, format_factorization};
use crate::{Error, Result};

/// Cap on the order accepted by the transversal-based mate search.
pub const MAX_MATE_ORDER: usize = 8;
/// Cap on the order for exhaustive reduced-square enumeration.
pub const MAX_ENUMERATION_ORDER: usize = 6;
/// Default node budget for the exact-cover search.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

/// An `n x n` grid over symbols `0..n`. Construction checks shape and symbol
/// range only; the Latin property itself is the [`is_latin`] query, so
/// defective grids can be represented and then diagnosed.
///
/// Serializes as `{"n": N, "grid": [[s, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatinRepr", into = "LatinRepr")]
pub struct LatinSquare {
    n: usize,
    grid: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct LatinRepr {
    n: usize,
    grid: Vec<Vec<usize>>,
}

impl From<LatinSquare> for LatinRepr {
    fn from(sq: LatinSquare) -> Self {
        LatinRepr { n: sq.n, grid: sq.grid }
    }
}

impl TryFrom<LatinRepr> for LatinSquare {
    type Error = Error;

    fn try_from(repr: LatinRepr) -> Result<Self> {
        if repr.grid.len() != repr.n {
            return Err(Error::RaggedInput(format!(
                "square of order {} has {} rows",
                repr.n,
                repr.grid.len()
            )));
        }
        LatinSquare::new(repr.grid)
    }
}

impl LatinSquare {
    pub fn new(grid: Vec<Vec<usize>>) -> Result<Self> {
        let n = grid.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0, "order >= 1"));
        }
        if grid.iter().any(|row| row.len() != n) {
            return Err(Error::RaggedInput(format!("rows of differing length in order-{n} grid")));
        }
        if let Some(&s) = grid.iter().flatten().find(|&&s| s >= n) {
            return Err(Error::IndexOutOfRange(format!("symbol {s} outside 0..{n}")));
        }
        Ok(LatinSquare { n, grid })
    }

    /// The cyclic square `(r + c) mod n`.
    pub fn cyclic(n: usize) -> Self {
        let grid = (0..n).map(|r| (0..n).map(|c| (r + c) % n).collect()).collect();
        LatinSquare::new(grid).expect("cyclic grid is well formed")
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> usize {
        self.grid[r][c]
    }

    #[must_use]
    pub fn grid(&self) -> &[Vec<usize>] {
        &self.grid
    }
}

/// Each symbol appears exactly once per row and once per column.
#[must_use]
pub fn is_latin(sq: &LatinSquare) -> bool {
    let n = sq.n();
    for i in 0..n {
        let mut row_seen = vec![false; n];
        let mut col_seen = vec![false; n];
        for j in 0..n {
            let r = sq.get(i, j);
            let c = sq.get(j, i);
            if row_seen[r] || col_seen[c] {
                return false;
            }
            row_seen[r] = true;
            col_seen[c] = true;
        }
    }
    true
}

/// All `n^2` ordered symbol pairs appear when the squares are superimposed.
pub fn are_orthogonal(a: &LatinSquare, b: &LatinSquare) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let n = a.n();
    let mut seen = vec![false; n * n];
    for r in 0..n {
        for c in 0..n {
            let pair = a.get(r, c) * n + b.get(r, c);
            if seen[pair] {
                return Ok(false);
            }
            seen[pair] = true;
        }
    }
    Ok(true)
}

/// A family of equal-order squares intended to be pairwise orthogonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MolsSet {
    n: usize,
    squares: Vec<LatinSquare>,
}

impl MolsSet {
    pub fn new(n: usize, squares: Vec<LatinSquare>) -> Result<Self> {
        if let Some(sq) = squares.iter().find(|sq| sq.n() != n) {
            return Err(Error::DimensionMismatch(sq.n(), n));
        }
        Ok(MolsSet { n, squares })
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    /// First non-orthogonal or non-Latin member, if any.
    pub fn first_defect(&self) -> Option<String> {
        for (i, sq) in self.squares.iter().enumerate() {
            if !is_latin(sq) {
                return Some(format!("square {i} is not Latin"));
            }
        }
        for i in 0..self.squares.len() {
            for j in (i + 1)..self.squares.len() {
                if !are_orthogonal(&self.squares[i], &self.squares[j]).expect("orders equal") {
                    return Some(format!("squares {i} and {j} are not orthogonal"));
                }
            }
        }
        None
    }
}

/// The complete family of `q - 1` MOLS of prime-power order `q`:
/// `L_a(r, c) = a r + c` over `GF(q)` for each nonzero `a`, rows, columns,
/// and symbols all in the canonical element order.
pub fn mols_prime_power(q: usize) -> Result<MolsSet> {
    let factors = factorize(q as u64);
    if factors.len() != 1 {
        return Err(Error::NotPrimePower {
            n: q as u64,
            factorization: format_factorization(&factors),
        });
    }
    let (p, k) = factors[0];
    let f: FieldSpec = field::make_field(p, k)?;
    let elems = f.enumerate();
    let mut squares = Vec::with_capacity(q - 1);
    for a in elems.iter().skip(1) {
        let mut grid = Vec::with_capacity(q);
        for r in &elems {
            let ar = f.mul(a, r)?;
            let mut row = Vec::with_capacity(q);
            for c in &elems {
                row.push(f.index(&f.add(&ar, c)?)? as usize);
            }
            grid.push(row);
        }
        squares.push(LatinSquare::new(grid)?);
    }
    MolsSet::new(q, squares)
}

/// Affine plane on `n^2` points: `n(n + 1)` lines of `n` points, grouped into
/// `n + 1` pencils of parallels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePlane {
    n: usize,
    /// Point sets, each sorted ascending.
    lines: Vec<Vec<usize>>,
    /// Indices into `lines`, one group per pencil.
    pencils: Vec<Vec<usize>>,
}

impl AffinePlane {
    /// Assembles a plane from raw parts, checking shapes only; run
    /// [`verify_affine_plane`] for the axioms.
    pub fn new(n: usize, lines: Vec<Vec<usize>>, pencils: Vec<Vec<usize>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n, "order >= 2"));
        }
        if lines.len() != n * (n + 1) || pencils.len() != n + 1 {
            return Err(Error::InvalidInput(format!(
                "order {n} needs {} lines in {} pencils, got {} in {}",
                n * (n + 1),
                n + 1,
                lines.len(),
                pencils.len()
            )));
        }
        Ok(AffinePlane { n, lines, pencils })
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    #[must_use]
    pub fn pencils(&self) -> &[Vec<usize>] {
        &self.pencils
    }

    /// Lines as sorted point sets, themselves sorted, for isomorphism checks.
    #[must_use]
    pub fn canonical_lines(&self) -> Vec<Vec<usize>> {
        let mut lines = self.lines.clone();
        lines.sort();
        lines
    }
}

/// Builds the affine plane of a complete MOLS family: points are the `n^2`
/// cells `(r, c) -> r n + c`; the pencils are rows, columns, and the level
/// sets of each square.
pub fn mols_to_affine_plane(mols: &MolsSet) -> Result<AffinePlane> {
    let n = mols.n();
    if n < 2 {
        return Err(Error::InvalidDimension(n, "order >= 2"));
    }
    if mols.squares().len() != n - 1 {
        return Err(Error::InvalidInput(format!(
            "a complete family of order {n} needs {} squares, got {}",
            n - 1,
            mols.squares().len()
        )));
    }
    if let Some(defect) = mols.first_defect() {
        return Err(Error::InvalidInput(defect));
    }
    let mut lines = Vec::with_capacity(n * (n + 1));
    let mut pencils = Vec::with_capacity(n + 1);
    // rows
    let mut pencil = Vec::with_capacity(n);
    for r in 0..n {
        pencil.push(lines.len());
        lines.push((0..n).map(|c| r * n + c).collect::<Vec<_>>());
    }
    pencils.push(pencil);
    // columns
    let mut pencil = Vec::with_capacity(n);
    for c in 0..n {
        pencil.push(lines.len());
        lines.push((0..n).map(|r| r * n + c).collect::<Vec<_>>());
    }
    pencils.push(pencil);
    // level sets of each square
    for sq in mols.squares() {
        let mut level: Vec<Vec<usize>> = vec![Vec::with_capacity(n); n];
        for r in 0..n {
            for c in 0..n {
                level[sq.get(r, c)].push(r * n + c);
            }
        }
        let mut pencil = Vec::with_capacity(n);
        for line in level {
            pencil.push(lines.len());
            lines.push(line);
        }
        pencils.push(pencil);
    }
    Ok(AffinePlane { n, lines, pencils })
}

/// Outcome of checking the affine plane axioms exhaustively.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneReport {
    pub n: usize,
    pub points: usize,
    pub lines: usize,
    pub pencils: usize,
    /// First axiom violation, if any.
    pub violation: Option<String>,
    pub pass: bool,
}

/// Checks every affine plane axiom: line sizes, pencil partitions, and the
/// unique-joining-line property for all point pairs.
#[must_use]
pub fn verify_affine_plane(plane: &AffinePlane) -> PlaneReport {
    let n = plane.n();
    let points = n * n;
    let fail = |violation: String| PlaneReport {
        n,
        points,
        lines: plane.lines().len(),
        pencils: plane.pencils().len(),
        violation: Some(violation),
        pass: false,
    };
    if plane.lines().len() != n * (n + 1) {
        return fail(format!("expected {} lines, found {}", n * (n + 1), plane.lines().len()));
    }
    if plane.pencils().len() != n + 1 {
        return fail(format!("expected {} pencils, found {}", n + 1, plane.pencils().len()));
    }
    for (i, line) in plane.lines().iter().enumerate() {
        let mut sorted = line.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n || sorted.iter().any(|&p| p >= points) {
            return fail(format!("line {i} is not a set of {n} points"));
        }
    }
    for (g, pencil) in plane.pencils().iter().enumerate() {
        let mut covered = vec![false; points];
        let mut count = 0;
        for &li in pencil {
            let Some(line) = plane.lines().get(li) else {
                return fail(format!("pencil {g} references missing line {li}"));
            };
            for &p in line {
                if covered[p] {
                    return fail(format!("pencil {g} covers point {p} twice"));
                }
                covered[p] = true;
                count += 1;
            }
        }
        if count != points {
            return fail(format!("pencil {g} does not partition the points"));
        }
    }
    // any two distinct points on exactly one common line
    for p in 0..points {
        for q in (p + 1)..points {
            let joining = plane
                .lines()
                .iter()
                .filter(|line| line.contains(&p) && line.contains(&q))
                .count();
            if joining != 1 {
                return fail(format!("points {p} and {q} lie on {joining} common lines"));
            }
        }
    }
    PlaneReport {
        n,
        points,
        lines: plane.lines().len(),
        pencils: plane.pencils().len(),
        violation: None,
        pass: true,
    }
}

/// Result of an orthogonal-mate search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum MateSearch {
    /// A mate exists; the witness is orthogonal to the input square.
    Mate { square: LatinSquare, nodes: u64 },
    /// Exhaustive proof that no mate exists.
    NoMate { nodes: u64, transversals: usize },
    /// The node budget ran out before the search finished.
    BudgetExhausted { nodes: u64 },
}

/// Searches for a Latin square orthogonal to `sq`.
///
/// A mate exists iff the `n^2` cells split into `n` disjoint transversals
/// (cell sets meeting every row, column, and symbol once): number the
/// transversals of a partition `0..n` and write that number into each cell.
/// Transversals are enumerated by row-wise backtracking, then the partition
/// question is exact cover, solved with column-minimum branching. Node
/// counts cover both phases, so `NoMate` results are replayable certificates.
pub fn orthogonal_mate(sq: &LatinSquare, node_budget: u64) -> Result<MateSearch> {
    let n = sq.n();
    if n > MAX_MATE_ORDER {
        return Err(Error::SizeCap(format!(
            "mate search accepts order <= {MAX_MATE_ORDER}, got {n}"
        )));
    }
    if !is_latin(sq) {
        return Err(Error::InvalidInput("mate search needs a Latin square".into()));
    }
    let mut nodes: u64 = 0;
    let transversals = enumerate_transversals(sq, &mut nodes);
    if (transversals.len() as u64) < n as u64 {
        return Ok(MateSearch::NoMate { nodes, transversals: transversals.len() });
    }
    let mut chosen = Vec::with_capacity(n);
    let all: Vec<usize> = (0..transversals.len()).collect();
    let full: u128 = if n * n == 128 { u128::MAX } else { (1u128 << (n * n)) - 1 };
    let solved = cover_cells(
        &transversals,
        &all,
        0,
        full,
        n * n,
        &mut chosen,
        &mut nodes,
        node_budget,
    );
    match solved {
        CoverOutcome::Found => {
            let mut grid = vec![vec![0usize; n]; n];
            for (idx, &t) in chosen.iter().enumerate() {
                let mask = transversals[t];
                for cell in 0..n * n {
                    if mask >> cell & 1 == 1 {
                        grid[cell / n][cell % n] = idx;
                    }
                }
            }
            let mate = LatinSquare::new(grid)?;
            debug_assert!(is_latin(&mate));
            debug_assert!(are_orthogonal(sq, &mate)?);
            Ok(MateSearch::Mate { square: mate, nodes })
        }
        CoverOutcome::Exhausted => Ok(MateSearch::NoMate { nodes, transversals: transversals.len() }),
        CoverOutcome::OverBudget => Ok(MateSearch::BudgetExhausted { nodes }),
    }
}

/// All transversals of `sq` as cell bitmasks (bit `r n + c`).
fn enumerate_transversals(sq: &LatinSquare, nodes: &mut u64) -> Vec<u128> {
    let n = sq.n();
    let mut out = Vec::new();
    let mut cols_used = vec![false; n];
    let mut syms_used = vec![false; n];
    let mut cells: u128 = 0;
    fn descend(
        sq: &LatinSquare,
        r: usize,
        cols_used: &mut [bool],
        syms_used: &mut [bool],
        cells: &mut u128,
        out: &mut Vec<u128>,
        nodes: &mut u64,
    ) {
        let n = sq.n();
        if r == n {
            out.push(*cells);
            return;
        }
        for c in 0..n {
            let s = sq.get(r, c);
            if cols_used[c] || syms_used[s] {
                continue;
            }
            *nodes += 1;
            cols_used[c] = true;
            syms_used[s] = true;
            *cells |= 1u128 << (r * n + c);
            descend(sq, r + 1, cols_used, syms_used, cells, out, nodes);
            *cells &= !(1u128 << (r * n + c));
            cols_used[c] = false;
            syms_used[s] = false;
        }
    }
    descend(sq, 0, &mut cols_used, &mut syms_used, &mut cells, &mut out, nodes);
    out
}

enum CoverOutcome {
    Found,
    Exhausted,
    OverBudget,
}

/// Exact cover of the cell set by disjoint transversals, branching on the
/// uncovered cell with the fewest remaining candidates.
#[allow(clippy::too_many_arguments)]
fn cover_cells(
    transversals: &[u128],
    remaining: &[usize],
    covered: u128,
    full: u128,
    cell_count: usize,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> CoverOutcome {
    if covered == full {
        return CoverOutcome::Found;
    }
    if *nodes > budget {
        return CoverOutcome::OverBudget;
    }
    // column-minimum: the uncovered cell lying on the fewest transversals
    let mut best_cell = usize::MAX;
    let mut best_count = usize::MAX;
    for cell in 0..cell_count {
        if covered >> cell & 1 == 1 {
            continue;
        }
        let count = remaining
            .iter()
            .filter(|&&t| transversals[t] >> cell & 1 == 1)
            .count();
        if count < best_count {
            best_count = count;
            best_cell = cell;
            if count == 0 {
                return CoverOutcome::Exhausted;
            }
        }
    }
    let candidates: Vec<usize> = remaining
        .iter()
        .copied()
        .filter(|&t| transversals[t] >> best_cell & 1 == 1)
        .collect();
    for t in candidates {
        *nodes += 1;
        if *nodes > budget {
            return CoverOutcome::OverBudget;
        }
        let next_remaining: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&u| transversals[u] & transversals[t] == 0)
            .collect();
        chosen.push(t);
        match cover_cells(
            transversals,
            &next_remaining,
            covered | transversals[t],
            full,
            cell_count,
            chosen,
            nodes,
            budget,
        ) {
            CoverOutcome::Found => return CoverOutcome::Found,
            CoverOutcome::OverBudget => return CoverOutcome::OverBudget,
            CoverOutcome::Exhausted => {
                chosen.pop();
            }
        }
    }
    CoverOutcome::Exhausted
}

/// Every reduced Latin square of order `n` (first row and first column in
/// natural order), by row-major backtracking. Counts: 1, 1, 1, 4, 56, 9408
/// for `n = 1..=6`.
pub fn enumerate_reduced_latin(n: usize) -> Result<Vec<LatinSquare>> {
    if n < 1 || n > MAX_ENUMERATION_ORDER {
        return Err(Error::SizeCap(format!(
            "reduced enumeration accepts order <= {MAX_ENUMERATION_ORDER}, got {n}"
        )));
    }
    let mut grid = vec![vec![0usize; n]; n];
    for c in 0..n {
        grid[0][c] = c;
    }
    for (r, row) in grid.iter_mut().enumerate() {
        row[0] = r;
    }
    let mut row_used: Vec<u32> = (0..n).map(|r| 1u32 << grid[r][0]).collect();
    let mut col_used: Vec<u32> = (0..n).map(|c| 1u32 << grid[0][c]).collect();
    // row 0 is fully fixed
    row_used[0] = (1u32 << n) - 1;
    let mut out = Vec::new();
    fn fill(
        grid: &mut Vec<Vec<usize>>,
        row_used: &mut [u32],
        col_used: &mut [u32],
        r: usize,
        c: usize,
        n: usize,
        out: &mut Vec<LatinSquare>,
    ) {
        if r == n {
            out.push(LatinSquare::new(grid.clone()).expect("backtracker keeps grids valid"));
            return;
        }
        let (nr, nc) = if c + 1 == n { (r + 1, 1) } else { (r, c + 1) };
        for s in 0..n {
            let bit = 1u32 << s;
            if row_used[r] & bit != 0 || col_used[c] & bit != 0 {
                continue;
            }
            grid[r][c] = s;
            row_used[r] |= bit;
            col_used[c] |= bit;
            fill(grid, row_used, col_used, nr, nc, n, out);
            row_used[r] &= !bit;
            col_used[c] &= !bit;
        }
    }
    if n == 1 {
        out.push(LatinSquare::new(vec![vec![0]])?);
    } else {
        fill(&mut grid, &mut row_used, &mut col_used, 1, 1, n, &mut out);
    }
    Ok(out)
}

/// What the mate search concluded for one square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MateVerdict {
    NoMate,
    Mate,
    BudgetExhausted,
}

/// Per-square record of the order-6 survey.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquareCertificate {
    pub index: usize,
    pub verdict: MateVerdict,
    /// Transversal count (0 for the verdicts where it was never computed).
    pub transversals: usize,
    pub nodes: u64,
}

/// Outcome of sweeping every reduced order-6 square for orthogonal mates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Order6Certificate {
    pub reduced_squares: usize,
    pub mates_found: usize,
    pub budget_exhausted: usize,
    pub total_nodes: u64,
    pub max_nodes_single_square: u64,
    pub max_transversals: usize,
    pub per_square: Vec<SquareCertificate>,
}

impl Order6Certificate {
    /// True when the sweep covered all 9408 reduced squares and none had a
    /// mate or ran out of budget.
    #[must_use]
    pub fn proves_no_mate_exists(&self) -> bool {
        self.reduced_squares == 9408 && self.mates_found == 0 && self.budget_exhausted == 0
    }
}

/// Proves by exhaustion that no order-6 Latin square has an orthogonal mate.
///
/// Reduced squares suffice: relabeling rows, columns, or symbols preserves
/// mate existence, and every square reduces under such relabelings.
pub fn survey_order6(node_budget: u64) -> Result<Order6Certificate> {
    let squares = enumerate_reduced_latin(6)?;
    let per_square: Vec<SquareCertificate> = squares
        .par_iter()
        .enumerate()
        .map(|(index, sq)| {
            let outcome = orthogonal_mate(sq, node_budget).expect("order 6 is within caps");
            let (verdict, transversals, nodes) = match outcome {
                MateSearch::NoMate { nodes, transversals } => {
                    (MateVerdict::NoMate, transversals, nodes)
                }
                MateSearch::Mate { nodes, .. } => (MateVerdict::Mate, 0, nodes),
                MateSearch::BudgetExhausted { nodes } => (MateVerdict::BudgetExhausted, 0, nodes),
            };
            SquareCertificate { index, verdict, transversals, nodes }
        })
        .collect();
    let mates_found = per_square.iter().filter(|c| c.verdict == MateVerdict::Mate).count();
    let budget_exhausted = per_square
        .iter()
        .filter(|c| c.verdict == MateVerdict::BudgetExhausted)
        .count();
    let total_nodes = per_square.iter().map(|c| c.nodes).sum();
    let max_nodes_single_square = per_square.iter().map(|c| c.nodes).max().unwrap_or(0);
    let max_transversals = per_square.iter().map(|c| c.transversals).max().unwrap_or(0);
    Ok(Order6Certificate {
        reduced_squares: squares.len(),
        mates_found,
        budget_exhausted,
        total_nodes,
        max_nodes_single_square,
        max_transversals,
        per_square,
    })
}

/// Bruck-Ryser exclusion: an affine (equivalently projective) plane of order
/// `n ≡ 1, 2 (mod 4)` forces `n` to be a sum of two squares; orders failing
/// that are impossible.
#[must_use]
pub fn bruck_ryser_excludes(n: u64) -> bool {
    if n % 4 != 1 && n % 4 != 2 {
        return false;
    }
    !is_sum_of_two_squares(n)
}

fn is_sum_of_two_squares(n: u64) -> bool {
    let mut a = 0u64;
    while a * a <= n {
        let rest = n - a * a;
        let b = (rest as f64).sqrt() as u64;
        for bb in b.saturating_sub(1)..=b + 1 {
            if bb * bb == rest {
                return true;
            }
        }
        a += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_squares_are_latin() {
        for n in 1..=8 {
            assert!(is_latin(&LatinSquare::cyclic(n)));
        }
    }

    #[test]
    fn latin_detects_repeats() {
        let bad = LatinSquare::new(vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(!is_latin(&bad));
        let good = LatinSquare::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(is_latin(&good));
    }

    #[test]
    fn construction_rejects_bad_grids() {
        assert!(LatinSquare::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(LatinSquare::new(vec![vec![0, 2], vec![2, 0]]).is_err());
        assert!(LatinSquare::new(vec![]).is_err());
    }

    #[test]
    fn order3_cyclic_pair_is_orthogonal() {
        // (r + c) and (2r + c) mod 3: all nine ordered pairs appear.
        let a = LatinSquare::cyclic(3);
        let b = LatinSquare::new(
            (0..3).map(|r| (0..3).map(|c| (2 * r + c) % 3).collect()).collect(),
        )
        .unwrap();
        assert!(are_orthogonal(&a, &b).unwrap());
        assert!(!are_orthogonal(&a, &a).unwrap());
    }

    #[test]
    fn prime_power_mols_are_complete_and_orthogonal() {
        for q in [2usize, 3, 4, 5, 7, 8, 9] {
            let mols = mols_prime_power(q).unwrap();
            assert_eq!(mols.squares().len(), q - 1, "q = {q}");
            assert!(mols.first_defect().is_none(), "q = {q}");
        }
    }

    #[test]
    fn mols_rejects_composites() {
        let err = mols_prime_power(6).unwrap_err();
        assert!(err.to_string().contains("2·3"));
        assert!(mols_prime_power(10).is_err());
    }

    #[test]
    fn affine_planes_from_mols_verify() {
        for q in [2usize, 3, 4, 5, 7] {
            let plane = mols_to_affine_plane(&mols_prime_power(q).unwrap()).unwrap();
            let report = verify_affine_plane(&plane);
            assert!(report.pass, "q = {q}: {:?}", report.violation);
            assert_eq!(report.lines, q * (q + 1));
            assert_eq!(report.pencils, q + 1);
        }
    }

    #[test]
    fn incomplete_or_defective_families_are_rejected() {
        let mols = mols_prime_power(4).unwrap();
        let partial = MolsSet::new(4, mols.squares()[..2].to_vec()).unwrap();
        assert!(mols_to_affine_plane(&partial).is_err());
        let twice = MolsSet::new(3, vec![LatinSquare::cyclic(3), LatinSquare::cyclic(3)]).unwrap();
        let err = mols_to_affine_plane(&twice).unwrap_err();
        assert!(err.to_string().contains("not orthogonal"));
    }

    #[test]
    fn broken_plane_is_reported() {
        let mut plane = mols_to_affine_plane(&mols_prime_power(3).unwrap()).unwrap();
        plane.lines[0][0] = plane.lines[0][1];
        let report = verify_affine_plane(&plane);
        assert!(!report.pass);
        assert!(report.violation.is_some());
    }

    #[test]
    fn cyclic_order3_has_a_mate() {
        let sq = LatinSquare::cyclic(3);
        match orthogonal_mate(&sq, DEFAULT_NODE_BUDGET).unwrap() {
            MateSearch::Mate { square, .. } => {
                assert!(is_latin(&square));
                assert!(are_orthogonal(&sq, &square).unwrap());
            }
            other => panic!("expected a mate, got {other:?}"),
        }
    }

    #[test]
    fn order2_has_no_mate() {
        // Neither diagonal pair of cells carries distinct symbols.
        let sq = LatinSquare::cyclic(2);
        match orthogonal_mate(&sq, DEFAULT_NODE_BUDGET).unwrap() {
            MateSearch::NoMate { transversals, .. } => assert_eq!(transversals, 0),
            other => panic!("expected no mate, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_even_orders_have_no_transversals() {
        for n in [4usize, 6] {
            let sq = LatinSquare::cyclic(n);
            match orthogonal_mate(&sq, DEFAULT_NODE_BUDGET).unwrap() {
                MateSearch::NoMate { transversals, .. } => assert_eq!(transversals, 0, "n = {n}"),
                other => panic!("expected no mate for cyclic order {n}, got {other:?}"),
            }
        }
    }

    #[test]
    fn xor_square_of_order4_has_a_mate() {
        let grid = (0..4).map(|r| (0..4).map(|c| r ^ c).collect()).collect();
        let sq = LatinSquare::new(grid).unwrap();
        assert!(matches!(
            orthogonal_mate(&sq, DEFAULT_NODE_BUDGET).unwrap(),
            MateSearch::Mate { .. }
        ));
    }

    #[test]
    fn tiny_budget_reports_exhaustion() {
        let grid = (0..7).map(|r| (0..7).map(|c| (r + c) % 7).collect()).collect();
        let sq = LatinSquare::new(grid).unwrap();
        match orthogonal_mate(&sq, 3).unwrap() {
            MateSearch::BudgetExhausted { nodes } => assert!(nodes > 3),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn mate_search_caps_order() {
        let sq = LatinSquare::cyclic(9);
        assert!(matches!(orthogonal_mate(&sq, 10).unwrap_err(), Error::SizeCap(_)));
    }

    #[test]
    fn reduced_counts_match_known_values() {
        assert_eq!(enumerate_reduced_latin(1).unwrap().len(), 1);
        assert_eq!(enumerate_reduced_latin(2).unwrap().len(), 1);
        assert_eq!(enumerate_reduced_latin(3).unwrap().len(), 1);
        assert_eq!(enumerate_reduced_latin(4).unwrap().len(), 4);
        assert_eq!(enumerate_reduced_latin(5).unwrap().len(), 56);
        assert!(enumerate_reduced_latin(7).is_err());
    }

    #[test]
    fn reduced_squares_are_reduced_latin_and_distinct() {
        let squares = enumerate_reduced_latin(4).unwrap();
        for sq in &squares {
            assert!(is_latin(sq));
            for i in 0..4 {
                assert_eq!(sq.get(0, i), i);
                assert_eq!(sq.get(i, 0), i);
            }
        }
        let mut seen = squares.clone();
        seen.dedup();
        assert_eq!(seen.len(), squares.len());
    }

    /// Relabeling rows, columns, or symbols preserves mate existence; this is
    /// what lets the order-6 survey restrict itself to reduced squares.
    #[test]
    fn mate_existence_is_relabeling_invariant_at_order4() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for sq in enumerate_reduced_latin(4).unwrap() {
            let baseline = matches!(
                orthogonal_mate(&sq, DEFAULT_NODE_BUDGET).unwrap(),
                MateSearch::Mate { .. }
            );
            for _ in 0..4 {
                let mut rows: Vec<usize> = (0..4).collect();
                let mut cols: Vec<usize> = (0..4).collect();
                let mut syms: Vec<usize> = (0..4).collect();
                rows.shuffle(&mut rng);
                cols.shuffle(&mut rng);
                syms.shuffle(&mut rng);
                let grid = (0..4)
                    .map(|r| (0..4).map(|c| syms[sq.get(rows[r], cols[c])]).collect())
                    .collect();
                let relabeled = LatinSquare::new(grid).unwrap();
                let now = matches!(
                    orthogonal_mate(&relabeled, DEFAULT_NODE_BUDGET).unwrap(),
                    MateSearch::Mate { .. }
                );
                assert_eq!(baseline, now);
            }
        }
    }

    /// Independent replay of the mate verdict by brute force over all Latin
    /// squares of the same order.
    #[test]
    fn mate_verdicts_match_brute_force_for_small_orders() {
        fn all_latin(n: usize) -> Vec<LatinSquare> {
            let mut out = Vec::new();
            let mut grid = vec![vec![0usize; n]; n];
            let mut row_used = vec![0u32; n];
            let mut col_used = vec![0u32; n];
            fn fill(
                grid: &mut Vec<Vec<usize>>,
                row_used: &mut [u32],
                col_used: &mut [u32],
                pos: usize,
                n: usize,
                out: &mut Vec<LatinSquare>,
            ) {
                if pos == n * n {
                    out.push(LatinSquare::new(grid.clone()).unwrap());
                    return;
                }
                let (r, c) = (pos / n, pos % n);
                for s in 0..n {
                    let bit = 1u32 << s;
                    if row_used[r] & bit != 0 || col_used[c] & bit != 0 {
                        continue;
                    }
                    grid[r][c] = s;
                    row_used[r] |= bit;
                    col_used[c] |= bit;
                    fill(grid, row_used, col_used, pos + 1, n, out);
                    row_used[r] &= !bit;
                    col_used[c] &= !bit;
                }
            }
            fill(&mut grid, &mut row_used, &mut col_used, 0, n, &mut out);
            out
        }
        for n in [2usize, 3] {
            let candidates = all_latin(n);
            for sq in &candidates {
                let fast = matches!(
                    orthogonal_mate(sq, DEFAULT_NODE_BUDGET).unwrap(),
                    MateSearch::Mate { .. }
                );
                let brute = candidates.iter().any(|m| are_orthogonal(sq, m).unwrap());
                assert_eq!(fast, brute);
            }
        }
    }

    #[test]
    fn bruck_ryser_exclusions() {
        for n in [6u64, 14, 21, 22] {
            assert!(bruck_ryser_excludes(n), "{n} should be excluded");
        }
        // 10 = 1 + 9 escapes the criterion (and fell only to computer search).
        assert!(!bruck_ryser_excludes(10));
        // no prime power is excluded
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let mut q = p;
            while q <= 512 {
                assert!(!bruck_ryser_excludes(q), "prime power {q}");
                q *= p;
            }
        }
        for n in [3u64, 4, 5, 7, 8, 9, 12, 13] {
            let _ = bruck_ryser_excludes(n);
        }
    }
}
