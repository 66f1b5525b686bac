//! Inscribing the regular simplex in the complementarity polytope.
//!
//! The polytope's outsphere has room for a regular simplex on `n^2` vertices
//! (the ambient dimension is `n^2 - 1`), and remarkably the polytope's own
//! face vectors supply one: pick `n^2` faces so that any two of them select
//! a common corner in exactly one simplex, and the corresponding face
//! vectors form a perfect regular simplex touching the outsphere.
//!
//! Such face families are affine planes in disguise. A complete family of
//! MOLS of order `n` yields one directly: index faces by array cells
//! `(r, c)` and let the face word read `(c, r, S_1[r][c], ..., S_{n-1}[r][c])`.
//! Two distinct cells agree in exactly one coordinate (same column, same
//! row, or same symbol in exactly one square; orthogonality and Latin-ness
//! forbid more). The dictionary runs both ways: reading faces as points and
//! corners as lines recovers the affine plane, and the exhaustive search
//! here finds every inscription for small `n` without assuming any of that
//! structure.

use serde::{Deserialize, Serialize};

use crate::designs::{AffinePlane, MolsSet};
use crate::mub::MubSet;
use crate::polytope::{face_operator, CPolytope, FaceWord};
use crate::{Error, Result};

/// Largest order accepted by the exhaustive inscription search.
pub const MAX_SEARCH_ORDER: usize = 3;

/// An `n x n` array of face words, one per cell, forming an inscribed
/// simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ArrayRepr", into = "ArrayRepr")]
pub struct PointFaceArray {
    n: usize,
    /// `words[r][c]` selects the face for cell `(r, c)`.
    words: Vec<Vec<FaceWord>>,
}

/// On-disk form: `{"n": N, "sigma": [[[k, ...], ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct ArrayRepr {
    n: usize,
    sigma: Vec<Vec<FaceWord>>,
}

impl From<PointFaceArray> for ArrayRepr {
    fn from(a: PointFaceArray) -> Self {
        ArrayRepr { n: a.n, sigma: a.words }
    }
}

impl TryFrom<ArrayRepr> for PointFaceArray {
    type Error = Error;

    fn try_from(repr: ArrayRepr) -> Result<Self> {
        let n = repr.n;
        if repr.sigma.len() != n || repr.sigma.iter().any(|row| row.len() != n) {
            return Err(Error::RaggedInput(format!("face array is not {n} x {n}")));
        }
        if repr.sigma.iter().flatten().any(|w| w.len() != n + 1) {
            return Err(Error::RaggedInput(format!("face words must have length {}", n + 1)));
        }
        if repr.sigma.iter().flatten().flatten().any(|&k| k >= n) {
            return Err(Error::IndexOutOfRange(format!("corner index outside 0..{n}")));
        }
        Ok(PointFaceArray { n, words: repr.sigma })
    }
}

impl PointFaceArray {
    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn word(&self, r: usize, c: usize) -> &FaceWord {
        &self.words[r][c]
    }

    /// Row-major flattening; cell `(r, c)` lands at index `r n + c`.
    #[must_use]
    pub fn flat_words(&self) -> Vec<FaceWord> {
        self.words.iter().flatten().cloned().collect()
    }
}

/// Builds the face array of a complete MOLS family: cell `(r, c)` gets the
/// word `(c, r, S_1[r][c], ..., S_{n-1}[r][c])`.
pub fn build_point_face_array(mols: &MolsSet) -> Result<PointFaceArray> {
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
    let words = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let mut word = Vec::with_capacity(n + 1);
                    word.push(c);
                    word.push(r);
                    word.extend(mols.squares().iter().map(|sq| sq.get(r, c)));
                    word
                })
                .collect()
        })
        .collect();
    Ok(PointFaceArray { n, words })
}

/// Number of coordinates where the words agree.
#[must_use]
pub fn shared_coordinates(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Geometry audit of a candidate inscription.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexReport {
    pub n: usize,
    pub faces: usize,
    /// Exact combinatorial share counts over distinct word pairs; a valid
    /// inscription has both equal to 1.
    pub min_shared: usize,
    pub max_shared: usize,
    /// Largest deviation of `<a_i, a_j>` from the regular-simplex Gram
    /// matrix: `(n^2-1)/(2n)` on the diagonal, `-1/(2n)` off it.
    pub max_gram_deviation: f64,
    /// Norm of the vertex sum (targets zero: the simplex is centered).
    pub centroid_norm: f64,
    pub pass: bool,
}

/// Checks that `n^2` faces form a centered regular simplex whose vertices
/// lie on the outsphere: pairwise word overlaps, the full Gram matrix, and
/// the centroid.
pub fn verify_simplex(poly: &CPolytope, words: &[FaceWord], tol: f64) -> Result<SimplexReport> {
    let n = poly.n();
    let nf = n as f64;
    if words.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "an inscription at dimension {n} has {} faces, got {}",
            n * n,
            words.len()
        )));
    }
    let mut min_shared = usize::MAX;
    let mut max_shared = 0;
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            let s = shared_coordinates(&words[i], &words[j]);
            min_shared = min_shared.min(s);
            max_shared = max_shared.max(s);
        }
    }
    let vectors = words
        .iter()
        .map(|w| poly.face_vector(w))
        .collect::<Result<Vec<_>>>()?;
    let mut max_gram: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j {
                (nf * nf - 1.0) / (2.0 * nf)
            } else {
                -1.0 / (2.0 * nf)
            };
            max_gram = max_gram.max((a.dot(b) - target).abs());
        }
    }
    let centroid = vectors
        .iter()
        .fold(crate::hermitian::BlochVector::zero(n), |acc, v| acc.add(v));
    let centroid_norm = centroid.norm();
    Ok(SimplexReport {
        n,
        faces: words.len(),
        min_shared,
        max_shared,
        max_gram_deviation: max_gram,
        centroid_norm,
        pass: min_shared == 1 && max_shared == 1 && max_gram <= tol && centroid_norm <= tol,
    })
}

/// Operator-level audit of an inscription on a quantum realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexOperatorReport {
    pub n: usize,
    pub faces: usize,
    /// Largest `|Tr(A_i A_j) - n delta_ij|`.
    pub max_trace_product_deviation: f64,
    /// Largest entry of `sum_i A_i - n 1`.
    pub max_sum_deviation: f64,
    pub pass: bool,
}

/// Checks `Tr(A_i A_j) = n delta_ij` and `sum_i A_i = n 1` for the face
/// operators of the inscription.
pub fn verify_simplex_operators(
    set: &MubSet,
    words: &[FaceWord],
    tol: f64,
) -> Result<SimplexOperatorReport> {
    let n = set.n();
    if words.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "an inscription at dimension {n} has {} faces, got {}",
            n * n,
            words.len()
        )));
    }
    let operators = words
        .iter()
        .map(|w| face_operator(set, w))
        .collect::<Result<Vec<_>>>()?;
    let mut max_dev: f64 = 0.0;
    for (i, a) in operators.iter().enumerate() {
        for (j, b) in operators.iter().enumerate() {
            let t = a.trace_product(b)?;
            let target = if i == j { n as f64 } else { 0.0 };
            max_dev = max_dev.max((t.re - target).hypot(t.im));
        }
    }
    let mut sum = crate::hermitian::ComplexMatrix::zeros(n);
    for a in &operators {
        sum = sum.add(a)?;
    }
    let scaled_identity = crate::hermitian::ComplexMatrix::identity(n).scale(n as f64);
    let diff = sum.sub(&scaled_identity)?;
    let mut max_sum: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            max_sum = max_sum.max(diff.get(r, c).norm());
        }
    }
    Ok(SimplexOperatorReport {
        n,
        faces: words.len(),
        max_trace_product_deviation: max_dev,
        max_sum_deviation: max_sum,
        pass: max_dev <= tol && max_sum <= tol,
    })
}

/// Everything the exhaustive search found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InscriptionSearch {
    pub n: usize,
    pub candidates: usize,
    pub count: usize,
    /// Each solution is a lexicographically sorted list of `n^2` words.
    pub solutions: Vec<Vec<FaceWord>>,
}

/// Finds every set of `n^2` face words that pairwise share exactly one
/// coordinate, by clique backtracking over the compatibility graph of all
/// `n^(n+1)` words. No affine-plane structure is assumed; the MOLS-derived
/// inscriptions must reappear among the results.
pub fn exhaustive_inscription_search(n: usize) -> Result<InscriptionSearch> {
    if n < 2 || n > MAX_SEARCH_ORDER {
        return Err(Error::SizeCap(format!(
            "exhaustive inscription search accepts 2..={MAX_SEARCH_ORDER}, got {n}"
        )));
    }
    let words = crate::polytope::face_words(n)?;
    let count = words.len();
    debug_assert!(count <= 128, "word set must fit a u128 mask");
    // compat[i]: words j > i sharing exactly one coordinate with i
    let compat: Vec<u128> = (0..count)
        .map(|i| {
            let mut mask = 0u128;
            for j in (i + 1)..count {
                if shared_coordinates(&words[i], &words[j]) == 1 {
                    mask |= 1 << j;
                }
            }
            mask
        })
        .collect();
    let target = n * n;
    let mut solutions = Vec::new();
    let mut chosen = Vec::with_capacity(target);
    fn extend(
        chosen: &mut Vec<usize>,
        cand: u128,
        target: usize,
        compat: &[u128],
        solutions: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == target {
            solutions.push(chosen.clone());
            return;
        }
        if chosen.len() + (cand.count_ones() as usize) < target {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            chosen.push(j);
            extend(chosen, cand & compat[j], target, compat, solutions);
            chosen.pop();
        }
    }
    let mut index_solutions = Vec::new();
    for start in 0..count {
        chosen.push(start);
        extend(&mut chosen, compat[start], target, &compat, &mut index_solutions);
        chosen.pop();
    }
    for idxs in index_solutions {
        solutions.push(idxs.iter().map(|&i| words[i].clone()).collect());
    }
    Ok(InscriptionSearch { n, candidates: count, count: solutions.len(), solutions })
}

/// Reads an inscription as an incidence geometry: faces are points, corners
/// are lines (`corner (l, k)` collects the faces whose word picks `k` at
/// simplex `l`), lines grouped into pencils by simplex index. For a valid
/// inscription this is an affine plane of order `n`.
pub fn plane_dictionary(words: &[FaceWord]) -> Result<AffinePlane> {
    if words.is_empty() {
        return Err(Error::InvalidInput("no faces given".into()));
    }
    let n = words[0].len() - 1;
    if words.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "expected {} faces of word length {}, got {}",
            n * n,
            n + 1,
            words.len()
        )));
    }
    if words.iter().any(|w| w.len() != n + 1) {
        return Err(Error::RaggedInput("face words of differing length".into()));
    }
    if words.iter().flatten().any(|&k| k >= n) {
        return Err(Error::IndexOutOfRange(format!("corner index outside 0..{n}")));
    }
    let mut lines = Vec::with_capacity(n * (n + 1));
    let mut pencils = Vec::with_capacity(n + 1);
    for l in 0..=n {
        let mut pencil = Vec::with_capacity(n);
        for k in 0..n {
            let line: Vec<usize> = words
                .iter()
                .enumerate()
                .filter(|(_, w)| w[l] == k)
                .map(|(i, _)| i)
                .collect();
            if line.len() != n {
                return Err(Error::InvalidInput(format!(
                    "corner ({l}, {k}) is chosen by {} faces, expected {n}",
                    line.len()
                )));
            }
            pencil.push(lines.len());
            lines.push(line);
        }
        pencils.push(pencil);
    }
    AffinePlane::new(n, lines, pencils)
}
