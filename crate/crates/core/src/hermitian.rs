//! The space of unit-trace Hermitian matrices as a Euclidean space.
//!
//! Unit-trace Hermitian `N x N` matrices form a real affine space of
//! dimension `N^2 - 1`. With the squared distance
//!
//! ```text
//!     D^2(A, B) = (1/2) Tr (A - B)^2
//! ```
//!
//! and the maximally mixed state `1/N` as origin, the scalar product of two
//! points is `(1/2)[Tr AB - 1/N]`. Coordinates come from a generalized
//! Gell-Mann basis: `N^2 - 1` traceless Hermitian matrices `G_i` normalized
//! to `(1/2) Tr G_i G_j = delta_ij`, so that
//!
//! ```text
//!     M = 1/N + sum_i x_i G_i,      x_i = (1/2) Tr (M G_i),
//! ```
//!
//! and the Euclidean norm of the coordinate vector `x` equals the distance
//! from `M` to the origin. Pure states sit on the outsphere of radius
//! `sqrt((N-1)/(2N))`.
//!
//! Dimensions beyond 16 are rejected: every construction here targets the
//! small dimensions where complete MUB sets are known, and the dense
//! eigensolver is tuned for that regime.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances};

/// Largest matrix dimension any constructor accepts.
pub const MAX_DIMENSION: usize = 16;

/// Dense complex matrix, row-major.
///
/// Serializes as `{"n": N, "entries": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Vec<(f64, f64)>>,
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        let entries = (0..m.n)
            .map(|r| (0..m.n).map(|c| (m.get(r, c).re, m.get(r, c).im)).collect())
            .collect();
        MatrixRepr { n: m.n, entries }
    }
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.n || repr.entries.iter().any(|row| row.len() != repr.n) {
            return Err(Error::RaggedInput(format!(
                "matrix declared {0} x {0} but rows disagree",
                repr.n
            )));
        }
        let entries = repr
            .entries
            .iter()
            .flatten()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix { n: repr.n, entries })
    }
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix { n, entries: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::RaggedInput(format!("expected {0} rows of length {0}", n)));
        }
        Ok(ComplexMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    /// Rank-one projector `|psi><psi|` onto a (not necessarily normalized) vector.
    pub fn projector(psi: &[Complex64]) -> Self {
        let n = psi.len();
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, psi[r] * psi[c].conj());
            }
        }
        m
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.n + c] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { n: self.n, entries })
    }

    #[must_use]
    pub fn scale(&self, s: f64) -> Self {
        let entries = self.entries.iter().map(|a| a * s).collect();
        ComplexMatrix { n: self.n, entries }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    #[must_use]
    pub fn dagger(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, self.get(c, r).conj());
            }
        }
        out
    }

    #[must_use]
    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        self.check_dim(other)?;
        let n = self.n;
        let mut t = Complex64::new(0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                t += self.get(r, c) * other.get(c, r);
            }
        }
        Ok(t)
    }

    /// Largest entrywise deviation from `self = self†`.
    #[must_use]
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in r..self.n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// A Hermitian matrix with trace 1, validated on construction.
///
/// Positivity is *not* required: face operators of the complementarity
/// polytope live here too, and those have negative eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianUnitTrace {
    matrix: ComplexMatrix,
}

impl From<HermitianUnitTrace> for ComplexMatrix {
    fn from(h: HermitianUnitTrace) -> Self {
        h.matrix
    }
}

impl TryFrom<ComplexMatrix> for HermitianUnitTrace {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianUnitTrace::new(m)
    }
}

impl HermitianUnitTrace {
    /// Validates hermiticity and unit trace at the default structural tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::default().structural)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.n < 1 || matrix.n > MAX_DIMENSION {
            return Err(Error::InvalidDimension(matrix.n, "1 <= n <= 16"));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotUnitTrace { trace: (tr.re, tr.im), tol });
        }
        Ok(HermitianUnitTrace { matrix })
    }

    /// The origin of the Bloch chart, `1/N`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n < 1 || n > MAX_DIMENSION {
            return Err(Error::InvalidDimension(n, "1 <= n <= 16"));
        }
        Ok(HermitianUnitTrace { matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64) })
    }

    /// Pure-state projector onto a unit vector.
    pub fn pure_state(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "state vector norm^2 = {norm2} is not 1"
            )));
        }
        HermitianUnitTrace::new(ComplexMatrix::projector(psi))
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.matrix.n
    }

    #[inline]
    #[must_use]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Real coordinate vector of length `n^2 - 1` in the traceless chart for
/// dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    n: usize,
    coords: Vec<f64>,
}

impl BlochVector {
    pub fn new(n: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n * n - 1 {
            return Err(Error::DimensionMismatch(coords.len(), n * n - 1));
        }
        Ok(BlochVector { n, coords })
    }

    pub fn zero(n: usize) -> Self {
        BlochVector { n, coords: vec![0.0; n * n - 1] }
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    #[must_use]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    #[must_use]
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        BlochVector { n: self.n, coords }
    }

    #[must_use]
    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        BlochVector { n: self.n, coords }
    }

    #[must_use]
    pub fn scale(&self, s: f64) -> Self {
        BlochVector { n: self.n, coords: self.coords.iter().map(|a| a * s).collect() }
    }
}

/// Orthonormal basis of traceless Hermitian matrices (generalized Gell-Mann),
/// `(1/2) Tr G_i G_j = delta_ij`.
///
/// Canonical order: symmetric pair matrices `E_jk + E_kj` for `j < k` in
/// row-major order, then the antisymmetric `-i(E_jk - E_kj)`, then the
/// diagonal matrices `sqrt(2/(l(l+1))) diag(1, ..., 1, -l, 0, ..., 0)`.
/// For `n = 2` this is exactly the Pauli triple `(sigma_x, sigma_y, sigma_z)`.
#[derive(Debug, Clone)]
pub struct TracelessBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
}

pub fn make_traceless_basis(n: usize) -> Result<TracelessBasis> {
    if n < 2 || n > MAX_DIMENSION {
        return Err(Error::InvalidDimension(n, "2 <= n <= 16"));
    }
    let mut elements = Vec::with_capacity(n * n - 1);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = ComplexMatrix::zeros(n);
            m.set(j, k, one);
            m.set(k, j, one);
            elements.push(m);
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = ComplexMatrix::zeros(n);
            m.set(j, k, -i);
            m.set(k, j, i);
            elements.push(m);
        }
    }
    for l in 1..n {
        let c = (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
        let mut m = ComplexMatrix::zeros(n);
        for d in 0..l {
            m.set(d, d, Complex64::new(c, 0.0));
        }
        m.set(l, l, Complex64::new(-c * l as f64, 0.0));
        elements.push(m);
    }
    Ok(TracelessBasis { n, elements })
}

impl TracelessBasis {
    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Coordinates `x_i = (1/2) Tr (M G_i)`.
    pub fn to_bloch(&self, m: &HermitianUnitTrace) -> Result<BlochVector> {
        if m.n() != self.n {
            return Err(Error::DimensionMismatch(m.n(), self.n));
        }
        let coords = self
            .elements
            .iter()
            .map(|g| {
                let t = m.matrix().trace_product(g).expect("dimensions checked");
                0.5 * t.re
            })
            .collect();
        Ok(BlochVector { n: self.n, coords })
    }

    /// Reconstructs `1/N + sum_i x_i G_i`.
    pub fn from_bloch(&self, x: &BlochVector) -> Result<HermitianUnitTrace> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch(x.n(), self.n));
        }
        let mut m = ComplexMatrix::identity(self.n).scale(1.0 / self.n as f64);
        for (g, &xi) in self.elements.iter().zip(x.coords()) {
            if xi != 0.0 {
                m = m.add(&g.scale(xi)).expect("dimensions checked");
            }
        }
        HermitianUnitTrace::new(m)
    }
}

/// Euclidean distance `sqrt((1/2) Tr (A - B)^2)`.
pub fn distance(a: &HermitianUnitTrace, b: &HermitianUnitTrace) -> Result<f64> {
    let d = a.matrix().sub(b.matrix())?;
    let t = d.trace_product(&d)?;
    Ok((0.5 * t.re).max(0.0).sqrt())
}

/// Scalar product `(1/2)[Tr AB - 1/N]` with the maximally mixed state as origin.
pub fn inner(a: &HermitianUnitTrace, b: &HermitianUnitTrace) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let t = a.matrix().trace_product(b.matrix())?;
    Ok(0.5 * (t.re - 1.0 / a.n() as f64))
}

/// Distance from the maximally mixed state to any pure state,
/// `sqrt((n-1)/(2n))`: the outsphere radius.
#[must_use]
pub fn outsphere_radius(n: usize) -> f64 {
    ((n as f64 - 1.0) / (2.0 * n as f64)).sqrt()
}

const JACOBI_OFF_NORM: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order, by cyclic two-sided Jacobi rotations.
///
/// Sweeps stop once the Frobenius norm of the off-diagonal part drops below
/// 1e-12 (hard cap 100 sweeps; quadratic convergence makes the cap academic
/// for n <= 16).
#[must_use]
pub fn eigenvalues(m: &HermitianUnitTrace) -> Vec<f64> {
    let mut a = m.matrix().clone();
    let n = a.n();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_OFF_NORM {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate_out(&mut a, p, q);
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    eigs
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Unitary similarity zeroing the `(p, q)` entry of a Hermitian matrix.
fn rotate_out(a: &mut ComplexMatrix, p: usize, q: usize) {
    let h = a.get(p, q);
    let habs = h.norm();
    if habs == 0.0 {
        return;
    }
    let phase = h / habs;
    let alpha = a.get(p, p).re;
    let beta = a.get(q, q).re;
    let theta = (alpha - beta) / (2.0 * habs);
    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (theta.abs() + (1.0 + theta * theta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.n();
    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        let new_pj = apj * c + aqj * (phase * s);
        let new_qj = aqj * c - apj * (phase.conj() * s);
        a.set(p, j, new_pj);
        a.set(j, p, new_pj.conj());
        a.set(q, j, new_qj);
        a.set(j, q, new_qj.conj());
    }
    let new_p = c * c * alpha + s * s * beta + 2.0 * c * s * habs;
    let new_q = s * s * alpha + c * c * beta - 2.0 * c * s * habs;
    a.set(p, p, Complex64::new(new_p, 0.0));
    a.set(q, q, Complex64::new(new_q, 0.0));
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
}

/// All eigenvalues at least `-tol`.
#[must_use]
pub fn is_density_matrix(m: &HermitianUnitTrace, tol: f64) -> bool {
    eigenvalues(m).last().copied().unwrap_or(0.0) >= -tol
}
