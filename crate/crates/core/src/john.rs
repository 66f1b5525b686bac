//! John decompositions: contact points certifying extremal inscribed balls.
//!
//! A ball inside a convex body is the largest one exactly when its contact
//! points with the boundary resolve the identity: unit outward directions
//! `u_i` and weights `c_i > 0` with `sum c_i u_i = 0` and `sum c_i u_i u_i^T`
//! proportional to the identity. This module builds three such families and
//! verifies the two conditions numerically:
//!
//! * the insphere of the complementarity polytope, touching all `n^(n+1)`
//!   facets at `-a_sigma / (n^2 - 1)`,
//! * the insphere of the density-matrix body, touched by the `n(n + 1)` MUB
//!   projectors at `(1 - P) / (n - 1)`,
//! * a SIC family: `n^2` equiangular unit vectors whose projectors touch
//!   the same insphere, checked here for the qubit tetrahedron.
//!
//! Weights are uniform in all three cases, which is itself part of the
//! symmetry being verified.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hermitian::{BlochVector, ComplexMatrix, HermitianUnitTrace, TracelessBasis};
use crate::mub::MubSet;
use crate::polytope::{face_words, CPolytope};
use crate::{Error, Result};

/// Contact points of a candidate extremal ball, with their weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TouchingSet {
    n: usize,
    /// Common norm the points are supposed to share (the ball radius).
    radius: f64,
    points: Vec<BlochVector>,
    weights: Vec<f64>,
}

impl TouchingSet {
    pub fn new(n: usize, radius: f64, points: Vec<BlochVector>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("a touching set needs at least one point".into()));
        }
        if let Some(p) = points.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch(p.n(), n));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        Ok(TouchingSet { n, radius, points, weights })
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[must_use]
    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    #[must_use]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Insphere contacts of the polytope: one per facet, `-a_sigma / (n^2 - 1)`,
/// each of norm `1 / sqrt(2 n (n^2 - 1))`, uniform weights.
pub fn polytope_touching_set(poly: &CPolytope) -> Result<TouchingSet> {
    let n = poly.n();
    let nf = n as f64;
    let scale = -1.0 / (nf * nf - 1.0);
    let radius = 1.0 / (2.0 * nf * (nf * nf - 1.0)).sqrt();
    let words = face_words(n)?;
    let points = words
        .iter()
        .map(|w| Ok(poly.face_vector(w)?.scale(scale)))
        .collect::<Result<Vec<_>>>()?;
    let weights = vec![1.0; points.len()];
    TouchingSet::new(n, radius, points, weights)
}

/// Insphere contacts of the density body: one per MUB projector,
/// `-bloch(P) / (n - 1)`, each of norm `1 / sqrt(2 n (n - 1))`, uniform
/// weights.
pub fn density_touching_set(set: &MubSet, basis: &TracelessBasis) -> Result<TouchingSet> {
    let n = set.n();
    if !set.is_complete() {
        return Err(Error::IncompleteMubSet { n, got: set.bases().len(), need: n + 1 });
    }
    let nf = n as f64;
    let radius = 1.0 / (2.0 * nf * (nf - 1.0)).sqrt();
    let mut points = Vec::with_capacity(n * (n + 1));
    for l in 0..=n {
        for k in 0..n {
            let x = basis.to_bloch(&set.projector(l, k)?)?;
            points.push(x.scale(-1.0 / (nf - 1.0)));
        }
    }
    let weights = vec![1.0; points.len()];
    TouchingSet::new(n, radius, points, weights)
}

/// The matrices where the density body's insphere touches its boundary:
/// `(1 - P) / (n - 1)` per projector. Each has unit trace, eigenvalue zero
/// on the projector's range, and `1 / (n - 1)` elsewhere, so it sits exactly
/// on the boundary (rank `n - 1`).
pub fn density_touch_matrices(set: &MubSet) -> Result<Vec<HermitianUnitTrace>> {
    let n = set.n();
    if n < 2 {
        return Err(Error::InvalidDimension(n, "dimension >= 2"));
    }
    if !set.is_complete() {
        return Err(Error::IncompleteMubSet { n, got: set.bases().len(), need: n + 1 });
    }
    let identity = ComplexMatrix::identity(n);
    let mut out = Vec::with_capacity(n * (n + 1));
    for l in 0..=n {
        for k in 0..n {
            let m = identity
                .sub(set.projector(l, k)?.matrix())?
                .scale(1.0 / (n as f64 - 1.0));
            out.push(HermitianUnitTrace::new(m)?);
        }
    }
    Ok(out)
}

/// Expected isotropy constant for the polytope insphere contacts:
/// `n^n / (2 (n^2 - 1)^2)`.
#[must_use]
pub fn polytope_john_lambda(n: usize) -> f64 {
    let nf = n as f64;
    nf.powi(n as i32) / (2.0 * (nf * nf - 1.0).powi(2))
}

/// Expected isotropy constant for the density-body contacts from a complete
/// MUB set: `1 / (2 (n - 1)^2)`.
#[must_use]
pub fn density_john_lambda(n: usize) -> f64 {
    let nf = n as f64;
    1.0 / (2.0 * (nf - 1.0) * (nf - 1.0))
}

/// Expected isotropy constant for the density-body contacts from a SIC:
/// `n / (2 (n + 1) (n - 1)^2)`.
#[must_use]
pub fn sic_john_lambda(n: usize) -> f64 {
    let nf = n as f64;
    nf / (2.0 * (nf + 1.0) * (nf - 1.0) * (nf - 1.0))
}

/// Numerical audit of the two John conditions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JohnReport {
    pub n: usize,
    pub dim: usize,
    pub contact_count: usize,
    /// John's theorem guarantees an extremal ball needs at most
    /// `d (d + 3) / 2` contacts; these families use far fewer.
    pub contact_bound: usize,
    pub radius: f64,
    /// Largest deviation of a point's norm from the radius.
    pub max_radius_deviation: f64,
    /// Norm of `sum c_i u_i` (targets zero).
    pub balance_norm: f64,
    /// Fitted isotropy constant `tr(M) / d` for `M = sum c_i u_i u_i^T`.
    pub lambda: f64,
    /// Largest entry of `M - lambda I`.
    pub max_isotropy_deviation: f64,
    pub pass: bool,
}

/// Checks balance (`sum c_i u_i = 0`) and isotropy (`sum c_i u_i u_i^T`
/// proportional to the identity), plus the equal-norm premise.
#[must_use]
pub fn verify_john(ts: &TouchingSet, tol: f64) -> JohnReport {
    let n = ts.n();
    let d = n * n - 1;
    let mut max_radius_dev: f64 = 0.0;
    let mut balance = vec![0.0; d];
    let mut m = vec![vec![0.0; d]; d];
    for (u, &w) in ts.points().iter().zip(ts.weights()) {
        max_radius_dev = max_radius_dev.max((u.norm() - ts.radius()).abs());
        let coords = u.coords();
        for i in 0..d {
            balance[i] += w * coords[i];
            for j in 0..d {
                m[i][j] += w * coords[i] * coords[j];
            }
        }
    }
    let balance_norm = balance.iter().map(|b| b * b).sum::<f64>().sqrt();
    let lambda = (0..d).map(|i| m[i][i]).sum::<f64>() / d as f64;
    let mut max_iso: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { lambda } else { 0.0 };
            max_iso = max_iso.max((v - target).abs());
        }
    }
    JohnReport {
        n,
        dim: d,
        contact_count: ts.points().len(),
        contact_bound: d * (d + 3) / 2,
        radius: ts.radius(),
        max_radius_deviation: max_radius_dev,
        balance_norm,
        lambda,
        max_isotropy_deviation: max_iso,
        pass: max_radius_dev <= tol && balance_norm <= tol && max_iso <= tol,
    }
}

/// Audit of a claimed SIC: `n^2` equiangular unit vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SicReport {
    pub n: usize,
    pub vectors: usize,
    /// Largest deviation of a vector norm from 1.
    pub max_norm_deviation: f64,
    /// Largest deviation of `|<v_i, v_j>|^2` from `1 / (n + 1)`, `i != j`.
    pub max_overlap_deviation: f64,
    /// Largest entry of `sum_i P_i - n 1` (tight-frame condition).
    pub max_frame_deviation: f64,
    /// John conditions for the projectors' insphere contacts.
    pub john: JohnReport,
    pub pass: bool,
}

/// Verifies the SIC conditions and the John decomposition the projectors
/// induce on the density body's insphere.
pub fn verify_sic(
    vectors: &[Vec<Complex64>],
    basis: &TracelessBasis,
    tol: f64,
) -> Result<SicReport> {
    let n = basis.n();
    if vectors.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "a SIC in dimension {n} has {} vectors, got {}",
            n * n,
            vectors.len()
        )));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(v.len(), n));
    }
    let nf = n as f64;
    let mut max_norm_dev: f64 = 0.0;
    let mut max_overlap_dev: f64 = 0.0;
    for (i, v) in vectors.iter().enumerate() {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        max_norm_dev = max_norm_dev.max((norm_sq - 1.0).abs());
        for w in vectors.iter().skip(i + 1) {
            let overlap: Complex64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
            max_overlap_dev =
                max_overlap_dev.max((overlap.norm_sqr() - 1.0 / (nf + 1.0)).abs());
        }
    }
    let mut frame = ComplexMatrix::identity(n).scale(-nf);
    let mut points = Vec::with_capacity(n * n);
    for v in vectors {
        let p = ComplexMatrix::projector(v);
        frame = frame.add(&p)?;
        let x = basis.to_bloch(&HermitianUnitTrace::new(p)?)?;
        points.push(x.scale(-1.0 / (nf - 1.0)));
    }
    let mut max_frame_dev: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            max_frame_dev = max_frame_dev.max(frame.get(r, c).norm());
        }
    }
    let radius = 1.0 / (2.0 * nf * (nf - 1.0)).sqrt();
    let ts = TouchingSet::new(n, radius, points, vec![1.0; n * n])?;
    let john = verify_john(&ts, tol);
    let pass =
        max_norm_dev <= tol && max_overlap_dev <= tol && max_frame_dev <= tol && john.pass;
    Ok(SicReport {
        n,
        vectors: vectors.len(),
        max_norm_deviation: max_norm_dev,
        max_overlap_deviation: max_overlap_dev,
        max_frame_deviation: max_frame_dev,
        john,
        pass,
    })
}

/// The qubit SIC: four states whose Bloch vectors are the even-parity sign
/// patterns of `(1, 1, 1) / (2 sqrt(3))`, a regular tetrahedron on the pure
/// -state sphere. The state for unit direction `(x, y, z)` is
/// `(1 + z, x + i y)` normalized.
#[must_use]
pub fn tetrahedron_sic() -> Vec<Vec<Complex64>> {
    let s = 1.0 / 3f64.sqrt();
    [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
        .iter()
        .map(|&[x, y, z]| {
            let v = vec![Complex64::new(1.0 + z, 0.0), Complex64::new(x, y)];
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / norm).collect()
        })
        .collect()
}
