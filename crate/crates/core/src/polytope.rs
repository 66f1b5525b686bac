//! The complementarity polytope: corners, faces, membership, and volume.
//!
//! For dimension `n` the polytope lives in the `d = n^2 - 1` dimensional
//! traceless coordinate space. Its `n(n + 1)` corners split into `n + 1`
//! regular `(n - 1)`-simplices spanning mutually orthogonal coordinate
//! blocks; quantum mechanically the corners are the Bloch vectors of the
//! rank-one projectors of a complete set of `n + 1` mutually unbiased bases.
//! A face is selected by a word picking one corner per simplex; the polytope
//! is the intersection of the `n^(n+1)` half-spaces those faces define, and
//! every corner evaluates to exactly 0 or 1 against every face, which is the
//! combinatorial heart of this object.
//!
//! Volume comes three independent ways: a closed form, an exact cone
//! decomposition over facets (each facet is a `(d-1)`-simplex, so its cone to
//! the center is a determinant), and Monte Carlo rejection sampling inside
//! the circumscribed ball. Agreement of the three is one of the strongest
//! end-to-end checks in the crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hermitian::{outsphere_radius, BlochVector, ComplexMatrix, TracelessBasis};
use crate::mub::MubSet;
use crate::{Error, Result};

/// Largest dimension accepted by the exact cone-decomposition volume.
pub const MAX_CONE_ORDER: usize = 5;
/// Largest dimension accepted by the Monte Carlo volume estimator.
pub const MAX_MC_ORDER: usize = 4;
/// Largest dimension whose full face-word list fits in memory comfortably.
pub const MAX_EXHAUSTIVE_ORDER: usize = 6;

/// A face-selecting word: one corner index (`0..n`) per simplex (`n + 1` of
/// them).
pub type FaceWord = Vec<usize>;

/// The polytope, stored as its `n + 1` simplices of `n` corner vectors each.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CPolytope {
    n: usize,
    /// `corners[l][k]` is corner `k` of simplex `l`.
    corners: Vec<Vec<BlochVector>>,
}

impl CPolytope {
    /// The reference model with corners in closed form.
    ///
    /// Simplex `l` spans the coordinate block `[(l)(n-1), (l+1)(n-1))`. With
    /// `r_m = 1 / sqrt(2 m (m+1))` and `R_m = m r_m`, corner 0 of a block is
    /// `(-r_1, ..., -r_{n-1})` and corner `j >= 1` has `R_j` at slot `j`,
    /// `-r_m` at slots `m > j`, zeros before. Each simplex then has corners
    /// of squared norm `(n-1)/(2n)`, pairwise inner products `-1/(2n)`, and
    /// zero centroid, and distinct blocks are orthogonal by construction.
    pub fn reference(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n, "dimension >= 2"));
        }
        let d = n * n - 1;
        let mut corners = Vec::with_capacity(n + 1);
        for l in 0..=n {
            let offset = l * (n - 1);
            let mut simplex = Vec::with_capacity(n);
            for j in 0..n {
                let mut coords = vec![0.0; d];
                for m in 1..n {
                    let r = 1.0 / (2.0 * m as f64 * (m as f64 + 1.0)).sqrt();
                    coords[offset + m - 1] = if m == j {
                        m as f64 * r
                    } else if m > j {
                        -r
                    } else {
                        0.0
                    };
                }
                simplex.push(BlochVector::new(n, coords)?);
            }
            corners.push(simplex);
        }
        Ok(CPolytope { n, corners })
    }

    /// The polytope realized by a complete set of mutually unbiased bases:
    /// corner `(l, k)` is the Bloch vector of projector `k` of basis `l`.
    pub fn from_mub(set: &MubSet, basis: &TracelessBasis) -> Result<Self> {
        let n = set.n();
        if basis.n() != n {
            return Err(Error::DimensionMismatch(basis.n(), n));
        }
        if !set.is_complete() {
            return Err(Error::IncompleteMubSet { n, got: set.bases().len(), need: n + 1 });
        }
        let mut corners = Vec::with_capacity(n + 1);
        for l in 0..=n {
            let mut simplex = Vec::with_capacity(n);
            for k in 0..n {
                simplex.push(basis.to_bloch(&set.projector(l, k)?)?);
            }
            corners.push(simplex);
        }
        Ok(CPolytope { n, corners })
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `n^2 - 1`.
    #[inline]
    #[must_use]
    pub fn dim(&self) -> usize {
        self.n * self.n - 1
    }

    #[must_use]
    pub fn simplices(&self) -> &[Vec<BlochVector>] {
        &self.corners
    }

    #[must_use]
    pub fn corner(&self, l: usize, k: usize) -> &BlochVector {
        &self.corners[l][k]
    }

    /// The face vector `a = sum_l corner(l, word[l])`.
    pub fn face_vector(&self, word: &[usize]) -> Result<BlochVector> {
        check_word(self.n, word)?;
        let mut a = BlochVector::zero(self.n);
        for (l, &k) in word.iter().enumerate() {
            a = a.add(&self.corners[l][k]);
        }
        Ok(a)
    }

    /// Affine face functional `2 <x, a> + 1/n`; corners score exactly 0 or 1
    /// and the polytope is where every face scores `>= 0`.
    pub fn face_value(&self, x: &BlochVector, word: &[usize]) -> Result<f64> {
        let a = self.face_vector(word)?;
        Ok(2.0 * x.dot(&a) + 1.0 / self.n as f64)
    }

    /// Minimum face value over all `n^(n+1)` faces, computed without
    /// enumerating them: the minimum decouples into one `min` per simplex,
    /// `2 sum_l min_k <x, c_{l,k}> + 1/n`, with the minimizing word returned
    /// as witness.
    pub fn membership(&self, x: &BlochVector) -> Result<Membership> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch(x.n(), self.n));
        }
        let mut word = Vec::with_capacity(self.n + 1);
        let mut total = 0.0;
        for simplex in &self.corners {
            let (k, v) = simplex
                .iter()
                .map(|c| x.dot(c))
                .enumerate()
                .fold((0usize, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
            word.push(k);
            total += v;
        }
        let min_face_value = 2.0 * total + 1.0 / self.n as f64;
        Ok(Membership { min_face_value, tightest_word: word })
    }

    /// True when `x` lies in the polytope up to `tol` slack on face values.
    pub fn contains(&self, x: &BlochVector, tol: f64) -> Result<bool> {
        Ok(self.membership(x)?.min_face_value >= -tol)
    }
}

/// Result of a membership query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Membership {
    /// `min_sigma (2 <x, a_sigma> + 1/n)`; nonnegative inside.
    pub min_face_value: f64,
    /// A word attaining the minimum.
    pub tightest_word: FaceWord,
}

fn check_word(n: usize, word: &[usize]) -> Result<()> {
    if word.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "face word must have length {}, got {}",
            n + 1,
            word.len()
        )));
    }
    if let Some(&k) = word.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange(format!("corner index {k} outside 0..{n}")));
    }
    Ok(())
}

/// Number of faces, `n^(n+1)`.
#[must_use]
pub fn face_count(n: usize) -> u128 {
    (n as u128).pow(n as u32 + 1)
}

/// All face words in lexicographic order (last coordinate fastest).
///
/// Only sensible for small `n`; the count grows as `n^(n+1)`.
pub fn face_words(n: usize) -> Result<Vec<FaceWord>> {
    if n < 2 || n > MAX_EXHAUSTIVE_ORDER {
        return Err(Error::SizeCap(format!(
            "exhaustive face enumeration accepts 2..={MAX_EXHAUSTIVE_ORDER}, got {n}"
        )));
    }
    let total = face_count(n) as usize;
    let mut out = Vec::with_capacity(total);
    let mut word = vec![0usize; n + 1];
    loop {
        out.push(word.clone());
        let mut i = n + 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            word[i] += 1;
            if word[i] < n {
                break;
            }
            word[i] = 0;
        }
    }
}

/// `count` face words drawn uniformly (with replacement), reproducibly.
#[must_use]
pub fn sample_face_words(n: usize, count: usize, seed: u64) -> Vec<FaceWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..=n).map(|_| rng.gen_range(0..n)).collect())
        .collect()
}

/// The face operator `A = sum_l P_{l, word[l]} - 1`, the observable whose
/// expectation is the face value. It has trace 1 and squared trace `n`.
pub fn face_operator(set: &MubSet, word: &[usize]) -> Result<ComplexMatrix> {
    let n = set.n();
    if !set.is_complete() {
        return Err(Error::IncompleteMubSet { n, got: set.bases().len(), need: n + 1 });
    }
    check_word(n, word)?;
    let mut a = ComplexMatrix::identity(n).scale(-1.0);
    for (l, &k) in word.iter().enumerate() {
        a = a.add(set.projector(l, k)?.matrix())?;
    }
    Ok(a)
}

/// Gram-structure audit of the corner set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramReport {
    pub n: usize,
    /// Largest deviation of `<c, c'>` from its target: `(n-1)/(2n)` on the
    /// diagonal, `-1/(2n)` within a simplex, `0` across simplices.
    pub max_gram_deviation: f64,
    /// Largest norm of a simplex corner sum (targets zero).
    pub max_centroid_norm: f64,
    pub pass: bool,
}

/// Checks every pairwise inner product and every simplex centroid.
#[must_use]
pub fn verify_gram(poly: &CPolytope, tol: f64) -> GramReport {
    let n = poly.n();
    let nf = n as f64;
    let mut max_gram: f64 = 0.0;
    let mut max_centroid: f64 = 0.0;
    for l in 0..=n {
        let centroid = poly.simplices()[l]
            .iter()
            .fold(BlochVector::zero(n), |acc, c| acc.add(c));
        max_centroid = max_centroid.max(centroid.norm());
        for k in 0..n {
            for l2 in 0..=n {
                for k2 in 0..n {
                    let g = poly.corner(l, k).dot(poly.corner(l2, k2));
                    let target = if l == l2 {
                        if k == k2 {
                            (nf - 1.0) / (2.0 * nf)
                        } else {
                            -1.0 / (2.0 * nf)
                        }
                    } else {
                        0.0
                    };
                    max_gram = max_gram.max((g - target).abs());
                }
            }
        }
    }
    GramReport {
        n,
        max_gram_deviation: max_gram,
        max_centroid_norm: max_centroid,
        pass: max_gram <= tol && max_centroid <= tol,
    }
}

/// Face-structure audit over a list of words.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceReport {
    pub n: usize,
    pub words_checked: usize,
    /// Largest deviation of a corner's face value from `{0, 1}`.
    pub max_corner_value_deviation: f64,
    /// Largest deviation of `|a|^2` from `(n^2-1)/(2n)`; together with the
    /// constant offset this pins the insphere radius.
    pub max_norm_deviation: f64,
    pub pass: bool,
}

/// Evaluates every corner against each given face and checks face-vector
/// norms.
pub fn verify_faces(poly: &CPolytope, words: &[FaceWord], tol: f64) -> Result<FaceReport> {
    let n = poly.n();
    let nf = n as f64;
    let norm_sq_target = (nf * nf - 1.0) / (2.0 * nf);
    let mut max_corner: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    for word in words {
        let a = poly.face_vector(word)?;
        max_norm = max_norm.max((a.dot(&a) - norm_sq_target).abs());
        for l in 0..=n {
            for k in 0..n {
                let v = 2.0 * poly.corner(l, k).dot(&a) + 1.0 / nf;
                let expected = if word[l] == k { 1.0 } else { 0.0 };
                max_corner = max_corner.max((v - expected).abs());
            }
        }
    }
    Ok(FaceReport {
        n,
        words_checked: words.len(),
        max_corner_value_deviation: max_corner,
        max_norm_deviation: max_norm,
        pass: max_corner <= tol && max_norm <= tol,
    })
}

/// Face-operator audit (needs the quantum realization).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceOperatorReport {
    pub n: usize,
    pub words_checked: usize,
    /// Largest `|Tr A - 1|`.
    pub max_trace_deviation: f64,
    /// Largest `|Tr A^2 - n|`.
    pub max_trace_square_deviation: f64,
    /// Largest mismatch between `Tr(rho A)` and the Bloch-space face value,
    /// checked at the maximally mixed state and at every corner projector.
    pub max_expectation_mismatch: f64,
    pub pass: bool,
}

/// Checks `Tr A = 1`, `Tr A^2 = n`, and agreement between operator
/// expectations and Bloch-space face values.
pub fn verify_face_operators(
    set: &MubSet,
    basis: &TracelessBasis,
    words: &[FaceWord],
    tol: f64,
) -> Result<FaceOperatorReport> {
    let n = set.n();
    let poly = CPolytope::from_mub(set, basis)?;
    let mut max_trace: f64 = 0.0;
    let mut max_trace_sq: f64 = 0.0;
    let mut max_mismatch: f64 = 0.0;
    for word in words {
        let a = face_operator(set, word)?;
        let tr = a.trace();
        max_trace = max_trace.max((tr.re - 1.0).hypot(tr.im));
        let tr2 = a.trace_product(&a)?;
        max_trace_sq = max_trace_sq.max((tr2.re - n as f64).hypot(tr2.im));
        // Tr(rho A) for rho maximally mixed is Tr A / n = face value at the
        // center, 1/n.
        let center = tr.re / n as f64;
        max_mismatch = max_mismatch.max((center - 1.0 / n as f64).abs());
        for l in 0..=n {
            for k in 0..n {
                let rho = set.projector(l, k)?;
                let expect = rho.matrix().trace_product(&a)?;
                let bloch_value = poly.face_value(&basis.to_bloch(&rho)?, word)?;
                max_mismatch = max_mismatch.max((expect.re - bloch_value).hypot(expect.im));
            }
        }
    }
    Ok(FaceOperatorReport {
        n,
        words_checked: words.len(),
        max_trace_deviation: max_trace,
        max_trace_square_deviation: max_trace_sq,
        max_expectation_mismatch: max_mismatch,
        pass: max_trace <= tol && max_trace_sq <= tol && max_mismatch <= tol,
    })
}

/// Closed-form metric data of the polytope and of the set of density
/// matrices it sits inside ("the body"), in the metric where squared
/// distance is half the trace of the squared difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryReport {
    pub n: usize,
    pub dim: usize,
    pub corner_count: u64,
    /// `n^(n+1)`, as a decimal string (overflows u64 beyond n = 15).
    pub facet_count: String,
    pub insphere_radius: f64,
    pub outsphere_radius: f64,
    pub polytope_volume: f64,
    pub ln_polytope_volume: f64,
    pub polytope_surface_area: f64,
    pub ln_polytope_surface_area: f64,
    pub body_volume: f64,
    pub ln_body_volume: f64,
    pub body_surface_area: f64,
    pub ln_body_surface_area: f64,
    /// `polytope_volume / body_volume`.
    pub volume_ratio: f64,
    pub ln_volume_ratio: f64,
    /// Isoperimetric-style invariant `R A / V` for the polytope:
    /// `sqrt(n-1) (n^2-1)^(3/2)`.
    pub polytope_radius_area_over_volume: f64,
    /// Same invariant for the body: `(n-1)(n^2-1)`.
    pub body_radius_area_over_volume: f64,
}

pub(crate) fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

/// All closed forms at dimension `n`. Volumes are astronomically small in
/// high dimension, so every quantity also comes as a logarithm; the linear
/// fields underflow to zero once `ln` drops below about -708.
pub fn geometry_report(n: usize) -> Result<GeometryReport> {
    if n < 2 {
        return Err(Error::InvalidDimension(n, "dimension >= 2"));
    }
    let nf = n as f64;
    let d = n * n - 1;
    let df = d as f64;
    let r_in = 1.0 / (2.0 * nf * (nf * nf - 1.0)).sqrt();
    let r_out = outsphere_radius(n);
    // V_polytope = n^((n+1)/2) / ((n^2-1)! 2^((n^2-1)/2))
    let ln_vp = (nf + 1.0) / 2.0 * nf.ln() - ln_factorial(d as u64) - df / 2.0 * 2f64.ln();
    // V_body = sqrt(n) pi^(n(n-1)/2) 2^(-(n-1)/2) (prod_{k<n} k!) / (n^2-1)!
    let ln_prod_fact: f64 = (1..n as u64).map(ln_factorial).sum();
    let ln_vb = 0.5 * nf.ln() + nf * (nf - 1.0) / 2.0 * std::f64::consts::PI.ln()
        - (nf - 1.0) / 2.0 * 2f64.ln()
        + ln_prod_fact
        - ln_factorial(d as u64);
    // every facet touches the insphere, so V = r_in A / d
    let ln_ap = ln_vp + df.ln() - r_in.ln();
    let poly_rav = (nf - 1.0).sqrt() * (nf * nf - 1.0).powf(1.5);
    let body_rav = (nf - 1.0) * (nf * nf - 1.0);
    // A_body = (R A / V)_body V_body / R
    let ln_ab = body_rav.ln() + ln_vb - r_out.ln();
    Ok(GeometryReport {
        n,
        dim: d,
        corner_count: (n * (n + 1)) as u64,
        facet_count: face_count(n).to_string(),
        insphere_radius: r_in,
        outsphere_radius: r_out,
        polytope_volume: ln_vp.exp(),
        ln_polytope_volume: ln_vp,
        polytope_surface_area: ln_ap.exp(),
        ln_polytope_surface_area: ln_ap,
        body_volume: ln_vb.exp(),
        ln_body_volume: ln_vb,
        body_surface_area: ln_ab.exp(),
        ln_body_surface_area: ln_ab,
        volume_ratio: (ln_vp - ln_vb).exp(),
        ln_volume_ratio: ln_vp - ln_vb,
        polytope_radius_area_over_volume: poly_rav,
        body_radius_area_over_volume: body_rav,
    })
}

/// Exact volume by decomposing the polytope into cones over its facets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeVolume {
    pub n: usize,
    pub dim: usize,
    pub facets: u64,
    pub volume: f64,
    pub ln_volume: f64,
}

/// Sums `|det| / d!` over all facets, where the determinant is taken over
/// the `d` corners lying on the facet (those the word does not select).
/// Exact up to floating point; no sampling involved.
pub fn cone_volume(poly: &CPolytope) -> Result<ConeVolume> {
    let n = poly.n();
    if n > MAX_CONE_ORDER {
        return Err(Error::SizeCap(format!(
            "cone decomposition accepts dimension <= {MAX_CONE_ORDER}, got {n}"
        )));
    }
    let d = poly.dim();
    let words = face_words(n)?;
    let det_sum: f64 = words
        .par_iter()
        .map(|word| {
            let mut rows = Vec::with_capacity(d);
            for (l, &chosen) in word.iter().enumerate() {
                for k in 0..n {
                    if k != chosen {
                        rows.push(poly.corner(l, k).coords().to_vec());
                    }
                }
            }
            lu_abs_det(rows)
        })
        .sum();
    let ln_volume = det_sum.ln() - ln_factorial(d as u64);
    Ok(ConeVolume {
        n,
        dim: d,
        facets: words.len() as u64,
        volume: ln_volume.exp(),
        ln_volume,
    })
}

/// `|det|` by LU with partial pivoting; consumes the row-major matrix.
fn lu_abs_det(mut m: Vec<Vec<f64>>) -> f64 {
    let d = m.len();
    let mut det: f64 = 1.0;
    for col in 0..d {
        let (pivot_row, pivot) = (col..d)
            .map(|r| (r, m[r][col].abs()))
            .fold((col, -1.0), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc });
        if pivot <= 0.0 {
            return 0.0;
        }
        m.swap(col, pivot_row);
        det *= m[col][col];
        for r in (col + 1)..d {
            let factor = m[r][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..d {
                let sub = factor * m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det.abs()
}

/// Monte Carlo volume estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McVolume {
    pub n: usize,
    pub dim: usize,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    /// Volume of the sampling ball (circumscribed sphere).
    pub ball_volume: f64,
    pub estimate: f64,
    /// Binomial standard error of the estimate.
    pub std_error: f64,
}

const MC_BLOCK: u64 = 1 << 14;

/// Rejection sampling from the uniform distribution on the circumscribed
/// ball. Reproducible for a fixed seed independent of thread count: sample
/// blocks use per-block counter-mode streams of one ChaCha8 generator.
pub fn mc_volume(poly: &CPolytope, samples: u64, seed: u64) -> Result<McVolume> {
    let n = poly.n();
    if n > MAX_MC_ORDER {
        return Err(Error::SizeCap(format!(
            "Monte Carlo volume accepts dimension <= {MAX_MC_ORDER}, got {n}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let d = poly.dim();
    let radius = outsphere_radius(n);
    let ball_volume = (ball_ln_volume(d, radius)).exp();
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block + 1);
            let count = MC_BLOCK.min(samples - block * MC_BLOCK);
            let mut hits = 0u64;
            let mut coords = vec![0.0; d];
            for _ in 0..count {
                sample_in_ball(&mut rng, radius, &mut coords);
                let x = BlochVector::new(n, coords.clone()).expect("length d");
                if poly.membership(&x).expect("dimensions match").min_face_value >= 0.0 {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(McVolume {
        n,
        dim: d,
        samples,
        seed,
        hits,
        ball_volume,
        estimate: ball_volume * p,
        std_error: ball_volume * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Uniform point in the `d`-ball: Gaussian direction, radius `R u^(1/d)`.
fn sample_in_ball(rng: &mut ChaCha8Rng, radius: f64, coords: &mut [f64]) {
    let d = coords.len();
    loop {
        let mut norm_sq = 0.0;
        for c in coords.iter_mut() {
            let g: f64 = rng.sample(rand_distr::StandardNormal);
            *c = g;
            norm_sq += g * g;
        }
        if norm_sq > 1e-280 {
            let u: f64 = rng.gen();
            let scale = radius * u.powf(1.0 / d as f64) / norm_sq.sqrt();
            for c in coords.iter_mut() {
                *c *= scale;
            }
            return;
        }
    }
}

/// `ln` volume of the `d`-ball of radius `r`: `d/2 ln(pi) + d ln(r) -
/// ln Gamma(d/2 + 1)`, with the Gamma at integer or half-integer argument
/// evaluated exactly via factorials.
fn ball_ln_volume(d: usize, r: f64) -> f64 {
    let df = d as f64;
    df / 2.0 * std::f64::consts::PI.ln() + df * r.ln() - ln_gamma_half(d as u64 + 2)
}

/// `ln Gamma(two_z / 2)` for positive integer `two_z`, via
/// `Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)`.
fn ln_gamma_half(two_z: u64) -> f64 {
    if two_z % 2 == 0 {
        ln_factorial(two_z / 2 - 1)
    } else {
        let m = (two_z - 1) / 2;
        ln_factorial(2 * m) - 2.0 * m as f64 * 2f64.ln() - ln_factorial(m)
            + 0.5 * std::f64::consts::PI.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::build_complete;
    use crate::hermitian::make_traceless_basis;
    use crate::Tolerances;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn reference_gram_structure_is_exact() {
        for n in [2usize, 3, 4, 5, 6] {
            let poly = CPolytope::reference(n).unwrap();
            let report = verify_gram(&poly, tol().structural);
            assert!(report.pass, "n = {n}: {report:?}");
        }
    }

    #[test]
    fn realized_polytopes_match_reference_gram() {
        for n in [2usize, 3, 4, 5] {
            let set = build_complete(n).unwrap();
            let basis = make_traceless_basis(n).unwrap();
            let poly = CPolytope::from_mub(&set, &basis).unwrap();
            let report = verify_gram(&poly, 1e-10);
            assert!(report.pass, "n = {n}: {report:?}");
        }
    }

    #[test]
    fn incomplete_sets_are_rejected() {
        let set = build_complete(3).unwrap();
        let partial =
            MubSet::new(3, set.bases()[..2].to_vec()).unwrap();
        let basis = make_traceless_basis(3).unwrap();
        assert!(matches!(
            CPolytope::from_mub(&partial, &basis),
            Err(Error::IncompleteMubSet { .. })
        ));
    }

    #[test]
    fn corners_score_zero_or_one_on_every_face() {
        for n in [2usize, 3] {
            let poly = CPolytope::reference(n).unwrap();
            let words = face_words(n).unwrap();
            assert_eq!(words.len(), face_count(n) as usize);
            let report = verify_faces(&poly, &words, tol().structural).unwrap();
            assert!(report.pass, "n = {n}: {report:?}");
        }
    }

    #[test]
    fn realized_faces_score_zero_or_one() {
        let set = build_complete(4).unwrap();
        let basis = make_traceless_basis(4).unwrap();
        let poly = CPolytope::from_mub(&set, &basis).unwrap();
        let words = sample_face_words(4, 40, 7);
        let report = verify_faces(&poly, &words, 1e-10).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn face_operators_have_unit_trace_and_trace_square_n() {
        for n in [2usize, 3, 5] {
            let set = build_complete(n).unwrap();
            let basis = make_traceless_basis(n).unwrap();
            let words = sample_face_words(n, 25, 13);
            let report = verify_face_operators(&set, &basis, &words, 1e-10).unwrap();
            assert!(report.pass, "n = {n}: {report:?}");
        }
    }

    #[test]
    fn trace_products_count_shared_corners() {
        // two faces sharing exactly s corners have Tr A B = s - 1;
        // s = 1 additionally fixes the norm/edge ratio (n^2-1)/(2n^2)
        for n in [2usize, 3] {
            let set = build_complete(n).unwrap();
            let poly = CPolytope::reference(n).unwrap();
            let words = face_words(n).unwrap();
            let ops: Vec<ComplexMatrix> =
                words.iter().map(|w| face_operator(&set, w).unwrap()).collect();
            let norm_sq = poly.face_vector(&words[0]).unwrap().dot(&poly.face_vector(&words[0]).unwrap());
            let ratio_target = ((n * n - 1) as f64) / (2.0 * (n * n) as f64);
            for i in 0..words.len() {
                for j in i..words.len() {
                    let s = words[i].iter().zip(&words[j]).filter(|(a, b)| a == b).count();
                    let tp = ops[i].trace_product(&ops[j]).unwrap();
                    assert!(
                        (tp.re - (s as f64 - 1.0)).abs() < 1e-10 && tp.im.abs() < 1e-10,
                        "n = {n}, s = {s}: Tr A B = {tp}"
                    );
                    if s == 1 {
                        // D^2(A, B) = (Tr A^2 + Tr B^2 - 2 Tr A B) / 2 = n
                        let d_sq = (2.0 * n as f64 - 2.0 * tp.re) / 2.0;
                        assert!((norm_sq / d_sq - ratio_target).abs() < 1e-12, "n = {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_face_operator_spectrum_is_frozen() {
        // A = P_x + P_y + P_z - 1 for the +1 eigenvectors of the three Pauli
        // matrices has eigenvalues (1 +- sqrt(3)) / 2.
        use crate::hermitian::{eigenvalues, HermitianUnitTrace};
        let set = build_complete(2).unwrap();
        let a = face_operator(&set, &[0, 0, 0]).unwrap();
        let h = HermitianUnitTrace::new(a).unwrap();
        let eigs = eigenvalues(&h);
        let expected = [(1.0 + 3f64.sqrt()) / 2.0, (1.0 - 3f64.sqrt()) / 2.0];
        for (e, x) in eigs.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{eigs:?}");
        }
    }

    #[test]
    fn bad_words_are_rejected() {
        let poly = CPolytope::reference(2).unwrap();
        assert!(poly.face_vector(&[0, 1]).is_err());
        assert!(poly.face_vector(&[0, 1, 2]).is_err());
        assert!(face_words(7).is_err());
    }

    /// The decoupled membership minimum must equal a brute-force minimum
    /// over all faces.
    #[test]
    fn membership_decoupling_equals_exhaustive_minimum() {
        use rand::Rng;
        for n in [2usize, 3] {
            let poly = CPolytope::reference(n).unwrap();
            let words = face_words(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..50 {
                let coords: Vec<f64> =
                    (0..poly.dim()).map(|_| rng.gen_range(-0.7..0.7)).collect();
                let x = BlochVector::new(n, coords).unwrap();
                let fast = poly.membership(&x).unwrap();
                let brute = words
                    .iter()
                    .map(|w| poly.face_value(&x, w).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!((fast.min_face_value - brute).abs() < 1e-12);
                let witness = poly.face_value(&x, &fast.tightest_word).unwrap();
                assert!((witness - brute).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn center_and_corners_are_members_small_outside_points_are_not() {
        for n in [2usize, 3, 4] {
            let poly = CPolytope::reference(n).unwrap();
            let t = tol().structural;
            assert!(poly.contains(&BlochVector::zero(n), t).unwrap());
            for l in 0..=n {
                for k in 0..n {
                    assert!(poly.contains(poly.corner(l, k), t).unwrap(), "corner ({l},{k})");
                    // just beyond a corner lies outside
                    let out = poly.corner(l, k).scale(1.0 + 1e-6);
                    assert!(!poly.contains(&out, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn octahedron_metrics_are_frozen() {
        // n = 2: regular octahedron with volume 1/6 inside the ball of
        // volume pi/6; ratio 1/pi, insphere 1/sqrt(12), area sqrt(3).
        let g = geometry_report(2).unwrap();
        assert!((g.polytope_volume - 1.0 / 6.0).abs() < 1e-14);
        assert!((g.body_volume - std::f64::consts::PI / 6.0).abs() < 1e-14);
        assert!((g.volume_ratio - std::f64::consts::FRAC_1_PI).abs() < 1e-14);
        assert!((g.insphere_radius - 1.0 / 12f64.sqrt()).abs() < 1e-15);
        assert!((g.outsphere_radius - 0.5).abs() < 1e-15);
        assert!((g.polytope_surface_area - 3f64.sqrt()).abs() < 1e-13);
        assert!((g.body_surface_area - std::f64::consts::PI).abs() < 1e-13);
        assert!((g.polytope_radius_area_over_volume - 3.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!((g.body_radius_area_over_volume - 3.0).abs() < 1e-12);
        assert_eq!(g.facet_count, "8");
        assert_eq!(g.corner_count, 6);
    }

    #[test]
    fn isoperimetric_invariants_are_consistent() {
        for n in [2usize, 3, 4, 7, 11, 16] {
            let g = geometry_report(n).unwrap();
            // recompute R A / V from the logarithmic fields
            let poly_rav =
                (g.outsphere_radius.ln() + g.ln_polytope_surface_area - g.ln_polytope_volume).exp();
            assert!(
                (poly_rav - g.polytope_radius_area_over_volume).abs()
                    < 1e-9 * g.polytope_radius_area_over_volume,
                "n = {n}"
            );
            let body_rav =
                (g.outsphere_radius.ln() + g.ln_body_surface_area - g.ln_body_volume).exp();
            assert!(
                (body_rav - g.body_radius_area_over_volume).abs()
                    < 1e-9 * g.body_radius_area_over_volume,
                "n = {n}"
            );
            // polytope insphere area identity: V = r A / d
            let v = (g.insphere_radius.ln() + g.ln_polytope_surface_area
                - (g.dim as f64).ln())
            .exp();
            assert!((v - g.polytope_volume).abs() <= 1e-9 * g.polytope_volume.max(1e-300), "n = {n}");
        }
    }

    #[test]
    fn cone_volume_matches_closed_form() {
        for n in [2usize, 3, 4] {
            let poly = CPolytope::reference(n).unwrap();
            let cone = cone_volume(&poly).unwrap();
            let g = geometry_report(n).unwrap();
            assert!(
                (cone.volume - g.polytope_volume).abs() < 1e-9 * g.polytope_volume,
                "n = {n}: cone {} vs closed {}",
                cone.volume,
                g.polytope_volume
            );
        }
        assert!(cone_volume(&CPolytope::reference(6).unwrap()).is_err());
    }

    #[test]
    fn cone_volume_on_realized_polytope_agrees() {
        let set = build_complete(3).unwrap();
        let basis = make_traceless_basis(3).unwrap();
        let poly = CPolytope::from_mub(&set, &basis).unwrap();
        let cone = cone_volume(&poly).unwrap();
        let g = geometry_report(3).unwrap();
        assert!((cone.volume - g.polytope_volume).abs() < 1e-8 * g.polytope_volume);
    }

    #[test]
    fn lu_det_known_values() {
        assert!((lu_abs_det(vec![vec![2.0, 0.0], vec![0.0, 3.0]]) - 6.0).abs() < 1e-14);
        assert!(
            (lu_abs_det(vec![
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, 4.0]
            ]) - 4.0)
                .abs()
                < 1e-14
        );
        assert_eq!(lu_abs_det(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
    }

    #[test]
    fn ball_volumes_are_exact_in_low_dimension() {
        // d = 2: pi r^2; d = 3: 4/3 pi r^3
        assert!((ball_ln_volume(2, 1.0).exp() - std::f64::consts::PI).abs() < 1e-12);
        assert!(
            (ball_ln_volume(3, 0.5).exp() - std::f64::consts::PI / 6.0).abs() < 1e-14
        );
        assert!((ball_ln_volume(1, 2.0).exp() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mc_estimate_brackets_the_octahedron_volume() {
        let poly = CPolytope::reference(2).unwrap();
        let mc = mc_volume(&poly, 200_000, 42).unwrap();
        let truth = 1.0 / 6.0;
        assert!(mc.std_error < 3e-3);
        assert!(
            (mc.estimate - truth).abs() <= 3.0 * mc.std_error,
            "estimate {} +- {} vs {}",
            mc.estimate,
            mc.std_error,
            truth
        );
    }

    #[test]
    fn mc_estimate_is_reproducible_for_a_seed() {
        let poly = CPolytope::reference(2).unwrap();
        let a = mc_volume(&poly, 50_000, 9).unwrap();
        let b = mc_volume(&poly, 50_000, 9).unwrap();
        assert_eq!(a.hits, b.hits);
        let c = mc_volume(&poly, 50_000, 10).unwrap();
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn mc_caps_dimension() {
        let poly = CPolytope::reference(5).unwrap();
        assert!(matches!(mc_volume(&poly, 10, 1), Err(Error::SizeCap(_))));
    }

    #[test]
    fn face_word_sampling_is_reproducible() {
        let a = sample_face_words(3, 5, 1);
        let b = sample_face_words(3, 5, 1);
        assert_eq!(a, b);
        for w in &a {
            assert_eq!(w.len(), 4);
            assert!(w.iter().all(|&k| k < 3));
        }
    }
}
