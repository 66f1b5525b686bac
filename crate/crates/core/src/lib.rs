//! Geometry of complete sets of mutually unbiased bases.
//!
//! A complete MUB set in dimension `N` consists of `N + 1` orthonormal bases
//! of `C^N` whose cross-basis overlaps all have squared modulus `1/N`. Viewed
//! in the Euclidean space of unit-trace Hermitian matrices, the `N(N + 1)`
//! basis projectors form `N + 1` mutually orthogonal regular simplices around
//! the maximally mixed state. Their convex hull is the complementarity
//! polytope. This crate builds that polytope (both abstractly, from the
//! defining Gram relations, and concretely, from explicit MUB constructions
//! for prime-power `N`), inscribes the regular simplex of `N^2` unit-trace
//! operators using mutually orthogonal Latin squares, and verifies the
//! geometric identities the picture rests on: Gram structure, volumes,
//! insphere contact, and the optimal-ellipsoid conditions of John's theorem.
//!
//! Modules mirror the layers of that story:
//!
//! * [`hermitian`]: unit-trace Hermitian matrices as Euclidean space, the
//!   generalized Gell-Mann basis, Bloch coordinates, eigenvalues.
//! * [`field`]: small finite fields `GF(p^k)` with a canonical element order.
//! * [`mub`]: complete MUB construction for prime-power dimensions.
//! * [`designs`]: Latin squares, MOLS, affine planes, orthogonal mates, and
//!   the order-6 survey.
//! * [`polytope`]: the complementarity polytope, its faces and its metric data.
//! * [`inscription`]: the regular simplex of point faces selected by MOLS.
//! * [`john`]: touching sets and the John optimal-ellipsoid conditions.

pub mod designs;
pub mod field;
pub mod hermitian;
pub mod inscription;
pub mod john;
pub mod mub;
pub mod polytope;

use serde::{Deserialize, Serialize};

/// Comparison thresholds shared across the crate.
///
/// Two regimes cover every check: `structural` guards exact combinatorial or
/// algebraic facts that only float roundoff can blur (hermiticity, trace
/// normalization, half-space membership), while `spectral` guards quantities
/// that pass through eigensolves, Gram accumulation, or character sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Roundoff allowance for structurally exact identities.
    pub structural: f64,
    /// Allowance for spectra, Gram entries, and overlap magnitudes.
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { structural: 1e-12, spectral: 1e-10 }
    }
}

impl Tolerances {
    /// Default thresholds with the spectral allowance replaced by `tol`.
    #[must_use]
    pub fn with_spectral(tol: f64) -> Self {
        Tolerances { spectral: tol, ..Tolerances::default() }
    }
}

/// Failure modes for construction and verification entry points.
///
/// Verification routines that merely *measure* a violation return a report
/// instead; `Error` is reserved for inputs that cannot be processed at all.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} is not supported (need {1})")]
    InvalidDimension(usize, &'static str),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian: max |M - M†| entry is {defect:.3e}")]
    NotHermitian { defect: f64 },
    #[error("matrix trace {trace:?} is not 1 within {tol:.1e}")]
    NotUnitTrace { trace: (f64, f64), tol: f64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size exceeded: p^k = {0} but the cap is {1}")]
    FieldTooLarge(u64, u64),
    #[error("extension degree {0} out of range 1..={1}")]
    BadExtensionDegree(u32, u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
    #[error("element does not belong to GF({p}^{k})")]
    ForeignElement { p: u64, k: u32 },
    #[error("{n} = {factorization} is not a prime power")]
    NotPrimePower { n: u64, factorization: String },
    #[error("MUB set has {got} bases but dimension {n} requires {need} for this operation")]
    IncompleteMubSet { n: usize, got: usize, need: usize },
    #[error("ragged input: {0}")]
    RaggedInput(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
