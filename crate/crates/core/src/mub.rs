//! Complete sets of mutually unbiased bases for prime-power dimensions.
//!
//! Two orthonormal bases `{e_i}`, `{f_j}` of `C^n` are mutually unbiased when
//! `|<e_i|f_j>|^2 = 1/n` for every cross pair. At most `n + 1` bases can be
//! pairwise unbiased, and for `n = p^k` that bound is attained:
//!
//! * odd `q = p^k`: besides the standard basis, basis `a` (one per field
//!   element) has vectors `v_{a,b}[m] = q^{-1/2} exp(2 pi i tr(a m^2 + b m)/p)`
//!   indexed by field elements `b` (vector) and `m` (component), with `tr`
//!   the absolute trace down to `GF(p)`. Cross-basis overlaps are quadratic
//!   Gauss sums of modulus `sqrt q`.
//! * `q = 2^k`: squaring is trivial in characteristic 2, so the quadratic
//!   phase is lifted to fourth roots of unity: `v_{a,b}[m] = q^{-1/2}
//!   i^{tr((a + 2b) m)}` with `a, b, m` running over the Teichmuller set of
//!   the Galois ring `GR(4, k)` and `tr` the ring trace down to `Z_4`.
//!
//! Construction is deterministic: bases, vectors, and components follow the
//! canonical element order of [`crate::field`], and every vector's first
//! component is real positive. [`verify_mub`] is the acceptance gate for
//! either route.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field;
use crate::hermitian::{ComplexMatrix, HermitianUnitTrace, MAX_DIMENSION};
use crate::{Error, Result};

/// Orthonormal basis of `C^n`: `n` vectors of `n` components.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl Basis {
    pub fn new(n: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if vectors.len() != n || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::RaggedInput(format!(
                "basis for dimension {n} needs {n} vectors of {n} components"
            )));
        }
        Ok(Basis { n, vectors })
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    #[must_use]
    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i]
    }
}

/// A list of pairwise candidate-unbiased bases in one dimension.
///
/// Shape is enforced here; the unbiasedness itself is [`verify_mub`]'s job,
/// so a set that merely claims to be unbiased can be loaded and then refuted.
///
/// Serializes as `{"n": N, "bases": [[[ [re, im], ...], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MubSetRepr", into = "MubSetRepr")]
pub struct MubSet {
    n: usize,
    bases: Vec<Basis>,
}

#[derive(Serialize, Deserialize)]
struct MubSetRepr {
    n: usize,
    bases: Vec<Vec<Vec<(f64, f64)>>>,
}

impl From<MubSet> for MubSetRepr {
    fn from(set: MubSet) -> Self {
        let bases = set
            .bases
            .iter()
            .map(|b| {
                b.vectors()
                    .iter()
                    .map(|v| v.iter().map(|z| (z.re, z.im)).collect())
                    .collect()
            })
            .collect();
        MubSetRepr { n: set.n, bases }
    }
}

impl TryFrom<MubSetRepr> for MubSet {
    type Error = Error;

    fn try_from(repr: MubSetRepr) -> Result<Self> {
        let bases = repr
            .bases
            .into_iter()
            .map(|vs| {
                let vectors = vs
                    .into_iter()
                    .map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
                    .collect();
                Basis::new(repr.n, vectors)
            })
            .collect::<Result<Vec<_>>>()?;
        MubSet::new(repr.n, bases)
    }
}

impl MubSet {
    pub fn new(n: usize, bases: Vec<Basis>) -> Result<Self> {
        if n < 2 || n > MAX_DIMENSION {
            return Err(Error::InvalidDimension(n, "2 <= n <= 16"));
        }
        if bases.len() > n + 1 {
            return Err(Error::InvalidInput(format!(
                "{} bases exceed the maximum {} for dimension {n}",
                bases.len(),
                n + 1
            )));
        }
        if let Some(b) = bases.iter().find(|b| b.n() != n) {
            return Err(Error::DimensionMismatch(b.n(), n));
        }
        Ok(MubSet { n, bases })
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// True when the set has the full `n + 1` bases.
    #[must_use]
    pub fn is_complete(&self) -> bool {
        self.bases.len() == self.n + 1
    }

    /// Rank-one projector onto vector `k` of basis `l`.
    pub fn projector(&self, l: usize, k: usize) -> Result<HermitianUnitTrace> {
        let basis = self.bases.get(l).ok_or_else(|| {
            Error::IndexOutOfRange(format!("basis {l} of {}", self.bases.len()))
        })?;
        if k >= self.n {
            return Err(Error::IndexOutOfRange(format!("vector {k} of {}", self.n)));
        }
        HermitianUnitTrace::new(ComplexMatrix::projector(basis.vector(k)))
    }
}

/// Verification report for a candidate MUB set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MubReport {
    pub n: usize,
    pub bases: usize,
    /// Worst `|<v_i|v_j> - delta_ij|` within any single basis.
    pub max_orthonormality_violation: f64,
    /// Worst `||<e|f>|^2 - 1/n|` across distinct bases.
    pub max_unbiasedness_violation: f64,
    /// Location of the worst violation: (basis, vector, basis, vector).
    pub worst_pair: Option<(usize, usize, usize, usize)>,
    pub pass: bool,
}

/// Measures orthonormality within each basis and unbiasedness across bases.
#[must_use]
pub fn verify_mub(set: &MubSet, tol: f64) -> MubReport {
    let n = set.n();
    let target = 1.0 / n as f64;
    let mut max_orth: f64 = 0.0;
    let mut max_unb: f64 = 0.0;
    let mut worst: Option<(usize, usize, usize, usize)> = None;
    let mut worst_val: f64 = -1.0;
    let mut note = |val: f64, loc: (usize, usize, usize, usize)| {
        if val > worst_val {
            worst_val = val;
            worst = Some(loc);
        }
    };
    for (l, basis) in set.bases().iter().enumerate() {
        for i in 0..n {
            for j in i..n {
                let ip = overlap(basis.vector(i), basis.vector(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                let dev = (ip - Complex64::new(expect, 0.0)).norm();
                if dev > max_orth {
                    max_orth = dev;
                    note(dev, (l, i, l, j));
                }
            }
        }
    }
    for (l1, b1) in set.bases().iter().enumerate() {
        for (l2, b2) in set.bases().iter().enumerate().skip(l1 + 1) {
            for i in 0..n {
                for j in 0..n {
                    let dev = (overlap(b1.vector(i), b2.vector(j)).norm_sqr() - target).abs();
                    if dev > max_unb {
                        max_unb = dev;
                        note(dev, (l1, i, l2, j));
                    }
                }
            }
        }
    }
    let pass = max_orth <= tol && max_unb <= tol;
    MubReport {
        n,
        bases: set.bases().len(),
        max_orthonormality_violation: max_orth,
        max_unbiasedness_violation: max_unb,
        worst_pair: if pass { None } else { worst },
        pass,
    }
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lower bound on the number of mutually unbiased bases in dimension `n`:
/// one more than the smallest prime-power factor of `n`.
pub fn mub_lower_bound(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n as usize, "n >= 2"));
    }
    let min_pk = factorize(n)
        .into_iter()
        .map(|(p, k)| p.pow(k))
        .min()
        .expect("n >= 2 has at least one prime factor");
    Ok(min_pk + 1)
}

/// Prime factorization as (prime, exponent) pairs, ascending primes.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn format_factorization(factors: &[(u64, u32)]) -> String {
    factors
        .iter()
        .map(|&(p, k)| if k == 1 { p.to_string() } else { format!("{p}^{k}") })
        .collect::<Vec<_>>()
        .join("·")
}

/// Builds the complete set of `n + 1` mutually unbiased bases for a
/// prime-power dimension `n`, standard basis first.
pub fn build_complete(n: usize) -> Result<MubSet> {
    if n < 2 || n > MAX_DIMENSION {
        return Err(Error::InvalidDimension(n, "2 <= n <= 16"));
    }
    let factors = factorize(n as u64);
    if factors.len() != 1 {
        return Err(Error::NotPrimePower {
            n: n as u64,
            factorization: format_factorization(&factors),
        });
    }
    let (p, k) = factors[0];
    let mut bases = Vec::with_capacity(n + 1);
    bases.push(standard_basis(n));
    if p == 2 {
        bases.extend(even_prime_power_bases(k)?);
    } else {
        bases.extend(odd_prime_power_bases(p, k)?);
    }
    let mut set = MubSet::new(n, bases)?;
    canonicalize_phases(&mut set);
    Ok(set)
}

fn standard_basis(n: usize) -> Basis {
    let vectors = (0..n)
        .map(|i| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    Basis::new(n, vectors).expect("standard basis is square")
}

/// Basis `a` of the odd prime-power family: components
/// `q^{-1/2} omega_p^{tr(a m^2 + b m)}` over the canonical element order.
fn odd_prime_power_bases(p: u64, k: u32) -> Result<Vec<Basis>> {
    let f = field::make_field(p, k)?;
    let q = f.q() as usize;
    let elems = f.enumerate();
    let amp = 1.0 / (q as f64).sqrt();
    let mut bases = Vec::with_capacity(q);
    for a in &elems {
        let mut vectors = Vec::with_capacity(q);
        for b in &elems {
            let mut v = Vec::with_capacity(q);
            for m in &elems {
                let am2 = f.mul(a, &f.mul(m, m)?)?;
                let bm = f.mul(b, m)?;
                let t = f.absolute_trace(&f.add(&am2, &bm)?)?;
                let angle = 2.0 * std::f64::consts::PI * t as f64 / p as f64;
                v.push(Complex64::from_polar(amp, angle));
            }
            vectors.push(v);
        }
        bases.push(Basis::new(q, vectors)?);
    }
    Ok(bases)
}

/// Basis `a` of the even family: components `q^{-1/2} i^{tr((a + 2b) m)}`
/// with `a, b, m` in the Teichmuller set of `GR(4, k)`.
fn even_prime_power_bases(k: u32) -> Result<Vec<Basis>> {
    let ring = galois::GaloisRing::new(k)?;
    let q = ring.q();
    let amp = 1.0 / (q as f64).sqrt();
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let teich = ring.teichmuller();
    let mut bases = Vec::with_capacity(q);
    for a in teich {
        let mut vectors = Vec::with_capacity(q);
        for b in teich {
            let phase_elem = ring.add(a, &ring.double(b));
            let mut v = Vec::with_capacity(q);
            for m in teich {
                let t = ring.trace(&ring.mul(&phase_elem, m));
                v.push(i_pow[t as usize] * amp);
            }
            vectors.push(v);
        }
        bases.push(Basis::new(q, vectors)?);
    }
    Ok(bases)
}

/// Rotates every vector so its first nonzero component is real positive.
fn canonicalize_phases(set: &mut MubSet) {
    for basis in &mut set.bases {
        for v in &mut basis.vectors {
            let lead = v.iter().find(|z| z.norm() > 1e-14).copied();
            if let Some(z) = lead {
                let u = z.conj() / z.norm();
                for comp in v.iter_mut() {
                    *comp *= u;
                }
            }
        }
    }
}

/// Arithmetic in the Galois ring `GR(4, k) = Z4[x]/(h)`, used only to phase
/// the even-characteristic MUB family.
///
/// `h` is the first (coefficientwise, constant term first) monic lift of the
/// canonical `GF(2^k)` modulus whose root `xi` has multiplicative order
/// `2^k - 1`. The Teichmuller set `{0, 1, xi, ..., xi^(2^k - 2)}` maps
/// bijectively onto `GF(2^k)` by reduction mod 2; it is stored sorted by the
/// canonical index of that reduction so basis and component order agree with
/// the field convention used everywhere else.
mod galois {
    use super::*;

    /// Ring element: coefficients in `Z4`, constant term first, length `k`.
    pub type RingElem = Vec<u8>;

    pub struct GaloisRing {
        k: u32,
        /// Monic modulus over Z4, constant first, length k + 1.
        h: Vec<u8>,
        /// Teichmuller set indexed by the canonical order of its mod-2 reduction.
        teich: Vec<RingElem>,
        /// Frobenius images xi^(2j) for j < k, as ring elements.
        frob_of_power: Vec<RingElem>,
    }

    impl GaloisRing {
        pub fn new(k: u32) -> Result<Self> {
            if k == 1 {
                // GR(4, 1) = Z4 itself; the Teichmuller set is {0, 1}.
                return Ok(GaloisRing {
                    k,
                    h: vec![0, 1],
                    teich: vec![vec![0], vec![1]],
                    frob_of_power: vec![vec![1]],
                });
            }
            let f2 = field::make_field(2, k)?;
            let f_mod = f2.modulus();
            // Try every lift of the field modulus: each coefficient below the
            // leading one can gain +2. Deterministic: scan in ascending
            // added-bit order, keep the first lift whose root has the right
            // multiplicative order.
            let q1 = (1u64 << k) - 1;
            for bits in 0..(1u32 << k) {
                let mut h: Vec<u8> = f_mod.iter().map(|&c| c as u8).collect();
                for (j, c) in h.iter_mut().enumerate().take(k as usize) {
                    if bits >> j & 1 == 1 {
                        *c += 2;
                    }
                }
                if xi_order_is(q1, &h, k) {
                    return Ok(Self::with_modulus(k, h));
                }
            }
            Err(Error::InvalidInput(format!(
                "no degree-{k} lift of the GF(2^{k}) modulus has a Teichmuller generator"
            )))
        }

        fn with_modulus(k: u32, h: Vec<u8>) -> Self {
            let deg = k as usize;
            let xi: RingElem = {
                let mut e = vec![0u8; deg];
                e[1] = 1;
                e
            };
            // Powers xi^0 .. xi^(2^k - 2), then sort by reduced field index.
            let count = (1usize << k) - 1;
            let mut powers = Vec::with_capacity(count);
            let mut cur = {
                let mut e = vec![0u8; deg];
                e[0] = 1;
                e
            };
            for _ in 0..count {
                powers.push(cur.clone());
                cur = mul_mod(&cur, &xi, &h);
            }
            let mut teich: Vec<RingElem> = Vec::with_capacity(count + 1);
            teich.push(vec![0u8; deg]);
            teich.extend(powers);
            teich.sort_by_key(|e| reduced_index(e));
            let frob_of_power = (0..deg)
                .map(|j| {
                    let mut e = vec![0u8; 2 * j + 1];
                    e[2 * j] = 1;
                    rem_mod(&e, &h, deg)
                })
                .collect();
            GaloisRing { k, h, teich, frob_of_power }
        }

        pub fn q(&self) -> usize {
            1usize << self.k
        }

        pub fn teichmuller(&self) -> &[RingElem] {
            &self.teich
        }

        pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
            a.iter().zip(b).map(|(&x, &y)| (x + y) & 3).collect()
        }

        pub fn double(&self, a: &RingElem) -> RingElem {
            a.iter().map(|&x| (x << 1) & 3).collect()
        }

        pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
            mul_mod(a, b, &self.h)
        }

        /// Frobenius `sum c_j xi^j -> sum c_j xi^(2j)`: the generator of the
        /// Galois group over Z4, since xi and xi^2 are conjugate roots of h.
        fn frobenius(&self, a: &RingElem) -> RingElem {
            let deg = self.k as usize;
            let mut out = vec![0u8; deg];
            for (j, &c) in a.iter().enumerate() {
                if c != 0 {
                    for (o, &f) in out.iter_mut().zip(&self.frob_of_power[j]) {
                        *o = (*o + c * f) & 3;
                    }
                }
            }
            out
        }

        /// Ring trace down to Z4: sum of the Frobenius orbit.
        pub fn trace(&self, a: &RingElem) -> u8 {
            let mut term = a.clone();
            let mut sum = a.clone();
            for _ in 1..self.k {
                term = self.frobenius(&term);
                sum = self.add(&sum, &term);
            }
            debug_assert!(
                sum[1..].iter().all(|&c| c == 0),
                "ring trace must land in Z4"
            );
            sum[0]
        }
    }

    /// Canonical field index of a ring element's mod-2 reduction.
    fn reduced_index(a: &RingElem) -> u64 {
        a.iter().rev().fold(0u64, |acc, &c| (acc << 1) | u64::from(c & 1))
    }

    fn mul_mod(a: &RingElem, b: &RingElem, h: &[u8]) -> RingElem {
        let mut prod = vec![0u8; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) & 3;
            }
        }
        rem_mod(&prod, h, h.len() - 1)
    }

    /// Reduction modulo the monic `h` over Z4, result resized to `deg`.
    fn rem_mod(a: &[u8], h: &[u8], deg: usize) -> RingElem {
        let mut r = a.to_vec();
        while r.len() > deg {
            let lead = *r.last().unwrap();
            let top = r.len() - 1;
            if lead != 0 {
                let shift = top - (h.len() - 1);
                for (j, &hj) in h.iter().enumerate() {
                    let sub = (lead * hj) & 3;
                    r[shift + j] = (r[shift + j] + 4 - sub) & 3;
                }
            }
            debug_assert_eq!(r[top], 0);
            r.pop();
        }
        r.resize(deg, 0);
        r
    }

    /// True iff x has multiplicative order exactly `target` in Z4[x]/(h).
    fn xi_order_is(target: u64, h: &[u8], k: u32) -> bool {
        let deg = k as usize;
        let xi = {
            let mut e = vec![0u8; deg];
            if deg > 1 {
                e[1] = 1;
            }
            e
        };
        let one = {
            let mut e = vec![0u8; deg];
            e[0] = 1;
            e
        };
        let pow = |e: u64| -> RingElem {
            let mut acc = one.clone();
            let mut base = xi.clone();
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_mod(&acc, &base, h);
                }
                base = mul_mod(&base, &base, h);
                e >>= 1;
            }
            acc
        };
        if pow(target) != one {
            return false;
        }
        // Order divides target; rule out proper divisors via maximal ones.
        let mut d = 2;
        let mut t = target;
        let mut primes = Vec::new();
        while d * d <= t {
            if t % d == 0 {
                primes.push(d);
                while t % d == 0 {
                    t /= d;
                }
            }
            d += 1;
        }
        if t > 1 {
            primes.push(t);
        }
        primes.iter().all(|&pr| pow(target / pr) != one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lower_bound_examples() {
        assert_eq!(mub_lower_bound(6).unwrap(), 3);
        assert_eq!(mub_lower_bound(12).unwrap(), 4);
        assert_eq!(mub_lower_bound(7).unwrap(), 8);
        assert_eq!(mub_lower_bound(9).unwrap(), 10);
        assert_eq!(mub_lower_bound(16).unwrap(), 17);
        assert!(mub_lower_bound(1).is_err());
    }

    #[test]
    fn factorization_formatting() {
        assert_eq!(format_factorization(&factorize(6)), "2·3");
        assert_eq!(format_factorization(&factorize(12)), "2^2·3");
        assert_eq!(format_factorization(&factorize(7)), "7");
    }

    #[test]
    fn composite_dimension_is_rejected_with_factorization() {
        let err = build_complete(6).unwrap_err();
        assert_eq!(err.to_string(), "6 = 2·3 is not a prime power");
        assert!(build_complete(12).is_err());
        assert!(build_complete(1).is_err());
    }

    #[test]
    fn qubit_set_is_the_pauli_eigenbasis_triple() {
        let set = build_complete(2).unwrap();
        assert_eq!(set.bases().len(), 3);
        let r = 1.0 / 2.0f64.sqrt();
        // Basis 1 is the Hadamard pair, basis 2 the circular pair.
        let had = set.bases()[1].vectors();
        assert_abs_diff_eq!(had[0][0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(had[0][1].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(had[1][1].re, -r, epsilon = 1e-15);
        let circ = set.bases()[2].vectors();
        assert_abs_diff_eq!(circ[0][1].im, r, epsilon = 1e-15);
        assert_abs_diff_eq!(circ[1][1].im, -r, epsilon = 1e-15);
    }

    #[test]
    fn complete_sets_verify_for_all_supported_prime_powers() {
        for n in [2usize, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let set = build_complete(n).unwrap();
            assert_eq!(set.bases().len(), n + 1, "n = {n}");
            assert!(set.is_complete());
            let report = verify_mub(&set, 1e-10);
            assert!(
                report.pass,
                "n = {n}: orth {:.2e}, unb {:.2e}",
                report.max_orthonormality_violation, report.max_unbiasedness_violation
            );
        }
    }

    #[test]
    fn first_components_are_real_positive() {
        for n in [3usize, 4, 8, 9] {
            let set = build_complete(n).unwrap();
            for basis in set.bases() {
                for v in basis.vectors() {
                    let lead = v.iter().find(|z| z.norm() > 1e-14).unwrap();
                    assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
                }
            }
        }
    }

    #[test]
    fn prime_dimension_bases_diagonalize_shift_clock_products() {
        // In prime dimension p, basis a consists of eigenvectors of X Z^(2a):
        // the quadratic phase advances by 2am + a + b under m -> m + 1.
        for p in [3usize, 5] {
            let set = build_complete(p).unwrap();
            let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64);
            for a in 0..p {
                let basis = &set.bases()[a + 1];
                let c = (2 * a) % p;
                for v in basis.vectors() {
                    // w = X Z^c v, with X the cyclic shift |m> -> |m+1>.
                    let mut w = vec![Complex64::new(0.0, 0.0); p];
                    for m in 0..p {
                        let prev = (m + p - 1) % p;
                        w[m] = omega.powu((c * prev) as u32) * v[prev];
                    }
                    // Eigenvector test: w must be v up to a unimodular scalar.
                    let lambda = w[0] / v[0];
                    assert_abs_diff_eq!(lambda.norm(), 1.0, epsilon = 1e-12);
                    for m in 0..p {
                        assert!((w[m] - lambda * v[m]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn duplicate_standard_basis_fails_verification() {
        let set = build_complete(3).unwrap();
        let dup = MubSet::new(3, vec![set.bases()[0].clone(), set.bases()[0].clone()]).unwrap();
        let report = verify_mub(&dup, 1e-10);
        assert!(!report.pass);
        assert_abs_diff_eq!(report.max_unbiasedness_violation, 1.0 - 1.0 / 3.0, epsilon = 1e-15);
        assert!(report.worst_pair.is_some());
    }

    #[test]
    fn too_many_bases_are_rejected() {
        let set = build_complete(2).unwrap();
        let mut bases = set.bases().to_vec();
        bases.push(set.bases()[0].clone());
        assert!(MubSet::new(2, bases).is_err());
    }

    #[test]
    fn ragged_input_is_rejected() {
        let json = r#"{"n":2,"bases":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0]]]]}"#;
        assert!(serde_json::from_str::<MubSet>(json).is_err());
    }

    #[test]
    fn serialization_is_deterministic_and_round_trips() {
        let set = build_complete(4).unwrap();
        let a = serde_json::to_string(&set).unwrap();
        let b = serde_json::to_string(&build_complete(4).unwrap()).unwrap();
        assert_eq!(a, b);
        let back: MubSet = serde_json::from_str(&a).unwrap();
        assert_eq!(set, back);
        assert!(verify_mub(&back, 1e-10).pass);
    }

    #[test]
    fn unbiasedness_survives_a_global_unitary() {
        // Conjugating every basis by one unitary changes no overlap.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [3usize, 4] {
            // Random complex matrix, orthonormalized by Gram-Schmidt.
            let mut cols: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect();
            for i in 0..n {
                for j in 0..i {
                    let proj: Complex64 =
                        cols[j].iter().zip(&cols[i]).map(|(a, b)| a.conj() * b).sum();
                    let col_j = cols[j].clone();
                    for (x, y) in cols[i].iter_mut().zip(&col_j) {
                        *x -= proj * y;
                    }
                }
                let norm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for x in cols[i].iter_mut() {
                    *x /= norm;
                }
            }
            let set = build_complete(n).unwrap();
            let rotated: Vec<Basis> = set
                .bases()
                .iter()
                .map(|b| {
                    let vectors = b
                        .vectors()
                        .iter()
                        .map(|v| {
                            (0..n)
                                .map(|r| (0..n).map(|c| cols[c][r] * v[c]).sum())
                                .collect::<Vec<Complex64>>()
                        })
                        .collect();
                    Basis::new(n, vectors).unwrap()
                })
                .collect();
            let rotated_set = MubSet::new(n, rotated).unwrap();
            assert!(verify_mub(&rotated_set, 1e-10).pass, "n = {n}");
        }
    }
}
