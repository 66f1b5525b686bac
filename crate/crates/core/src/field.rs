//! Small finite fields `GF(p^k)` with a canonical, reproducible layout.
//!
//! Elements are polynomials over `GF(p)` reduced by a fixed monic irreducible
//! modulus of degree `k`. Everything downstream (MUB phase tables, MOLS
//! symbols) depends on two conventions pinned here:
//!
//! * the modulus is the lexicographically smallest monic irreducible of
//!   degree `k`, comparing coefficient lists constant term first (`k = 1`
//!   uses the modulus `x`);
//! * element `i` of [`FieldSpec::enumerate`] has coefficients equal to the
//!   base-`p` digits of `i`, constant term least significant, so index 0 is
//!   the additive identity and indices `0..p` are the prime subfield.
//!
//! Sizes are capped at `p^k <= 512`; the brute-force irreducibility test and
//! the exhaustive axiom checks in the tests are comfortable in that range.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Cap on the field order `p^k`.
pub const MAX_FIELD_ORDER: u64 = 512;
/// Cap on the extension degree `k`.
pub const MAX_EXTENSION_DEGREE: u32 = 8;

/// A concrete `GF(p^k)`: prime `p`, degree `k`, monic modulus with
/// coefficients listed constant term first (length `k + 1`, leading 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u64,
    k: u32,
    modulus: Vec<u64>,
}

/// Field element: coefficient vector of length `k`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coeffs: Vec<u64>,
}

impl FieldElem {
    #[must_use]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial arithmetic over GF(p), dense coefficient vectors, constant first.
mod poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() - 1 >= dm && !(r.len() == 1 && r[0] == 0) {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let shift = r.len() - 1 - dm;
                for (j, &mj) in m.iter().enumerate() {
                    let idx = j + shift;
                    let sub = (lead * mj) % p;
                    r[idx] = (r[idx] + p * p - sub) % p;
                }
            }
            trim(&mut r);
            if r.len() - 1 < dm {
                break;
            }
            if r.iter().all(|&c| c == 0) {
                break;
            }
        }
        trim(&mut r);
        r
    }

    pub fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

/// True iff the monic polynomial (constant first, leading 1) is irreducible
/// over GF(p), by trial division with every monic polynomial of degree at
/// most half the candidate's degree.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if f[0] == 0 {
        // divisible by x
        return deg == 1;
    }
    for d in 1..=(deg / 2) {
        let count = p.pow(d as u32);
        for idx in 0..count {
            // monic divisor of degree d, lower coefficients from the digits of idx
            let mut g = vec![0u64; d + 1];
            let mut rest = idx;
            for coeff in g.iter_mut().take(d) {
                *coeff = rest % p;
                rest /= p;
            }
            g[d] = 1;
            if poly::is_zero(&poly::rem(f, &g, p)) {
                return false;
            }
        }
    }
    true
}

/// Constructs `GF(p^k)` with the canonical modulus.
pub fn make_field(p: u64, k: u32) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k < 1 || k > MAX_EXTENSION_DEGREE {
        return Err(Error::BadExtensionDegree(k, MAX_EXTENSION_DEGREE));
    }
    let q = (p as u128).pow(k);
    if q > MAX_FIELD_ORDER as u128 {
        return Err(Error::FieldTooLarge(q as u64, MAX_FIELD_ORDER));
    }
    if k == 1 {
        return Ok(FieldSpec { p, k, modulus: vec![0, 1] });
    }
    // Lexicographic scan, constant term first: candidate i has coefficient
    // c_j = digit of i with c_0 most significant, so smaller i means
    // lexicographically smaller (c_0, ..., c_{k-1}).
    let total = p.pow(k);
    for i in 0..total {
        let mut coeffs = vec![0u64; (k + 1) as usize];
        let mut rest = i;
        for j in (0..k as usize).rev() {
            coeffs[j] = rest % p;
            rest /= p;
        }
        coeffs[k as usize] = 1;
        if is_irreducible(&coeffs, p) {
            return Ok(FieldSpec { p, k, modulus: coeffs });
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

impl FieldSpec {
    #[inline]
    #[must_use]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Field order `p^k`.
    #[must_use]
    pub fn q(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// Modulus coefficients, constant term first, leading coefficient 1.
    #[must_use]
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coeffs: vec![0; self.k as usize] }
    }

    pub fn one(&self) -> FieldElem {
        self.element(1).expect("1 < q")
    }

    /// Element at a canonical index: coefficients are the base-p digits of
    /// `index`, constant term least significant.
    pub fn element(&self, index: u64) -> Result<FieldElem> {
        if index >= self.q() {
            return Err(Error::IndexOutOfRange(format!(
                "element index {index} >= field order {}",
                self.q()
            )));
        }
        let mut coeffs = vec![0u64; self.k as usize];
        let mut rest = index;
        for c in coeffs.iter_mut() {
            *c = rest % self.p;
            rest /= self.p;
        }
        Ok(FieldElem { coeffs })
    }

    /// Canonical index of an element; inverse of [`FieldSpec::element`].
    pub fn index(&self, a: &FieldElem) -> Result<u64> {
        self.check(a)?;
        let mut idx = 0u64;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        Ok(idx)
    }

    /// All `q` elements in canonical order, the additive identity first.
    pub fn enumerate(&self) -> Vec<FieldElem> {
        (0..self.q()).map(|i| self.element(i).expect("index < q")).collect()
    }

    fn check(&self, a: &FieldElem) -> Result<()> {
        if a.coeffs.len() != self.k as usize || a.coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::ForeignElement { p: self.p, k: self.k });
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        Ok(FieldElem { coeffs })
    }

    pub fn neg(&self, a: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        let coeffs = a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect();
        Ok(FieldElem { coeffs })
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        let prod = poly::mul(&a.coeffs, &b.coeffs, self.p);
        let mut red = poly::rem(&prod, &self.modulus, self.p);
        red.resize(self.k as usize, 0);
        Ok(FieldElem { coeffs: red })
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> Result<FieldElem> {
        self.check(a)?;
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplicative inverse via `a^(q-2)`.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        if a.coeffs.iter().all(|&c| c == 0) {
            return Err(Error::DivisionByZero(self.q()));
        }
        self.pow(a, self.q() - 2)
    }

    /// Absolute trace `a + a^p + ... + a^(p^(k-1))`, returned as an element
    /// of the prime subfield, i.e. an integer in `0..p`.
    pub fn absolute_trace(&self, a: &FieldElem) -> Result<u64> {
        self.check(a)?;
        let mut term = a.clone();
        let mut sum = a.clone();
        for _ in 1..self.k {
            term = self.pow(&term, self.p)?;
            sum = self.add(&sum, &term)?;
        }
        debug_assert!(
            sum.coeffs[1..].iter().all(|&c| c == 0),
            "absolute trace must land in the prime subfield"
        );
        Ok(sum.coeffs[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli_match_hand_computation() {
        // Degree 1 is the polynomial x regardless of p.
        assert_eq!(make_field(5, 1).unwrap().modulus(), &[0, 1]);
        // Over GF(2) the unique irreducible quadratic is x^2 + x + 1.
        assert_eq!(make_field(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // Over GF(3), x^2 + 1 has no roots and precedes every other candidate.
        assert_eq!(make_field(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // Constant-term-first comparison puts x^3 + x^2 + 1 before x^3 + x + 1:
        // (1,0,1) < (1,1,0) coefficientwise from the left.
        assert_eq!(make_field(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_field(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(make_field(1, 1), Err(Error::NotPrime(1))));
        assert!(matches!(make_field(2, 0), Err(Error::BadExtensionDegree(0, _))));
        assert!(matches!(make_field(3, 6), Err(Error::FieldTooLarge(729, _))));
        // 512 = 2^9 needs k = 9 which exceeds the degree cap.
        assert!(matches!(make_field(2, 9), Err(Error::BadExtensionDegree(9, _))));
    }

    #[test]
    fn enumeration_starts_at_zero_and_round_trips_indices() {
        let f = make_field(3, 2).unwrap();
        let elems = f.enumerate();
        assert_eq!(elems.len(), 9);
        assert_eq!(elems[0], f.zero());
        assert_eq!(elems[1], f.one());
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(f.index(e).unwrap(), i as u64);
        }
    }

    /// Exhaustive field axioms for every field used by the MUB constructions.
    #[test]
    fn axioms_hold_exhaustively_for_small_fields() {
        for (p, k) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2)] {
            let f = make_field(p, k).unwrap();
            let elems = f.enumerate();
            for a in &elems {
                assert_eq!(f.add(a, &f.zero()).unwrap(), *a);
                assert_eq!(f.mul(a, &f.one()).unwrap(), *a);
                assert_eq!(f.add(a, &f.neg(a).unwrap()).unwrap(), f.zero());
                if *a != f.zero() {
                    let ai = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, &ai).unwrap(), f.one(), "inverse in GF({})", f.q());
                }
                for b in &elems {
                    assert_eq!(f.add(a, b).unwrap(), f.add(b, a).unwrap());
                    assert_eq!(f.mul(a, b).unwrap(), f.mul(b, a).unwrap());
                    for c in &elems {
                        let left = f.mul(a, &f.add(b, c).unwrap()).unwrap();
                        let right = f.add(&f.mul(a, b).unwrap(), &f.mul(a, c).unwrap()).unwrap();
                        assert_eq!(left, right, "distributivity in GF({})", f.q());
                        let massoc_l = f.mul(&f.mul(a, b).unwrap(), c).unwrap();
                        let massoc_r = f.mul(a, &f.mul(b, c).unwrap()).unwrap();
                        assert_eq!(massoc_l, massoc_r);
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let f = make_field(7, 1).unwrap();
        assert!(matches!(f.inv(&f.zero()), Err(Error::DivisionByZero(7))));
    }

    #[test]
    fn gf4_trace_table_is_0011() {
        // tr(a) = a + a^2 over GF(4): elements 0, 1, w, w+1 give 0, 0, 1, 1.
        let f = make_field(2, 2).unwrap();
        let traces: Vec<u64> = f
            .enumerate()
            .iter()
            .map(|a| f.absolute_trace(a).unwrap())
            .collect();
        assert_eq!(traces, vec![0, 0, 1, 1]);
    }

    #[test]
    fn trace_is_additive_surjective_and_matches_brute_force() {
        for (p, k) in [(2u64, 2u32), (2, 3), (3, 2), (2, 4)] {
            let f = make_field(p, k).unwrap();
            let elems = f.enumerate();
            let mut hit = vec![false; p as usize];
            for a in &elems {
                // brute force: sum the Frobenius orbit directly
                let mut term = a.clone();
                let mut sum = a.clone();
                for _ in 1..k {
                    let mut pw = f.one();
                    for _ in 0..p {
                        pw = f.mul(&pw, &term).unwrap();
                    }
                    term = pw;
                    sum = f.add(&sum, &term).unwrap();
                }
                let direct = f.index(&sum).unwrap();
                let tr = f.absolute_trace(a).unwrap();
                assert_eq!(tr, direct);
                hit[tr as usize] = true;
                for b in &elems {
                    let tr_sum = f.absolute_trace(&f.add(a, b).unwrap()).unwrap();
                    assert_eq!(tr_sum, (f.absolute_trace(a).unwrap() + f.absolute_trace(b).unwrap()) % p);
                }
            }
            assert!(hit.iter().all(|&h| h), "trace onto GF({p}) must be surjective");
        }
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let f9 = make_field(3, 2).unwrap();
        let bad = FieldElem { coeffs: vec![5, 0] };
        assert!(matches!(f9.add(&bad, &f9.zero()), Err(Error::ForeignElement { .. })));
        let wrong_len = FieldElem { coeffs: vec![1] };
        assert!(matches!(f9.mul(&wrong_len, &f9.one()), Err(Error::ForeignElement { .. })));
    }

    #[test]
    fn largest_supported_field_constructs() {
        let f = make_field(2, 8).unwrap();
        assert_eq!(f.q(), 256);
        let x = f.element(2).unwrap();
        // x^(q-1) = 1 for any nonzero element
        assert_eq!(f.pow(&x, 255).unwrap(), f.one());
    }
}
