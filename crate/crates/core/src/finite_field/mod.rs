//! Exact arithmetic in GF(p^m) and univariate polynomials over it.
//!
//! Elements are plain `Copy` handles: the integer `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`
//! encodes the residue `c_0 + c_1 a + ...` modulo the field's defining polynomial.
//! For a prime field this is the usual representative in `0..p`.

mod embed;
mod poly;

pub use embed::{norm_to_subfield, roots_in_extension, Embedding};
pub use poly::{coprimality_check, factor, Poly};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith;

/// Default bound on the field size `q`.
pub const DEFAULT_FIELD_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of size {p}^{m} exceeds the configured limit {limit}")]
    SizeLimitExceeded { p: u64, m: u32, limit: u64 },
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("degree {s} does not divide {m}, so GF(p^{s}) is not a subfield")]
    NotASubfield { s: u32, m: u32 },
    #[error("operation undefined on the zero element")]
    ZeroElement,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("element encoding {0} is out of range")]
    BadEncoding(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub fn encoding(self) -> u64 {
        self.0
    }
}

struct Inner {
    p: u64,
    m: u32,
    q: u64,
    /// Monic defining polynomial over GF(p), low-to-high, length `m + 1`.
    modulus: Vec<u64>,
    limit: u64,
    primitive: OnceLock<FieldElement>,
}

/// The field GF(p^m). Cheap to clone.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<Inner>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.m == other.inner.m
    }
}
impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.inner.p, self.inner.m)
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.inner.q)
    }
}

/// `make_field(p, m)` with the default size limit.
pub fn make_field(p: u64, m: u32) -> Result<FiniteField, FieldError> {
    FiniteField::with_limit(p, m, DEFAULT_FIELD_LIMIT)
}

impl FiniteField {
    pub fn new(p: u64, m: u32) -> Result<Self, FieldError> {
        Self::with_limit(p, m, DEFAULT_FIELD_LIMIT)
    }

    /// Builds GF(p^m) using the lexicographically smallest monic irreducible
    /// modulus, comparing coefficient vectors from the constant term upward.
    pub fn with_limit(p: u64, m: u32, limit: u64) -> Result<Self, FieldError> {
        if m == 0 {
            return Err(FieldError::BadDegree);
        }
        if !arith::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let q = match arith::checked_pow(p, m) {
            Some(q) if q <= limit => q,
            _ => return Err(FieldError::SizeLimitExceeded { p, m, limit }),
        };
        let prime = Self::raw(p, 1, p, vec![0, 1], limit);
        if m == 1 {
            return Ok(prime);
        }
        let modulus = smallest_irreducible(&prime, m);
        Ok(Self::raw(p, m, q, modulus, limit))
    }

    fn raw(p: u64, m: u32, q: u64, modulus: Vec<u64>, limit: u64) -> Self {
        FiniteField {
            inner: Arc::new(Inner { p, m, q, modulus, limit, primitive: OnceLock::new() }),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }
    pub fn degree(&self) -> u32 {
        self.inner.m
    }
    pub fn order(&self) -> u64 {
        self.inner.q
    }
    pub fn limit(&self) -> u64 {
        self.inner.limit
    }
    /// Defining polynomial over GF(p), low-to-high, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    /// GF(q^s) for this field's q, inheriting the size limit.
    pub fn extension(&self, s: u32) -> Result<FiniteField, FieldError> {
        if s == 0 {
            return Err(FieldError::BadDegree);
        }
        if s == 1 {
            return Ok(self.clone());
        }
        Self::with_limit(self.inner.p, self.inner.m * s, self.inner.limit)
    }

    pub fn prime_field(&self) -> FiniteField {
        if self.inner.m == 1 {
            return self.clone();
        }
        Self::raw(self.inner.p, 1, self.inner.p, vec![0, 1], self.inner.limit)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, v: i64) -> FieldElement {
        let p = self.inner.p as i64;
        FieldElement(v.rem_euclid(p) as u64)
    }

    pub fn from_encoding(&self, n: u64) -> Result<FieldElement, FieldError> {
        if n < self.inner.q {
            Ok(FieldElement(n))
        } else {
            Err(FieldError::BadEncoding(n))
        }
    }

    /// The class of the polynomial variable; equals 0 in a prime field.
    pub fn variable(&self) -> FieldElement {
        if self.inner.m == 1 {
            FieldElement(0)
        } else {
            FieldElement(self.inner.p)
        }
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let p = self.inner.p;
        let mut n = a.0;
        let mut out = Vec::with_capacity(self.inner.m as usize);
        for _ in 0..self.inner.m {
            out.push(n % p);
            n /= p;
        }
        out
    }

    pub fn from_coeffs(&self, c: &[u64]) -> FieldElement {
        assert!(c.len() <= self.inner.m as usize, "too many coefficients");
        let p = self.inner.p;
        let mut n = 0u64;
        for &ci in c.iter().rev() {
            n = n * p + ci % p;
        }
        FieldElement(n)
    }

    pub fn is_zero(&self, a: FieldElement) -> bool {
        a.0 == 0
    }

    /// True when the element lies in the prime subfield.
    pub fn is_prime_subfield(&self, a: FieldElement) -> bool {
        a.0 < self.inner.p
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.inner.p;
        if self.inner.m == 1 {
            return FieldElement((a.0 + b.0) % p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut n = 0u64;
        let mut place = 1u64;
        for _ in 0..self.inner.m {
            n += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(n)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.inner.p;
        if self.inner.m == 1 {
            return FieldElement((p - a.0) % p);
        }
        let mut x = a.0;
        let mut n = 0u64;
        let mut place = 1u64;
        for _ in 0..self.inner.m {
            n += ((p - x % p) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(n)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.inner.p;
        if self.inner.m == 1 {
            return FieldElement(((a.0 as u128 * b.0 as u128) % p as u128) as u64);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let m = self.inner.m as usize;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let md = &self.inner.modulus;
        for k in (m..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..m {
                // x^k = -sum md[i] x^{k-m+i}
                let t = c * md[i] % p;
                prod[k - m + i] = (prod[k - m + i] + p - t) % p;
            }
        }
        self.from_coeffs(&prod[..m])
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut r = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Power with a signed exponent; the base must be nonzero when `e < 0`.
    pub fn pow_signed(&self, a: FieldElement, e: i64) -> Result<FieldElement, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        if self.inner.m == 1 {
            let p = self.inner.p as i128;
            let (mut r0, mut r1) = (p, a.0 as i128);
            let (mut s0, mut s1) = (0i128, 1i128);
            while r1 != 0 {
                let t = r0 / r1;
                (r0, r1) = (r1, r0 - t * r1);
                (s0, s1) = (s1, s0 - t * s1);
            }
            return Ok(FieldElement(s0.rem_euclid(p) as u64));
        }
        Ok(self.pow(a, self.inner.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        let mut x = a;
        for _ in 0..(k % self.inner.m) {
            x = self.pow(x, self.inner.p);
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.inner.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.inner.q).map(FieldElement)
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElement) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        let mut n = self.inner.q - 1;
        for (l, _) in arith::factorize(self.inner.q - 1) {
            while n % l == 0 && self.pow(a, n / l) == self.one() {
                n /= l;
            }
        }
        Ok(n)
    }

    /// Smallest-encoding generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElement {
        *self.inner.primitive.get_or_init(|| {
            let n = self.inner.q - 1;
            if n == 1 {
                return self.one();
            }
            let primes = arith::factorize(n);
            self.nonzero_elements()
                .find(|&a| primes.iter().all(|&(l, _)| self.pow(a, n / l) != self.one()))
                .expect("multiplicative group of a finite field is cyclic")
        })
    }

    /// Canonical element of exact order `n`, when `n | q - 1`.
    pub fn element_of_order(&self, n: u64) -> Option<FieldElement> {
        let total = self.inner.q - 1;
        if n == 0 || total % n != 0 {
            return None;
        }
        Some(self.pow(self.primitive_element(), total / n))
    }

    /// Whether `x` is an `r`-th power in the field: `x^((q-1)/gcd(r, q-1)) = 1`.
    pub fn power_residue(&self, x: FieldElement, r: u64) -> Result<bool, FieldError> {
        if x.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        let n = self.inner.q - 1;
        let g = arith::gcd(r, n);
        Ok(self.pow(x, n / g) == self.one())
    }

    /// Baby-step giant-step logarithm of `x` to the base `g`, where `g` has order `n`.
    /// Returns `None` when `x` is not in the subgroup generated by `g`.
    pub fn discrete_log(&self, g: FieldElement, n: u64, x: FieldElement) -> Option<u64> {
        if x.0 == 0 || n == 0 {
            return None;
        }
        let step = (n as f64).sqrt().ceil() as u64 + 1;
        let mut table = HashMap::with_capacity(step as usize);
        let mut cur = self.one();
        for j in 0..step {
            table.entry(cur).or_insert(j);
            cur = self.mul(cur, g);
        }
        let giant = self.inv(self.pow(g, step)).ok()?;
        let mut y = x;
        for i in 0..=step {
            if let Some(&j) = table.get(&y) {
                let l = (i * step + j) % n;
                return Some(l);
            }
            y = self.mul(y, giant);
        }
        None
    }

    /// Human-readable form: an integer in a prime field, otherwise a polynomial in `a`.
    pub fn format(&self, x: FieldElement) -> String {
        if self.inner.m == 1 {
            return x.0.to_string();
        }
        let c = self.coeffs(x);
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let t = match (i, ci) {
                (0, _) => ci.to_string(),
                (1, 1) => "a".to_string(),
                (1, _) => format!("{ci}*a"),
                (_, 1) => format!("a^{i}"),
                _ => format!("{ci}*a^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

fn smallest_irreducible(prime: &FiniteField, m: u32) -> Vec<u64> {
    let p = prime.characteristic();
    let count = p.pow(m);
    for n in 0..count {
        // digits of n, most significant first, are c_0, c_1, ..., c_{m-1}
        let mut digits = vec![0u64; m as usize];
        let mut t = n;
        for k in (0..m as usize).rev() {
            digits[k] = t % p;
            t /= p;
        }
        if digits[0] == 0 {
            continue;
        }
        let mut coeffs: Vec<FieldElement> = digits.iter().map(|&d| FieldElement(d)).collect();
        coeffs.push(prime.one());
        let f = Poly::new(prime, coeffs);
        if poly::is_irreducible(&f) {
            let mut out = digits;
            out.push(1);
            return out;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
