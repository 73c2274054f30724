use std::cmp::Ordering;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{FieldElement, FieldError, FiniteField};
use crate::arith;

/// Dense univariate polynomial, coefficients low-to-high with no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: FiniteField,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {:?}", self, self.field)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let ext = self.field.degree() > 1;
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.0 == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = self.field.format(c);
            let cs = if ext && cs.contains(['+', 'a']) && i > 0 { format!("({cs})") } else { cs };
            match (i, c.0 == 1) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{cs}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{cs}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: &FiniteField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.0 == 0) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Reduces integer coefficients (low-to-high) into the prime subfield.
    pub fn from_ints(field: &FiniteField, c: &[i64]) -> Self {
        Self::new(field, c.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn zero(field: &FiniteField) -> Self {
        Self::new(field, Vec::new())
    }
    pub fn one(field: &FiniteField) -> Self {
        Self::constant(field, field.one())
    }
    pub fn constant(field: &FiniteField, c: FieldElement) -> Self {
        Self::new(field, vec![c])
    }
    /// `x - a`.
    pub fn linear(field: &FiniteField, a: FieldElement) -> Self {
        Self::new(field, vec![field.neg(a), field.one()])
    }
    pub fn x(field: &FiniteField) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement(0))
    }
    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].0 == 1
    }
    pub fn lead(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement(0))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![FieldElement(0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one(&self.field);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly), FieldError> {
        let dd = d.degree().ok_or(FieldError::ZeroPolynomial)?;
        let f = &self.field;
        let inv = f.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut q = vec![FieldElement(0); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + dd], inv);
            q[k] = c;
            if c.0 == 0 {
                continue;
            }
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(c, dj));
            }
        }
        r.truncate(dd);
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly, FieldError> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; panics in debug builds if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly, FieldError> {
        let (q, r) = self.divrem(d)?;
        debug_assert!(r.is_zero(), "inexact division");
        Ok(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).expect("nonzero lead");
        self.scale(inv)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        Poly::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_i64((i as u64 % f.characteristic()) as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let f = &self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn mul_mod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m).expect("nonzero modulus")
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut r = Poly::one(&self.field).rem(m).expect("nonzero modulus");
        let mut b = self.rem(m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_mod(&b, m);
            }
            b = b.mul_mod(&b, m);
            e >>= 1;
        }
        r
    }

    /// Roots in the coefficient field, repeated by multiplicity, ascending by encoding.
    pub fn roots(&self) -> Result<Vec<FieldElement>, FieldError> {
        let mut out = Vec::new();
        for (g, e) in factor(self)? {
            if g.degree() == Some(1) {
                let r = self.field.neg(g.coeff(0));
                out.extend(std::iter::repeat(r).take(e as usize));
            }
        }
        out.sort();
        Ok(out)
    }

    fn sort_key(&self) -> (usize, Vec<u64>) {
        (self.coeffs.len(), self.coeffs.iter().map(|c| c.0).collect())
    }
}

/// Whether the polynomial is irreducible over its coefficient field.
pub fn is_irreducible(f: &Poly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let f = f.monic();
    let q = f.field.order();
    let x = Poly::x(&f.field);
    let frob = |k: usize| {
        let mut h = x.clone();
        for _ in 0..k {
            h = h.pow_mod(q, &f);
        }
        h
    };
    if frob(n).sub(&x).rem(&f).map(|r| !r.is_zero()).unwrap_or(true) {
        return false;
    }
    arith::factorize(n as u64)
        .into_iter()
        .all(|(l, _)| f.gcd(&frob(n / l as usize).sub(&x)).is_one())
}

/// Monic irreducible factorization with multiplicities, sorted by degree and then
/// by coefficient encodings from the constant term up. Constants factor as `[]`.
pub fn factor(f: &Poly) -> Result<Vec<(Poly, u32)>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_f1e1d);
    let mut out = Vec::new();
    for (g, e) in squarefree(&f.monic()) {
        for (h, d) in distinct_degree(&g) {
            for piece in equal_degree(&h, d, &mut rng) {
                out.push((piece, e));
            }
        }
    }
    out.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()).then(Ordering::Equal));
    Ok(out)
}

fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let fld = &f.field;
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y).unwrap();
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w).unwrap();
        i += 1;
    }
    if !c.is_one() {
        let p = fld.characteristic() as usize;
        let m = fld.degree();
        let root: Vec<FieldElement> = c
            .coeffs
            .iter()
            .step_by(p)
            .map(|&a| fld.frobenius(a, m - 1))
            .collect();
        let pc = Poly::new(fld, root);
        for (g, e) in squarefree(&pc) {
            out.push((g, e * p as u32));
        }
    }
    out
}

fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let q = f.field.order();
    let x = Poly::x(&f.field);
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut i = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.pow_mod(q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.div_exact(&g).unwrap();
            h = h.rem(&rest).unwrap();
            out.push((g, i));
        }
        i += 1;
    }
    if let Some(d) = rest.degree().filter(|&d| d > 0) {
        out.push((rest, d));
    }
    out
}

fn equal_degree(f: &Poly, d: usize, rng: &mut StdRng) -> Vec<Poly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let fld = &f.field;
    let q = fld.order();
    loop {
        let a = Poly::new(fld, (0..n).map(|_| FieldElement(rng.gen_range(0..q))).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = a.gcd(f);
        let split = if !g.is_one() {
            g
        } else if fld.characteristic() == 2 {
            // absolute trace to GF(2)
            let steps = fld.degree() as usize * d;
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..steps {
                t = t.mul_mod(&t, f);
                acc = acc.add(&t);
            }
            f.gcd(&acc)
        } else {
            // a^((q^d - 1)/2) as (a * a^q * ... * a^(q^(d-1)))^((q-1)/2)
            let mut t = a.clone();
            let mut prod = a.clone();
            for _ in 1..d {
                t = t.pow_mod(q, f);
                prod = prod.mul_mod(&t, f);
            }
            let b = prod.pow_mod((q - 1) / 2, f);
            f.gcd(&b.sub(&Poly::one(fld)))
        };
        let k = split.degree().unwrap_or(0);
        if k > 0 && k < n {
            let other = f.div_exact(&split).unwrap();
            let mut out = equal_degree(&split, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// Whether `gcd(f, g) = 1`.
pub fn coprimality_check(f: &Poly, g: &Poly) -> bool {
    f.gcd(g).is_one()
}
