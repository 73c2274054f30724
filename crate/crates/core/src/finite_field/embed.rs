use super::{FieldElement, FieldError, FiniteField, Poly};

/// A fixed embedding GF(p^s) -> GF(p^m), `s | m`.
///
/// The generator of the small field is sent to the root of its modulus in the big
/// field with the smallest encoding; equal degrees give the identity.
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: FiniteField,
    big: FiniteField,
    /// Coordinates over GF(p) of `beta^i`, `i < s`, where `beta` is the image of the generator.
    basis: Vec<Vec<u64>>,
    beta: FieldElement,
}

impl Embedding {
    pub fn new(sub: &FiniteField, big: &FiniteField) -> Result<Self, FieldError> {
        if sub.characteristic() != big.characteristic() {
            return Err(FieldError::FieldMismatch);
        }
        let (s, m) = (sub.degree(), big.degree());
        if m % s != 0 {
            return Err(FieldError::NotASubfield { s, m });
        }
        let beta = if s == m {
            big.variable()
        } else if s == 1 {
            big.zero()
        } else {
            let modulus = Poly::new(big, sub.modulus().iter().map(|&c| FieldElement(c)).collect());
            *modulus.roots()?.first().expect("subfield modulus splits in the extension")
        };
        let mut basis = Vec::with_capacity(s as usize);
        let mut pw = big.one();
        for _ in 0..s {
            basis.push(big.coeffs(pw));
            pw = big.mul(pw, beta);
        }
        Ok(Embedding { sub: sub.clone(), big: big.clone(), basis, beta })
    }

    pub fn sub(&self) -> &FiniteField {
        &self.sub
    }
    pub fn big(&self) -> &FiniteField {
        &self.big
    }
    /// Relative degree `[big : sub]`.
    pub fn relative_degree(&self) -> u32 {
        self.big.degree() / self.sub.degree()
    }

    pub fn map(&self, x: FieldElement) -> FieldElement {
        if self.sub.degree() == 1 || self.sub.degree() == self.big.degree() {
            return x;
        }
        let b = &self.big;
        self.sub
            .coeffs(x)
            .iter()
            .rev()
            .fold(b.zero(), |acc, &c| b.add(b.mul(acc, self.beta), FieldElement(c)))
    }

    pub fn map_poly(&self, f: &Poly) -> Poly {
        Poly::new(&self.big, f.coeffs().iter().map(|&c| self.map(c)).collect())
    }

    /// Preimage of `y` when it lies in the image of the small field.
    pub fn preimage(&self, y: FieldElement) -> Option<FieldElement> {
        let s = self.sub.degree() as usize;
        let m = self.big.degree() as usize;
        if s == m {
            return Some(y);
        }
        if s == 1 {
            return self.big.is_prime_subfield(y).then_some(y);
        }
        let p = self.big.characteristic();
        let target = self.big.coeffs(y);
        // rows: coordinates, columns: unknown c_0..c_{s-1} plus the right-hand side
        let mut a: Vec<Vec<u64>> = (0..m)
            .map(|r| {
                let mut row: Vec<u64> = (0..s).map(|c| self.basis[c][r]).collect();
                row.push(target[r]);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..s {
            let Some(pr) = (row..m).find(|&r| a[r][col] != 0) else { continue };
            a.swap(row, pr);
            let inv = crate::arith::pow_mod(a[row][col], p - 2, p);
            for v in a[row].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..m {
                if r != row && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..=s {
                        a[r][c] = (a[r][c] + p * p - f * a[row][c] % p) % p;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if a[row..].iter().any(|r| r[s] != 0) {
            return None;
        }
        let mut c = vec![0u64; s];
        for (i, &col) in pivots.iter().enumerate() {
            c[col] = a[i][s];
        }
        Some(self.sub.from_coeffs(&c))
    }

    /// Relative norm: the product of the conjugates of `x` over the small field.
    pub fn norm(&self, x: FieldElement) -> FieldElement {
        let s = self.sub.degree();
        let b = &self.big;
        let mut acc = b.one();
        for j in 0..self.relative_degree() {
            acc = b.mul(acc, b.frobenius(x, s * j));
        }
        self.preimage(acc).expect("norm lies in the subfield")
    }
}

/// Norm from GF(p^m) down to GF(p^s), returning the subfield together with the value.
pub fn norm_to_subfield(
    field: &FiniteField,
    x: FieldElement,
    s: u32,
) -> Result<(FiniteField, FieldElement), FieldError> {
    let m = field.degree();
    if s == 0 || m % s != 0 {
        return Err(FieldError::NotASubfield { s, m });
    }
    let sub = FiniteField::with_limit(field.characteristic(), s, field.limit())?;
    let emb = Embedding::new(&sub, field)?;
    Ok((sub, emb.norm(x)))
}

/// Roots of `f` in the degree-`s` extension of its coefficient field, with multiplicity,
/// ascending by encoding. The embedding used to lift the coefficients is returned too.
pub fn roots_in_extension(f: &Poly, s: u32) -> Result<(Embedding, Vec<FieldElement>), FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let ext = f.field().extension(s)?;
    let emb = Embedding::new(f.field(), &ext)?;
    let roots = emb.map_poly(f).roots()?;
    Ok((emb, roots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::make_field;

    #[test]
    fn norm_examples() {
        let f9 = make_field(3, 2).unwrap();
        let g = f9.primitive_element();
        let (f3, n) = norm_to_subfield(&f9, g, 1).unwrap();
        assert_eq!(n, f3.from_i64(-1));
        assert_eq!(norm_to_subfield(&f9, f9.one(), 1).unwrap().1, FieldElement(1));
        assert_eq!(norm_to_subfield(&f9, f9.zero(), 1).unwrap().1, FieldElement(0));
        let f8 = make_field(2, 3).unwrap();
        assert!(matches!(norm_to_subfield(&f8, f8.one(), 2), Err(FieldError::NotASubfield { .. })));
    }

    #[test]
    fn roots_examples() {
        let f3 = make_field(3, 1).unwrap();
        let f = Poly::from_ints(&f3, &[1, 0, 1]);
        let (emb, r) = roots_in_extension(&f, 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(emb.big().frobenius(r[0], 1), r[1]);
        assert!(roots_in_extension(&f, 1).unwrap().1.is_empty());
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(roots_in_extension(&Poly::from_ints(&f7, &[-1, 1]), 1).unwrap().1, vec![FieldElement(1)]);
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let f4 = make_field(2, 2).unwrap();
        let f16 = make_field(2, 4).unwrap();
        let e = Embedding::new(&f4, &f16).unwrap();
        for a in f4.elements() {
            assert_eq!(e.preimage(e.map(a)), Some(a));
            for b in f4.elements() {
                assert_eq!(e.map(f4.mul(a, b)), f16.mul(e.map(a), e.map(b)));
                assert_eq!(e.map(f4.add(a, b)), f16.add(e.map(a), e.map(b)));
            }
        }
        let outside = f16.elements().filter(|&y| e.preimage(y).is_none()).count();
        assert_eq!(outside, 12);
    }
}
