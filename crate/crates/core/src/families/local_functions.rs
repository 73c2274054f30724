//! Direct evaluation of the genus-4 loop values: each loop is represented on each
//! component by a ratio of linear forms in `X, Y, Z, W`, pulled back along the
//! component's parametrization and evaluated on the divisor with resultants.

use super::genus4::{row_divisor, Genus4, MZW, XY, ZW};
use crate::descent::Place;
use crate::finite_field::{FieldElement, FieldError, FiniteField, Poly};

type Form = [FieldElement; 4];

/// `(numerator, denominator)` of loop `j` on component `v`, if the loop passes through it.
fn loop_function(l: &FiniteField, i: FieldElement, j: usize, v: usize) -> Option<(Form, Form)> {
    let (z, o, m) = (l.zero(), l.one(), l.from_i64(-1));
    let i = if j == 3 { l.neg(i) } else { i };
    let mi = l.neg(i);
    match (j, v) {
        (0, XY) => Some(([o, z, o, z], [m, z, o, z])),
        (0, ZW) => Some(([m, z, o, z], [o, z, o, z])),
        (1, ZW) => Some(([z, m, o, z], [m, z, o, z])),
        (1, MZW) => Some(([m, z, o, z], [z, o, o, z])),
        (2 | 3, XY) => Some(([mi, z, o, z], [m, z, o, z])),
        (2 | 3, ZW) => Some(([z, m, o, z], [z, z, o, z])),
        (2 | 3, MZW) => Some(([o, z, z, z], [mi, z, o, z])),
        _ => None,
    }
}

/// `(X, Y, Z, W)` along each component, scaled to polynomials in `x`.
fn parametrization(l: &FiniteField, v: usize) -> [Poly; 4] {
    let p = |c: &[i64]| Poly::from_ints(l, c);
    match v {
        XY => [p(&[0, 1]), p(&[0, 1]), p(&[0, 0, 1]), p(&[1])],
        ZW => [p(&[0, 0, 1]), p(&[1]), p(&[0, 1]), p(&[0, 1])],
        _ => [p(&[0, 0, 1]), p(&[-1]), p(&[0, -1]), p(&[0, 1])],
    }
}

fn pull_back(l: &FiniteField, form: &Form, v: usize) -> Poly {
    let par = parametrization(l, v);
    let mut acc = Poly::zero(l);
    for (c, p) in form.iter().zip(&par) {
        acc = acc.add(&p.scale(*c));
    }
    acc
}

/// Determinant over a field by elimination.
fn det(l: &FiniteField, mut a: Vec<Vec<FieldElement>>) -> FieldElement {
    let n = a.len();
    let mut acc = l.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !l.is_zero(a[r][c])) else { return l.zero() };
        if p != c {
            a.swap(p, c);
            acc = l.neg(acc);
        }
        let piv = a[c][c];
        acc = l.mul(acc, piv);
        let inv = l.inv(piv).expect("nonzero pivot");
        for r in c + 1..n {
            let f = l.mul(a[r][c], inv);
            if l.is_zero(f) {
                continue;
            }
            for k in c..n {
                a[r][k] = l.sub(a[r][k], l.mul(f, a[c][k]));
            }
        }
    }
    acc
}

/// `Π_{P(α) = 0} g(α)` for monic `P`: the determinant of multiplication by `g` on
/// `L[x]/(P)`.
fn norm_over_roots(l: &FiniteField, g: &Poly, p: &Poly) -> Result<FieldElement, FieldError> {
    let n = p.degree().unwrap_or(0);
    let mut cols = Vec::with_capacity(n);
    let mut xi = Poly::one(l);
    for _ in 0..n {
        let r = g.mul(&xi).rem(p)?;
        cols.push((0..n).map(|k| r.coeff(k)).collect::<Vec<_>>());
        xi = xi.mul(&Poly::x(l));
    }
    let rows: Vec<Vec<FieldElement>> = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok(det(l, rows))
}

/// The value of loop `j` on the divisor of table row `row`, in `L`.
pub fn direct_value(c: &Genus4, row: usize, j: usize) -> Result<FieldElement, FieldError> {
    let l = c.big();
    let emb = &c.embedding;
    let d = row_divisor(c, row);
    let mut acc = l.one();
    for t in &d.terms {
        let Some((nf, df)) = loop_function(l, c.i, j, t.component) else { continue };
        let (n0, d0) = (pull_back(l, &nf, t.component), pull_back(l, &df, t.component));
        let g = n0.gcd(&d0);
        let (num, den) = (n0.div_exact(&g)?, d0.div_exact(&g)?);
        let v = match &t.place {
            Place::Point(a) => {
                let a = emb.map(*a);
                l.div(num.eval(a), den.eval(a))?
            }
            Place::Infinity => {
                if num.degree() != den.degree() {
                    return Err(FieldError::ZeroElement);
                }
                l.div(num.lead(), den.lead())?
            }
            Place::ZeroSet(p) => {
                let p = emb.map_poly(p);
                l.div(norm_over_roots(l, &num, &p)?, norm_over_roots(l, &den, &p)?)?
            }
        };
        acc = l.mul(acc, l.pow_signed(v, t.multiplicity)?);
    }
    Ok(acc)
}

/// All eight rows by direct evaluation.
pub fn direct_table(c: &Genus4) -> Result<[[FieldElement; 4]; 8], FieldError> {
    let mut out = [[c.big().zero(); 4]; 8];
    for (row, vals) in out.iter_mut().enumerate() {
        for (j, v) in vals.iter_mut().enumerate() {
            *v = direct_value(c, row, j)?;
        }
    }
    Ok(out)
}
