//! Hyperelliptic curves `y^2 = g(x)^2 + π h(x)` whose special fiber is two lines
//! meeting at the roots of `ḡ`.

use serde::{Deserialize, Serialize};

use super::{class_group_order, field_of_order, FamilyError, UndeterminedReason, Verdict};
use crate::arith;
use crate::descent::{
    divisibility_verdict, torsion_structure, CycleChart, Coord, FiberModel, NodeLocus, SpecializedDivisor,
};
use crate::dual_graph::{
    banana_decomposition, banana_graph, component_group, h1_basis, DualGraph, GraphError, IntersectionMatrix,
};
use crate::finite_field::{factor, roots_in_extension, Embedding, FieldElement, FieldError, FiniteField, Poly};
use crate::linalg::normalize_cyclic;
use crate::torus::{component_polynomials, eval_int_poly, MuGroup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticInput {
    pub q: u64,
    /// Integer coefficients, low to high.
    pub g: Vec<i64>,
    pub h: Vec<i64>,
    pub r: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum HypothesisError {
    #[error("{q} is not a prime power or exceeds the field limit")]
    BadField { q: u64 },
    #[error("the characteristic {p} divides 2d = {two_d}")]
    CharDividesTwoD { p: u64, two_d: u64 },
    #[error("g must have degree at least 3, got {d}")]
    DegreeTooSmall { d: usize },
    #[error("g must be monic")]
    NotMonic,
    #[error("the reduction of g is not separable")]
    NotSeparableReduction,
    #[error("the reductions of g and h have a common factor")]
    CommonFactorGH,
    #[error("deg h = {e} exceeds 2d = {two_d}")]
    DegreeTooLarge { e: usize, two_d: usize },
    #[error("r = {r} must be positive and prime to {p}")]
    BadR { r: u64, p: u64 },
}

/// A validated input with the reduction data.
#[derive(Debug, Clone)]
pub struct Hyperelliptic {
    pub input: HyperellipticInput,
    pub field: FiniteField,
    pub d: usize,
    pub g: Poly,
    pub h: Poly,
    /// Rational roots of `ḡ`, ascending by encoding; the first is `α_0`.
    pub rational_roots: Vec<FieldElement>,
    /// Irreducible factors of `ḡ` of degree at least two, in canonical order.
    pub orbits: Vec<Poly>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    Split,
    OneRationalRoot,
    RationalRootWithOrbits,
    Irreducible,
    NoRationalRoot,
}

impl Hyperelliptic {
    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn reduction_type(&self) -> ReductionType {
        match (self.rational_roots.len(), self.orbits.len()) {
            (n, 0) if n == self.d => ReductionType::Split,
            (1, _) if self.d == 3 => ReductionType::OneRationalRoot,
            (0, 1) => ReductionType::Irreducible,
            (0, _) => ReductionType::NoRationalRoot,
            _ => ReductionType::RationalRootWithOrbits,
        }
    }

    /// Each node orbit as (factor, working field, embedding, roots `β, β^q, ...`).
    fn orbit_roots(&self, f: &Poly) -> Result<(Embedding, Vec<FieldElement>), FieldError> {
        let s = f.degree().unwrap_or(1) as u32;
        let (emb, roots) = roots_in_extension(f, s)?;
        let w = emb.big().clone();
        let beta = roots[0];
        let m = self.field.degree();
        Ok((emb, (0..s).map(|j| w.frobenius(beta, m * j)).collect()))
    }
}

pub fn validate_hyperelliptic(input: &HyperellipticInput, limit: u64) -> Result<Hyperelliptic, Vec<HypothesisError>> {
    let field = field_of_order(input.q, limit).map_err(|_| vec![HypothesisError::BadField { q: input.q }])?;
    let p = field.characteristic();
    let mut errs = Vec::new();
    let gi: Vec<i64> = {
        let mut v = input.g.clone();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let d = gi.len().saturating_sub(1);
    if d < 3 {
        errs.push(HypothesisError::DegreeTooSmall { d });
    }
    if gi.last() != Some(&1) {
        errs.push(HypothesisError::NotMonic);
    }
    if (2 * d as u64) % p == 0 {
        errs.push(HypothesisError::CharDividesTwoD { p, two_d: 2 * d as u64 });
    }
    let e = input.h.iter().rposition(|&c| c != 0).unwrap_or(0);
    if e > 2 * d {
        errs.push(HypothesisError::DegreeTooLarge { e, two_d: 2 * d });
    }
    if input.r == 0 || input.r % p == 0 {
        errs.push(HypothesisError::BadR { r: input.r, p });
    }
    let g = Poly::from_ints(&field, &gi);
    let h = Poly::from_ints(&field, &input.h);
    if !errs.iter().any(|e| matches!(e, HypothesisError::DegreeTooSmall { .. } | HypothesisError::NotMonic)) {
        if g.gcd(&g.derivative()).degree() != Some(0) {
            errs.push(HypothesisError::NotSeparableReduction);
        }
        if g.gcd(&h).degree() != Some(0) {
            errs.push(HypothesisError::CommonFactorGH);
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    let factors = factor(&g).expect("nonzero polynomial");
    let mut rational_roots: Vec<FieldElement> = Vec::new();
    let mut orbits = Vec::new();
    for (f, _) in factors {
        if f.degree() == Some(1) {
            rational_roots.push(field.neg(f.coeff(0)));
        } else {
            orbits.push(f);
        }
    }
    rational_roots.sort();
    Ok(Hyperelliptic { input: input.clone(), field, d, g, h, rational_roots, orbits })
}

fn norm_to_k(field: &FiniteField, emb: &Embedding, x: FieldElement) -> FieldElement {
    if emb.big().degree() == field.degree() {
        x
    } else {
        emb.norm(x)
    }
}

/// Whether a rational theta characteristic exists, from the closed-form criteria.
pub fn theta_bd(c: &Hyperelliptic) -> Verdict {
    let k = &c.field;
    if c.d % 2 == 0 || c.reduction_type() == ReductionType::Irreducible {
        return Verdict::True;
    }
    let Some(&a0) = c.rational_roots.first() else {
        return Verdict::Undetermined(UndeterminedReason::NoRationalRootReducible);
    };
    let ha0 = c.h.eval(a0);
    let mut values = Vec::new();
    for &a in &c.rational_roots[1..] {
        values.push(k.mul(ha0, c.h.eval(a)));
    }
    for f in &c.orbits {
        let (emb, roots) = c.orbit_roots(f).expect("splitting field within limit");
        let w = emb.big();
        let prod = w.mul(emb.map(ha0), emb.map_poly(&c.h).eval(roots[0]));
        values.push(norm_to_k(k, &emb, prod));
    }
    Verdict::from_bool(class_group_order(k, &values, 2) == 1)
}

/// Invariant factors of `J(K)(p')` from the closed-form theorems, where they apply:
/// every type for `d = 3`, the split type for larger `d`.
pub fn torsion_bd(c: &Hyperelliptic) -> Option<Vec<u64>> {
    let k = &c.field;
    let q = c.q();
    let d = c.d as u64;
    let h = &c.h;
    let nf = |w: &FiniteField, x: FieldElement, e: u64| w.pow(x, e) == w.one();
    match c.reduction_type() {
        ReductionType::Split => {
            let a0 = c.rational_roots[0];
            let ratios: Vec<FieldElement> =
                c.rational_roots[1..].iter().map(|&a| k.div(h.eval(a), h.eval(a0)).expect("h avoids the nodes")).collect();
            let n = class_group_order(k, &ratios, d);
            let m = d / n;
            let mut orders = vec![q - 1; c.d - 2];
            orders.push(n * (q - 1));
            orders.push(m);
            Some(normalize_cyclic(&orders))
        }
        ReductionType::OneRationalRoot => {
            let a0 = c.rational_roots[0];
            let (emb, roots) = c.orbit_roots(&c.orbits[0]).ok()?;
            let w = emb.big();
            let hw = emb.map_poly(h);
            let trivial = if q % 3 == 1 {
                let val = k
                    .div(k.pow(h.eval(a0), 2), emb.norm(hw.eval(roots[0])))
                    .expect("h avoids the nodes");
                class_group_order(k, &[val], 3) == 1
            } else {
                nf(w, hw.eval(roots[0]), (q * q - 1) / 3)
            };
            Some(if trivial { normalize_cyclic(&[q * q - 1, 3]) } else { vec![3 * (q * q - 1)] })
        }
        ReductionType::Irreducible if c.d == 3 => {
            let (emb, roots) = c.orbit_roots(&c.orbits[0]).ok()?;
            let w = emb.big();
            let trivial = q % 3 == 2 || nf(w, emb.map_poly(h).eval(roots[0]), (q * q * q - 1) / 3);
            let f = q * q + q + 1;
            Some(if trivial { normalize_cyclic(&[f, 3]) } else { vec![3 * f] })
        }
        _ => None,
    }
}

/// Two components joined at the roots of `ḡ`: rational roots first, then each orbit
/// with Frobenius moving one edge to the next.
pub fn hyperelliptic_graph(c: &Hyperelliptic) -> Result<DualGraph, GraphError> {
    let mut perm: Vec<usize> = (0..c.rational_roots.len()).collect();
    for f in &c.orbits {
        let start = perm.len();
        let s = f.degree().unwrap_or(1);
        for j in 0..s {
            perm.push(start + (j + 1) % s);
        }
    }
    banana_graph(c.d, perm)
}

/// The special fiber as a descent model: vertex 0 is `C^+` (containing `∞^+`), vertex 1
/// is `C^-`; edges are the rational roots first, then each orbit in Frobenius order.
pub fn hyperelliptic_model(c: &Hyperelliptic) -> Result<FiberModel, FamilyError> {
    let k = &c.field;
    let d = c.d;
    let id = Embedding::new(k, k)?;
    let mut orbit_data = Vec::new();
    let mut start = c.rational_roots.len();
    for f in &c.orbits {
        let s = f.degree().unwrap_or(1);
        let (emb, roots) = c.orbit_roots(f)?;
        orbit_data.push((start, s, emb, roots));
        start += s;
    }
    let graph = hyperelliptic_graph(c).map_err(crate::descent::DescentError::from)?;
    let h1 = h1_basis(&graph).map_err(crate::descent::DescentError::from)?;
    let decomposition = banana_decomposition(&graph, &h1).map_err(|_| FamilyError::Unsupported)?;
    let polys = component_polynomials(&h1.lattice, &decomposition).map_err(crate::descent::DescentError::from)?;
    let dd = d as i64;
    let phi = component_group(&IntersectionMatrix(vec![vec![-dd, dd], vec![dd, -dd]]))
        .map_err(crate::descent::DescentError::from)?;

    let mut charts = Vec::new();
    for (comp, f) in decomposition.components.iter().zip(&polys) {
        let cycle = h1.cycle_from_coordinates(&comp.chi);
        let order = eval_int_poly(f, k.order() as i128) as u64;
        let mut nodes = vec![None; d];
        let emb = if c.rational_roots.is_empty() {
            // a single orbit through every node
            let (_, _, emb, roots) = &orbit_data[0];
            for (j, &b) in roots.iter().enumerate() {
                nodes[j] = Some([Coord::Finite(b); 2]);
            }
            emb.clone()
        } else {
            let e = (1..d).find(|&i| comp.chi[i - 1] == 1).expect("unit character");
            let emb = match orbit_data.iter().find(|o| o.0 <= e && e < o.0 + o.1) {
                Some((start, _, emb, roots)) => {
                    for (j, &b) in roots.iter().enumerate() {
                        nodes[start + j] = Some([Coord::Finite(b); 2]);
                    }
                    emb.clone()
                }
                None => {
                    nodes[e] = Some([Coord::Finite(c.rational_roots[e]); 2]);
                    id.clone()
                }
            };
            nodes[0] = Some([Coord::Finite(emb.map(c.rational_roots[0])); 2]);
            emb
        };
        let mu = MuGroup::within(emb.big(), order).map_err(crate::descent::DescentError::from)?;
        charts.push(CycleChart { label: format!("e{}-e0", chart_edge(&comp.chi)), cycle, embedding: emb, mu, nodes });
    }
    let loci = vec![NodeLocus { finite: c.g.clone(), infinity: false }; 2];
    let model = FiberModel::new(
        k.clone(),
        graph,
        h1,
        decomposition,
        phi,
        loci,
        charts,
        vec![div_y_minus_g(c)],
    )?;
    Ok(model)
}

fn chart_edge(chi: &[i64]) -> usize {
    chi.iter().position(|&x| x != 0).map_or(0, |i| i + 1)
}

/// Specialization of `div(y - g)`: the roots of `h̄` on `C^+`, the degree deficit at
/// `∞^+`, and `-d ∞^-`.
pub fn div_y_minus_g(c: &Hyperelliptic) -> SpecializedDivisor {
    let e = c.h.degree().unwrap_or(0) as i64;
    let d = c.d as i64;
    SpecializedDivisor::zero_set(0, &c.h, 1)
        .add(&SpecializedDivisor::infinity(0, d - e))
        .add(&SpecializedDivisor::infinity(1, -d))
}

/// A canonical divisor: `div(y - g) + (d - 2)(∞^+ + ∞^-)`.
pub fn canonical_divisor(c: &Hyperelliptic) -> SpecializedDivisor {
    let m = c.d as i64 - 2;
    div_y_minus_g(c).add(&SpecializedDivisor::infinity(0, m)).add(&SpecializedDivisor::infinity(1, m))
}

/// Theta characteristic through the descent engine.
pub fn theta_engine(c: &Hyperelliptic) -> Result<Verdict, FamilyError> {
    match hyperelliptic_model(c) {
        Ok(model) => Ok(Verdict::from_bool(
            divisibility_verdict(&model, &canonical_divisor(c), 2)?.as_bool().unwrap_or(false),
        )),
        Err(FamilyError::Unsupported) => Ok(Verdict::Undetermined(UndeterminedReason::UnsupportedTorusDecomposition)),
        Err(e) => Err(e),
    }
}

/// `J(K)(p')` through the descent engine; `None` when the torus is unsupported.
pub fn torsion_engine(c: &Hyperelliptic) -> Result<Option<Vec<u64>>, FamilyError> {
    match hyperelliptic_model(c) {
        Ok(model) => Ok(Some(torsion_structure(&model)?)),
        Err(FamilyError::Unsupported) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `|J(K)(p')| = f(q) d` for the torus order `f(q)`.
pub fn expected_torsion_order(c: &Hyperelliptic) -> u64 {
    let q = c.q();
    let mut f = (q - 1).pow(c.rational_roots.len().saturating_sub(1) as u32);
    for o in &c.orbits {
        let s = o.degree().unwrap_or(1) as u32;
        f *= if c.rational_roots.is_empty() { (q.pow(s) - 1) / (q - 1) } else { q.pow(s) - 1 };
    }
    f * arith::prime_to_part(c.d as u64, c.field.characteristic())
}
