//! Specialized divisors on a nodal union of projective lines, their evaluation along
//! cycles of the dual graph, classes modulo r-th powers, the connecting map to the
//! torus, r-divisibility verdicts and the prime-to-p torsion group.
//!
//! Places of a divisor are defined over the base field `k`. Each principal summand
//! `T_i` of the torus has a [`CycleChart`]: the generating cycle, a working field
//! containing `mu(T_i)` and the coordinates of the nodes the cycle passes through.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::dual_graph::{
    fibral_lattice_membership, phi_torsion_representatives, ComponentGroup, Cycle, DualGraph,
    GraphError, H1Basis, IntersectionMatrix,
};
use crate::finite_field::{Embedding, FieldElement, FieldError, FiniteField, Poly};
use crate::linalg::{self, LinalgError, Mat};
use crate::torus::{eval_int_poly, component_polynomials, MuGroup, PrincipalDecomposition, TorusError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescentError {
    #[error("divisor meets a node on component {0}")]
    DivisorMeetsNode(usize),
    #[error("component {0} does not exist")]
    BadComponent(usize),
    #[error("edge {0} is used by a cycle but has no coordinates in the working field")]
    MissingNodeCoordinates(usize),
    #[error("no admissible rational base point on component {0}")]
    NoRationalBasePoint(usize),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("value along cycle `{0}` is not in mu(T)")]
    NotInMu(String),
    #[error("multidegree {0:?} is not divisible by {1}")]
    NotDivRDivisor(Vec<i64>, u64),
    #[error("principal divisor has multidegree {got:?}, expected {want:?}")]
    DegreeMismatch { got: Vec<i64>, want: Vec<i64> },
    #[error("r = {r} is not prime to the characteristic {p}")]
    RNotCoprime { r: u64, p: u64 },
    #[error("r must be positive")]
    ZeroR,
    #[error("the characteristic {0} divides the order of the component group")]
    CharDividesPhi(u64),
    #[error("the principal fibral divisors do not span the relations of the component group")]
    FibralSpan,
    #[error("fiber data is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A place of a component, defined over the base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Point(FieldElement),
    Infinity,
    /// All roots of a monic polynomial, with multiplicity.
    ZeroSet(Poly),
}

impl Place {
    pub fn degree(&self) -> i64 {
        match self {
            Place::ZeroSet(p) => p.degree().unwrap_or(0) as i64,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTerm {
    pub component: usize,
    pub place: Place,
    pub multiplicity: i64,
}

/// A divisor on the special fiber supported away from the nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecializedDivisor {
    pub terms: Vec<DivisorTerm>,
}

impl SpecializedDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point(component: usize, x: FieldElement, multiplicity: i64) -> Self {
        Self { terms: vec![DivisorTerm { component, place: Place::Point(x), multiplicity }] }
    }

    pub fn infinity(component: usize, multiplicity: i64) -> Self {
        Self { terms: vec![DivisorTerm { component, place: Place::Infinity, multiplicity }] }
    }

    /// The roots of `f` (made monic) on one component; a constant gives the zero divisor.
    pub fn zero_set(component: usize, f: &Poly, multiplicity: i64) -> Self {
        if f.degree().unwrap_or(0) == 0 {
            return Self::zero();
        }
        Self { terms: vec![DivisorTerm { component, place: Place::ZeroSet(f.monic()), multiplicity }] }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Self { terms }.simplify()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| DivisorTerm { multiplicity: t.multiplicity * k, ..t.clone() })
                .collect(),
        }
        .simplify()
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// Merges equal places and drops zero multiplicities.
    fn simplify(mut self) -> Self {
        let mut out: Vec<DivisorTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match out.iter_mut().find(|o| o.component == t.component && o.place == t.place) {
                Some(o) => o.multiplicity += t.multiplicity,
                None => out.push(t),
            }
        }
        out.retain(|t| t.multiplicity != 0);
        Self { terms: out }
    }

    /// `(D . C_i)` for `n` components.
    pub fn multidegree(&self, n: usize) -> Result<Vec<i64>, DescentError> {
        let mut deg = vec![0i64; n];
        for t in &self.terms {
            *deg.get_mut(t.component).ok_or(DescentError::BadComponent(t.component))? +=
                t.multiplicity * t.place.degree();
        }
        Ok(deg)
    }
}

/// A coordinate on a component in the working field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    Finite(FieldElement),
    Infinity,
}

/// The node coordinates of one component: the finite ones as the roots of a
/// squarefree polynomial over `k`, plus whether `∞` is a node.
#[derive(Debug, Clone)]
pub struct NodeLocus {
    pub finite: Poly,
    pub infinity: bool,
}

/// Data for evaluating one principal summand of the torus.
#[derive(Debug, Clone)]
pub struct CycleChart {
    pub label: String,
    pub cycle: Cycle,
    pub embedding: Embedding,
    pub mu: MuGroup,
    /// Per edge: its coordinate on the tail component and on the head component.
    pub nodes: Vec<Option<[Coord; 2]>>,
}

impl CycleChart {
    pub fn field(&self) -> &FiniteField {
        self.embedding.big()
    }
}

/// A special fiber with everything the descent computations need.
#[derive(Debug, Clone)]
pub struct FiberModel {
    pub base: FiniteField,
    pub graph: DualGraph,
    pub h1: H1Basis,
    pub decomposition: PrincipalDecomposition,
    pub intersection: IntersectionMatrix,
    pub phi: ComponentGroup,
    pub loci: Vec<NodeLocus>,
    pub charts: Vec<CycleChart>,
    /// Specializations of principal divisors whose multidegrees span the rows of the
    /// intersection matrix.
    pub principal: Vec<SpecializedDivisor>,
    principal_degrees: Mat,
}

impl FiberModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        base: FiniteField,
        graph: DualGraph,
        h1: H1Basis,
        decomposition: PrincipalDecomposition,
        phi: ComponentGroup,
        loci: Vec<NodeLocus>,
        charts: Vec<CycleChart>,
        principal: Vec<SpecializedDivisor>,
    ) -> Result<Self, DescentError> {
        let n = graph.vertex_count();
        let intersection = phi.matrix.clone();
        if intersection.size() != n || loci.len() != n {
            return Err(DescentError::Inconsistent("component count".into()));
        }
        let polys = component_polynomials(&h1.lattice, &decomposition)?;
        if polys.len() != charts.len() {
            return Err(DescentError::Inconsistent("one chart per torus summand".into()));
        }
        for ((c, chart), f) in decomposition.components.iter().zip(&charts).zip(&polys) {
            if h1.cycle_from_coordinates(&c.chi) != chart.cycle {
                return Err(DescentError::Inconsistent(format!("cycle of chart `{}`", chart.label)));
            }
            if eval_int_poly(f, base.order() as i128) as u64 != chart.mu.order {
                return Err(DescentError::Inconsistent(format!("mu order of chart `{}`", chart.label)));
            }
            if chart.embedding.sub() != &base || chart.nodes.len() != graph.edge_count() {
                return Err(DescentError::Inconsistent(format!("fields of chart `{}`", chart.label)));
            }
        }
        let principal_degrees: Mat = principal
            .iter()
            .map(|d| d.multidegree(n).map(|v| v.into_iter().map(i128::from).collect()))
            .collect::<Result<_, _>>()?;
        for row in &intersection.0 {
            let x: Vec<i128> = row.iter().map(|&v| v as i128).collect();
            if linalg::solve_row_combination(&principal_degrees, &x)?.is_none() {
                return Err(DescentError::FibralSpan);
            }
        }
        for d in &principal {
            if !linalg::in_row_span_mod(&linalg::from_i64(&intersection.0), &to_i128(&d.multidegree(n)?), 0)? {
                return Err(DescentError::Inconsistent("principal divisor degree outside the fibral lattice".into()));
            }
        }
        Ok(FiberModel { base, graph, h1, decomposition, intersection, phi, loci, charts, principal, principal_degrees })
    }

    pub fn component_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// The orders `#mu(T_i)`.
    pub fn mu_orders(&self) -> Vec<u64> {
        self.charts.iter().map(|c| c.mu.order).collect()
    }

    pub fn torus_order(&self) -> u64 {
        self.mu_orders().iter().product()
    }

    pub fn multidegree(&self, d: &SpecializedDivisor) -> Result<Vec<i64>, DescentError> {
        d.multidegree(self.component_count())
    }

    /// Fails unless no place of `d` is a node.
    pub fn check_avoids_nodes(&self, d: &SpecializedDivisor) -> Result<(), DescentError> {
        for t in &d.terms {
            let locus = self.loci.get(t.component).ok_or(DescentError::BadComponent(t.component))?;
            let meets = match &t.place {
                Place::Point(x) => self.base.is_zero(locus.finite.eval(*x)),
                Place::Infinity => locus.infinity,
                Place::ZeroSet(p) => p.gcd(&locus.finite).degree().unwrap_or(0) > 0,
            };
            if meets {
                return Err(DescentError::DivisorMeetsNode(t.component));
            }
        }
        Ok(())
    }

    /// A principal divisor `div f` with `deg(div f) = target`.
    pub fn principal_with_degree(&self, target: &[i64]) -> Result<SpecializedDivisor, DescentError> {
        let y = linalg::solve_row_combination(&self.principal_degrees, &to_i128(target))?
            .ok_or(DescentError::FibralSpan)?;
        let mut out = SpecializedDivisor::zero();
        for (d, &a) in self.principal.iter().zip(&y) {
            out = out.add(&d.scale(a as i64));
        }
        Ok(out)
    }

    /// `f_δ` for a representative multidegree of `δ`: `deg(div f_δ) = -r deg(D_δ)`.
    pub fn f_delta(&self, delta_degree: &[i64], r: u64) -> Result<SpecializedDivisor, DescentError> {
        let target: Vec<i64> = delta_degree.iter().map(|&x| -(r as i64) * x).collect();
        self.principal_with_degree(&target)
    }
}

fn to_i128(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

/// One passage of a cycle through a component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub component: usize,
    /// Coordinate of the node through which the walk enters; the factor vanishes here.
    pub enter: Coord,
    /// Coordinate of the node through which it leaves; the factor has its pole here.
    pub leave: Coord,
    pub base_point: Coord,
    /// The factor is `scale * (x - enter) / (x - leave)`, with `x - ∞` read as `1`.
    pub scale: FieldElement,
}

/// Degree-one local parameters along a cycle, normalized at rational base points.
#[derive(Debug, Clone)]
pub struct LocalFunctionSystem {
    pub cycle: Cycle,
    pub occurrences: Vec<Occurrence>,
}

/// Splits a cycle into closed walks of directed edges `(edge, forward)`: the smallest
/// unused edge starts a walk, which always continues along the smallest available edge.
pub fn closed_walks(graph: &DualGraph, cycle: &Cycle) -> Result<Vec<Vec<(usize, bool)>>, DescentError> {
    if cycle.0.len() != graph.edge_count() || graph.boundary(cycle).iter().any(|&b| b != 0) {
        return Err(DescentError::NotACycle);
    }
    let mut remaining: Vec<i64> = cycle.0.iter().map(|c| c.abs()).collect();
    let ends = |e: usize| {
        let ed = &graph.edges[e];
        if cycle.0[e] > 0 {
            (ed.tail, ed.head)
        } else {
            (ed.head, ed.tail)
        }
    };
    let mut walks = Vec::new();
    while let Some(first) = (0..remaining.len()).find(|&e| remaining[e] > 0) {
        remaining[first] -= 1;
        let (start, mut at) = ends(first);
        let mut walk = vec![(first, cycle.0[first] > 0)];
        while at != start {
            let next = (0..remaining.len())
                .find(|&e| remaining[e] > 0 && ends(e).0 == at)
                .ok_or(DescentError::NotACycle)?;
            remaining[next] -= 1;
            walk.push((next, cycle.0[next] > 0));
            at = ends(next).1;
        }
        walks.push(walk);
    }
    Ok(walks)
}

fn node_coord(graph: &DualGraph, chart: &CycleChart, edge: usize, component: usize) -> Result<Coord, DescentError> {
    let c = chart.nodes[edge].ok_or(DescentError::MissingNodeCoordinates(edge))?;
    Ok(if graph.edges[edge].tail == component { c[0] } else { c[1] })
}

/// Value of the unnormalized factor `(x - enter)/(x - leave)` at a point, or `None` at
/// its zero or pole.
fn mobius_at(w: &FiniteField, enter: Coord, leave: Coord, y: Coord) -> Option<FieldElement> {
    use Coord::*;
    match (enter, leave, y) {
        (Finite(a), Finite(b), Finite(y)) => {
            let (num, den) = (w.sub(y, a), w.sub(y, b));
            (!w.is_zero(num) && !w.is_zero(den)).then(|| w.div(num, den).expect("nonzero"))
        }
        (Infinity, Finite(b), Finite(y)) => w.inv(w.sub(y, b)).ok(),
        (Finite(a), Infinity, Finite(y)) => {
            let v = w.sub(y, a);
            (!w.is_zero(v)).then_some(v)
        }
        (Finite(_), Finite(_), Infinity) => Some(w.one()),
        _ => None,
    }
}

/// Product of the unnormalized factor over the roots of a monic polynomial.
fn mobius_on_zero_set(w: &FiniteField, enter: Coord, leave: Coord, p: &Poly) -> Option<FieldElement> {
    use Coord::*;
    let n = p.degree().unwrap_or(0) as u64;
    let sign = if n % 2 == 0 { w.one() } else { w.neg(w.one()) };
    let nz = |v: FieldElement| (!w.is_zero(v)).then_some(v);
    match (enter, leave) {
        (Finite(a), Finite(b)) => Some(w.div(nz(p.eval(a))?, nz(p.eval(b))?).expect("nonzero")),
        (Infinity, Finite(b)) => w.inv(w.mul(sign, nz(p.eval(b))?)).ok(),
        (Finite(a), Infinity) => Some(w.mul(sign, nz(p.eval(a))?)),
        (Infinity, Infinity) => None,
    }
}

/// Builds the local parameters of `chart`'s cycle (or of `cycle` when given). Base
/// points are rational coordinates in increasing encoding order, then `∞`, skipping
/// the two nodes of the occurrence; `base_rank` selects which admissible one is used.
pub fn build_local_function_system(
    model: &FiberModel,
    chart: &CycleChart,
    cycle: Option<&Cycle>,
    base_rank: usize,
) -> Result<LocalFunctionSystem, DescentError> {
    let cycle = cycle.unwrap_or(&chart.cycle).clone();
    let graph = &model.graph;
    let w = chart.field();
    let mut occurrences = Vec::new();
    for walk in closed_walks(graph, &cycle)? {
        let len = walk.len();
        for j in 0..len {
            let (e_in, fwd_in) = walk[j];
            let (e_out, _) = walk[(j + 1) % len];
            let edge = &graph.edges[e_in];
            let component = if fwd_in { edge.head } else { edge.tail };
            let enter = node_coord(graph, chart, e_in, component)?;
            let leave = node_coord(graph, chart, e_out, component)?;
            if enter == leave {
                return Err(DescentError::Inconsistent(format!("edges {e_in} and {e_out} share a coordinate")));
            }
            let candidates = model
                .base
                .elements()
                .map(|x| Coord::Finite(chart.embedding.map(x)))
                .chain(std::iter::once(Coord::Infinity));
            let base_point = candidates
                .filter(|&c| c != enter && c != leave)
                .nth(base_rank)
                .ok_or(DescentError::NoRationalBasePoint(component))?;
            let t0 = mobius_at(w, enter, leave, base_point).expect("base point avoids both nodes");
            let scale = if w.pow(t0, chart.mu.order) == w.one() { w.one() } else { w.inv(t0)? };
            occurrences.push(Occurrence { component, enter, leave, base_point, scale });
        }
    }
    Ok(LocalFunctionSystem { cycle, occurrences })
}

/// `t_γ(D)`: the product over occurrences of the normalized factor evaluated on `D`.
pub fn evaluate_cycle(
    system: &LocalFunctionSystem,
    chart: &CycleChart,
    d: &SpecializedDivisor,
) -> Result<FieldElement, DescentError> {
    let w = chart.field();
    let emb = &chart.embedding;
    let mut acc = w.one();
    for occ in &system.occurrences {
        for t in d.terms.iter().filter(|t| t.component == occ.component) {
            let v = match &t.place {
                Place::Point(x) => mobius_at(w, occ.enter, occ.leave, Coord::Finite(emb.map(*x))),
                Place::Infinity => mobius_at(w, occ.enter, occ.leave, Coord::Infinity),
                Place::ZeroSet(p) => mobius_on_zero_set(w, occ.enter, occ.leave, &emb.map_poly(p)),
            }
            .ok_or(DescentError::DivisorMeetsNode(occ.component))?;
            let v = w.mul(v, w.pow_signed(occ.scale, t.place.degree())?);
            acc = w.mul(acc, w.pow_signed(v, t.multiplicity)?);
        }
    }
    Ok(acc)
}

/// `t_γ(D)` for every chart, with the given base-point choice.
pub fn evaluate_all(model: &FiberModel, d: &SpecializedDivisor, base_rank: usize) -> Result<Vec<FieldElement>, DescentError> {
    model.check_avoids_nodes(d)?;
    model
        .charts
        .iter()
        .map(|c| evaluate_cycle(&build_local_function_system(model, c, None, base_rank)?, c, d))
        .collect()
}

/// Exact logs of `t_γ(D)` in `mu(T_i)` for every chart.
pub fn gamma_logs(model: &FiberModel, d: &SpecializedDivisor, base_rank: usize) -> Result<Vec<u64>, DescentError> {
    evaluate_all(model, d, base_rank)?
        .into_iter()
        .zip(&model.charts)
        .map(|(v, c)| c.mu.log(v).ok_or_else(|| DescentError::NotInMu(c.label.clone())))
        .collect()
}

/// The sizes `gcd(r, #mu(T_i))` of the groups `mu(T_i)/r mu(T_i)`.
pub fn class_moduli(model: &FiberModel, r: u64) -> Vec<u64> {
    model.charts.iter().map(|c| arith::gcd(r, c.mu.order)).collect()
}

/// `γ_i(D)` in `mu(T_i)/r mu(T_i)` for `D` in `Div^{r}`, as logs modulo `gcd(r, #mu(T_i))`.
pub fn gamma_class(model: &FiberModel, d: &SpecializedDivisor, r: u64, base_rank: usize) -> Result<Vec<u64>, DescentError> {
    if r == 0 {
        return Err(DescentError::ZeroR);
    }
    let deg = model.multidegree(d)?;
    if deg.iter().any(|&x| x % r as i64 != 0) {
        return Err(DescentError::NotDivRDivisor(deg, r));
    }
    let logs = gamma_logs(model, d, base_rank)?;
    Ok(logs.iter().zip(class_moduli(model, r)).map(|(&l, m)| l % m).collect())
}

/// One row of the connecting map: the classes `χ_{γ_i}(ν(δ))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuRow {
    pub delta: Vec<u64>,
    pub classes: Vec<u64>,
}

/// `ν(δ)` from a principal divisor `div f` with `deg(div f) = -r deg(D_δ)`.
pub fn compute_nu(
    model: &FiberModel,
    delta: &[u64],
    delta_degree: &[i64],
    f: &SpecializedDivisor,
    r: u64,
) -> Result<NuRow, DescentError> {
    let want: Vec<i64> = delta_degree.iter().map(|&x| -(r as i64) * x).collect();
    let got = model.multidegree(f)?;
    if got != want {
        return Err(DescentError::DegreeMismatch { got, want });
    }
    Ok(NuRow { delta: delta.to_vec(), classes: gamma_class(model, f, r, 0)? })
}

/// `ν` on all of `Φ[r]`, using the model's principal divisors for the `f_δ`.
pub fn nu_table(model: &FiberModel, r: u64) -> Result<Vec<NuRow>, DescentError> {
    phi_torsion_representatives(&model.phi, r)
        .into_iter()
        .map(|(delta, deg)| {
            let f = model.f_delta(&deg, r)?;
            compute_nu(model, &delta, &deg, &f, r)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum DescentVerdict {
    /// `D + div f_δ` has trivial classes for the witness `δ`.
    Divisible { witness: Vec<u64> },
    /// For every `δ`, the classes of `D + div f_δ`; each row has a nonzero entry.
    NotDivisible { moduli: Vec<u64>, table: Vec<NuRow> },
    /// The multidegree is not in `r Z^v + (fibral lattice)`.
    NotInPicBracketR { multidegree: Vec<i64> },
    Undetermined { reason: String },
}

impl DescentVerdict {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            DescentVerdict::Divisible { .. } => Some(true),
            DescentVerdict::NotDivisible { .. } | DescentVerdict::NotInPicBracketR { .. } => Some(false),
            DescentVerdict::Undetermined { .. } => None,
        }
    }
}

/// Moves `D` into `Div^{r}` by subtracting a principal fibral divisor; `None` when the
/// multidegree is outside `r Z^v + (fibral lattice)`.
pub fn shift_into_div_r(model: &FiberModel, d: &SpecializedDivisor, r: u64) -> Result<Option<SpecializedDivisor>, DescentError> {
    let n = model.component_count();
    let deg = model.multidegree(d)?;
    if !fibral_lattice_membership(&deg, r, &model.intersection)? {
        return Ok(None);
    }
    let mut stacked = model.principal_degrees.clone();
    for i in 0..n {
        let mut row = vec![0i128; n];
        row[i] = r as i128;
        stacked.push(row);
    }
    let y = linalg::solve_row_combination(&stacked, &to_i128(&deg))?.ok_or(DescentError::FibralSpan)?;
    let mut out = d.clone();
    for (f, &a) in model.principal.iter().zip(&y) {
        out = out.add(&f.scale(-(a as i64)));
    }
    Ok(Some(out))
}

/// Whether the class of `D` lies in `r Pic`.
pub fn divisibility_verdict(model: &FiberModel, d: &SpecializedDivisor, r: u64) -> Result<DescentVerdict, DescentError> {
    divisibility_verdict_with(model, d, r, 0)
}

/// [`divisibility_verdict`] with an explicit base-point choice.
pub fn divisibility_verdict_with(
    model: &FiberModel,
    d: &SpecializedDivisor,
    r: u64,
    base_rank: usize,
) -> Result<DescentVerdict, DescentError> {
    if r == 0 {
        return Err(DescentError::ZeroR);
    }
    let p = model.base.characteristic();
    if r % p == 0 {
        return Err(DescentError::RNotCoprime { r, p });
    }
    model.check_avoids_nodes(d)?;
    let trivial = vec![0u64; model.phi.invariant_factors.len()];
    if r == 1 {
        return Ok(DescentVerdict::Divisible { witness: trivial });
    }
    let Some(shifted) = shift_into_div_r(model, d, r)? else {
        return Ok(DescentVerdict::NotInPicBracketR { multidegree: model.multidegree(d)? });
    };
    let moduli = class_moduli(model, r);
    let base = gamma_class(model, &shifted, r, base_rank)?;
    let mut table = Vec::new();
    for (delta, deg) in phi_torsion_representatives(&model.phi, r) {
        let f = model.f_delta(&deg, r)?;
        let nu = gamma_class(model, &f, r, base_rank)?;
        let classes: Vec<u64> = base.iter().zip(&nu).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect();
        if classes.iter().all(|&c| c == 0) {
            return Ok(DescentVerdict::Divisible { witness: delta });
        }
        table.push(NuRow { delta, classes });
    }
    Ok(DescentVerdict::NotDivisible { moduli, table })
}

/// Invariant factors of `J(K)(p')`, the extension of `Φ` by `T(k) = ⊕ mu(T_i)`.
///
/// Generators are the `mu(T_i)` generators followed by lifts `δ̃_j` of the invariant
/// factor generators of `Φ`; the relations are `#mu(T_i) e_i = 0` and
/// `d_j δ̃_j = Σ_i log γ_i(div f_j) e_i`.
pub fn torsion_structure(model: &FiberModel) -> Result<Vec<u64>, DescentError> {
    let p = model.base.characteristic();
    if model.phi.order() % p == 0 {
        return Err(DescentError::CharDividesPhi(p));
    }
    let k = model.charts.len();
    let factors = &model.phi.invariant_factors;
    let n = k + factors.len();
    let mut rel: Mat = Vec::new();
    for (i, c) in model.charts.iter().enumerate() {
        let mut row = vec![0i128; n];
        row[i] = c.mu.order as i128;
        rel.push(row);
    }
    for (j, &d) in factors.iter().enumerate() {
        let mut unit = vec![0u64; factors.len()];
        unit[j] = 1;
        let deg = model.phi.lift(&unit);
        let f = model.f_delta(&deg, d)?;
        let logs = gamma_logs(model, &f, 0)?;
        let mut row = vec![0i128; n];
        row[k + j] = d as i128;
        for (i, &l) in logs.iter().enumerate() {
            row[i] = -(l as i128);
        }
        rel.push(row);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(linalg::cokernel_invariants(&rel, n)?)
}
