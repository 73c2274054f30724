//! Brute-force ground truth at tiny scale.
//!
//! Only the finite-field layer is shared with the engine: the torus is enumerated as
//! Frobenius-equivariant homomorphisms on a cycle basis built here, cycle values come
//! from the chain of per-component functions, and divisibility is literal subgroup
//! membership. The divisor evaluation `x` and the `ν` inputs to
//! [`exhaustive_verdict`] come from the engine.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::descent::{evaluate_all, shift_into_div_r, Coord, FiberModel, Place, SpecializedDivisor};
use crate::dual_graph::{phi_torsion_representatives, Cycle, DualGraph};
use crate::finite_field::{factor, Embedding, FieldElement, FieldError, FiniteField, Poly};
use crate::linalg::normalize_cyclic;
use crate::torus::CharacterLattice;

pub const ORACLE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("torus has {0} points, above the enumeration limit")]
    TooLarge(u64),
    #[error("no basis of Frobenius orbits of standard vectors")]
    NoOrbitBasis,
    #[error("divisor has nonzero degree {0:?} on some component")]
    NonzeroMultidegree(Vec<i64>),
    #[error("divisor meets a node on component {0}")]
    DivisorMeetsNode(usize),
    #[error("value is not in the working field of the chart")]
    OutsideChartField,
    #[error("Frobenius has order above 64")]
    FrobeniusOrder,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("engine input failed: {0}")]
    Engine(String),
}

/// `T(k)` as equivariant homomorphisms `X(T) -> GF(q^s)^x`, each stored by its values
/// on the basis.
#[derive(Debug, Clone)]
pub struct EnumeratedTorus {
    pub host: FiniteField,
    /// Basis cycles as edge vectors (graphs) or unit vectors (lattices).
    pub basis: Vec<Vec<i64>>,
    /// For graphs, the chord edge of each basis cycle.
    pub chords: Vec<usize>,
    /// Column `j` is the image of basis vector `j`.
    pub frobenius: Vec<Vec<i64>>,
    pub points: Vec<Vec<FieldElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub points: u64,
    pub invariant_factors: Vec<u64>,
    pub exponent: u64,
}

impl EnumeratedTorus {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of a cycle of the graph in the basis.
    pub fn coordinates(&self, c: &Cycle) -> Vec<i64> {
        self.chords.iter().map(|&e| c.0[e]).collect()
    }

    /// `x(χ)` for `χ` given in basis coordinates.
    pub fn value(&self, point: &[FieldElement], chi: &[i64]) -> Result<FieldElement, FieldError> {
        let h = &self.host;
        let mut acc = h.one();
        for (&x, &c) in point.iter().zip(chi) {
            acc = h.mul(acc, h.pow_signed(x, c)?);
        }
        Ok(acc)
    }

    fn pow_point(&self, p: &[FieldElement], m: u64) -> Vec<FieldElement> {
        p.iter().map(|&x| self.host.pow(x, m)).collect()
    }

    /// Number of points killed by `m`.
    pub fn torsion_count(&self, m: u64) -> usize {
        let one = self.host.one();
        self.points.iter().filter(|p| self.pow_point(p, m).iter().all(|&x| x == one)).count()
    }

    /// Invariant factors read off from the counts `|G[l^k]|`.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let n = self.points.len() as u64;
        let mut orders = Vec::new();
        for (l, e) in arith::factorize(n) {
            // at_least[k]: number of cyclic factors of order >= l^(k+1)
            let mut at_least = Vec::new();
            let (mut prev, mut pk) = (1u64, 1u64);
            for _ in 0..e {
                pk *= l;
                let c = self.torsion_count(pk) as u64;
                if c == prev {
                    break;
                }
                let (mut ratio, mut m) = (c / prev, 0usize);
                while ratio > 1 {
                    ratio /= l;
                    m += 1;
                }
                at_least.push(m);
                prev = c;
            }
            for k in 0..at_least.len() {
                let next = at_least.get(k + 1).copied().unwrap_or(0);
                for _ in next..at_least[k] {
                    orders.push(l.pow(k as u32 + 1));
                }
            }
        }
        normalize_cyclic(&orders)
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors().last().copied().unwrap_or(1)
    }

    pub fn summary(&self) -> EnumerationSummary {
        EnumerationSummary {
            points: self.points.len() as u64,
            invariant_factors: self.invariant_factors(),
            exponent: self.exponent(),
        }
    }
}

fn apply(f: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    f.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Rank over Q by fraction-free elimination.
fn rank_q(vectors: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = vectors.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let (a, b) = (m[rank][c], m[i][c]);
                for j in 0..cols {
                    m[i][j] = m[i][j] * a - m[rank][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| arith::gcd_i128(g, x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn det_laplace(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .filter(|&j| m[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_laplace(&minor)
            })
            .sum(),
    }
}

/// Inverse of a unimodular matrix by cofactors.
fn inverse_by_cofactors(m: &[Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let n = m.len();
    let d = det_laplace(m);
    if d.abs() != 1 {
        return None;
    }
    let mut inv = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[j][i] = s * det_laplace(&minor) * d;
        }
    }
    Some(inv)
}

/// Solves `sum c_j v_j = target` over Z for independent `v_j`.
fn solve_in_span(vs: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    // Cramer on a maximal nonsingular row selection
    let n = vs.len();
    let rows = target.len();
    let mut chosen = Vec::new();
    for r in 0..rows {
        let mut trial = chosen.clone();
        trial.push(r);
        let sub: Vec<Vec<i64>> = trial.iter().map(|&i| vs.iter().map(|v| v[i]).collect()).collect();
        if rank_q(&sub) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == n {
            break;
        }
    }
    if chosen.len() != n {
        return None;
    }
    let a: Vec<Vec<i128>> = chosen.iter().map(|&i| vs.iter().map(|v| v[i] as i128).collect()).collect();
    let d = det_laplace(&a);
    let mut sol = Vec::with_capacity(n);
    for j in 0..n {
        let mut aj = a.clone();
        for (k, &i) in chosen.iter().enumerate() {
            aj[k][j] = target[i] as i128;
        }
        let dj = det_laplace(&aj);
        if dj % d != 0 {
            return None;
        }
        sol.push((dj / d) as i64);
    }
    let back: Vec<i64> = (0..rows).map(|i| vs.iter().zip(&sol).map(|(v, c)| v[i] * c).sum()).collect();
    (back == target).then_some(sol)
}

struct Orbit {
    start: usize,
    len: usize,
    /// `F^len e = sum relation[j] F^j e`.
    relation: Vec<i64>,
}

/// Greedy basis of Frobenius orbits of standard vectors.
fn orbit_basis(f: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, Vec<Orbit>), OracleError> {
    let n = f.len();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let mut orbits = Vec::new();
    for j in 0..n {
        let e: Vec<i64> = (0..n).map(|i| i64::from(i == j)).collect();
        let mut with_e = basis.clone();
        with_e.push(e.clone());
        if rank_q(&with_e) == basis.len() {
            continue;
        }
        let mut vs = vec![e.clone()];
        let mut v = apply(f, &e);
        loop {
            let mut all: Vec<Vec<i64>> = basis.clone();
            all.extend(vs.iter().cloned());
            let mut test = all.clone();
            test.push(v.clone());
            if rank_q(&test) == all.len() {
                break;
            }
            vs.push(v.clone());
            v = apply(f, &v);
        }
        let Some(relation) = solve_in_span(&vs, &v) else { continue };
        let mut all = basis.clone();
        all.extend(vs.iter().cloned());
        orbits.push(Orbit { start: basis.len(), len: vs.len(), relation });
        basis = all;
    }
    if basis.len() != n {
        return Err(OracleError::NoOrbitBasis);
    }
    Ok((basis, orbits))
}

fn frobenius_order(f: &[Vec<i64>]) -> Result<u32, OracleError> {
    let n = f.len();
    let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut p = f.to_vec();
    for s in 1..=64 {
        if p == id {
            return Ok(s);
        }
        // p <- f * p
        p = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| f[i][k] * p[k][j]).sum()).collect()).collect();
    }
    Err(OracleError::FrobeniusOrder)
}

/// Enumerates `Hom_g(X, k̄^x)` for a Frobenius matrix acting on columns.
pub fn enumerate_torus_lattice(lattice: &CharacterLattice, base: &FiniteField) -> Result<EnumeratedTorus, OracleError> {
    let f = lattice.frobenius.clone();
    let basis = (0..lattice.rank).map(|i| (0..lattice.rank).map(|j| i64::from(i == j)).collect()).collect();
    enumerate_with(f, basis, Vec::new(), base)
}

fn enumerate_with(
    f: Vec<Vec<i64>>,
    basis: Vec<Vec<i64>>,
    chords: Vec<usize>,
    base: &FiniteField,
) -> Result<EnumeratedTorus, OracleError> {
    let n = f.len();
    let q = base.order();
    if n == 0 {
        return Ok(EnumeratedTorus { host: base.clone(), basis, chords, frobenius: f, points: vec![Vec::new()] });
    }
    let s = frobenius_order(&f)?;
    let (obasis, orbits) = orbit_basis(&f)?;
    // f_r(q) = q^len - sum relation_j q^j
    let mut sizes = Vec::new();
    let mut total: u128 = 1;
    for o in &orbits {
        let mut v: i128 = (q as i128).pow(o.len as u32);
        for (j, &c) in o.relation.iter().enumerate() {
            v -= c as i128 * (q as i128).pow(j as u32);
        }
        if v <= 0 {
            return Err(OracleError::NoOrbitBasis);
        }
        total = total.saturating_mul(v as u128);
        sizes.push(v as u64);
    }
    if total > ORACLE_LIMIT as u128 {
        return Err(OracleError::TooLarge(total.min(u64::MAX as u128) as u64));
    }
    let host = base.extension(s)?;
    let big_n = host.order() - 1;
    let zeta = host.primitive_element();
    // columns of B are the orbit vectors
    let bmat: Vec<Vec<i128>> = (0..n).map(|i| obasis.iter().map(|v| v[i] as i128).collect()).collect();
    let binv = inverse_by_cofactors(&bmat).ok_or(OracleError::NoOrbitBasis)?;
    let mut gens = Vec::new();
    for &sz in &sizes {
        if big_n % sz != 0 {
            return Err(OracleError::NoOrbitBasis);
        }
        gens.push(big_n / sz);
    }
    let mut points = Vec::with_capacity(total as usize);
    let mut idx = vec![0u64; orbits.len()];
    let nn = big_n as i128;
    'outer: loop {
        // logs of x on the orbit vectors: x(F^j e_r) = z_r^(q^j)
        let mut blog = vec![0i128; n];
        for (r, o) in orbits.iter().enumerate() {
            let mut l = (idx[r] as i128 * gens[r] as i128) % nn;
            for j in 0..o.len {
                blog[o.start + j] = l;
                l = l * q as i128 % nn;
            }
        }
        let point: Vec<FieldElement> = (0..n)
            .map(|i| {
                let l: i128 = (0..n).map(|k| binv[k][i] * blog[k]).sum::<i128>().rem_euclid(nn);
                host.pow(zeta, l as u64)
            })
            .collect();
        if is_equivariant(&host, &f, &point, q)? {
            points.push(point);
        }
        for r in 0..idx.len() {
            idx[r] += 1;
            if idx[r] < sizes[r] {
                continue 'outer;
            }
            idx[r] = 0;
        }
        break;
    }
    Ok(EnumeratedTorus { host, basis, chords, frobenius: f, points })
}

/// `x(F e_j) = x(e_j)^q` for every basis vector.
fn is_equivariant(host: &FiniteField, f: &[Vec<i64>], x: &[FieldElement], q: u64) -> Result<bool, FieldError> {
    for j in 0..x.len() {
        let mut lhs = host.one();
        for i in 0..x.len() {
            lhs = host.mul(lhs, host.pow_signed(x[i], f[i][j])?);
        }
        if lhs != host.pow(x[j], q) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cycle basis from a depth-first spanning tree, and the Frobenius matrix on it.
pub fn cycle_basis(graph: &DualGraph) -> (Vec<Vec<i64>>, Vec<usize>, Vec<Vec<i64>>) {
    let v = graph.vertices.len();
    let m = graph.edges.len();
    let mut parent: Vec<Option<(usize, usize, i64)>> = vec![None; v];
    let mut seen = vec![false; v];
    let mut tree = vec![false; m];
    for root in 0..v {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for (i, e) in graph.edges.iter().enumerate() {
                let (y, sign) = if e.tail == x {
                    (e.head, 1)
                } else if e.head == x {
                    (e.tail, -1)
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    tree[i] = true;
                    parent[y] = Some((x, i, sign));
                    stack.push(y);
                }
            }
        }
    }
    // path from a vertex up to its root, as signed edges walked upward
    let up = |mut x: usize| {
        let mut path = Vec::new();
        while let Some((p, e, s)) = parent[x] {
            path.push((x, e, -s));
            x = p;
        }
        path
    };
    let chords: Vec<usize> = (0..m).filter(|&i| !tree[i]).collect();
    let mut basis = Vec::new();
    for &c in &chords {
        let e = &graph.edges[c];
        let mut cyc = vec![0i64; m];
        cyc[c] = 1;
        // head -> root, then root -> tail
        for (_, edge, s) in up(e.head) {
            cyc[edge] += s;
        }
        for (_, edge, s) in up(e.tail) {
            cyc[edge] -= s;
        }
        basis.push(cyc);
    }
    let g = &graph.galois;
    let image = |cyc: &[i64]| {
        let mut out = vec![0i64; m];
        for (e, &c) in cyc.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let se = g.edge_perm[e];
            let sign = if g.vertex_perm[graph.edges[e].tail] == graph.edges[se].tail { 1 } else { -1 };
            out[se] += sign * c;
        }
        out
    };
    let n = chords.len();
    let mut f = vec![vec![0i64; n]; n];
    for (j, cyc) in basis.iter().enumerate() {
        let img = image(cyc);
        for (i, &ch) in chords.iter().enumerate() {
            f[i][j] = img[ch];
        }
    }
    (basis, chords, f)
}

/// `T(k)` for the torus of a dual graph.
pub fn enumerate_torus(graph: &DualGraph, base: &FiniteField) -> Result<EnumeratedTorus, OracleError> {
    let (basis, chords, f) = cycle_basis(graph);
    enumerate_with(f, basis, chords, base)
}

/// Whether `x -> (χ_i(x))` is injective on the points and lands in `⊕ μ_{orders_i}`.
pub fn check_character_isomorphism(torus: &EnumeratedTorus, chis: &[Vec<i64>], orders: &[u64]) -> Result<bool, FieldError> {
    if orders.iter().product::<u64>() != torus.len() as u64 {
        return Ok(false);
    }
    let h = &torus.host;
    let mut seen = HashSet::with_capacity(torus.len());
    for p in &torus.points {
        let mut image = Vec::with_capacity(chis.len());
        for (chi, &o) in chis.iter().zip(orders) {
            let v = torus.value(p, chi)?;
            if h.pow(v, o) != h.one() {
                return Ok(false);
            }
            image.push(v);
        }
        if !seen.insert(image) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn place_degree(p: &Place) -> i64 {
    match p {
        Place::ZeroSet(f) => f.degree().unwrap_or(0) as i64,
        _ => 1,
    }
}

/// The chain value `Π_e (f_head(x_e) / f_tail(x_e))^{c_e}` of a multidegree-zero divisor,
/// where `f_v = Π ℓ_y^{m_y}` is built from projective linear forms through the
/// points of `D` on component `v` and `x_e` is the node's coordinate.
pub fn chain_evaluate(model: &FiberModel, chart_index: usize, d: &SpecializedDivisor) -> Result<FieldElement, OracleError> {
    let chart = &model.charts[chart_index];
    let k = &model.base;
    let w = chart.embedding.big();
    let nv = model.graph.vertices.len();
    let mut deg = vec![0i64; nv];
    for t in &d.terms {
        deg[t.component] += t.multiplicity * place_degree(&t.place);
    }
    if deg.iter().any(|&x| x != 0) {
        return Err(OracleError::NonzeroMultidegree(deg));
    }
    // a field holding W and every root of every zero set
    let wdeg = (w.degree() / k.degree()) as u64;
    let mut s = wdeg;
    for t in &d.terms {
        if let Place::ZeroSet(p) = &t.place {
            for (g, _) in factor(p)? {
                s = arith::lcm(s, g.degree().unwrap_or(1) as u64);
            }
        }
    }
    let host = k.extension(s as u32)?;
    let to_host = Embedding::new(w, &host)?;
    // each place as the list of its points in the host, None for infinity
    let mut places: Vec<(usize, Vec<Option<FieldElement>>, i64)> = Vec::new();
    for t in &d.terms {
        let pts = match &t.place {
            Place::Point(x) => vec![Some(to_host.map(chart.embedding.map(*x)))],
            Place::Infinity => vec![None],
            Place::ZeroSet(p) => {
                let ph: Poly = to_host.map_poly(&chart.embedding.map_poly(p));
                let roots = ph.roots()?;
                if roots.len() != p.degree().unwrap_or(0) {
                    return Err(OracleError::OutsideChartField);
                }
                roots.into_iter().map(Some).collect()
            }
        };
        places.push((t.component, pts, t.multiplicity));
    }
    // ℓ_y(u, v) = v_y u - u_y v
    let form = |y: Option<FieldElement>, at: Coord| -> FieldElement {
        match (y, at) {
            (Some(y), Coord::Finite(a)) => host.sub(to_host.map(a), y),
            (None, Coord::Finite(_)) => host.from_i64(-1),
            (Some(_), Coord::Infinity) => host.one(),
            (None, Coord::Infinity) => host.zero(),
        }
    };
    let f_at = |v: usize, at: Coord| -> Result<FieldElement, OracleError> {
        let mut acc = host.one();
        for (comp, pts, mult) in &places {
            if *comp != v {
                continue;
            }
            for &y in pts {
                let l = form(y, at);
                if host.is_zero(l) {
                    return Err(OracleError::DivisorMeetsNode(v));
                }
                acc = host.mul(acc, host.pow_signed(l, *mult)?);
            }
        }
        Ok(acc)
    };
    let mut acc = host.one();
    for (e, &c) in chart.cycle.0.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let [xt, xh] = chart.nodes[e].ok_or(OracleError::OutsideChartField)?;
        let edge = &model.graph.edges[e];
        let ratio = host.div(f_at(edge.head, xh)?, f_at(edge.tail, xt)?)?;
        acc = host.mul(acc, host.pow_signed(ratio, c)?);
    }
    to_host.preimage(acc).ok_or(OracleError::OutsideChartField)
}

/// Whether `x` lies in the subgroup generated by `r T(k)` and the `ν` images, all
/// given as tuples in `⊕ μ(T_i)` inside the torus host; `chis` are the summand
/// characters in basis coordinates.
pub fn exhaustive_divisibility(
    x: &[FieldElement],
    r: u64,
    nu_images: &[Vec<FieldElement>],
    torus: &EnumeratedTorus,
    chis: &[Vec<i64>],
) -> Result<bool, FieldError> {
    let h = &torus.host;
    let mut gens: Vec<Vec<FieldElement>> = Vec::new();
    for p in &torus.points {
        let img: Vec<FieldElement> =
            chis.iter().map(|chi| torus.value(p, chi).map(|v| h.pow(v, r))).collect::<Result<_, _>>()?;
        gens.push(img);
    }
    gens.extend(nu_images.iter().cloned());
    let identity = vec![h.one(); chis.len()];
    let mut seen: HashSet<Vec<FieldElement>> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    gens.sort();
    gens.dedup();
    while let Some(a) = queue.pop_front() {
        for g in &gens {
            let b: Vec<FieldElement> = a.iter().zip(g).map(|(&u, &v)| h.mul(u, v)).collect();
            if seen.insert(b.clone()) {
                queue.push_back(b);
            }
        }
    }
    Ok(seen.contains(x))
}

/// Oracle verdict for `D ∈ r Pic`: `x` is the engine's evaluation of `D` moved into
/// `Div^{r}`, the `ν` images are the engine's evaluations of `div f_δ`.
pub fn exhaustive_verdict(model: &FiberModel, d: &SpecializedDivisor, r: u64) -> Result<bool, OracleError> {
    let torus = enumerate_torus(&model.graph, &model.base)?;
    exhaustive_verdict_with(model, &torus, d, r)
}

pub fn exhaustive_verdict_with(
    model: &FiberModel,
    torus: &EnumeratedTorus,
    d: &SpecializedDivisor,
    r: u64,
) -> Result<bool, OracleError> {
    let engine = |e: crate::descent::DescentError| OracleError::Engine(e.to_string());
    let Some(shifted) = shift_into_div_r(model, d, r).map_err(engine)? else {
        return Ok(false);
    };
    let embeds: Vec<Embedding> =
        model.charts.iter().map(|c| Embedding::new(c.field(), &torus.host)).collect::<Result<_, _>>()?;
    let lift = |vals: Vec<FieldElement>| -> Vec<FieldElement> { vals.iter().zip(&embeds).map(|(&v, e)| e.map(v)).collect() };
    let x = lift(evaluate_all(model, &shifted, 0).map_err(engine)?);
    let mut nu = Vec::new();
    for (_, deg) in phi_torsion_representatives(&model.phi, r) {
        let f = model.f_delta(&deg, r).map_err(engine)?;
        nu.push(lift(evaluate_all(model, &f, 0).map_err(engine)?));
    }
    let chis: Vec<Vec<i64>> = model.charts.iter().map(|c| torus.coordinates(&c.cycle)).collect();
    Ok(exhaustive_divisibility(&x, r, &nu, torus, &chis)?)
}

/// A non-node rational place on a component: `∞` when allowed, else the first point.
fn free_place(model: &FiberModel, comp: usize) -> Option<SpecializedDivisor> {
    let locus = &model.loci[comp];
    if !locus.infinity {
        return Some(SpecializedDivisor::infinity(comp, 1));
    }
    model
        .base
        .elements()
        .find(|&x| !model.base.is_zero(locus.finite.eval(x)))
        .map(|x| SpecializedDivisor::point(comp, x, 1))
}

/// A random node-avoiding divisor built from rational points, `∞` and monic quadratic
/// zero sets; with `zero_degree` each component is rebalanced to degree zero.
pub fn random_divisor<R: rand::Rng>(rng: &mut R, model: &FiberModel, zero_degree: bool) -> SpecializedDivisor {
    let k = &model.base;
    let n = model.component_count();
    let q = k.order();
    let mut d = SpecializedDivisor::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let comp = rng.gen_range(0..n);
        let m = rng.gen_range(-3..=3i64);
        let locus = &model.loci[comp];
        let term = match rng.gen_range(0..3) {
            0 if !locus.infinity => SpecializedDivisor::infinity(comp, m),
            1 => {
                let x = k.from_encoding(rng.gen_range(0..q)).expect("in range");
                if k.is_zero(locus.finite.eval(x)) {
                    continue;
                }
                SpecializedDivisor::point(comp, x, m)
            }
            _ => {
                let a = k.from_encoding(rng.gen_range(0..q)).expect("in range");
                let b = k.from_encoding(rng.gen_range(0..q)).expect("in range");
                let f = Poly::new(k, vec![a, b, k.one()]);
                if f.gcd(&locus.finite).degree() != Some(0) {
                    continue;
                }
                SpecializedDivisor::zero_set(comp, &f, m)
            }
        };
        d = d.add(&term);
    }
    if zero_degree {
        let deg = model.multidegree(&d).expect("components in range");
        for (comp, &x) in deg.iter().enumerate() {
            if x != 0 {
                let p = free_place(model, comp).expect("a rational non-node place");
                d = d.add(&p.scale(-x));
            }
        }
    }
    d
}
