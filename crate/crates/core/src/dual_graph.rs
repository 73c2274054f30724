//! Dual graphs of special fibers with a Galois action: cycle space, intersection
//! matrix, component group and the fibral lattice.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::linalg::{self, LinalgError, Mat};
use crate::torus::{
    verify_principal_decomposition, CharacterLattice, PrincipalComponent, PrincipalDecomposition,
    TorusError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {0} is a loop")]
    Loop(usize),
    #[error("edge {0} refers to a missing vertex")]
    BadVertex(usize),
    #[error("Galois action is not a permutation compatible with incidence")]
    BadGalois,
    #[error("multidegree has total degree {0}, expected 0")]
    NonzeroDegree(i64),
    #[error("multidegree has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error("no principal decomposition is constructed for this Galois action")]
    NotSupported,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisAction {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
}

/// Vertices are components, edges are nodes oriented tail to head.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFixture", into = "GraphFixture")]
pub struct DualGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub galois: GaloisAction,
    /// `+1` when the Galois image of an edge keeps its orientation, `-1` otherwise.
    signs: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct GraphFixture {
    vertices: Vec<String>,
    edges: Vec<(usize, usize, String)>,
    galois: Option<GaloisAction>,
}

impl TryFrom<GraphFixture> for DualGraph {
    type Error = GraphError;
    fn try_from(f: GraphFixture) -> Result<Self, GraphError> {
        let edges = f.edges.into_iter().map(|(tail, head, label)| Edge { tail, head, label }).collect();
        DualGraph::new(f.vertices, edges, f.galois)
    }
}

impl From<DualGraph> for GraphFixture {
    fn from(g: DualGraph) -> Self {
        GraphFixture {
            vertices: g.vertices,
            edges: g.edges.into_iter().map(|e| (e.tail, e.head, e.label)).collect(),
            galois: Some(g.galois),
        }
    }
}

/// Integer coefficients on edges, `+1` meaning traversal tail to head.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle(pub Vec<i64>);

impl Cycle {
    pub fn add(&self, o: &Cycle) -> Cycle {
        Cycle(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
    pub fn neg(&self) -> Cycle {
        Cycle(self.0.iter().map(|a| -a).collect())
    }
    pub fn scale(&self, k: i64) -> Cycle {
        Cycle(self.0.iter().map(|a| a * k).collect())
    }
}

impl DualGraph {
    /// Without an explicit action, Galois acts trivially.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>, galois: Option<GaloisAction>) -> Result<Self, GraphError> {
        let v = vertices.len();
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= v || e.head >= v {
                return Err(GraphError::BadVertex(i));
            }
            if e.tail == e.head {
                return Err(GraphError::Loop(i));
            }
        }
        let galois = galois.unwrap_or(GaloisAction {
            vertex_perm: (0..v).collect(),
            edge_perm: (0..edges.len()).collect(),
        });
        if !is_perm(&galois.vertex_perm, v) || !is_perm(&galois.edge_perm, edges.len()) {
            return Err(GraphError::BadGalois);
        }
        let mut signs = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let img = &edges[galois.edge_perm[i]];
            let (t, h) = (galois.vertex_perm[e.tail], galois.vertex_perm[e.head]);
            if img.tail == t && img.head == h {
                signs.push(1);
            } else if img.tail == h && img.head == t {
                signs.push(-1);
            } else {
                return Err(GraphError::BadGalois);
            }
        }
        let g = DualGraph { vertices, edges, galois, signs };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn edge_sign(&self, e: usize) -> i64 {
        self.signs[e]
    }

    fn is_connected(&self) -> bool {
        let v = self.vertices.len();
        if v == 0 {
            return true;
        }
        let mut uf = UnionFind::new(v);
        for e in &self.edges {
            uf.union(e.tail, e.head);
        }
        (1..v).all(|i| uf.find(i) == uf.find(0))
    }

    /// Boundary of a chain: signed incidence at each vertex.
    pub fn boundary(&self, c: &Cycle) -> Vec<i64> {
        let mut b = vec![0i64; self.vertices.len()];
        for (e, &k) in self.edges.iter().zip(&c.0) {
            b[e.head] += k;
            b[e.tail] -= k;
        }
        b
    }

    pub fn apply_galois(&self, c: &Cycle) -> Cycle {
        let mut out = vec![0i64; self.edges.len()];
        for (e, &k) in c.0.iter().enumerate() {
            out[self.galois.edge_perm[e]] += self.signs[e] * k;
        }
        Cycle(out)
    }

    /// Order of the Galois action on vertices and oriented edges.
    pub fn galois_order(&self) -> u64 {
        let vp = &self.galois.vertex_perm;
        let ep = &self.galois.edge_perm;
        let mut verts: Vec<usize> = (0..vp.len()).collect();
        let mut edges: Vec<(usize, i64)> = (0..ep.len()).map(|e| (e, 1)).collect();
        let mut k = 0u64;
        loop {
            k += 1;
            verts = verts.iter().map(|&x| vp[x]).collect();
            edges = edges.iter().map(|&(e, s)| (ep[e], s * self.signs[e])).collect();
            let fixed = verts.iter().enumerate().all(|(i, &x)| i == x)
                && edges.iter().enumerate().all(|(i, &(e, s))| i == e && s == 1);
            if fixed {
                return k;
            }
        }
    }

    /// Intersection matrix: edge counts off the diagonal, rows summing to zero.
    pub fn intersection_matrix(&self) -> IntersectionMatrix {
        let v = self.vertices.len();
        let mut m = vec![vec![0i64; v]; v];
        for e in &self.edges {
            m[e.tail][e.head] += 1;
            m[e.head][e.tail] += 1;
            m[e.tail][e.tail] -= 1;
            m[e.head][e.head] -= 1;
        }
        IntersectionMatrix(m)
    }
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[i] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// A basis of `H_1(Γ, Z)` from fundamental cycles of the lowest-index spanning tree,
/// with the Galois action in that basis.
#[derive(Debug, Clone)]
pub struct H1Basis {
    pub cycles: Vec<Cycle>,
    /// The non-tree edge defining each basis cycle; a cycle's coordinates are its
    /// coefficients on these edges.
    pub chord_edges: Vec<usize>,
    pub lattice: CharacterLattice,
}

impl H1Basis {
    pub fn coordinates(&self, c: &Cycle) -> Vec<i64> {
        self.chord_edges.iter().map(|&e| c.0[e]).collect()
    }
    pub fn cycle_from_coordinates(&self, a: &[i64]) -> Cycle {
        let n = self.cycles.first().map_or(0, |c| c.0.len());
        let mut out = Cycle(vec![0; n]);
        for (c, &k) in self.cycles.iter().zip(a) {
            out = out.add(&c.scale(k));
        }
        out
    }
}

pub fn h1_basis(graph: &DualGraph) -> Result<H1Basis, GraphError> {
    let v = graph.vertex_count();
    let mut uf = UnionFind::new(v);
    let mut tree = vec![false; graph.edge_count()];
    for (i, e) in graph.edges.iter().enumerate() {
        tree[i] = uf.union(e.tail, e.head);
    }
    let chords: Vec<usize> = (0..graph.edge_count()).filter(|&i| !tree[i]).collect();
    let mut cycles = Vec::new();
    for &c in &chords {
        let e = &graph.edges[c];
        let path = tree_path(graph, &tree, e.head, e.tail).ok_or(GraphError::Disconnected)?;
        let mut coeffs = vec![0i64; graph.edge_count()];
        coeffs[c] = 1;
        for (edge, sign) in path {
            coeffs[edge] += sign;
        }
        cycles.push(Cycle(coeffs));
    }
    let g = chords.len();
    let mut f = vec![vec![0i64; g]; g];
    for (j, cyc) in cycles.iter().enumerate() {
        let img = graph.apply_galois(cyc);
        for (i, &ch) in chords.iter().enumerate() {
            f[i][j] = img.0[ch];
        }
    }
    let lattice = CharacterLattice::new(f, "H1 of the dual graph")?;
    Ok(H1Basis { cycles, chord_edges: chords, lattice })
}

/// Signed edge path from `from` to `to` inside the tree.
fn tree_path(graph: &DualGraph, tree: &[bool], from: usize, to: usize) -> Option<Vec<(usize, i64)>> {
    let v = graph.vertex_count();
    let mut prev: Vec<Option<(usize, usize, i64)>> = vec![None; v];
    let mut seen = vec![false; v];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for (i, e) in graph.edges.iter().enumerate() {
            if !tree[i] {
                continue;
            }
            let (y, sign) = if e.tail == x {
                (e.head, 1)
            } else if e.head == x {
                (e.tail, -1)
            } else {
                continue;
            };
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, i, sign));
                queue.push_back(y);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, e, s) = prev[cur]?;
        path.push((e, s));
        cur = p;
    }
    path.reverse();
    Some(path)
}

/// Sum of the Galois orbit of a cycle.
pub fn norm_cycle(gamma: &Cycle, graph: &DualGraph) -> Cycle {
    let mut acc = gamma.clone();
    let mut cur = graph.apply_galois(gamma);
    while &cur != gamma {
        acc = acc.add(&cur);
        cur = graph.apply_galois(&cur);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntersectionMatrix(pub Vec<Vec<i64>>);

impl IntersectionMatrix {
    pub fn size(&self) -> usize {
        self.0.len()
    }

    /// Square, symmetric, nonnegative off the diagonal, negative diagonal, zero row sums.
    pub fn validate(&self) -> Result<(), String> {
        let v = self.0.len();
        for (i, row) in self.0.iter().enumerate() {
            if row.len() != v {
                return Err(format!("row {i} has length {}, expected {v}", row.len()));
            }
            if row.iter().sum::<i64>() != 0 {
                return Err(format!("row {i} does not sum to zero"));
            }
            for (j, &x) in row.iter().enumerate() {
                if x != self.0[j][i] {
                    return Err(format!("entry ({i},{j}) breaks symmetry"));
                }
                if i != j && x < 0 {
                    return Err(format!("off-diagonal entry ({i},{j}) is negative"));
                }
            }
            if v > 1 && row[i] >= 0 {
                return Err(format!("diagonal entry {i} is not negative"));
            }
        }
        Ok(())
    }
}

/// `Φ = (degree-zero multidegrees) / (rows of M)`.
#[derive(Debug, Clone)]
pub struct ComponentGroup {
    pub matrix: IntersectionMatrix,
    /// Invariant factors greater than one, each dividing the next.
    pub invariant_factors: Vec<u64>,
    /// Smith diagonal of the relation matrix in the basis `e_i - e_{v-1}`.
    diag: Vec<i128>,
    v: Mat,
    v_inv: Mat,
}

pub fn component_group(m: &IntersectionMatrix) -> Result<ComponentGroup, GraphError> {
    let n = m.size();
    let rel: Mat = m.0.iter().map(|r| r[..n.saturating_sub(1)].iter().map(|&x| x as i128).collect()).collect();
    let (diag, v) = if n <= 1 {
        (Vec::new(), linalg::identity(0))
    } else {
        let s = linalg::smith(&rel)?;
        (s.diag, s.v)
    };
    let v_inv = linalg::inverse_unimodular(&v)?;
    let invariant_factors = diag.iter().filter(|&&d| d != 1).map(|&d| d as u64).collect();
    Ok(ComponentGroup { matrix: m.clone(), invariant_factors, diag, v, v_inv })
}

impl ComponentGroup {
    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    fn factor_positions(&self) -> Vec<usize> {
        (0..self.diag.len()).filter(|&j| self.diag[j] != 1).collect()
    }

    /// Class of a degree-zero multidegree, one residue per invariant factor.
    pub fn project(&self, deg: &[i64]) -> Result<Vec<u64>, GraphError> {
        let n = self.matrix.size();
        if deg.len() != n {
            return Err(GraphError::Length { got: deg.len(), want: n });
        }
        let total: i64 = deg.iter().sum();
        if total != 0 {
            return Err(GraphError::NonzeroDegree(total));
        }
        if n <= 1 {
            return Ok(Vec::new());
        }
        let y: Vec<i128> = deg[..n - 1].iter().map(|&x| x as i128).collect();
        let yv = linalg::vec_mul(&y, &self.v)?;
        Ok(self
            .factor_positions()
            .into_iter()
            .map(|j| yv[j].rem_euclid(self.diag[j]) as u64)
            .collect())
    }

    pub fn is_identity(&self, deg: &[i64]) -> Result<bool, GraphError> {
        Ok(self.project(deg)?.iter().all(|&c| c == 0))
    }

    /// Multidegree lifting an element given by residues.
    pub fn lift(&self, element: &[u64]) -> Vec<i64> {
        let n = self.matrix.size();
        if n <= 1 {
            return vec![0; n];
        }
        let mut c = vec![0i128; n - 1];
        for (&j, &x) in self.factor_positions().iter().zip(element) {
            c[j] = x as i128;
        }
        let y = linalg::vec_mul(&c, &self.v_inv).expect("small matrix");
        let mut out: Vec<i64> = y.iter().map(|&x| x as i64).collect();
        out.push(-out.iter().sum::<i64>());
        out
    }

    /// Order of an element given by residues.
    pub fn element_order(&self, element: &[u64]) -> u64 {
        self.invariant_factors
            .iter()
            .zip(element)
            .fold(1, |acc, (&d, &x)| arith::lcm(acc, d / arith::gcd(x, d)))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.invariant_factors.iter().zip(a.iter().zip(b)).map(|(&d, (&x, &y))| (x + y) % d).collect()
    }
}

/// Every element of `Φ[r]` with a degree-zero multidegree representative.
pub fn phi_torsion_representatives(phi: &ComponentGroup, r: u64) -> Vec<(Vec<u64>, Vec<i64>)> {
    let mut elems: Vec<Vec<u64>> = vec![Vec::new()];
    for &d in &phi.invariant_factors {
        let g = arith::gcd(d, r);
        let step = d / g;
        elems = elems
            .into_iter()
            .flat_map(|e| {
                (0..g).map(move |k| {
                    let mut e = e.clone();
                    e.push(k * step);
                    e
                })
            })
            .collect();
    }
    elems.into_iter().map(|e| {
        let lift = phi.lift(&e);
        (e, lift)
    }).collect()
}

/// Whether `deg` lies in `r Z^v + rowspan(M)`.
pub fn fibral_lattice_membership(deg: &[i64], r: u64, m: &IntersectionMatrix) -> Result<bool, GraphError> {
    let a = linalg::from_i64(&m.0);
    let x: Vec<i128> = deg.iter().map(|&v| v as i128).collect();
    Ok(linalg::in_row_span_mod(&a, &x, r as i128)?)
}

/// Principal decomposition of `H_1` for a graph with two vertices joined by `d` edges.
///
/// With a Galois-fixed edge `e_0`, each remaining edge orbit contributes the cycle
/// through its first edge and `e_0`, a norm torus. With one orbit of all `d` edges the
/// single generator is `σ(e_0) - e_0`. Anything else is not supported.
pub fn banana_decomposition(graph: &DualGraph, h1: &H1Basis) -> Result<PrincipalDecomposition, GraphError> {
    let d = graph.edge_count();
    if graph.vertex_count() != 2 || h1.chord_edges != (1..d).collect::<Vec<_>>() {
        return Err(GraphError::NotSupported);
    }
    let perm = &graph.galois.edge_perm;
    let unit = |e: usize| -> Vec<i64> { (1..d).map(|j| i64::from(j == e)).collect() };
    let orbit = |start: usize| {
        let mut o = vec![start];
        let mut i = perm[start];
        while i != start {
            o.push(i);
            i = perm[i];
        }
        o
    };
    let mut components = Vec::new();
    if perm[0] == 0 && graph.edge_sign(0) == 1 {
        let mut seen = vec![false; d];
        seen[0] = true;
        for e in 1..d {
            if seen[e] {
                continue;
            }
            let o = orbit(e);
            for &x in &o {
                seen[x] = true;
            }
            components.push(PrincipalComponent { chi: unit(e), rank: o.len() });
        }
    } else if orbit(0).len() == d {
        components.push(PrincipalComponent { chi: unit(perm[0]), rank: d - 1 });
    } else {
        return Err(GraphError::NotSupported);
    }
    let dec = PrincipalDecomposition { components };
    if !verify_principal_decomposition(&h1.lattice, &dec).0 {
        return Err(GraphError::NotSupported);
    }
    Ok(dec)
}

/// Two vertices joined by `d` edges oriented from vertex 0 to vertex 1, with the given
/// Galois permutation of the edges and trivial action on vertices.
pub fn banana_graph(d: usize, edge_perm: Vec<usize>) -> Result<DualGraph, GraphError> {
    let edges = (0..d).map(|i| Edge { tail: 0, head: 1, label: format!("n{i}") }).collect();
    DualGraph::new(
        vec!["C+".into(), "C-".into()],
        edges,
        Some(GaloisAction { vertex_perm: vec![0, 1], edge_perm }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::frobenius_char_poly;

    #[test]
    fn banana_h1() {
        let g = banana_graph(3, vec![0, 1, 2]).unwrap();
        let h = h1_basis(&g).unwrap();
        assert_eq!(h.cycles.len(), 2);
        assert_eq!(h.cycles[0], Cycle(vec![-1, 1, 0]));
        for c in &h.cycles {
            assert!(g.boundary(c).iter().all(|&x| x == 0));
        }
        let g = banana_graph(3, vec![1, 2, 0]).unwrap();
        let h = h1_basis(&g).unwrap();
        assert_eq!(frobenius_char_poly(&h.lattice), vec![1, 1, 1]);
    }

    #[test]
    fn tree_has_rank_zero() {
        let edges = vec![
            Edge { tail: 0, head: 1, label: "a".into() },
            Edge { tail: 1, head: 2, label: "b".into() },
        ];
        let g = DualGraph::new(vec!["A".into(), "B".into(), "C".into()], edges, None).unwrap();
        assert_eq!(h1_basis(&g).unwrap().cycles.len(), 0);
    }

    #[test]
    fn component_group_examples() {
        let phi = component_group(&IntersectionMatrix(vec![vec![-3, 3], vec![3, -3]])).unwrap();
        assert_eq!(phi.invariant_factors, vec![3]);
        let m = IntersectionMatrix(vec![vec![-4, 2, 2], vec![2, -4, 2], vec![2, 2, -4]]);
        let phi = component_group(&m).unwrap();
        assert_eq!(phi.invariant_factors, vec![2, 6]);
        for row in &m.0 {
            assert!(phi.is_identity(row).unwrap());
        }
        assert_eq!(phi.element_order(&phi.project(&[0, 1, -1]).unwrap()), 6);
        assert_eq!(phi.element_order(&phi.project(&[-1, -1, 2]).unwrap()), 2);
        let phi = component_group(&IntersectionMatrix(vec![vec![-1, 1], vec![1, -1]])).unwrap();
        assert_eq!(phi.order(), 1);
    }

    #[test]
    fn torsion_representatives() {
        let m = IntersectionMatrix(vec![vec![-4, 2, 2], vec![2, -4, 2], vec![2, 2, -4]]);
        let phi = component_group(&m).unwrap();
        let reps = phi_torsion_representatives(&phi, 2);
        assert_eq!(reps.len(), 4);
        for (e, lift) in &reps {
            assert_eq!(&phi.project(lift).unwrap(), e);
        }
        let b3 = component_group(&IntersectionMatrix(vec![vec![-3, 3], vec![3, -3]])).unwrap();
        assert_eq!(phi_torsion_representatives(&b3, 2).len(), 1);
        assert_eq!(phi_torsion_representatives(&b3, 3).len(), 3);
    }

    #[test]
    fn fibral_examples() {
        let m = IntersectionMatrix(vec![vec![-3, 3], vec![3, -3]]);
        assert!(fibral_lattice_membership(&[1, 1], 2, &m).unwrap());
        assert!(!fibral_lattice_membership(&[1, 0], 2, &m).unwrap());
        assert!(fibral_lattice_membership(&[0, 0], 4, &m).unwrap());
    }

    #[test]
    fn norm_cycles() {
        let g = banana_graph(3, vec![1, 2, 0]).unwrap();
        let h = h1_basis(&g).unwrap();
        let n = norm_cycle(&h.cycles[0], &g);
        assert_eq!(g.apply_galois(&n), n);
        let fixed = banana_graph(3, vec![0, 1, 2]).unwrap();
        let hf = h1_basis(&fixed).unwrap();
        assert_eq!(norm_cycle(&hf.cycles[1], &fixed), hf.cycles[1]);
    }

    #[test]
    fn banana_decompositions() {
        let g = banana_graph(4, vec![0, 2, 3, 1]).unwrap();
        let h = h1_basis(&g).unwrap();
        let dec = banana_decomposition(&g, &h).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].rank, 3);
        let g = banana_graph(3, vec![1, 2, 0]).unwrap();
        let h = h1_basis(&g).unwrap();
        assert_eq!(banana_decomposition(&g, &h).unwrap().components[0].rank, 2);
        let g = banana_graph(4, vec![1, 0, 3, 2]).unwrap();
        let h = h1_basis(&g).unwrap();
        assert_eq!(banana_decomposition(&g, &h).unwrap_err(), GraphError::NotSupported);
    }
}
