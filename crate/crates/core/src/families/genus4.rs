//! Genus-4 curves `XY = ZW`, `(Z^2 - W^2)(X + Y) = π ε(X, Y, Z, W)` whose special fiber
//! is three conics: `C_XY`, `C_ZW` and `C_-ZW`, meeting in six nodes.

use serde::{Deserialize, Serialize};

use super::{class_group_order, field_of_order, FamilyError, Verdict};
use crate::descent::{
    divisibility_verdict, torsion_structure, Coord, CycleChart, FiberModel, NodeLocus, SpecializedDivisor,
};
use crate::dual_graph::{component_group, h1_basis, Cycle, DualGraph, Edge, GaloisAction, IntersectionMatrix};
use crate::finite_field::{Embedding, FieldElement, FiniteField, Poly};
use crate::linalg::normalize_cyclic;
use crate::torus::{component_polynomials, eval_int_poly, MuGroup, PrincipalComponent, PrincipalDecomposition};

pub const XY: usize = 0;
pub const ZW: usize = 1;
pub const MZW: usize = 2;

/// Exponents `(a, b, c, d)` of `X^a Y^b Z^c W^d`, the order of the 20 coefficients.
pub fn cubic_monomials() -> Vec<[u32; 4]> {
    let mut out = Vec::with_capacity(20);
    for a in (0..=3u32).rev() {
        for b in (0..=3 - a).rev() {
            for c in (0..=3 - a - b).rev() {
                out.push([a, b, c, 3 - a - b - c]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genus4Input {
    pub q: u64,
    /// Coefficients in [`cubic_monomials`] order.
    pub eps: Vec<i64>,
    pub r: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Genus4Error {
    #[error("{q} is not a prime power or exceeds the field limit")]
    BadField { q: u64 },
    #[error("characteristic {p} is below 5")]
    CharTooSmall { p: u64 },
    #[error("a cubic form has 20 coefficients, got {len}")]
    EpsWrongLength { len: usize },
    #[error("ε vanishes at the node {node}")]
    EpsVanishesAtNode { node: String },
    #[error("r = {r} must be positive and prime to {p}")]
    BadR { r: u64, p: u64 },
}

/// Values of `ε` at the nodes, in `L = k(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeValues {
    pub e1111: FieldElement,
    pub em: FieldElement,
    pub e1000: FieldElement,
    pub e0100: FieldElement,
    pub eip: FieldElement,
    pub eim: FieldElement,
}

#[derive(Debug, Clone)]
pub struct Genus4 {
    pub input: Genus4Input,
    pub field: FiniteField,
    /// `k` into `L = k(i)`; the identity when `i ∈ k`.
    pub embedding: Embedding,
    /// The root of `x^2 + 1` in `L` with the smallest encoding.
    pub i: FieldElement,
    pub i_in_k: bool,
    pub eps: Vec<FieldElement>,
    pub values: NodeValues,
}

/// Evaluates a cubic form with coefficients in `field` at a point of `field`.
pub fn eval_cubic(field: &FiniteField, eps: &[FieldElement], pt: [FieldElement; 4]) -> FieldElement {
    let mut acc = field.zero();
    for (m, &c) in cubic_monomials().iter().zip(eps) {
        let mut t = c;
        for (v, &e) in pt.iter().zip(m) {
            t = field.mul(t, field.pow(*v, e as u64));
        }
        acc = field.add(acc, t);
    }
    acc
}

pub fn node_labels() -> [&'static str; 6] {
    ["[1:1:1:1]", "[-1:-1:1:1]", "[i:i:-1:1]", "[-i:-i:-1:1]", "[1:0:0:0]", "[0:1:0:0]"]
}

impl Genus4 {
    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn big(&self) -> &FiniteField {
        self.embedding.big()
    }

    /// The six nodes as points of `P^3(L)`, in edge order.
    pub fn nodes(&self) -> [[FieldElement; 4]; 6] {
        node_points(self.big(), self.i)
    }

    pub fn eps_big(&self) -> Vec<FieldElement> {
        self.eps.iter().map(|&c| self.embedding.map(c)).collect()
    }
}

fn node_points(l: &FiniteField, i: FieldElement) -> [[FieldElement; 4]; 6] {
    let (o, z, m1) = (l.one(), l.zero(), l.from_i64(-1));
    let mi = l.neg(i);
    [[o, o, o, o], [m1, m1, o, o], [i, i, m1, o], [mi, mi, m1, o], [o, z, z, z], [z, o, z, z]]
}

pub fn validate_genus4(input: &Genus4Input, limit: u64) -> Result<Genus4, Vec<Genus4Error>> {
    let field = field_of_order(input.q, limit).map_err(|_| vec![Genus4Error::BadField { q: input.q }])?;
    let p = field.characteristic();
    let mut errs = Vec::new();
    if p < 5 {
        errs.push(Genus4Error::CharTooSmall { p });
    }
    if input.eps.len() != 20 {
        errs.push(Genus4Error::EpsWrongLength { len: input.eps.len() });
    }
    if input.r == 0 || input.r % p == 0 {
        errs.push(Genus4Error::BadR { r: input.r, p });
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    let x2p1 = Poly::from_ints(&field, &[1, 0, 1]);
    let (embedding, i, i_in_k) = match x2p1.roots().ok().and_then(|r| r.first().copied()) {
        Some(i) => (Embedding::new(&field, &field).expect("identity"), i, true),
        None => {
            let big = field.extension(2).map_err(|_| vec![Genus4Error::BadField { q: input.q }])?;
            let emb = Embedding::new(&field, &big).expect("degree 2 extension");
            let i = emb.map_poly(&x2p1).roots().expect("nonzero")[0];
            (emb, i, false)
        }
    };
    let eps: Vec<FieldElement> = input.eps.iter().map(|&c| field.from_i64(c)).collect();
    let l = embedding.big().clone();
    let eb: Vec<FieldElement> = eps.iter().map(|&c| embedding.map(c)).collect();
    let at: Vec<FieldElement> = node_points(&l, i).iter().map(|&pt| eval_cubic(&l, &eb, pt)).collect();
    for (v, label) in at.iter().zip(node_labels()) {
        if l.is_zero(*v) {
            errs.push(Genus4Error::EpsVanishesAtNode { node: label.to_string() });
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    let values = NodeValues { e1111: at[0], em: at[1], eip: at[2], eim: at[3], e1000: at[4], e0100: at[5] };
    Ok(Genus4 { input: input.clone(), field, embedding, i, i_in_k, eps, values })
}

pub const TABLE_ROWS: [&str; 8] = [
    "X+Y",
    "Z-W",
    "Z+W",
    "(Z-W)/(Z+W)",
    "(X+Y)/(Z+W)",
    "(Z-W)/(X+Y)",
    "(Z^2-W^2)/(X+Y)",
    "(Z+W)^2/(Z-W)",
];

/// `γ_j(div f)` for the eight functions of [`TABLE_ROWS`] and the loops `γ_1..γ_4`,
/// as elements of `L`.
pub fn closed_form_table(c: &Genus4) -> [[FieldElement; 4]; 8] {
    let l = c.big();
    let v = c.values;
    let col3 = |i: FieldElement, eip: FieldElement| third_column(l, v, i, eip);
    let g3 = col3(c.i, v.eip);
    let g4 = col3(l.neg(c.i), v.eim);
    let d = |a, b| l.div(a, b).expect("ε is nonzero at the nodes");
    let m1 = l.from_i64(-1);
    let a = l.neg(d(v.e1111, v.em));
    let b = d(v.e1000, v.e0100);
    let g1 = [m1, a, l.one(), a, m1, d(v.e1111, v.em), d(v.e1111, v.em), l.neg(d(v.em, v.e1111))];
    let g2 = [
        m1,
        b,
        l.neg(d(v.e0100, v.e1000)),
        l.neg(d(l.pow(v.e1000, 2), l.pow(v.e0100, 2))),
        b,
        l.neg(b),
        l.one(),
        d(l.pow(v.e0100, 3), l.pow(v.e1000, 3)),
    ];
    std::array::from_fn(|row| [g1[row], g2[row], g3[row], g4[row]])
}

fn third_column(l: &FiniteField, v: NodeValues, i: FieldElement, eip: FieldElement) -> [FieldElement; 8] {
    let d = |a, b| l.div(a, b).expect("ε is nonzero at the nodes");
    let e02 = l.pow(v.e0100, 2);
    [
        l.neg(i),
        d(v.e1111, v.e0100),
        d(l.mul(i, v.e0100), eip),
        l.neg(d(l.mul(l.mul(i, v.e1111), eip), e02)),
        l.neg(d(eip, v.e0100)),
        d(l.mul(i, v.e1111), v.e0100),
        l.neg(d(v.e1111, eip)),
        l.neg(d(l.pow(v.e0100, 3), l.mul(l.pow(eip, 2), v.e1111))),
    ]
}

/// A table row pushed down to `k`: all four entries when `i ∈ k`, otherwise
/// `(γ_1, γ_2, Nm γ_3)`.
pub fn row_over_k(c: &Genus4, row: &[FieldElement; 4]) -> Vec<FieldElement> {
    if c.i_in_k {
        return row.to_vec();
    }
    let e = &c.embedding;
    vec![
        e.preimage(row[0]).expect("rational entry"),
        e.preimage(row[1]).expect("rational entry"),
        e.norm(row[2]),
    ]
}

fn is_rth_power(f: &FiniteField, x: FieldElement, r: u64) -> bool {
    let n = f.order() - 1;
    f.pow(x, n / crate::arith::gcd(r, n)) == f.one()
}

/// Whether every loop value of the row is an `r`-th power in its own field.
fn row_in_powers(c: &Genus4, row: &[FieldElement; 4], r: u64) -> bool {
    if c.i_in_k {
        row.iter().all(|&x| is_rth_power(&c.field, x, r))
    } else {
        class_group_order(&c.field, &row_over_k(c, row)[..2], r) == 1 && is_rth_power(c.big(), row[2], r)
    }
}

/// Rows tested for a rational theta characteristic.
pub const THETA_ROWS: [usize; 4] = [0, 1, 2, 6];
/// Rows tested for a rational cube root of the canonical class.
pub const CUBE_ROWS: [usize; 3] = [1, 2, 7];

pub fn theta_genus4(c: &Genus4) -> Verdict {
    let t = closed_form_table(c);
    Verdict::from_bool(THETA_ROWS.iter().any(|&j| row_in_powers(c, &t[j], 2)))
}

/// Cube root criterion, testing the rows over their natural fields. For `i ∉ k` and
/// `3 ∤ q - 1` the `Z - W` row always passes.
pub fn cuberoot_genus4(c: &Genus4) -> Verdict {
    let t = closed_form_table(c);
    Verdict::from_bool(CUBE_ROWS.iter().any(|&j| row_in_powers(c, &t[j], 3)))
}

/// The criterion as originally stated: for `i ∉ k` and `3 ∤ q - 1` it asks for
/// `ε(i,i,-1,1)^((q^2-1)/3) = 1`.
pub fn cuberoot_literal(c: &Genus4) -> Verdict {
    let q = c.q();
    if !c.i_in_k && q % 3 != 1 {
        let l = c.big();
        return Verdict::from_bool(l.pow(c.values.eip, (q * q - 1) / 3) == l.one());
    }
    cuberoot_genus4(c)
}

/// Invariant factors of `J(K)(p')` from the closed form.
pub fn torsion_genus4(c: &Genus4) -> Vec<u64> {
    let q = c.q();
    let k = &c.field;
    let t = closed_form_table(c);
    let h1 = row_over_k(c, &t[3]);
    let h2 = row_over_k(c, &t[4]);
    let h3 = row_over_k(c, &t[5]);
    let h3_square = class_group_order(k, &h3, 2) == 1;
    if c.i_in_k {
        let a1 = class_group_order(k, &h1, 6);
        let a0 = 6 / a1;
        let (b0, b1) = if h3_square {
            (2, 1)
        } else {
            let b1 = class_group_order(k, &h2, 2);
            (2 / b1, b1)
        };
        normalize_cyclic(&[a0, b0, a1 * (q - 1), b1 * (q - 1), q - 1, q - 1])
    } else {
        let (a0, a1) = if h3_square { (2, 1) } else { (1, 2) };
        let l = c.big();
        let c0 = if q % 3 == 1 {
            if class_group_order(k, &h1, 3) == 1 { 3 } else { 1 }
        } else if l.pow(c.values.eip, (q * q - 1) / 3) == l.one() {
            3
        } else {
            1
        };
        let c3 = 3 / c0;
        let (b1, b3) = if class_group_order(k, &[c.embedding.norm(c.values.eip)], 2) == 1 { (2, 1) } else { (1, 2) };
        normalize_cyclic(&[a0, c0, a1 * (q - 1), b1 * (q - 1), b3 * c3 * (q * q - 1)])
    }
}

/// `x^3 ε̄(x, 1/x, 1, 1)`: the hyperplane `Z = W` cut out on `C_ZW`.
pub fn h_zw(c: &Genus4) -> Poly {
    affine_cubic(c, false)
}

/// `x^3 ε̄(x, -1/x, -1, 1)` on `C_-ZW`.
pub fn h_mzw(c: &Genus4) -> Poly {
    affine_cubic(c, true)
}

fn affine_cubic(c: &Genus4, minus: bool) -> Poly {
    let k = &c.field;
    let mut coeffs = vec![k.zero(); 7];
    for (m, &e) in cubic_monomials().iter().zip(&c.eps) {
        let [a, b, cc, _] = *m;
        let idx = (3 + a - b) as usize;
        let v = if minus && (b + cc) % 2 == 1 { k.neg(e) } else { e };
        coeffs[idx] = k.add(coeffs[idx], v);
    }
    Poly::new(k, coeffs)
}

pub fn div_x_plus_y(c: &Genus4) -> SpecializedDivisor {
    let k = &c.field;
    SpecializedDivisor::point(XY, k.zero(), 1)
        .add(&SpecializedDivisor::infinity(XY, 1))
        .add(&SpecializedDivisor::zero_set(ZW, &Poly::from_ints(k, &[1, 0, 1]), 1))
        .add(&SpecializedDivisor::zero_set(MZW, &Poly::from_ints(k, &[-1, 0, 1]), 1))
}

pub fn div_z_minus_w(c: &Genus4) -> SpecializedDivisor {
    SpecializedDivisor::zero_set(ZW, &h_zw(c), 1)
}

pub fn div_z_plus_w(c: &Genus4) -> SpecializedDivisor {
    SpecializedDivisor::zero_set(MZW, &h_mzw(c), 1)
}

/// The specialized divisor of each [`TABLE_ROWS`] function.
pub fn row_divisor(c: &Genus4, row: usize) -> SpecializedDivisor {
    let (a, b, z) = (div_x_plus_y(c), div_z_minus_w(c), div_z_plus_w(c));
    match row {
        0 => a,
        1 => b,
        2 => z,
        3 => b.add(&z.neg()),
        4 => a.add(&z.neg()),
        5 => b.add(&a.neg()),
        6 => b.add(&z).add(&a.neg()),
        7 => z.scale(2).add(&b.neg()),
        _ => panic!("table has eight rows"),
    }
}

/// A hyperplane section: `div(X + Y)` for `r = 2`, `div(Z - W)` otherwise.
pub fn canonical_divisor(c: &Genus4, r: u64) -> SpecializedDivisor {
    if r == 2 {
        div_x_plus_y(c)
    } else {
        div_z_minus_w(c)
    }
}

/// The loops `γ_1..γ_4` as edge vectors.
pub fn loops() -> [Cycle; 4] {
    [
        Cycle(vec![1, -1, 0, 0, 0, 0]),
        Cycle(vec![0, 0, 0, 0, -1, 1]),
        Cycle(vec![1, 0, -1, 0, 0, 1]),
        Cycle(vec![1, 0, 0, -1, 0, 1]),
    ]
}

pub fn genus4_graph(i_in_k: bool) -> DualGraph {
    let e = |tail, head, label: &str| Edge { tail, head, label: label.to_string() };
    let labels = node_labels();
    let edges = vec![
        e(XY, ZW, labels[0]),
        e(XY, ZW, labels[1]),
        e(XY, MZW, labels[2]),
        e(XY, MZW, labels[3]),
        e(ZW, MZW, labels[4]),
        e(ZW, MZW, labels[5]),
    ];
    let edge_perm = if i_in_k { vec![0, 1, 2, 3, 4, 5] } else { vec![0, 1, 3, 2, 4, 5] };
    DualGraph::new(
        vec!["C_XY".into(), "C_ZW".into(), "C_-ZW".into()],
        edges,
        Some(GaloisAction { vertex_perm: vec![0, 1, 2], edge_perm }),
    )
    .expect("valid graph")
}

pub fn genus4_model(c: &Genus4) -> Result<FiberModel, FamilyError> {
    let k = &c.field;
    let q = c.q();
    let graph = genus4_graph(c.i_in_k);
    let h1 = h1_basis(&graph).map_err(crate::descent::DescentError::from)?;
    let ls = loops();
    let (labels, ranks): (Vec<&str>, Vec<usize>) = if c.i_in_k {
        (vec!["gamma1", "gamma2", "gamma3", "gamma4"], vec![1, 1, 1, 1])
    } else {
        (vec!["gamma1", "gamma2", "gamma3"], vec![1, 1, 2])
    };
    let decomposition = PrincipalDecomposition {
        components: ranks
            .iter()
            .enumerate()
            .map(|(j, &rank)| PrincipalComponent { chi: h1.coordinates(&ls[j]), rank })
            .collect(),
    };
    let polys = component_polynomials(&h1.lattice, &decomposition).map_err(crate::descent::DescentError::from)?;
    let phi = component_group(&IntersectionMatrix(vec![vec![-4, 2, 2], vec![2, -4, 2], vec![2, 2, -4]]))
        .map_err(crate::descent::DescentError::from)?;
    let identity = Embedding::new(k, k)?;
    let mut charts = Vec::new();
    for (j, f) in polys.iter().enumerate() {
        let emb = if ranks[j] == 2 { c.embedding.clone() } else { identity.clone() };
        let w = emb.big().clone();
        let fin = |x: FieldElement| Some([Coord::Finite(x); 2]);
        let i_w = if ranks[j] == 2 || c.i_in_k { Some(c.i) } else { None };
        let nodes = vec![
            fin(w.one()),
            fin(w.from_i64(-1)),
            i_w.and_then(|i| fin(i)),
            i_w.and_then(|i| fin(w.neg(i))),
            Some([Coord::Infinity; 2]),
            fin(w.zero()),
        ];
        let order = eval_int_poly(f, q as i128) as u64;
        let mu = MuGroup::within(&w, order).map_err(crate::descent::DescentError::from)?;
        charts.push(CycleChart { label: labels[j].to_string(), cycle: ls[j].clone(), embedding: emb, mu, nodes });
    }
    let loci = vec![
        NodeLocus { finite: Poly::from_ints(k, &[-1, 0, 0, 0, 1]), infinity: false },
        NodeLocus { finite: Poly::from_ints(k, &[0, -1, 0, 1]), infinity: true },
        NodeLocus { finite: Poly::from_ints(k, &[0, 1, 0, 1]), infinity: true },
    ];
    let (a, b, z) = (div_x_plus_y(c), div_z_minus_w(c), div_z_plus_w(c));
    let principal = vec![b.add(&z.neg()), a.add(&z.neg())];
    Ok(FiberModel::new(k.clone(), graph, h1, decomposition, phi, loci, charts, principal)?)
}

pub fn theta_engine(c: &Genus4) -> Result<Verdict, FamilyError> {
    let model = genus4_model(c)?;
    let v = divisibility_verdict(&model, &canonical_divisor(c, 2), 2)?;
    Ok(Verdict::from_bool(v.as_bool().unwrap_or(false)))
}

pub fn cuberoot_engine(c: &Genus4) -> Result<Verdict, FamilyError> {
    let model = genus4_model(c)?;
    let v = divisibility_verdict(&model, &canonical_divisor(c, 3), 3)?;
    Ok(Verdict::from_bool(v.as_bool().unwrap_or(false)))
}

pub fn torsion_engine(c: &Genus4) -> Result<Vec<u64>, FamilyError> {
    Ok(torsion_structure(&genus4_model(c)?)?)
}

/// The `L`-coordinates of the node values, for reports.
pub fn node_value_list(c: &Genus4) -> Vec<(&'static str, FieldElement)> {
    let v = c.values;
    vec![
        ("[1:1:1:1]", v.e1111),
        ("[-1:-1:1:1]", v.em),
        ("[i:i:-1:1]", v.eip),
        ("[-i:-i:-1:1]", v.eim),
        ("[1:0:0:0]", v.e1000),
        ("[0:1:0:0]", v.e0100),
    ]
}
