//! Tori over finite fields through their character lattices.
//!
//! Convention: the Frobenius matrix acts on column vectors, `chi -> F chi`, and a
//! rational point `x` satisfies `x(F chi) = x(chi)^q`. Points are stored as log vectors
//! `a` in `(Z/N)^g`, `N = q^s - 1`, with `x(e_j) = zeta^{a_j}` for a fixed generator
//! `zeta` of `GF(q^s)^x`; equivariance reads `F^T a = q a (mod N)`.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::finite_field::{FieldElement, FieldError, FiniteField};
use crate::linalg::{self, LinalgError, Mat};

pub const MAX_FROBENIUS_ORDER: u32 = 64;
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TorusError {
    #[error("Frobenius matrix is not square of size {0}")]
    Shape(usize),
    #[error("Frobenius matrix has determinant {0}, expected +-1")]
    NotInvertible(i128),
    #[error("Frobenius matrix has no finite order up to {MAX_FROBENIUS_ORDER}")]
    InfiniteOrder,
    #[error("orbit of the component generator does not span a principal summand")]
    NotPrincipal,
    #[error("torus has {0} rational points, above the enumeration limit")]
    EnumerationLimitExceeded(u64),
    #[error("order {0} is not coprime to q")]
    NotCoprime(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Free Z-module of rank `g` with a Frobenius matrix of finite order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeFixture", into = "LatticeFixture")]
pub struct CharacterLattice {
    pub rank: usize,
    /// Row-major `g x g` integer matrix.
    pub frobenius: Vec<Vec<i64>>,
    pub label: String,
    order: u32,
}

#[derive(Serialize, Deserialize)]
struct LatticeFixture {
    #[serde(default)]
    rank: usize,
    frobenius: Vec<Vec<i64>>,
    #[serde(default)]
    label: String,
}

impl TryFrom<LatticeFixture> for CharacterLattice {
    type Error = TorusError;
    fn try_from(f: LatticeFixture) -> Result<Self, TorusError> {
        CharacterLattice::new(f.frobenius, f.label)
    }
}

impl From<CharacterLattice> for LatticeFixture {
    fn from(l: CharacterLattice) -> Self {
        LatticeFixture { rank: l.rank, frobenius: l.frobenius, label: l.label }
    }
}

impl CharacterLattice {
    pub fn new(frobenius: Vec<Vec<i64>>, label: impl Into<String>) -> Result<Self, TorusError> {
        let g = frobenius.len();
        if frobenius.iter().any(|r| r.len() != g) {
            return Err(TorusError::Shape(g));
        }
        let f = linalg::from_i64(&frobenius);
        let d = linalg::det(&f)?;
        if d.abs() != 1 && g > 0 {
            return Err(TorusError::NotInvertible(d));
        }
        let id = linalg::identity(g);
        let mut pw = f.clone();
        let mut order = 1;
        while pw != id {
            order += 1;
            if order > MAX_FROBENIUS_ORDER {
                return Err(TorusError::InfiniteOrder);
            }
            pw = linalg::mul(&pw, &f)?;
        }
        Ok(CharacterLattice { rank: g, frobenius, label: label.into(), order })
    }

    /// Split torus `G_m^g`.
    pub fn split(g: usize) -> Self {
        let f = (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(f, format!("split rank {g}")).expect("identity is valid")
    }

    /// Restriction of scalars of `G_m` from the degree-`g` extension: companion of `x^g - 1`.
    pub fn norm_torus(g: usize) -> Self {
        let f = (0..g).map(|i| (0..g).map(|j| i64::from(i == (j + 1) % g)).collect()).collect();
        Self::new(f, format!("norm torus degree {g}")).expect("cyclic permutation is valid")
    }

    /// Rank `d - 1` lattice with characteristic polynomial `1 + x + ... + x^{d-1}`.
    pub fn cyclotomic_quotient(d: usize) -> Self {
        let g = d - 1;
        let mut f = vec![vec![0i64; g]; g];
        for (j, col) in (0..g).enumerate() {
            if j + 1 < g {
                f[j + 1][col] = 1;
            } else {
                for row in f.iter_mut() {
                    row[col] = -1;
                }
            }
        }
        Self::new(f, format!("cyclotomic quotient of degree {d}")).expect("companion is valid")
    }

    /// Order of the Frobenius matrix.
    pub fn frobenius_order(&self) -> u32 {
        self.order
    }

    pub fn matrix(&self) -> Mat {
        linalg::from_i64(&self.frobenius)
    }

    /// `F chi`.
    pub fn apply(&self, chi: &[i64]) -> Vec<i64> {
        self.frobenius.iter().map(|r| r.iter().zip(chi).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Characteristic polynomial of the Frobenius matrix, integer coefficients low-to-high, monic.
pub fn frobenius_char_poly(lattice: &CharacterLattice) -> Vec<i64> {
    char_poly(&lattice.matrix())
}

/// Faddeev-LeVerrier in exact integer arithmetic.
pub fn char_poly(a: &Mat) -> Vec<i64> {
    let n = a.len();
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = linalg::mul(a, &m).expect("small matrix");
        for i in 0..n {
            next[i][i] += c[n - k + 1];
        }
        m = next;
        let am = linalg::mul(a, &m).expect("small matrix");
        let tr: i128 = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -tr / k as i128;
    }
    c.into_iter().map(|x| x as i64).collect()
}

pub fn eval_int_poly(f: &[i64], x: i128) -> i128 {
    f.iter().rev().fold(0i128, |acc, &c| acc * x + c as i128)
}

/// `#T(k) = f(q)`.
pub fn torus_order(lattice: &CharacterLattice, q: u64) -> u64 {
    let v = eval_int_poly(&frobenius_char_poly(lattice), q as i128);
    debug_assert!(v > 0);
    v as u64
}

/// One summand of a principal decomposition: the Z-span of the orbit of `chi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalComponent {
    pub chi: Vec<i64>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalDecomposition {
    pub components: Vec<PrincipalComponent>,
}

impl PrincipalDecomposition {
    /// Columns `F^j chi_i`, `j < g_i`, component by component.
    pub fn orbit_matrix(&self, lattice: &CharacterLattice) -> Vec<Vec<i64>> {
        let mut cols = Vec::new();
        for c in &self.components {
            let mut v = c.chi.clone();
            for _ in 0..c.rank {
                cols.push(v.clone());
                v = lattice.apply(&v);
            }
        }
        // return row-major
        (0..lattice.rank).map(|i| cols.iter().map(|col| col[i]).collect()).collect()
    }
}

/// Whether the orbits form a Z-basis; the certificate is the orbit matrix.
pub fn verify_principal_decomposition(
    lattice: &CharacterLattice,
    decomposition: &PrincipalDecomposition,
) -> (bool, Vec<Vec<i64>>) {
    let total: usize = decomposition.components.iter().map(|c| c.rank).sum();
    let m = decomposition.orbit_matrix(lattice);
    if total != lattice.rank || decomposition.components.iter().any(|c| c.chi.len() != lattice.rank) {
        return (false, m);
    }
    let ok = matches!(linalg::det(&linalg::from_i64(&m)), Ok(d) if d.abs() == 1);
    (ok, m)
}

/// Searches for a principal decomposition generated by standard basis vectors,
/// taking each orbit up to its first linear dependence.
pub fn find_principal_decomposition(lattice: &CharacterLattice) -> Option<PrincipalDecomposition> {
    let g = lattice.rank;
    let rank_of = |vs: &[Vec<i64>]| -> usize {
        if vs.is_empty() {
            return 0;
        }
        linalg::smith(&vs.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect()).map_or(0, |s| s.rank())
    };
    let mut span: Vec<Vec<i64>> = Vec::new();
    let mut components = Vec::new();
    for j in 0..g {
        let e: Vec<i64> = (0..g).map(|i| i64::from(i == j)).collect();
        let mut trial = span.clone();
        trial.push(e.clone());
        if rank_of(&trial) == span.len() {
            continue;
        }
        let mut v = e.clone();
        let mut rank = 0;
        loop {
            let mut t = span.clone();
            t.push(v.clone());
            if rank_of(&t) == span.len() {
                break;
            }
            span = t;
            rank += 1;
            v = lattice.apply(&v);
        }
        components.push(PrincipalComponent { chi: e, rank });
    }
    let dec = PrincipalDecomposition { components };
    verify_principal_decomposition(lattice, &dec).0.then_some(dec)
}

/// Minimal polynomials `f_i` of the component generators, monic, low-to-high.
pub fn component_polynomials(
    lattice: &CharacterLattice,
    decomposition: &PrincipalDecomposition,
) -> Result<Vec<Vec<i64>>, TorusError> {
    let (ok, m) = verify_principal_decomposition(lattice, decomposition);
    if !ok {
        return Err(TorusError::NotPrincipal);
    }
    let inv = linalg::inverse_unimodular(&linalg::from_i64(&m))?;
    let mut out = Vec::new();
    let mut offset = 0;
    for c in &decomposition.components {
        let mut v = c.chi.clone();
        for _ in 0..c.rank {
            v = lattice.apply(&v);
        }
        let coords = linalg::mul_vec(&inv, &v.iter().map(|&x| x as i128).collect::<Vec<_>>())?;
        for (j, &x) in coords.iter().enumerate() {
            if (j < offset || j >= offset + c.rank) && x != 0 {
                return Err(TorusError::NotPrincipal);
            }
        }
        // F^g chi = sum a_j F^j chi  =>  f = x^g - sum a_j x^j
        let mut f: Vec<i64> = coords[offset..offset + c.rank].iter().map(|&x| -(x as i64)).collect();
        f.push(1);
        out.push(f);
        offset += c.rank;
    }
    Ok(out)
}

/// The cyclic group `mu_n` inside a host field; elements are handled through logs.
#[derive(Debug, Clone)]
pub struct MuGroup {
    pub order: u64,
    pub host: FiniteField,
    pub generator: FieldElement,
}

impl MuGroup {
    /// `mu_n` in the smallest extension `GF(q^s)` of `base` containing it.
    pub fn new(base: &FiniteField, n: u64) -> Result<Self, TorusError> {
        let q = base.order();
        if arith::gcd(n, q) != 1 {
            return Err(TorusError::NotCoprime(n));
        }
        let s = arith::mult_order(q % n.max(1), n) as u32;
        let host = base.extension(s)?;
        Self::within(&host, n)
    }

    /// `mu_n` inside a given field; requires `n | #field - 1`.
    pub fn within(field: &FiniteField, n: u64) -> Result<Self, TorusError> {
        let generator = field.element_of_order(n).ok_or(TorusError::NotCoprime(n))?;
        Ok(MuGroup { order: n, host: field.clone(), generator })
    }

    pub fn log(&self, x: FieldElement) -> Option<u64> {
        self.host.discrete_log(self.generator, self.order, x)
    }

    pub fn element(&self, log: u64) -> FieldElement {
        self.host.pow(self.generator, log % self.order)
    }

    /// Whether the element with the given log lies in `r mu_n`.
    pub fn is_rth_power_log(&self, log: u64, r: u64) -> bool {
        log % arith::gcd(r, self.order) == 0
    }

    /// Log of the class in `mu_n / r mu_n`, a value in `0..gcd(r, n)`.
    pub fn class_mod_r(&self, log: u64, r: u64) -> u64 {
        log % arith::gcd(r, self.order)
    }
}

/// `mu(T_i)` for one principal component.
pub fn mu_group(
    lattice: &CharacterLattice,
    decomposition: &PrincipalDecomposition,
    index: usize,
    base: &FiniteField,
) -> Result<MuGroup, TorusError> {
    let polys = component_polynomials(lattice, decomposition)?;
    let f = polys.get(index).ok_or(TorusError::NotPrincipal)?;
    MuGroup::new(base, eval_int_poly(f, base.order() as i128) as u64)
}

/// `T(k)` as log vectors with respect to a generator of `GF(q^s)^x`.
#[derive(Debug, Clone)]
pub struct RationalPoints {
    pub host: FiniteField,
    pub zeta: FieldElement,
    pub modulus: u64,
    pub points: Vec<Vec<u64>>,
    pub invariant_factors: Vec<u64>,
}

impl RationalPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    /// Log of `x(chi)`.
    pub fn log_at(&self, point: &[u64], chi: &[i64]) -> u64 {
        let n = self.modulus as i128;
        let s: i128 = point.iter().zip(chi).map(|(&a, &c)| a as i128 * c as i128).sum();
        s.rem_euclid(n) as u64
    }
    pub fn value_at(&self, point: &[u64], chi: &[i64]) -> FieldElement {
        self.host.pow(self.zeta, self.log_at(point, chi))
    }
}

pub fn enumerate_rational_points(
    lattice: &CharacterLattice,
    base: &FiniteField,
) -> Result<RationalPoints, TorusError> {
    let q = base.order();
    let size = torus_order(lattice, q);
    if size > ENUMERATION_LIMIT {
        return Err(TorusError::EnumerationLimitExceeded(size));
    }
    let s = lattice.frobenius_order();
    let host = base.extension(s)?;
    let n = host.order() - 1;
    let zeta = host.primitive_element();
    let g = lattice.rank;
    let mut a = linalg::transpose(&lattice.matrix());
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= q as i128;
    }
    let gens = if g == 0 { Vec::new() } else { linalg::kernel_mod(&a, n as i128)? };
    let mut points = vec![vec![0u64; g]];
    for (gen, order) in &gens {
        let mut next = Vec::with_capacity(points.len() * *order as usize);
        for p in &points {
            for k in 0..*order {
                next.push(
                    p.iter()
                        .zip(gen)
                        .map(|(&x, &y)| ((x as i128 + k * y).rem_euclid(n as i128)) as u64)
                        .collect(),
                );
            }
        }
        points = next;
    }
    let orders: Vec<u64> = gens.iter().map(|g| g.1 as u64).collect();
    Ok(RationalPoints {
        host,
        zeta,
        modulus: n,
        points,
        invariant_factors: linalg::normalize_cyclic(&orders),
    })
}

/// Checks that `x -> (chi_i(x))_i` is injective on the points and lands in
/// `mu_{f_1(q)} + ... + mu_{f_c(q)}` with matching cardinality.
pub fn check_mu_isomorphism(
    lattice: &CharacterLattice,
    decomposition: &PrincipalDecomposition,
    points: &RationalPoints,
    q: u64,
) -> Result<bool, TorusError> {
    let polys = component_polynomials(lattice, decomposition)?;
    let orders: Vec<u64> = polys.iter().map(|f| eval_int_poly(f, q as i128) as u64).collect();
    let expected: u64 = orders.iter().product();
    if expected != points.len() as u64 {
        return Ok(false);
    }
    let mut seen = std::collections::HashSet::with_capacity(points.len());
    for p in &points.points {
        let image: Vec<u64> = decomposition.components.iter().map(|c| points.log_at(p, &c.chi)).collect();
        for (l, &o) in image.iter().zip(&orders) {
            // element of order dividing o: log * o = 0 mod N
            if (*l as u128 * o as u128) % points.modulus as u128 != 0 {
                return Ok(false);
            }
        }
        if !seen.insert(image) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::make_field;

    #[test]
    fn char_poly_examples() {
        assert_eq!(frobenius_char_poly(&CharacterLattice::split(1)), vec![-1, 1]);
        assert_eq!(frobenius_char_poly(&CharacterLattice::norm_torus(3)), vec![-1, 0, 0, 1]);
        let b3 = CharacterLattice::new(vec![vec![0, -1], vec![1, -1]], "").unwrap();
        assert_eq!(frobenius_char_poly(&b3), vec![1, 1, 1]);
        assert_eq!(frobenius_char_poly(&CharacterLattice::cyclotomic_quotient(3)), vec![1, 1, 1]);
    }

    #[test]
    fn orders() {
        assert_eq!(torus_order(&CharacterLattice::split(4), 5), 256);
        assert_eq!(torus_order(&CharacterLattice::norm_torus(2), 3), 8);
        let b3 = CharacterLattice::new(vec![vec![0, -1], vec![1, -1]], "").unwrap();
        assert_eq!(torus_order(&b3, 7), 57);
    }

    #[test]
    fn invalid_matrices() {
        assert!(matches!(CharacterLattice::new(vec![vec![2]], ""), Err(TorusError::NotInvertible(2))));
        assert!(matches!(
            CharacterLattice::new(vec![vec![1, 1], vec![0, 1]], ""),
            Err(TorusError::InfiniteOrder)
        ));
    }

    #[test]
    fn mu_examples() {
        let f7 = make_field(7, 1).unwrap();
        let split = CharacterLattice::split(1);
        let dec = PrincipalDecomposition { components: vec![PrincipalComponent { chi: vec![1], rank: 1 }] };
        let mu = mu_group(&split, &dec, 0, &f7).unwrap();
        assert_eq!((mu.order, mu.host.order()), (6, 7));

        let f3 = make_field(3, 1).unwrap();
        let nt = CharacterLattice::norm_torus(2);
        let dec = PrincipalDecomposition { components: vec![PrincipalComponent { chi: vec![1, 0], rank: 2 }] };
        let mu = mu_group(&nt, &dec, 0, &f3).unwrap();
        assert_eq!((mu.order, mu.host.order()), (8, 9));

        let f2 = make_field(2, 1).unwrap();
        let b3 = CharacterLattice::new(vec![vec![0, -1], vec![1, -1]], "").unwrap();
        let mu = mu_group(&b3, &dec, 0, &f2).unwrap();
        assert_eq!((mu.order, mu.host.order()), (7, 8));
        assert_eq!(mu.host.element_order(mu.generator).unwrap(), 7);
    }

    #[test]
    fn decomposition_examples() {
        let split = CharacterLattice::split(2);
        let dec = PrincipalDecomposition {
            components: vec![
                PrincipalComponent { chi: vec![1, 0], rank: 1 },
                PrincipalComponent { chi: vec![0, 1], rank: 1 },
            ],
        };
        assert!(verify_principal_decomposition(&split, &dec).0);
        let nt = CharacterLattice::norm_torus(2);
        let one = |chi: Vec<i64>| PrincipalDecomposition { components: vec![PrincipalComponent { chi, rank: 2 }] };
        let (ok, cert) = verify_principal_decomposition(&nt, &one(vec![1, 0]));
        assert!(ok);
        assert_eq!(cert, vec![vec![1, 0], vec![0, 1]]);
        assert!(!verify_principal_decomposition(&nt, &one(vec![2, 0])).0);
    }

    #[test]
    fn enumeration_matches_order() {
        let f5 = make_field(5, 1).unwrap();
        let pts = enumerate_rational_points(&CharacterLattice::split(1), &f5).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts.invariant_factors, vec![4]);
        let f3 = make_field(3, 1).unwrap();
        let pts = enumerate_rational_points(&CharacterLattice::norm_torus(2), &f3).unwrap();
        assert_eq!(pts.invariant_factors, vec![8]);
        let f2 = make_field(2, 1).unwrap();
        let b3 = CharacterLattice::cyclotomic_quotient(3);
        let pts = enumerate_rational_points(&b3, &f2).unwrap();
        assert_eq!(pts.invariant_factors, vec![7]);
    }
}
