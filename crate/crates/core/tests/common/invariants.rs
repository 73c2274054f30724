#![allow(dead_code)]
//! Invariant checks shared by the property tests and the acceptance run.

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{rngs::StdRng, Rng, SeedableRng};

use jacdesc::descent::{
    class_moduli, compute_nu, divisibility_verdict, divisibility_verdict_with, evaluate_all, gamma_class, nu_table,
    shift_into_div_r, CycleChart, FiberModel, SpecializedDivisor,
};
use jacdesc::dual_graph::{h1_basis, phi_torsion_representatives, Cycle, DualGraph, Edge};
use jacdesc::families::genus4::{genus4_model, validate_genus4, Genus4Input};
use jacdesc::families::hyperelliptic::{hyperelliptic_model, validate_hyperelliptic, HyperellipticInput};
use jacdesc::finite_field::DEFAULT_FIELD_LIMIT;
use jacdesc::linalg::{self, Mat};
use jacdesc::oracle::random_divisor;
use jacdesc::parse::{parse_cubic_form, parse_univariate};
use jacdesc::torus::{PrincipalComponent, PrincipalDecomposition};

pub const CASES: u32 = 500;

pub fn hyp(q: u64, g: &str, h: &str) -> FiberModel {
    let input = HyperellipticInput { q, g: parse_univariate(g).unwrap(), h: parse_univariate(h).unwrap(), r: 2 };
    let c = validate_hyperelliptic(&input, DEFAULT_FIELD_LIMIT).unwrap();
    hyperelliptic_model(&c).unwrap()
}

pub fn g4(q: u64, eps: &str) -> FiberModel {
    let c = validate_genus4(&Genus4Input { q, eps: parse_cubic_form(eps).unwrap(), r: 2 }, DEFAULT_FIELD_LIMIT).unwrap();
    genus4_model(&c).unwrap()
}

/// Split, one-root, irreducible and orbit-carrying fibers, plus two genus-4 fibers.
pub fn models() -> &'static [FiberModel] {
    static M: OnceLock<Vec<FiberModel>> = OnceLock::new();
    M.get_or_init(|| {
        vec![
            hyp(5, "x^3-x", "1"),
            hyp(7, "x^3-x", "x+2"),
            hyp(7, "x^3-2", "1"),
            hyp(11, "(x-1)*(x^2+1)", "x+3"),
            hyp(5, "x^4-1", "x^2+2"),
            hyp(7, "(x-1)*(x-2)*(x^2+1)", "1"),
            hyp(25, "x^3-x", "x+2"),
            g4(7, "X^3+2*Y^3+W*Z^2+Z^3"),
            g4(13, "X^3+Y^3+W*Z^2"),
        ]
    })
}

pub fn model(i: usize) -> &'static FiberModel {
    let m = models();
    &m[i % m.len()]
}

pub fn divisor(m: &FiberModel, seed: u64, zero_degree: bool) -> SpecializedDivisor {
    random_divisor(&mut StdRng::seed_from_u64(seed), m, zero_degree)
}

pub fn usable_r(m: &FiberModel, r: u64) -> bool {
    r % m.base.characteristic() != 0
}

/// The same fiber with the edges in `mask` reversed and, with `negate`, every chart
/// cycle replaced by its opposite.
pub fn flip(m: &FiberModel, mask: &[bool], negate: bool) -> FiberModel {
    let flipped = |e: usize| mask[e % mask.len()];
    let edges: Vec<Edge> = m
        .graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, x)| if flipped(e) { Edge { tail: x.head, head: x.tail, label: x.label.clone() } } else { x.clone() })
        .collect();
    let graph = DualGraph::new(m.graph.vertices.clone(), edges, Some(m.graph.galois.clone())).unwrap();
    let h1 = h1_basis(&graph).unwrap();
    let recycle =
        |c: &Cycle| Cycle(c.0.iter().enumerate().map(|(e, &x)| if flipped(e) { -x } else { x }).collect());
    let mut components = Vec::new();
    let mut charts = Vec::new();
    for (comp, chart) in m.decomposition.components.iter().zip(&m.charts) {
        let cycle = if negate { recycle(&chart.cycle).neg() } else { recycle(&chart.cycle) };
        components.push(PrincipalComponent { chi: h1.coordinates(&cycle), rank: comp.rank });
        let nodes = chart
            .nodes
            .iter()
            .enumerate()
            .map(|(e, n)| n.map(|[a, b]| if flipped(e) { [b, a] } else { [a, b] }))
            .collect();
        charts.push(CycleChart { cycle, nodes, ..chart.clone() });
    }
    FiberModel::new(
        m.base.clone(),
        graph,
        h1,
        PrincipalDecomposition { components },
        m.phi.clone(),
        m.loci.clone(),
        charts,
        m.principal.clone(),
    )
    .unwrap()
}

pub fn is_diagonal_chain(d: &Mat, diag: &[i128]) -> bool {
    let mut ok = true;
    for (i, row) in d.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            ok &= if i == j { x == diag[i] } else { x == 0 };
        }
    }
    ok && diag.iter().all(|&x| x >= 0) && diag.windows(2).all(|w| if w[0] == 0 { w[1] == 0 } else { w[1] % w[0] == 0 })
}

pub fn matrix() -> impl Strategy<Value = Mat> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-20i128..=20, c), r))
}


pub mod base_point_choice_does_not_change_values {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, u64, usize, u64)> {
        (0usize..64, any::<u64>(), 1usize..4, 2u64..8)
    }

    pub fn check((i, seed, rank, r): (usize, u64, usize, u64)) -> Result<(), TestCaseError> {
        let m = model(i);
        let d = divisor(m, seed, true);
        let reference = evaluate_all(m, &d, 0).unwrap();
        if let Ok(other) = evaluate_all(m, &d, rank) {
            prop_assert_eq!(&reference, &other);
        }
        prop_assume!(usable_r(m, r));
        let d = divisor(m, seed ^ 0x5a5a, false);
        let a = divisibility_verdict(m, &d, r).unwrap().as_bool();
        if let Ok(v) = divisibility_verdict_with(m, &d, r, rank) {
            prop_assert_eq!(a, v.as_bool());
        }
        if let Some(s) = shift_into_div_r(m, &d, r).unwrap() {
            if let Ok(other) = gamma_class(m, &s, r, rank) {
                prop_assert_eq!(gamma_class(m, &s, r, 0).unwrap(), other);
            }
        }
        Ok(())
    }
}

pub mod principal_divisors_are_divisible {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, Vec<i64>, u64)> {
        (0usize..64, prop::collection::vec(-4i64..=4, 1..4), 2u64..10)
    }

    pub fn check((i, coeffs, r): (usize, Vec<i64>, u64)) -> Result<(), TestCaseError> {
        let m = model(i);
        prop_assume!(usable_r(m, r));
        let n = m.component_count();
        let mut target = vec![0i64; n];
        for (row, &a) in m.intersection.0.iter().cycle().zip(&coeffs) {
            for (t, &x) in target.iter_mut().zip(row) {
                *t += a * x;
            }
        }
        let mut d = m.principal_with_degree(&target).unwrap();
        for (p, &a) in m.principal.iter().zip(coeffs.iter().rev()) {
            d = d.add(&p.scale(a));
        }
        prop_assert_eq!(divisibility_verdict(m, &d, r).unwrap().as_bool(), Some(true));
        Ok(())
    }
}

pub mod functions_of_x_evaluate_to_one {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, Vec<(u64, i64)>)> {
        (0usize..64, prop::collection::vec((0u64..1000, -3i64..=3), 1..5))
    }

    pub fn check((i, pts): (usize, Vec<(u64, i64)>)) -> Result<(), TestCaseError> {
        // on the two-component fibers both components carry the coordinate x
        let m = model(i);
        prop_assume!(m.component_count() == 2);
        let k = &m.base;
        let mut d = SpecializedDivisor::zero();
        for (a, e) in pts {
            let a = k.from_encoding(a % k.order()).unwrap();
            prop_assume!(!k.is_zero(m.loci[0].finite.eval(a)));
            for comp in 0..2 {
                d = d.add(&SpecializedDivisor::point(comp, a, e)).add(&SpecializedDivisor::infinity(comp, -e));
            }
        }
        for (v, chart) in evaluate_all(m, &d, 0).unwrap().into_iter().zip(&m.charts) {
            prop_assert_eq!(v, chart.field().one());
        }
        // same multidegree as div(y - g), same evaluation
        let p = &m.principal[0];
        prop_assert_eq!(evaluate_all(m, &p.add(&d), 0).unwrap(), evaluate_all(m, p, 0).unwrap());
        Ok(())
    }
}

pub mod adding_r_multiples_keeps_verdicts {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, u64, u64, u64)> {
        (0usize..64, any::<u64>(), any::<u64>(), 2u64..10)
    }

    pub fn check((i, s1, s2, r): (usize, u64, u64, u64)) -> Result<(), TestCaseError> {
        let m = model(i);
        prop_assume!(usable_r(m, r));
        let d = divisor(m, s1, false);
        let e = divisor(m, s2, false);
        prop_assert_eq!(
            divisibility_verdict(m, &d, r).unwrap().as_bool(),
            divisibility_verdict(m, &d.add(&e.scale(r as i64)), r).unwrap().as_bool()
        );
        Ok(())
    }
}

pub mod nu_is_additive {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, u64, usize, usize)> {
        (0usize..64, 2u64..13, 0usize..64, 0usize..64)
    }

    pub fn check((i, r, a, b): (usize, u64, usize, usize)) -> Result<(), TestCaseError> {
        let m = model(i);
        prop_assume!(usable_r(m, r));
        let rows = nu_table(m, r).unwrap();
        let moduli = class_moduli(m, r);
        let (x, y) = (&rows[a % rows.len()], &rows[b % rows.len()]);
        let sum = m.phi.add(&x.delta, &y.delta);
        let z = rows.iter().find(|row| row.delta == sum).expect("Φ[r] is closed under addition");
        for ((&cx, &cy), (&cz, &md)) in x.classes.iter().zip(&y.classes).zip(z.classes.iter().zip(&moduli)) {
            prop_assert_eq!((cx + cy) % md, cz % md);
        }
        // with f_{δ1} f_{δ2} as the function for δ1 + δ2
        let reps = phi_torsion_representatives(&m.phi, r);
        let (dx, dy) = (&reps[a % reps.len()], &reps[b % reps.len()]);
        let (fx, fy) = (m.f_delta(&dx.1, r).unwrap(), m.f_delta(&dy.1, r).unwrap());
        let deg: Vec<i64> = dx.1.iter().zip(&dy.1).map(|(u, v)| u + v).collect();
        let combined = compute_nu(m, &m.phi.add(&dx.0, &dy.0), &deg, &fx.add(&fy), r).unwrap();
        let (nx, ny) = (compute_nu(m, &dx.0, &dx.1, &fx, r).unwrap(), compute_nu(m, &dy.0, &dy.1, &fy, r).unwrap());
        for ((&cx, &cy), (&cz, &md)) in nx.classes.iter().zip(&ny.classes).zip(combined.classes.iter().zip(&moduli)) {
            prop_assert_eq!((cx + cy) % md, cz);
        }
        Ok(())
    }
}

pub mod evaluation_is_multiplicative {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, u64, u64, u64)> {
        (0usize..64, any::<u64>(), any::<u64>(), 2u64..13)
    }

    pub fn check((i, s1, s2, r): (usize, u64, u64, u64)) -> Result<(), TestCaseError> {
        let m = model(i);
        let (d1, d2) = (divisor(m, s1, true), divisor(m, s2, true));
        let (v1, v2, v12) = (
            evaluate_all(m, &d1, 0).unwrap(),
            evaluate_all(m, &d2, 0).unwrap(),
            evaluate_all(m, &d1.add(&d2), 0).unwrap(),
        );
        for (c, chart) in m.charts.iter().enumerate() {
            prop_assert_eq!(chart.field().mul(v1[c], v2[c]), v12[c]);
        }
        prop_assume!(usable_r(m, r));
        let (g1, g2, g12) =
            (gamma_class(m, &d1, r, 0).unwrap(), gamma_class(m, &d2, r, 0).unwrap(), gamma_class(m, &d1.add(&d2), r, 0).unwrap());
        for ((a, b), (c, md)) in g1.iter().zip(&g2).zip(g12.iter().zip(class_moduli(m, r))) {
            prop_assert_eq!((a + b) % md, *c);
        }
        Ok(())
    }
}

pub mod orientation_flip_keeps_verdicts {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, Vec<bool>, u64, u64)> {
        (0usize..64, prop::collection::vec(any::<bool>(), 1..8), any::<u64>(), 2u64..10)
    }

    pub fn check((i, mask, seed, r): (usize, Vec<bool>, u64, u64)) -> Result<(), TestCaseError> {
        let m = model(i);
        prop_assume!(usable_r(m, r));
        let f = flip(m, &mask, false);
        let d = divisor(m, seed, false);
        prop_assert_eq!(
            divisibility_verdict(m, &d, r).unwrap().as_bool(),
            divisibility_verdict(&f, &d, r).unwrap().as_bool()
        );
        let d0 = divisor(m, seed.rotate_left(17), true);
        prop_assert_eq!(evaluate_all(m, &d0, 0).unwrap(), evaluate_all(&f, &d0, 0).unwrap());
        Ok(())
    }
}

pub mod opposite_cycles_invert_values {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (usize, u64, u64)> {
        (0usize..64, any::<u64>(), 2u64..10)
    }

    pub fn check((i, seed, r): (usize, u64, u64)) -> Result<(), TestCaseError> {
        let m = model(i);
        prop_assume!(usable_r(m, r));
        let n = flip(m, &[false], true);
        let d0 = divisor(m, seed, true);
        for ((u, v), chart) in evaluate_all(m, &d0, 0).unwrap().into_iter().zip(evaluate_all(&n, &d0, 0).unwrap()).zip(&m.charts) {
            prop_assert_eq!(chart.field().mul(u, v), chart.field().one());
        }
        let d = divisor(m, !seed, false);
        prop_assert_eq!(divisibility_verdict(m, &d, r).unwrap().as_bool(), divisibility_verdict(&n, &d, r).unwrap().as_bool());
        Ok(())
    }
}

pub mod smith_certificates_hold {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = Mat> {
        matrix()
    }

    pub fn check(a: Mat) -> Result<(), TestCaseError> {
        let s = linalg::smith(&a).unwrap();
        prop_assert_eq!(linalg::det(&s.u).unwrap().abs(), 1);
        prop_assert_eq!(linalg::det(&s.v).unwrap().abs(), 1);
        let d = linalg::mul(&linalg::mul(&s.u, &a).unwrap(), &s.v).unwrap();
        prop_assert!(is_diagonal_chain(&d, &s.diag), "{:?} -> {:?}", a, d);
        Ok(())
    }
}

pub mod row_combinations_are_recovered {
    use super::*;

    pub fn strategy() -> impl Strategy<Value = (Mat, u64)> {
        (matrix(), any::<u64>())
    }

    pub fn check((a, seed): (Mat, u64)) -> Result<(), TestCaseError> {
        let mut rng = StdRng::seed_from_u64(seed);
        let y: Vec<i128> = (0..a.len()).map(|_| rng.gen_range(-5..=5)).collect();
        let x = linalg::vec_mul(&y, &a).unwrap();
        let z = linalg::solve_row_combination(&a, &x).unwrap().expect("x is in the row span");
        prop_assert_eq!(linalg::vec_mul(&z, &a).unwrap(), x.clone());
        // an arbitrary target: any solution returned must be exact
        let mut off = x.clone();
        off[0] += 1;
        if let Some(w) = linalg::solve_row_combination(&a, &off).unwrap() {
            prop_assert_eq!(linalg::vec_mul(&w, &a).unwrap(), off);
        }
        Ok(())
    }
}

fn run<S: Strategy>(cases: u32, strategy: S, check: fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new(config).run(&strategy, check).map_err(|e| e.to_string())
}

/// Every invariant with `cases` generated inputs each.
pub fn suite(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("base_point_choice_does_not_change_values", run(cases, base_point_choice_does_not_change_values::strategy(), base_point_choice_does_not_change_values::check)),
        ("principal_divisors_are_divisible", run(cases, principal_divisors_are_divisible::strategy(), principal_divisors_are_divisible::check)),
        ("functions_of_x_evaluate_to_one", run(cases, functions_of_x_evaluate_to_one::strategy(), functions_of_x_evaluate_to_one::check)),
        ("adding_r_multiples_keeps_verdicts", run(cases, adding_r_multiples_keeps_verdicts::strategy(), adding_r_multiples_keeps_verdicts::check)),
        ("nu_is_additive", run(cases, nu_is_additive::strategy(), nu_is_additive::check)),
        ("evaluation_is_multiplicative", run(cases, evaluation_is_multiplicative::strategy(), evaluation_is_multiplicative::check)),
        ("orientation_flip_keeps_verdicts", run(cases, orientation_flip_keeps_verdicts::strategy(), orientation_flip_keeps_verdicts::check)),
        ("opposite_cycles_invert_values", run(cases, opposite_cycles_invert_values::strategy(), opposite_cycles_invert_values::check)),
        ("smith_certificates_hold", run(cases, smith_certificates_hold::strategy(), smith_certificates_hold::check)),
        ("row_combinations_are_recovered", run(cases, row_combinations_are_recovered::strategy(), row_combinations_are_recovered::check)),
    ]
}
