//! Acceptance run: one line per criterion, then a single assertion over all of them.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, Rng, SeedableRng};

use jacdesc::arith::{is_prime, prime_power};
use jacdesc::descent::{divisibility_verdict, evaluate_all, DescentVerdict, SpecializedDivisor};
use jacdesc::dual_graph::{banana_graph, component_group, GraphError, IntersectionMatrix};
use jacdesc::families::genus4::{
    closed_form_table, cuberoot_engine, cuberoot_genus4, genus4_graph, validate_genus4, Genus4, Genus4Input,
};
use jacdesc::families::hyperelliptic::{
    hyperelliptic_model, theta_bd, theta_engine, torsion_bd, torsion_engine, validate_hyperelliptic, Hyperelliptic,
    HyperellipticInput, ReductionType,
};
use jacdesc::families::local_functions::direct_table;
use jacdesc::families::Verdict;
use jacdesc::finite_field::{FiniteField, DEFAULT_FIELD_LIMIT};
use jacdesc::oracle::{
    chain_evaluate, check_character_isomorphism, enumerate_torus, enumerate_torus_lattice, exhaustive_verdict_with,
    random_divisor,
};
use jacdesc::torus::{
    component_polynomials, eval_int_poly, find_principal_decomposition, torus_order, CharacterLattice,
};

const LIMIT: u64 = DEFAULT_FIELD_LIMIT;

struct Criterion {
    number: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> String,
}

fn curve(q: u64, g: &[i64], h: &[i64]) -> Hyperelliptic {
    validate_hyperelliptic(&HyperellipticInput { q, g: g.to_vec(), h: h.to_vec(), r: 2 }, LIMIT).unwrap()
}

fn random_genus4(rng: &mut StdRng, q: u64, r: u64) -> Genus4 {
    loop {
        let eps: Vec<i64> = (0..20).map(|_| rng.gen_range(0..q as i64)).collect();
        if let Ok(c) = validate_genus4(&Genus4Input { q, eps, r }, LIMIT) {
            return c;
        }
    }
}

fn component_groups() -> String {
    let phi = component_group(&IntersectionMatrix(vec![vec![-3, 3], vec![3, -3]])).unwrap();
    assert_eq!(phi.invariant_factors, vec![3]);
    for d in 3..=8usize {
        let m = banana_graph(d, (0..d).collect()).unwrap().intersection_matrix();
        let di = d as i64;
        assert_eq!(m, IntersectionMatrix(vec![vec![-di, di], vec![di, -di]]));
        assert_eq!(component_group(&m).unwrap().invariant_factors, vec![d as u64], "B_{d}");
    }
    let m = IntersectionMatrix(vec![vec![-4, 2, 2], vec![2, -4, 2], vec![2, 2, -4]]);
    assert_eq!(genus4_graph(true).intersection_matrix(), m);
    assert_eq!(genus4_graph(false).intersection_matrix(), m);
    let phi = component_group(&m).unwrap();
    assert_eq!(phi.invariant_factors, vec![2, 6]);
    // the subgroup generated by the two multidegrees is all of Φ
    let gens: Vec<Vec<u64>> = [[0, 1, -1], [-1, -1, 2]].iter().map(|g| phi.project(g).unwrap()).collect();
    let orders: Vec<u64> = gens.iter().map(|g| phi.element_order(g)).collect();
    let zero = vec![0u64; phi.invariant_factors.len()];
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(a) = queue.pop_front() {
        for g in &gens {
            let b = phi.add(&a, g);
            if seen.insert(b.clone()) {
                queue.push_back(b);
            }
        }
    }
    assert_eq!(seen.len() as u64, phi.order());
    // (1, -1, 2) has total degree 2, so it is not a class in Φ
    assert!(matches!(phi.project(&[1, -1, 2]), Err(GraphError::NonzeroDegree(2))));
    format!("Z/3, B_3..B_8 -> Z/d, genus 4 -> [2, 6] generated by (0,1,-1) of order {} and (-1,-1,2) of order {}; (1,-1,2) rejected (degree 2)", orders[0], orders[1])
}

fn enumeration() -> String {
    let mut checked = 0;
    for q in [2u64, 3, 4, 5, 7, 9] {
        let (p, m) = prime_power(q).unwrap();
        let k = FiniteField::with_limit(p, m, LIMIT).unwrap();
        let mut fixtures = vec![CharacterLattice::cyclotomic_quotient(3)];
        for g in 1..=4 {
            fixtures.push(CharacterLattice::split(g));
            fixtures.push(CharacterLattice::norm_torus(g));
        }
        for l in fixtures {
            let t = enumerate_torus_lattice(&l, &k).unwrap();
            assert_eq!(t.len() as u64, torus_order(&l, q), "{} q={q}", l.label);
            let dec = find_principal_decomposition(&l).expect("principal decomposition");
            let polys = component_polynomials(&l, &dec).unwrap();
            let chis: Vec<Vec<i64>> = dec.components.iter().map(|c| c.chi.clone()).collect();
            let orders: Vec<u64> = polys.iter().map(|f| eval_int_poly(f, q as i128) as u64).collect();
            assert!(check_character_isomorphism(&t, &chis, &orders).unwrap(), "{} q={q}", l.label);
            checked += 1;
        }
    }
    format!("{checked} lattice/field pairs: |T(k)| = f(q) and the characters give T(k) = ⊕ μ_(f_i(q))")
}

fn theta_rule() -> String {
    let (mut primes, mut yes) = (0, 0);
    for p in (5..=200u64).filter(|&p| is_prime(p)) {
        let want = p % 24 == 1 || p % 24 == 23;
        let c = curve(p, &[0, -1, 0, 1], &[2, 1]);
        assert_eq!(theta_bd(&c), Verdict::from_bool(want), "h = x + 2, p = {p}");
        assert_eq!(theta_engine(&c).unwrap(), Verdict::from_bool(want), "engine, h = x + 2, p = {p}");
        let c1 = curve(p, &[0, -1, 0, 1], &[1]);
        assert_eq!(theta_bd(&c1), Verdict::True, "h = 1, p = {p}");
        assert_eq!(theta_engine(&c1).unwrap(), Verdict::True, "engine, h = 1, p = {p}");
        primes += 1;
        yes += usize::from(want);
    }
    format!("{primes} primes, h = x + 2 true for exactly the {yes} with p = ±1 mod 24; h = 1 always true")
}

fn torsion() -> String {
    let c = curve(7, &[0, -1, 0, 1], &[2, 1]);
    assert_eq!(torsion_bd(&c), Some(vec![6, 18]));
    let mut checked = 0;
    for q in [5u64, 7, 11, 13] {
        for (ty, f) in [
            (ReductionType::Split, (q - 1) * (q - 1)),
            (ReductionType::OneRationalRoot, q * q - 1),
            (ReductionType::Irreducible, q * q + q + 1),
        ] {
            let c = (0..q as i64)
                .flat_map(|a| (0..q as i64).map(move |b| (a, b)))
                .filter_map(|(a, b)| {
                    validate_hyperelliptic(&HyperellipticInput { q, g: vec![b, a, 0, 1], h: vec![1], r: 2 }, LIMIT).ok()
                })
                .find(|c| c.reduction_type() == ty)
                .unwrap_or_else(|| panic!("no {ty:?} cubic over GF({q})"));
            let t = torsion_bd(&c).expect("closed form applies");
            assert_eq!(t.iter().product::<u64>(), 3 * f, "{ty:?} q={q}");
            assert_eq!(torsion_engine(&c).unwrap(), Some(t), "engine {ty:?} q={q}");
            checked += 1;
        }
    }
    format!("q = 7 example [6, 18]; {checked} (q, type) pairs of order 3 f(q), engine agrees")
}

fn genus4_tables() -> String {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut n = 0;
    for q in [7u64, 11, 13] {
        for _ in 0..100 {
            let c = random_genus4(&mut rng, q, 2);
            let l = c.big();
            let t = closed_form_table(&c);
            assert_eq!(direct_table(&c).unwrap(), t, "q={q} eps={:?}", c.input.eps);
            assert_eq!(t[0][..3], [l.from_i64(-1), l.from_i64(-1), l.neg(c.i)]);
            n += 1;
        }
    }
    format!("{n} random ε over q = 7, 11, 13: closed-form table = direct evaluation; row div(X+Y) starts (-1, -1, -i)")
}

fn cube_root() -> String {
    let mut rng = StdRng::seed_from_u64(12);
    let mut n = 0;
    for p in [5u64, 17, 29, 41] {
        for _ in 0..50 {
            let c = random_genus4(&mut rng, p, 3);
            assert_eq!(cuberoot_genus4(&c), Verdict::True, "p={p} eps={:?}", c.input.eps);
            assert_eq!(cuberoot_engine(&c).unwrap(), Verdict::True, "engine p={p} eps={:?}", c.input.eps);
            n += 1;
        }
    }
    format!("{n} random ε over p = 5, 17, 29, 41: rational cube root of the canonical class (closed form and engine)")
}

fn random_b(rng: &mut StdRng) -> Option<Hyperelliptic> {
    let q = [3u64, 4, 5, 7][rng.gen_range(0..4)];
    let d = rng.gen_range(3..=4usize);
    let mut g: Vec<i64> = (0..d).map(|_| rng.gen_range(0..q as i64)).collect();
    g.push(1);
    let h: Vec<i64> = (0..=rng.gen_range(0..=2usize)).map(|_| rng.gen_range(0..q as i64)).collect();
    validate_hyperelliptic(&HyperellipticInput { q, g, h, r: 2 }, LIMIT).ok()
}

fn oracle_agreement() -> String {
    // the hand-computed chain value over GF(5)
    let c = curve(5, &[0, -1, 0, 1], &[1]);
    let m = hyperelliptic_model(&c).unwrap();
    let k = &m.base;
    let d = SpecializedDivisor::point(0, k.from_i64(2), 1).add(&SpecializedDivisor::point(0, k.from_i64(3), -1));
    assert_eq!(chain_evaluate(&m, 0, &d).unwrap(), k.from_i64(3));
    assert_eq!(evaluate_all(&m, &d, 0).unwrap()[0], k.from_i64(3));

    let mut rng = StdRng::seed_from_u64(77);
    let (mut instances, mut divisible, mut skipped) = (0, 0, 0);
    while instances < 240 {
        let Some(c) = random_b(&mut rng) else { continue };
        let r = [2u64, 3][rng.gen_range(0..2)];
        if c.field.characteristic() == r {
            continue;
        }
        let Ok(model) = hyperelliptic_model(&c) else { continue };
        let torus = enumerate_torus(&model.graph, &model.base).unwrap();
        assert_eq!(torus.len() as u64, model.torus_order());
        let d = if rng.gen_bool(0.3) {
            jacdesc::families::hyperelliptic::canonical_divisor(&c)
        } else {
            random_divisor(&mut rng, &model, false)
        };
        let v = divisibility_verdict(&model, &d, r).unwrap();
        let Some(b) = v.as_bool() else {
            skipped += 1;
            continue;
        };
        let ex = exhaustive_verdict_with(&model, &torus, &d, r).unwrap();
        assert_eq!(ex, b, "q={} g={:?} h={:?} r={r} verdict={v:?}", c.q(), c.input.g, c.input.h);
        instances += 1;
        divisible += usize::from(b && !matches!(v, DescentVerdict::NotInPicBracketR { .. }));
    }
    assert_eq!(skipped, 0, "undetermined verdicts on B_3/B_4");

    let mut trials = 0;
    while trials < 1000 {
        let Some(c) = random_b(&mut rng) else { continue };
        let Ok(model) = hyperelliptic_model(&c) else { continue };
        for _ in 0..10 {
            let d = random_divisor(&mut rng, &model, true);
            let engine = evaluate_all(&model, &d, 0).unwrap();
            for (i, v) in engine.iter().enumerate() {
                assert_eq!(chain_evaluate(&model, i, &d).unwrap(), *v, "q={} g={:?}", c.q(), c.input.g);
            }
            trials += 1;
        }
    }
    format!("chain example = 3 over GF(5); exhaustive = engine on {instances}/{instances} instances ({divisible} divisible); chain = evaluate_cycle on {trials} divisors")
}

fn invariants() -> String {
    let results = common::invariants::suite(common::invariants::CASES);
    let failed: Vec<String> =
        results.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    assert!(failed.is_empty(), "{}", failed.join("; "));
    format!("{} properties x {} cases", results.len(), common::invariants::CASES)
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { number: 1, name: "component groups", budget: Duration::from_secs(1), run: component_groups },
        Criterion { number: 2, name: "torus enumeration", budget: Duration::from_secs(30), run: enumeration },
        Criterion { number: 3, name: "theta rule", budget: Duration::from_secs(10), run: theta_rule },
        Criterion { number: 4, name: "torsion formulas", budget: Duration::from_secs(10), run: torsion },
        Criterion { number: 5, name: "genus-4 tables", budget: Duration::from_secs(60), run: genus4_tables },
        Criterion { number: 6, name: "cube-root rule", budget: Duration::from_secs(60), run: cube_root },
        Criterion { number: 7, name: "oracle agreement", budget: Duration::from_secs(300), run: oracle_agreement },
        Criterion { number: 8, name: "invariant suites", budget: Duration::from_secs(300), run: invariants },
    ];
    let mut failures = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(detail) if elapsed <= c.budget => (true, detail),
            Ok(detail) => (false, format!("{detail}; over the time budget")),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into());
                (false, msg)
            }
        };
        println!(
            "criterion {} [{}] {}: {} ({:.2}s, budget {}s)",
            c.number,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if !ok {
            failures.push(c.number);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
