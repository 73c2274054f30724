use jacdesc::families::genus4::*;
use jacdesc::families::Verdict;
use rand::{rngs::StdRng, Rng, SeedableRng};

const LIMIT: u64 = 1 << 20;

fn random_curve(rng: &mut StdRng, q: u64, r: u64) -> Genus4 {
    assert!(q % 2 != 0 && q % 3 != 0, "the family needs p >= 5");
    loop {
        let eps: Vec<i64> = (0..20).map(|_| rng.gen_range(0..q as i64)).collect();
        if let Ok(c) = validate_genus4(&Genus4Input { q, eps, r }, LIMIT) {
            return c;
        }
    }
}

#[test]
fn closed_forms_against_engine() {
    let mut rng = StdRng::seed_from_u64(7);
    for q in [5u64, 7, 11, 13, 17, 19, 23, 25, 29, 31, 37, 43] {
        let mut lit_diff = 0;
        for _ in 0..15 {
            let c = random_curve(&mut rng, q, 2);
            let tf = torsion_genus4(&c);
            let te = torsion_engine(&c).unwrap();
            let order: u64 = te.iter().product();
            let f = if c.i_in_k { (q - 1).pow(4) } else { (q - 1).pow(2) * (q * q - 1) };
            assert_eq!(order, 12 * f, "order q={q}");
            assert_eq!(tf, te, "torsion q={q} eps={:?}", c.input.eps);
            assert_eq!(theta_genus4(&c), theta_engine(&c).unwrap(), "theta q={q} eps={:?}", c.input.eps);
            assert_eq!(cuberoot_genus4(&c), cuberoot_engine(&c).unwrap(), "cube q={q} eps={:?}", c.input.eps);
            if cuberoot_literal(&c) != cuberoot_genus4(&c) {
                lit_diff += 1;
            }
        }
        eprintln!("q={q} literal cube-root criterion differs in {lit_diff}/15");
    }
}

#[test]
fn first_row_is_fixed() {
    let mut rng = StdRng::seed_from_u64(1);
    for q in [7u64, 11, 13] {
        let c = random_curve(&mut rng, q, 2);
        let l = c.big();
        let t = closed_form_table(&c);
        assert_eq!(t[0][..3], [l.from_i64(-1), l.from_i64(-1), l.neg(c.i)]);
    }
}

#[test]
fn cube_root_always_for_primes_1_mod_4_and_2_mod_3() {
    let mut rng = StdRng::seed_from_u64(3);
    for p in [5u64, 17, 29, 41] {
        for _ in 0..10 {
            let c = random_curve(&mut rng, p, 3);
            assert_eq!(cuberoot_genus4(&c), Verdict::True);
        }
    }
}

#[test]
fn direct_evaluation_matches_closed_form() {
    let mut rng = StdRng::seed_from_u64(21);
    for q in [7u64, 11, 13, 5, 25, 49] {
        for _ in 0..30 {
            let c = random_curve(&mut rng, q, 2);
            let direct = jacdesc::families::local_functions::direct_table(&c).unwrap();
            assert_eq!(direct, closed_form_table(&c), "q={q} eps={:?}", c.input.eps);
        }
    }
}
