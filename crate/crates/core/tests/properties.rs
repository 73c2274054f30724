mod common;

use common::invariants::{self as inv, divisor, models, CASES};
use jacdesc::descent::{divisibility_verdict_with, evaluate_all};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn base_point_choice_does_not_change_values(args in inv::base_point_choice_does_not_change_values::strategy()) {
        inv::base_point_choice_does_not_change_values::check(args)?;
    }

    #[test]
    fn principal_divisors_are_divisible(args in inv::principal_divisors_are_divisible::strategy()) {
        inv::principal_divisors_are_divisible::check(args)?;
    }

    #[test]
    fn functions_of_x_evaluate_to_one(args in inv::functions_of_x_evaluate_to_one::strategy()) {
        inv::functions_of_x_evaluate_to_one::check(args)?;
    }

    #[test]
    fn adding_r_multiples_keeps_verdicts(args in inv::adding_r_multiples_keeps_verdicts::strategy()) {
        inv::adding_r_multiples_keeps_verdicts::check(args)?;
    }

    #[test]
    fn nu_is_additive(args in inv::nu_is_additive::strategy()) {
        inv::nu_is_additive::check(args)?;
    }

    #[test]
    fn evaluation_is_multiplicative(args in inv::evaluation_is_multiplicative::strategy()) {
        inv::evaluation_is_multiplicative::check(args)?;
    }

    #[test]
    fn orientation_flip_keeps_verdicts(args in inv::orientation_flip_keeps_verdicts::strategy()) {
        inv::orientation_flip_keeps_verdicts::check(args)?;
    }

    #[test]
    fn opposite_cycles_invert_values(args in inv::opposite_cycles_invert_values::strategy()) {
        inv::opposite_cycles_invert_values::check(args)?;
    }

    #[test]
    fn smith_certificates_hold(args in inv::smith_certificates_hold::strategy()) {
        inv::smith_certificates_hold::check(args)?;
    }

    #[test]
    fn row_combinations_are_recovered(args in inv::row_combinations_are_recovered::strategy()) {
        inv::row_combinations_are_recovered::check(args)?;
    }
}

#[test]
fn alternative_base_points_exist() {
    for m in models() {
        let d = divisor(m, 11, true);
        for rank in 1..3 {
            assert!(evaluate_all(m, &d, rank).is_ok(), "base rank {rank} over GF({})", m.base.order());
            assert!(divisibility_verdict_with(m, &d, 2, rank).is_ok() || m.base.characteristic() == 2);
        }
    }
}
