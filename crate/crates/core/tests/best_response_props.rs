mod common;

use common::{BrCase, BrOp};
use group_contest::best_response::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closed_form_examples() {
    assert_eq!(br_positive_x(4.0, 0.0, 1.0).unwrap().effort, 1.0);
    assert_eq!(br_positive_x(1.0, 0.0, 4.0).unwrap().effort, 0.0);
    assert_eq!(br_positive_x(4.0, 3.0, 1.0).unwrap().effort, 0.0);
    assert_eq!(br_positive_y(2.0, -10.0, 4.0, 3.0).unwrap().effort, 2.0);
    assert_eq!(br_positive_y(1.0, -5.0, 4.0, 3.0).unwrap().effort, 0.0);
    assert_eq!(br_negative_y(1.0, -4.0, 0.0, -1.0).unwrap().effort, 1.0);
    assert_eq!(br_negative_y(1.0, -1.0, 0.0, -4.0).unwrap().effort, 0.0);
    assert_eq!(br_negative_y(2.0, -4.0, 0.0, -2.0).unwrap().effort, 1.0);
    assert_eq!(br_negative_x(10.0, -4.0, -3.0).unwrap().effort, 4.0);
    assert_eq!(br_negative_x(5.0, -4.0, -3.0).unwrap().effort, 0.0);
    assert_eq!(group_best_effective_effort(4.0, 1.0).unwrap(), 1.0);
    assert_eq!(group_best_effective_effort(1.0, 1.0).unwrap(), 0.0);
    assert_eq!(group_best_effective_effort(9.0, 1.0).unwrap(), 2.0);
}

#[test]
fn examples_agree_with_grid() {
    let cases = [
        BrCase { op: BrOp::PositiveX, theta: 1.0, v: 4.0, z_minus: 0.0, z_other: 1.0 },
        BrCase { op: BrOp::PositiveX, theta: 1.0, v: 1.0, z_minus: 0.0, z_other: 4.0 },
        BrCase { op: BrOp::NegativeY, theta: 1.0, v: -4.0, z_minus: 0.0, z_other: -1.0 },
        BrCase { op: BrOp::NegativeY, theta: 1.0, v: -1.0, z_minus: 0.0, z_other: -4.0 },
        BrCase { op: BrOp::NegativeY, theta: 2.0, v: -4.0, z_minus: 0.0, z_other: -2.0 },
        BrCase { op: BrOp::GroupBest, theta: 1.0, v: 4.0, z_minus: 0.0, z_other: 1.0 },
        BrCase { op: BrOp::GroupBest, theta: 1.0, v: 9.0, z_minus: 0.0, z_other: 1.0 },
    ];
    for case in cases {
        common::check_br_case(&case).unwrap();
    }
}

#[test]
fn ties_have_equal_payoffs() {
    // theta |v| = z_minus + z_other, and v = |z_minus + z_other|
    let y = br_positive_y(0.5, -14.0, 4.0, 3.0).unwrap();
    assert!(y.tie && y.effort == 0.0);
    let f = common::axis_payoff(-14.0, 4.0, 3.0, |e| -0.5 * e);
    assert!((f(0.0) - f(8.0)).abs() <= 1e-9 * f(0.0).abs());

    let x = br_negative_x(7.0, -4.0, -3.0).unwrap();
    assert!(x.tie && x.effort == 0.0);
    let f = common::axis_payoff(7.0, -4.0, -3.0, |e| e);
    assert!((f(0.0) - f(4.0)).abs() <= 1e-9 * f(0.0).abs());

    // surplus (sqrt 9 - sqrt 1)^2 = 4 equals the residual to cover
    let x = br_positive_x(9.0, -4.0, 1.0).unwrap();
    assert!(x.tie && x.effort == 0.0);
    let f = common::axis_payoff(9.0, -4.0, 1.0, |e| e);
    assert!((f(0.0) - f(6.0)).abs() <= 1e-9 * f(0.0).abs().max(1.0));
}

#[test]
fn larger_top_valuation_wants_more() {
    let z9 = group_best_effective_effort(9.0, 1.0).unwrap();
    let z4 = group_best_effective_effort(4.0, 1.0).unwrap();
    assert!(z9 > z4);
}

fn op() -> impl Strategy<Value = BrOp> {
    prop::sample::select(BrOp::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn matches_grid_oracle(op in op(), seed in any::<u64>()) {
        let case = common::draw_br_case(op, &mut ChaCha8Rng::seed_from_u64(seed));
        if let Err(msg) = common::check_br_case(&case) {
            prop_assert!(false, "{}", msg);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn concave_where_the_group_keeps_its_sign(
        v in 0.1..10.0f64, z_other in 0.1..10.0f64, z_minus in -5.0..5.0f64,
        theta in 0.2..3.0f64, at in 0.0..1.0f64,
    ) {
        // x-axis with Z_i > 0: feasible x beyond max(0, -z_minus)
        let f = common::axis_payoff(v, z_minus, z_other, |e| e);
        let start = (-z_minus).max(0.0);
        let h = 1e-3;
        let x = start + 2.0 * h + at * 10.0;
        prop_assert!(f(x + h) - 2.0 * f(x) + f(x - h) <= 1e-13 * v);
        // y-axis with Z_i < 0: feasible y beyond max(0, z_minus / theta)
        let g = common::axis_payoff(-v, z_minus, -z_other, move |e| -theta * e);
        let start = (z_minus / theta).max(0.0);
        let y = start + 2.0 * h + at * 10.0;
        prop_assert!(g(y + h) - 2.0 * g(y) + g(y - h) <= 1e-13 * v);
    }

    #[test]
    fn convex_before_the_seam(
        v in 0.1..10.0f64, z_other in 0.1..10.0f64, z_minus in 0.1..10.0f64,
        theta in 0.2..3.0f64, at in 0.05..0.95f64,
    ) {
        // sabotage on [0, z_minus / theta) against a positive rival
        let kink = z_minus / theta;
        let h = 1e-3 * kink;
        let y = h + at * (kink - 2.0 * h);
        let f = common::axis_payoff(-v, z_minus, z_other, move |e| -theta * e);
        prop_assert!(f(y + h) - 2.0 * f(y) + f(y - h) > 0.0);
        let br = br_positive_y(theta, -v, z_minus, z_other).unwrap();
        prop_assert!(br.effort == 0.0 || br.effort == kink);
        // help on [0, |z_minus|) against a negative rival
        let kink = z_minus;
        let h = 1e-3 * kink;
        let x = h + at * (kink - 2.0 * h);
        let f = common::axis_payoff(v, -z_minus, -z_other, |e| e);
        prop_assert!(f(x + h) - 2.0 * f(x) + f(x - h) > 0.0);
        let br = br_negative_x(v, -z_minus, -z_other).unwrap();
        prop_assert!(br.effort == 0.0 || br.effort == kink);
    }

    #[test]
    fn tie_flag_means_equal_payoffs(op in op(), seed in any::<u64>()) {
        let case = common::draw_br_case(op, &mut ChaCha8Rng::seed_from_u64(seed));
        let (effort, tie) = case.closed_form();
        prop_assert!(effort >= 0.0);
        if tie {
            let f = case.objective();
            let (_, best) = common::grid_argmax(&f, case.range());
            prop_assert!((f(0.0) - best).abs() <= 1e-9 * best.abs().max(1.0));
        }
    }
}
