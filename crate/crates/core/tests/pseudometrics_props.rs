use besico::pseudometrics::{besicovitch, dbar, dprime, j_delta, star_check, upper_density};
use besico::rational::{q, q_usize, to_f64};
use besico::seqcore::{Alphabet, EventuallyPeriodic, Point, PointSequence, Space, Symbol, SymbolicSequence};
use besico::Q;
use num::Zero;
use proptest::prelude::*;

fn circle_sequence(len: usize) -> impl Strategy<Value = PointSequence> {
    prop::collection::vec(0i64..24, len).prop_map(|v| {
        PointSequence::new(Space::Circle, v.into_iter().map(|p| Point::circle(q(p, 24))).collect()).unwrap()
    })
}

fn periodic_pair() -> impl Strategy<Value = (EventuallyPeriodic, EventuallyPeriodic)> {
    let word = || prop::collection::vec(0u8..2, 1..7).prop_map(|v| v.into_iter().map(Symbol).collect::<Vec<_>>());
    (word(), word()).prop_map(|(a, b)| (EventuallyPeriodic::new(vec![], a).unwrap(), EventuallyPeriodic::new(vec![], b).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pseudometric_axioms(x in circle_sequence(50), y in circle_sequence(50), z in circle_sequence(50)) {
        let d = |a: &PointSequence, b: &PointSequence| besicovitch(a, b, 50).unwrap().value;
        prop_assert_eq!(d(&x, &x), Q::zero());
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }

    #[test]
    fn star_inequality_every_candidate(x in circle_sequence(64), y in circle_sequence(64)) {
        let report = star_check(&x.distances(&y, 64).unwrap());
        prop_assert_eq!(report.violations, 0);
        let value = besicovitch(&x, &y, 64).unwrap().value;
        for k in 1..=24 {
            let delta = q(k, 24);
            let jd = j_delta(&x, &y, &delta, 64).unwrap().final_value;
            prop_assert!(&delta * &jd <= value && value <= &jd + &delta);
        }
    }

    #[test]
    fn dbar_is_discrete_besicovitch(bits in prop::collection::vec((0u8..2, 0u8..2), 1..200)) {
        let a = Alphabet::binary();
        let h = bits.len();
        let xs = SymbolicSequence::finite(a.clone(), bits.iter().map(|b| Symbol(b.0)).collect()).unwrap();
        let ys = SymbolicSequence::finite(a.clone(), bits.iter().map(|b| Symbol(b.1)).collect()).unwrap();
        let px = PointSequence::from_symbols(&xs, h).unwrap();
        let py = PointSequence::from_symbols(&ys, h).unwrap();
        prop_assert_eq!(dbar(&xs, &ys, h).unwrap().final_value, besicovitch(&px, &py, h).unwrap().value);
    }

    #[test]
    fn threshold_implications((x, y) in periodic_pair(), eps_den in 1i64..12) {
        let a = Alphabet::binary();
        let h = 60 * 12;
        let px = PointSequence::from_symbols(&SymbolicSequence::from_eventually_periodic(a.clone(), x).unwrap(), h).unwrap();
        let py = PointSequence::from_symbols(&SymbolicSequence::from_eventually_periodic(a, y).unwrap(), h).unwrap();
        let eps = q(1, eps_den);
        let d = besicovitch(&px, &py, h).unwrap().value;
        let dp = dprime(&px, &py, h).unwrap();
        if dp < &eps / Q::from_integer(2.into()) {
            prop_assert!(d < eps);
        }
        if d < &eps * &eps {
            prop_assert!(dp <= eps);
        }
    }

    #[test]
    fn shift_moves_average_by_at_most_two_over_n(x in circle_sequence(81), y in circle_sequence(81), n in 1usize..80) {
        let a = besicovitch(&x, &y, n).unwrap().value;
        let b = besicovitch(&x.shift(1).unwrap(), &y.shift(1).unwrap(), n).unwrap().value;
        let diff = if a > b { a - b } else { b - a };
        prop_assert!(diff <= q_usize(2, n));
    }

    #[test]
    fn dprime_is_feasible_limit(x in circle_sequence(40), y in circle_sequence(40)) {
        // Every δ above dprime satisfies the density condition; dprime itself
        // sits on the boundary.
        let dp = dprime(&x, &y, 40).unwrap();
        for k in 1..=48 {
            let delta = q(k, 48);
            let ok = j_delta(&x, &y, &delta, 40).unwrap().final_value < delta;
            prop_assert_eq!(ok, delta > dp || (delta == dp && ok));
        }
    }
}

#[test]
fn dyadic_blocks_upper_density() {
    let h = 1usize << 20;
    let est = upper_density((0..h).map(|n| n > 0 && n.ilog2() % 2 == 0), h).unwrap();
    assert!((to_f64(&est.running_max) - 2.0 / 3.0).abs() < 0.02);
    assert!(est.running_max >= est.final_value);
}
