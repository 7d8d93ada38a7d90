use besico::measures::{empirical, prokhorov, prokhorov_bruteforce, pushforward, FiniteMeasure};
use besico::rational::q;
use besico::seqcore::{orbit, Point, PointSequence, Rotation, Space};
use besico::Q;
use num::{One, Zero};
use proptest::prelude::*;

fn circle_measure() -> impl Strategy<Value = FiniteMeasure> {
    prop::collection::vec((0i64..16, 1i64..6), 1..=8).prop_map(|atoms| {
        let total: i64 = atoms.iter().map(|a| a.1).sum();
        FiniteMeasure::new(Space::Circle, atoms.into_iter().map(|(p, w)| (Point::circle(q(p, 16)), q(w, total)))).unwrap()
    })
}

fn circle_sequence(len: usize) -> impl Strategy<Value = PointSequence> {
    prop::collection::vec(0i64..12, len).prop_map(|v| {
        PointSequence::new(Space::Circle, v.into_iter().map(|p| Point::circle(q(p, 12))).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_matches_subset_enumeration(mu in circle_measure(), nu in circle_measure()) {
        prop_assert_eq!(prokhorov(&mu, &nu).unwrap(), prokhorov_bruteforce(&mu, &nu).unwrap());
    }

    #[test]
    fn metric_axioms(a in circle_measure(), b in circle_measure(), c in circle_measure()) {
        let ab = prokhorov(&a, &b).unwrap();
        prop_assert_eq!(prokhorov(&a, &a).unwrap(), Q::zero());
        prop_assert_eq!(&ab, &prokhorov(&b, &a).unwrap());
        prop_assert!(ab <= Q::one());
        prop_assert_eq!(ab.is_zero(), a == b);
        prop_assert!(prokhorov(&a, &c).unwrap() <= &ab + prokhorov(&b, &c).unwrap());
    }

    #[test]
    fn shifted_empirical_within_two_over_n(x in circle_sequence(41), n in 1usize..40) {
        let sx = x.shift(1).unwrap();
        let d = prokhorov(&empirical(&x, n).unwrap(), &empirical(&sx, n).unwrap()).unwrap();
        prop_assert!(d <= q(2, n as i64));
    }

    #[test]
    fn pushforward_commutes_with_empirical(x in circle_sequence(30), k in 0i64..12, n in 1usize..30) {
        let rot = Rotation { alpha: q(k, 12) };
        let lhs = pushforward(&rot, &empirical(&x, n).unwrap()).unwrap();
        prop_assert_eq!(lhs, empirical(&x.map(&rot).unwrap(), n).unwrap());
    }

    #[test]
    fn sparse_disagreement_bounds_prokhorov(
        x in circle_sequence(40),
        y in circle_sequence(40),
        mask in prop::collection::vec(any::<bool>(), 40),
        eps_den in 2i64..9,
    ) {
        let n = 40;
        let eps = q(1, eps_den);
        let merged: Vec<Point> = (0..n).map(|i| if mask[i] { y.get(i).clone() } else { x.get(i).clone() }).collect();
        let xp = PointSequence::new(Space::Circle, merged).unwrap();
        let bad = x.distances(&xp, n).unwrap().iter().filter(|d| **d >= eps).count();
        if Q::from_integer(bad.into()) < &eps * Q::from_integer(n.into()) {
            prop_assert!(prokhorov(&empirical(&x, n).unwrap(), &empirical(&xp, n).unwrap()).unwrap() <= eps);
        }
    }
}

#[test]
fn rotation_orbit_is_invariant() {
    let rot = Rotation { alpha: q(2, 7) };
    let x = orbit(&rot, &Point::circle(q(1, 3)), 7).unwrap();
    let m = empirical(&x, 7).unwrap();
    assert_eq!(besico::measures::invariance_defect(&rot, &m).unwrap(), Q::zero());
}
