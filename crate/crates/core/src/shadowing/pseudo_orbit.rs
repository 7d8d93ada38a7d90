use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::pseudometrics::{besicovitch_from_distances, ScheduleValue};
use crate::rational::{geometric_schedule, scale_to_integers, serde_q, Q};
use crate::seqcore::{orbit, Point, PointMap, PointSequence};

/// Constant `c` of the tolerance curve `c/√N` when the caller has no
/// better calibration.
pub const DEFAULT_TOLERANCE: i64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoOrbitReport {
    pub horizon: usize,
    pub n0_found: Option<usize>,
    #[serde(with = "serde_q")]
    pub max_window_avg: Q,
    /// For the δ-average check: the largest window average over all
    /// offsets, per window length. For the asymptotic check: the prefix
    /// average of the jump errors.
    pub tail_avgs: Vec<ScheduleValue>,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_q")]
    pub tolerance: Option<Q>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent_with_zero: Option<bool>,
}

mod opt_q {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(v) => serde_q::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

/// `ρ(T x_n, x_{n+1})` for `n < horizon`; needs `horizon + 1` points.
pub fn jump_errors(map: &dyn PointMap, x: &PointSequence, horizon: usize) -> Result<Vec<Q>> {
    crate::seqcore::ensure_space(map.space(), x.space())?;
    if x.horizon() < horizon + 1 {
        return Err(Error::OutOfRange { index: horizon + 1, horizon: x.horizon() });
    }
    let space = x.space();
    Ok((0..horizon).map(|n| space.distance(&map.apply(x.get(n)), x.get(n + 1))).collect())
}

/// `max_k (1/N) Σ_{n<N} e_{n+k}` for every `N` in `1..=len`.
fn window_maxima(e: &[Q]) -> Vec<Q> {
    let len = e.len();
    match scale_to_integers(e) {
        Some((ints, den)) => {
            let mut prefix = vec![0i128; len + 1];
            for (i, v) in ints.iter().enumerate() {
                prefix[i + 1] = prefix[i] + v;
            }
            (1..=len)
                .map(|n| {
                    let best = (0..=len - n).map(|k| prefix[k + n] - prefix[k]).max().expect("nonempty");
                    Q::new(best.into(), (den * n as i128).into())
                })
                .collect()
        }
        None => {
            let mut prefix = vec![Q::zero(); len + 1];
            for (i, v) in e.iter().enumerate() {
                prefix[i + 1] = &prefix[i] + v;
            }
            (1..=len)
                .map(|n| {
                    let best = (0..=len - n).map(|k| &prefix[k + n] - &prefix[k]).max().expect("nonempty");
                    best / Q::from_integer(n.into())
                })
                .collect()
        }
    }
}

/// Least `N0 >= 1` such that every window of length `N ∈ (N0, horizon]` at
/// every offset has average jump error `< δ`. `None` when only the empty
/// range `N0 = horizon` would work.
pub fn check_delta_average_po(map: &dyn PointMap, x: &PointSequence, delta: &Q, horizon: usize) -> Result<PseudoOrbitReport> {
    if horizon < 2 {
        return param("horizon must be >= 2");
    }
    if !delta.is_positive() {
        return param("delta must be positive");
    }
    let e = jump_errors(map, x, horizon)?;
    let w = window_maxima(&e);
    let last_bad = (1..=horizon).rev().find(|&n| w[n - 1] >= *delta).unwrap_or(0);
    let n0_found = (last_bad < horizon).then_some(last_bad.max(1));
    let from = n0_found.map_or(1, |n0| n0 + 1);
    let max_window_avg = w[from - 1..].iter().max().cloned().unwrap_or_else(Q::zero);
    let tail_avgs = geometric_schedule(horizon).into_iter().map(|n| ScheduleValue { n, value: w[n - 1].clone() }).collect();
    Ok(PseudoOrbitReport { horizon, n0_found, max_window_avg, tail_avgs, tolerance: None, consistent_with_zero: None })
}

/// Every schedule value satisfies `v <= c/√N`, i.e. `v²·N <= c²`.
fn below_curve(schedule: &[ScheduleValue], c: &Q) -> bool {
    schedule.iter().all(|s| &s.value * &s.value * Q::from_integer(s.n.into()) <= c * c)
}

/// Prefix averages of the jump errors on the geometric schedule, judged
/// against the curve `c/√N`. The final average equals
/// `besicovitch(T(x), σ(x), horizon)`.
pub fn check_asymptotic_average_po(
    map: &dyn PointMap,
    x: &PointSequence,
    horizon: usize,
    c: Option<Q>,
) -> Result<PseudoOrbitReport> {
    if horizon < 1 {
        return param("horizon must be >= 1");
    }
    let c = c.unwrap_or_else(|| Q::from_integer(DEFAULT_TOLERANCE.into()));
    let e = jump_errors(map, x, horizon)?;
    let report = besicovitch_from_distances(&e);
    let consistent = below_curve(&report.schedule, &c);
    Ok(PseudoOrbitReport {
        horizon,
        n0_found: None,
        max_window_avg: report.window_sup,
        tail_avgs: report.schedule,
        tolerance: Some(c),
        consistent_with_zero: Some(consistent),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowReport {
    /// `(1/N) Σ_{n<N} ρ(T^n z, x_n)` at the horizon.
    #[serde(with = "serde_q")]
    pub value: Q,
    pub shadowed: bool,
    pub schedule: Vec<ScheduleValue>,
}

fn shadow_distances(map: &dyn PointMap, x: &PointSequence, z: &Point, horizon: usize) -> Result<Vec<Q>> {
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let orb = orbit(map, z, horizon)?;
    orb.distances(x, horizon)
}

/// Whether `z` ε-shadows `x` in average at the horizon.
pub fn check_shadowed_in_average(map: &dyn PointMap, x: &PointSequence, z: &Point, eps: &Q, horizon: usize) -> Result<ShadowReport> {
    let r = besicovitch_from_distances(&shadow_distances(map, x, z, horizon)?);
    Ok(ShadowReport { shadowed: r.value < *eps, value: r.value, schedule: r.schedule })
}

/// Asymptotic variant: `shadowed` means the averages stay below `c/√N`.
pub fn check_asymptotically_shadowed(
    map: &dyn PointMap,
    x: &PointSequence,
    z: &Point,
    horizon: usize,
    c: Option<Q>,
) -> Result<ShadowReport> {
    let c = c.unwrap_or_else(Q::one);
    let r = besicovitch_from_distances(&shadow_distances(map, x, z, horizon)?);
    Ok(ShadowReport { shadowed: below_curve(&r.schedule, &c), value: r.value, schedule: r.schedule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudometrics::besicovitch;
    use crate::rational::q;
    use crate::seqcore::{Alphabet, Identity, Rotation, Space, Symbol};

    fn disc() -> Space {
        Space::Discrete(Alphabet::binary())
    }

    fn sym(b: bool) -> Point {
        Point::Symbol(Symbol(u8::from(b)))
    }

    #[test]
    fn true_orbit() {
        let rot = Rotation { alpha: q(2, 9) };
        let x = orbit(&rot, &Point::circle(q(1, 5)), 101).unwrap();
        let r = check_delta_average_po(&rot, &x, &q(1, 100), 100).unwrap();
        assert_eq!(r.n0_found, Some(1));
        assert!(r.tail_avgs.iter().all(|s| s.value.is_zero()));
        let a = check_asymptotic_average_po(&rot, &x, 100, None).unwrap();
        assert_eq!(a.consistent_with_zero, Some(true));
        assert!(a.tail_avgs.iter().all(|s| s.value.is_zero()));
    }

    #[test]
    fn single_splice() {
        let x = PointSequence::new(disc(), (0..201).map(|i| sym(i >= 50)).collect()).unwrap();
        let r = check_delta_average_po(&Identity(disc()), &x, &q(1, 10), 200).unwrap();
        // One jump: windows of length N average at most 1/N, so N > 10 passes.
        assert_eq!(r.n0_found, Some(10));
        assert_eq!(r.max_window_avg, q(1, 11));
    }

    #[test]
    fn alternating_blocks() {
        let l = 8;
        let x = PointSequence::new(disc(), (0..401).map(|i| sym((i / l) % 2 == 1)).collect()).unwrap();
        let idn = Identity(disc());
        assert!(check_delta_average_po(&idn, &x, &q(1, 8), 400).unwrap().n0_found.is_none());
        assert!(check_delta_average_po(&idn, &x, &q(1, 7), 400).unwrap().n0_found.is_some());
    }

    #[test]
    fn asymptotic_average_is_besicovitch_of_jumps() {
        let x = PointSequence::new(Space::Circle, (0..65).map(|i| Point::circle(q(i * i % 7, 7))).collect()).unwrap();
        let rot = Rotation { alpha: q(1, 7) };
        let rep = check_asymptotic_average_po(&rot, &x, 64, None).unwrap();
        let tx = x.map(&rot).unwrap();
        let sx = x.shift(1).unwrap();
        assert_eq!(rep.tail_avgs.last().unwrap().value, besicovitch(&tx, &sx, 64).unwrap().value);
    }

    #[test]
    fn shadowing_examples() {
        let idn = Identity(disc());
        let z = sym(false);
        let exact = PointSequence::new(disc(), vec![z.clone(); 100]).unwrap();
        let r = check_shadowed_in_average(&idn, &exact, &z, &q(1, 1000), 100).unwrap();
        assert!(r.shadowed && r.value.is_zero());
        let quarter = PointSequence::new(disc(), (0..100).map(|i| sym(i % 4 == 0)).collect()).unwrap();
        let r = check_shadowed_in_average(&idn, &quarter, &z, &q(1, 2), 100).unwrap();
        assert_eq!(r.value, q(1, 4));
        assert!(r.shadowed);
        assert!(!check_asymptotically_shadowed(&idn, &quarter, &z, 100, None).unwrap().shadowed);
        assert!(check_asymptotically_shadowed(&idn, &exact, &z, 100, None).unwrap().shadowed);
    }
}
