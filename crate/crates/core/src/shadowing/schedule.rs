use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::measures::{empirical, prokhorov, FiniteMeasure};
use crate::rational::{serde_q, Q};
use crate::seqcore::{ensure_space, orbit, Point, PointMap, PointSequence};

/// Segment lengths `0 = n_0 < n_1 < ...`, all divisible by `r`, with the
/// base points `y_N` used cyclically. Segment `N` occupies
/// `[s_N, s_{N+1})` where `s_N = n_0 + ... + n_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSchedule {
    lengths: Vec<usize>,
    base_points: Vec<Point>,
    r: usize,
}

impl SegmentSchedule {
    pub fn new(r: usize, lengths: Vec<usize>, base_points: Vec<Point>) -> Result<Self> {
        if r == 0 {
            return param("divisor r must be >= 1");
        }
        if lengths.len() < 2 || lengths[0] != 0 {
            return param("lengths must start with n_0 = 0 and have at least one segment");
        }
        if lengths.windows(2).any(|w| w[0] >= w[1]) {
            return param("lengths must be strictly increasing");
        }
        if let Some(n) = lengths.iter().find(|n| *n % r != 0) {
            return param(format!("length {n} is not divisible by {r}"));
        }
        if base_points.is_empty() {
            return param("need at least one base point");
        }
        Ok(SegmentSchedule { lengths, base_points, r })
    }

    /// `n_k = r·k²` for `k <= segments`.
    pub fn quadratic(r: usize, segments: usize, base_points: Vec<Point>) -> Result<Self> {
        Self::new(r, (0..=segments).map(|k| r * k * k).collect(), base_points)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// `s_0, s_1, ...`: the start of every segment, followed by the total.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut s = 0;
        self.lengths.iter().map(|n| {
            s += n;
            s
        }).collect()
    }

    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Number of segments starting before `n`.
    pub fn segments_before(&self, n: usize) -> usize {
        let b = self.boundaries();
        b[..b.len() - 1].iter().filter(|s| **s < n).count()
    }

    fn base(&self, segment: usize) -> &Point {
        &self.base_points[segment % self.base_points.len()]
    }

    /// `z_k = T^{k − s_N}(y_N)` for `s_N <= k < s_{N+1}`, for `k < horizon`.
    pub fn build(&self, map: &dyn PointMap, horizon: usize) -> Result<PointSequence> {
        if horizon > self.total() {
            return Err(Error::OutOfRange { index: horizon, horizon: self.total() });
        }
        let mut points = Vec::with_capacity(horizon);
        for (seg, len) in self.lengths[1..].iter().enumerate() {
            if points.len() >= horizon {
                break;
            }
            let mut p = self.base(seg).clone();
            for _ in 0..*len {
                if points.len() >= horizon {
                    break;
                }
                points.push(p.clone());
                p = map.apply(&p);
            }
        }
        PointSequence::new(map.space().clone(), points)
    }
}

/// `z'_n = z_{nr}`.
pub fn lift_to_power(x: &PointSequence, r: usize) -> Result<PointSequence> {
    if r == 0 {
        return param("r must be >= 1");
    }
    let pts = x.points().iter().step_by(r).cloned().collect();
    PointSequence::new(x.space().clone(), pts)
}

/// `z_{nr + j} = T^j(z'_n)` for `j < r`, truncated to `horizon`.
pub fn expand_from_power(zp: &PointSequence, map: &dyn PointMap, r: usize, horizon: usize) -> Result<PointSequence> {
    if r == 0 {
        return param("r must be >= 1");
    }
    ensure_space(zp.space(), map.space())?;
    if horizon > zp.horizon() * r {
        return Err(Error::OutOfRange { index: horizon, horizon: zp.horizon() * r });
    }
    let mut pts = Vec::with_capacity(horizon);
    'outer: for p in zp.points() {
        let mut q = p.clone();
        for _ in 0..r {
            if pts.len() == horizon {
                break 'outer;
            }
            pts.push(q.clone());
            q = map.apply(&q);
        }
    }
    PointSequence::new(zp.space().clone(), pts)
}

/// A target measure with a caller-supplied base point whose orbit
/// segments should have empirical measures within `tolerance` of it.
#[derive(Debug, Clone)]
pub struct QuasiGeneric {
    pub target: FiniteMeasure,
    pub base: Point,
    pub tolerance: Q,
}

/// Default ratio between consecutive segment lengths.
pub const DEFAULT_RATIO: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    /// Segment end (or the horizon for a truncated final segment).
    pub n: usize,
    pub target: usize,
    /// Prokhorov distance from the empirical measure of `z_0 .. z_{n-1}`
    /// to the target of the segment ending at `n`.
    #[serde(with = "serde_q")]
    pub distance: Q,
}

#[derive(Debug, Clone)]
pub struct SigmundOrbit {
    pub sequence: PointSequence,
    pub schedule: SegmentSchedule,
    pub checkpoints: Vec<Checkpoint>,
    /// `π(empirical(orbit(y), L), target)` for each segment, as certified
    /// before splicing.
    pub certified: Vec<Q>,
    pub note: &'static str,
}

/// Concatenated orbit segments cycling through the targets with lengths
/// `r·ratio^m`; the last segment is cut at the horizon.
pub fn sigmund_pseudo_orbit(
    map: &dyn PointMap,
    targets: &[QuasiGeneric],
    r: usize,
    ratio: usize,
    horizon: usize,
) -> Result<SigmundOrbit> {
    if targets.is_empty() {
        return Err(Error::EmptySequence("no target measures".into()));
    }
    if r == 0 || ratio < 2 || horizon == 0 {
        return param("need r >= 1, ratio >= 2 and horizon >= 1");
    }
    for t in targets {
        ensure_space(map.space(), t.target.space())?;
        map.space().check(&t.base)?;
    }
    let mut lengths = vec![0usize];
    let mut total = 0usize;
    let mut len = r;
    while total < horizon {
        lengths.push(len);
        total += len;
        len = len.checked_mul(ratio).ok_or_else(|| Error::Resource("segment length overflow".into()))?;
    }
    let bases: Vec<Point> = (0..lengths.len() - 1).map(|m| targets[m % targets.len()].base.clone()).collect();
    let schedule = SegmentSchedule::new(r, lengths.clone(), bases)?;

    let mut certified = Vec::new();
    let mut start = 0usize;
    for (m, l) in lengths[1..].iter().enumerate() {
        let used = (*l).min(horizon - start);
        let t = &targets[m % targets.len()];
        let d = prokhorov(&empirical(&orbit(map, &t.base, used)?, used)?, &t.target)?;
        if d > t.tolerance {
            return Err(Error::Invariant(format!(
                "base point of target {} is {d} from its target over {used} steps (tolerance {})",
                m % targets.len(),
                t.tolerance
            )));
        }
        certified.push(d);
        start += used;
    }

    let sequence = schedule.build(map, horizon)?;
    let mut checkpoints = Vec::new();
    for (m, end) in schedule.boundaries()[1..].iter().enumerate() {
        let n = (*end).min(horizon);
        let target = m % targets.len();
        let distance = prokhorov(&empirical(&sequence, n)?, &targets[target].target)?;
        checkpoints.push(Checkpoint { n, target, distance });
    }
    Ok(SigmundOrbit { sequence, schedule, checkpoints, certified, note: "finite subset of V only" })
}

impl SigmundOrbit {
    /// The smallest checkpoint distance reached for each target.
    pub fn best_per_target(&self, targets: usize) -> Vec<Option<Q>> {
        let mut out: Vec<Option<Q>> = vec![None; targets];
        for c in &self.checkpoints {
            let slot = &mut out[c.target];
            if slot.as_ref().is_none_or(|b| c.distance < *b) {
                *slot = Some(c.distance.clone());
            }
        }
        out
    }

    /// Indicator of the segment starts `s_N` up to the horizon.
    pub fn boundary_indicator(&self) -> Vec<bool> {
        let h = self.sequence.horizon();
        let mut ind = vec![false; h];
        for s in self.schedule.boundaries() {
            if s < h {
                ind[s] = true;
            }
        }
        ind
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use num::Zero;
    use crate::seqcore::{Alphabet, EventuallyPeriodic, Rotation, ShiftMap, Space};

    #[test]
    fn schedule_validation() {
        let p = vec![Point::circle(Q::zero())];
        assert!(SegmentSchedule::new(3, vec![0, 3, 6], p.clone()).is_ok());
        assert!(SegmentSchedule::new(3, vec![0, 3, 5], p.clone()).is_err());
        assert!(SegmentSchedule::new(3, vec![3, 6], p.clone()).is_err());
        assert!(SegmentSchedule::new(3, vec![0, 6, 6], p.clone()).is_err());
        assert!(SegmentSchedule::new(0, vec![0, 6], p).is_err());
    }

    #[test]
    fn build_restarts_at_boundaries() {
        let rot = Rotation { alpha: q(1, 10) };
        let s = SegmentSchedule::new(1, vec![0, 2, 3], vec![Point::circle(Q::zero()), Point::circle(q(1, 2))]).unwrap();
        assert_eq!(s.boundaries(), vec![0, 2, 5]);
        let z = s.build(&rot, 5).unwrap();
        let expect: Vec<Point> = [q(0, 1), q(1, 10), q(1, 2), q(3, 5), q(7, 10)].into_iter().map(Point::circle).collect();
        assert_eq!(z.points(), expect.as_slice());
        assert!(s.build(&rot, 6).is_err());
    }

    #[test]
    fn lift_and_expand() {
        let rot = Rotation { alpha: q(1, 13) };
        let s = SegmentSchedule::quadratic(3, 6, vec![Point::circle(q(1, 3)), Point::circle(q(2, 5))]).unwrap();
        let z = s.build(&rot, s.total()).unwrap();
        assert_eq!(lift_to_power(&z, 1).unwrap(), z);
        let zp = lift_to_power(&z, 3).unwrap();
        assert_eq!(expand_from_power(&zp, &rot, 3, z.horizon()).unwrap(), z);
        assert!(lift_to_power(&z, 0).is_err());
    }

    #[test]
    fn single_fixed_point_target() {
        let a = Alphabet::binary();
        let space = Space::Shift(a.clone());
        let zero = Point::Seq(EventuallyPeriodic::parse(&a, "|0").unwrap());
        let t = QuasiGeneric { target: FiniteMeasure::dirac(space, zero.clone()).unwrap(), base: zero.clone(), tolerance: Q::zero() };
        let out = sigmund_pseudo_orbit(&ShiftMap::new(a), &[t], 1, 4, 100).unwrap();
        assert!(out.sequence.points().iter().all(|p| *p == zero));
        assert!(out.checkpoints.iter().all(|c| c.distance.is_zero()));
    }

    #[test]
    fn refuses_bad_base_point() {
        let a = Alphabet::binary();
        let space = Space::Shift(a.clone());
        let zero = Point::Seq(EventuallyPeriodic::parse(&a, "|0").unwrap());
        let one = Point::Seq(EventuallyPeriodic::parse(&a, "|1").unwrap());
        let t = QuasiGeneric { target: FiniteMeasure::dirac(space, zero).unwrap(), base: one, tolerance: q(1, 2) };
        assert!(matches!(sigmund_pseudo_orbit(&ShiftMap::new(a), &[t], 1, 4, 100), Err(Error::Invariant(_))));
    }
}
