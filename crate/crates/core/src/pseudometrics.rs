//! Finite-horizon Besicovitch pseudometric, the density form, the
//! symbolic `d̄`, threshold sets `J_δ` and upper densities.
//!
//! Every quantity here is a limit superior along the horizon. We report
//! the plain average at the horizon (`value` / `final_value`) together
//! with the maximum over the geometric schedule `{⌈N/2^j⌉}` as a limsup
//! approximant. On eventually periodic inputs evaluated at multiples of
//! the period the plain average is the exact limit.

use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::rational::{geometric_schedule, q_usize, scale_to_integers, serde_q, ExactSum, Q};
use crate::seqcore::{ensure_space, orbit, Point, PointMap, PointSequence, SymbolicSequence};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub horizon: usize,
    /// `(n, #(A ∩ [0,n)) / n)` on the geometric schedule.
    pub running_values: Vec<ScheduleValue>,
    #[serde(with = "serde_q")]
    pub final_value: Q,
    #[serde(with = "serde_q")]
    pub running_max: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleValue {
    pub n: usize,
    #[serde(with = "serde_q")]
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesicovitchReport {
    pub horizon: usize,
    /// Cesàro average of the distances at the horizon.
    #[serde(with = "serde_q")]
    pub value: Q,
    /// Maximum partial average over the geometric schedule.
    #[serde(with = "serde_q")]
    pub window_sup: Q,
    pub schedule: Vec<ScheduleValue>,
}

fn schedule_averages(terms: impl Iterator<Item = Q>, horizon: usize) -> Vec<ScheduleValue> {
    let schedule = geometric_schedule(horizon);
    let mut out = Vec::with_capacity(schedule.len());
    let mut acc = ExactSum::new();
    let mut next = 0;
    for (i, t) in terms.take(horizon).enumerate() {
        acc.add(&t);
        if schedule.get(next) == Some(&(i + 1)) {
            out.push(ScheduleValue { n: i + 1, value: acc.value() / Q::from_integer((i + 1).into()) });
            next += 1;
        }
    }
    out
}

fn schedule_counts(indicator: impl Iterator<Item = bool>, horizon: usize) -> Result<DensityEstimate> {
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let schedule = geometric_schedule(horizon);
    let mut running_values = Vec::with_capacity(schedule.len());
    let mut count = 0usize;
    let mut next = 0;
    let mut seen = 0;
    for (i, b) in indicator.take(horizon).enumerate() {
        count += usize::from(b);
        seen = i + 1;
        if schedule.get(next) == Some(&(i + 1)) {
            running_values.push(ScheduleValue { n: i + 1, value: q_usize(count, i + 1) });
            next += 1;
        }
    }
    if seen < horizon {
        return Err(Error::OutOfRange { index: horizon, horizon: seen });
    }
    Ok(finish(horizon, running_values))
}

fn finish(horizon: usize, running_values: Vec<ScheduleValue>) -> DensityEstimate {
    let final_value = running_values.last().map(|v| v.value.clone()).unwrap_or_else(Q::zero);
    let running_max = running_values.iter().map(|v| &v.value).max().cloned().unwrap_or_else(Q::zero);
    DensityEstimate { horizon, running_values, final_value, running_max }
}

/// Upper asymptotic density estimate of `{n : indicator(n)}`.
pub fn upper_density(indicator: impl IntoIterator<Item = bool>, horizon: usize) -> Result<DensityEstimate> {
    schedule_counts(indicator.into_iter(), horizon)
}

/// `(1/N) Σ_{n<N} ρ(x_n, y_n)` with the schedule maximum.
pub fn besicovitch(x: &PointSequence, y: &PointSequence, horizon: usize) -> Result<BesicovitchReport> {
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let d = x.distances(y, horizon)?;
    Ok(besicovitch_from_distances(&d))
}

pub fn besicovitch_from_distances(d: &[Q]) -> BesicovitchReport {
    let schedule = schedule_averages(d.iter().cloned(), d.len());
    let value = schedule.last().map(|v| v.value.clone()).unwrap_or_else(Q::zero);
    let window_sup = schedule.iter().map(|v| &v.value).max().cloned().unwrap_or_else(Q::zero);
    BesicovitchReport { horizon: d.len(), value, window_sup, schedule }
}

/// Density of the disagreement set of two symbolic sequences.
pub fn dbar(x: &SymbolicSequence, y: &SymbolicSequence, horizon: usize) -> Result<DensityEstimate> {
    x.alphabet().ensure_same(y.alphabet())?;
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let a = x.prefix(horizon)?;
    let b = y.prefix(horizon)?;
    upper_density(a.iter().zip(&b).map(|(u, v)| u != v), horizon)
}

/// Density of `J_δ = {n < N : ρ(x_n, y_n) >= δ}`.
pub fn j_delta(x: &PointSequence, y: &PointSequence, delta: &Q, horizon: usize) -> Result<DensityEstimate> {
    if !(delta > &Q::zero() && delta <= &Q::one()) {
        return param(format!("delta must lie in (0, 1], got {delta}"));
    }
    let d = x.distances(y, horizon)?;
    upper_density(d.iter().map(|r| r >= delta), horizon)
}

/// Exact finite-horizon `inf{δ > 0 : d̄_N(J_δ) < δ}`.
///
/// `#J_δ` is constant for δ in each interval `(d_k, d_{k+1}]` between
/// consecutive distinct distances (with `d_0 = 0`), so the infimum is the
/// smallest `max(d_k, #J/N)` whose interval is nonempty. All candidates
/// are observed distances or multiples of `1/N`.
pub fn dprime(x: &PointSequence, y: &PointSequence, horizon: usize) -> Result<Q> {
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    Ok(dprime_from_distances(&x.distances(y, horizon)?))
}

pub fn dprime_from_distances(d: &[Q]) -> Q {
    let n = d.len();
    let mut sorted: Vec<&Q> = d.iter().collect();
    sorted.sort();
    let mut levels: Vec<Q> = vec![Q::zero()];
    for v in &sorted {
        if *v > levels.last().expect("nonempty") {
            levels.push((*v).clone());
        }
    }
    let mut best: Option<Q> = None;
    for (k, lo) in levels.iter().enumerate() {
        // #{ρ > lo}
        let above = n - sorted.partition_point(|v| *v <= lo);
        let candidate = std::cmp::max(lo.clone(), q_usize(above, n));
        let feasible = match levels.get(k + 1) {
            Some(hi) => candidate < *hi,
            None => true,
        };
        if feasible && best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.expect("the last interval is always feasible")
}

/// Summary of the termwise inequality check
/// `δ·d̄_N(J_δ) <= D_N <= d̄_N(J_δ) + δ`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StarReport {
    pub horizons: usize,
    pub checked: u64,
    pub violations: u64,
}

/// Checks both inequalities at every horizon of the geometric schedule and
/// every candidate δ (observed distances and the grid `k/N`).
pub fn star_check(distances: &[Q]) -> StarReport {
    let mut report = StarReport::default();
    for n in geometric_schedule(distances.len()) {
        let prefix = &distances[..n];
        report.horizons += 1;
        match scale_to_integers(prefix) {
            Some((ints, den)) => star_check_scaled(&ints, den, &mut report),
            None => star_check_exact(prefix, &mut report),
        }
    }
    report
}

fn star_check_scaled(ints: &[i128], den: i128, report: &mut StarReport) {
    let n = ints.len() as i128;
    let total: i128 = ints.iter().sum();
    let mut sorted = ints.to_vec();
    sorted.sort_unstable();
    let count_at_least = |pred: &dyn Fn(i128) -> bool| (sorted.len() - sorted.partition_point(|r| !pred(*r))) as i128;
    let mut distinct = sorted.clone();
    distinct.dedup();
    // δ = r / den
    for &r in distinct.iter().filter(|r| **r > 0) {
        let c = count_at_least(&|v| v >= r);
        report.checked += 1;
        // δ·c/N <= S/(den·N)  and  S/(den·N) <= c/N + δ
        if r * c > total || total > c * den + r * n {
            report.violations += 1;
        }
    }
    // δ = k / N
    for k in 1..=n {
        let c = count_at_least(&|v| v * n >= k * den);
        report.checked += 1;
        if k * c * den > total * n || total > (c + k) * den {
            report.violations += 1;
        }
    }
}

fn star_check_exact(d: &[Q], report: &mut StarReport) {
    let n = d.len();
    let nq = Q::from_integer(n.into());
    let mut acc = ExactSum::new();
    d.iter().for_each(|x| acc.add(x));
    let avg = acc.value() / &nq;
    let mut sorted: Vec<&Q> = d.iter().collect();
    sorted.sort();
    let mut candidates: Vec<Q> = sorted.iter().filter(|v| v.is_positive()).map(|v| (*v).clone()).collect();
    candidates.dedup();
    candidates.extend((1..=n).map(|k| q_usize(k, n)));
    for delta in candidates {
        let c = n - sorted.partition_point(|v| **v < delta);
        let density = q_usize(c, n);
        report.checked += 1;
        if &delta * &density > avg || avg > &density + &delta {
            report.violations += 1;
        }
    }
}

/// A bounded real observable; values lie in an interval of length `range`.
#[derive(Clone)]
pub struct Observable {
    pub name: String,
    pub range: Q,
    f: Arc<dyn Fn(&Point) -> Q + Send + Sync>,
}

impl Observable {
    pub fn new(name: impl Into<String>, range: Q, f: impl Fn(&Point) -> Q + Send + Sync + 'static) -> Self {
        Observable { name: name.into(), range, f: Arc::new(f) }
    }

    pub fn eval(&self, p: &Point) -> Q {
        (self.f)(p)
    }

    /// `f ∘ T`.
    pub fn compose(&self, map: Arc<dyn PointMap>) -> Observable {
        let f = self.f.clone();
        Observable {
            name: format!("{}∘{}", self.name, map.name()),
            range: self.range.clone(),
            f: Arc::new(move |p| f(&map.apply(p))),
        }
    }
}

impl std::fmt::Debug for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Observable({}, range {})", self.name, self.range)
    }
}

/// `max_f D_B(f(x_T), f(y_T))` at the horizon, with `|f(a) − f(b)|`
/// normalized by the declared range of `f`.
pub fn besicovitch_family(
    x0: &Point,
    y0: &Point,
    map: &dyn PointMap,
    family: &[Observable],
    horizon: usize,
) -> Result<Q> {
    if family.is_empty() {
        return param("observable family is empty");
    }
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let xs = orbit(map, x0, horizon)?;
    let ys = orbit(map, y0, horizon)?;
    ensure_space(xs.space(), ys.space())?;
    let mut best = Q::zero();
    for f in family {
        if !f.range.is_positive() {
            return param(format!("observable {} needs a positive range", f.name));
        }
        let mut acc = ExactSum::new();
        for (a, b) in xs.points().iter().zip(ys.points()) {
            acc.add(&((f.eval(a) - f.eval(b)).abs() / &f.range));
        }
        let v = acc.value() / Q::from_integer(horizon.into());
        if v > best {
            best = v;
        }
    }
    Ok(best)
}
