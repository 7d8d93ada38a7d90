//! Finite-support probability measures with exact weights, the Prokhorov
//! metric, pushforwards and distribution-measure snapshots.

use std::collections::{BTreeMap, VecDeque};

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{param, Error, Result};
use crate::pseudometrics::{upper_density, DensityEstimate, Observable};
use crate::rational::{common_denominator, q_usize, RationalJson, ExactSum, Q};
use crate::seqcore::{ensure_space, Point, PointMap, PointSequence, Space};

/// Status attached to ergodicity estimates: finite windows cannot decide
/// a limit statement.
pub const EVIDENCE_NOTE: &str = "evidence, not certificate";

/// A probability measure with finitely many atoms, kept sorted by point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMeasure {
    space: Space,
    atoms: Vec<(Point, Q)>,
}

impl FiniteMeasure {
    /// Merges repeated points; weights must be positive and sum to one.
    pub fn new(space: Space, atoms: impl IntoIterator<Item = (Point, Q)>) -> Result<Self> {
        let mut merged: BTreeMap<Point, Q> = BTreeMap::new();
        for (p, w) in atoms {
            space.check(&p)?;
            if !w.is_positive() {
                return param(format!("atom weight must be positive, got {w}"));
            }
            *merged.entry(p).or_insert_with(Q::zero) += w;
        }
        let mut total = ExactSum::new();
        merged.values().for_each(|w| total.add(w));
        if total.value() != Q::one() {
            return Err(Error::Invariant(format!("weights sum to {}, not 1", total.value())));
        }
        Ok(FiniteMeasure { space, atoms: merged.into_iter().collect() })
    }

    pub fn dirac(space: Space, p: Point) -> Result<Self> {
        Self::new(space, [(p, Q::one())])
    }

    /// Equal weights on the listed points (repeats add up).
    pub fn uniform(space: Space, points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySequence("uniform measure needs a point".into()));
        }
        let w = q_usize(1, points.len());
        Self::new(space, points.iter().map(|p| (p.clone(), w.clone())))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn atoms(&self) -> &[(Point, Q)] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn weight_of(&self, p: &Point) -> Q {
        self.atoms
            .binary_search_by(|(a, _)| a.cmp(p))
            .map(|i| self.atoms[i].1.clone())
            .unwrap_or_else(|_| Q::zero())
    }

    /// `{"atoms": [{"point", "num", "den"}]}`.
    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|(p, w)| {
                let r = RationalJson::from(w);
                json!({"point": self.space.point_json(p), "num": r.num, "den": r.den})
            })
            .collect();
        json!({ "atoms": atoms })
    }

    pub fn from_json(space: Space, v: &Value) -> Result<Self> {
        let atoms = v
            .get("atoms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("measure needs an \"atoms\" array".into()))?;
        let mut out = Vec::with_capacity(atoms.len());
        for a in atoms {
            let p = space.parse_point(a.get("point").unwrap_or(&Value::Null))?;
            let r = RationalJson {
                num: a.get("num").cloned().unwrap_or(Value::Null),
                den: a.get("den").cloned().unwrap_or(Value::Null),
            };
            let w = r.to_q().ok_or_else(|| Error::Parse(format!("bad weight in {a}")))?;
            out.push((p, w));
        }
        Self::new(space, out)
    }
}

/// A nonempty finite family of measures on one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSet {
    members: Vec<FiniteMeasure>,
}

impl MeasureSet {
    pub fn new(members: Vec<FiniteMeasure>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::EmptySequence("measure set is empty".into()))?;
        for m in &members[1..] {
            ensure_space(first.space(), m.space())?;
        }
        Ok(MeasureSet { members })
    }

    pub fn members(&self) -> &[FiniteMeasure] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.members.iter().map(FiniteMeasure::to_json).collect())
    }
}

/// `(1/n) Σ_{i<n} δ(x_i)`.
pub fn empirical(x: &PointSequence, n: usize) -> Result<FiniteMeasure> {
    if n == 0 || n > x.horizon() {
        return Err(Error::OutOfRange { index: n, horizon: x.horizon() });
    }
    let mut counts: BTreeMap<&Point, usize> = BTreeMap::new();
    for p in &x.points()[..n] {
        *counts.entry(p).or_insert(0) += 1;
    }
    Ok(FiniteMeasure {
        space: x.space().clone(),
        atoms: counts.into_iter().map(|(p, c)| (p.clone(), q_usize(c, n))).collect(),
    })
}

/// `μ ∘ T^{-1}`.
pub fn pushforward(map: &dyn PointMap, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    ensure_space(map.space(), mu.space())?;
    let mut merged: BTreeMap<Point, Q> = BTreeMap::new();
    for (p, w) in &mu.atoms {
        *merged.entry(map.apply(p)).or_insert_with(Q::zero) += w;
    }
    Ok(FiniteMeasure { space: mu.space.clone(), atoms: merged.into_iter().collect() })
}

/// Sorted distinct pairwise distances with 0 prepended, and the distance
/// matrix.
fn distance_levels(mu: &FiniteMeasure, nu: &FiniteMeasure) -> (Vec<Q>, Vec<Vec<Q>>) {
    let dist: Vec<Vec<Q>> = mu
        .atoms
        .iter()
        .map(|(a, _)| nu.atoms.iter().map(|(b, _)| mu.space.distance(a, b)).collect())
        .collect();
    let mut levels: Vec<Q> = dist.iter().flatten().cloned().collect();
    levels.push(Q::zero());
    levels.sort();
    levels.dedup();
    (levels, dist)
}

/// Bipartite transport flow with unbounded middle edges (Dinic).
struct Transport {
    supply: Vec<i128>,
    demand: Vec<i128>,
}

impl Transport {
    fn max_flow(&self, allowed: &dyn Fn(usize, usize) -> bool) -> i128 {
        let (m, n) = (self.supply.len(), self.demand.len());
        let (src, sink) = (m + n, m + n + 1);
        let mut g = FlowGraph::new(m + n + 2);
        for (i, &s) in self.supply.iter().enumerate() {
            g.add(src, i, s);
        }
        for (j, &d) in self.demand.iter().enumerate() {
            g.add(m + j, sink, d);
        }
        let inf: i128 = self.supply.iter().sum();
        for i in 0..m {
            for j in 0..n {
                if allowed(i, j) {
                    g.add(i, m + j, inf);
                }
            }
        }
        g.dinic(src, sink)
    }
}

struct FlowGraph {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i128>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn add(&mut self, a: usize, b: usize, c: i128) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn dinic(&mut self, s: usize, t: usize) -> i128 {
        let n = self.head.len();
        let mut flow = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &e in &self.head[v] {
                    if self.cap[e] > 0 && level[self.to[e]] == usize::MAX {
                        level[self.to[e]] = level[v] + 1;
                        queue.push_back(self.to[e]);
                    }
                }
            }
            if level[t] == usize::MAX {
                return flow;
            }
            let mut it = vec![0usize; n];
            loop {
                let pushed = self.augment(s, t, i128::MAX, &level, &mut it);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
    }

    fn augment(&mut self, v: usize, t: usize, limit: i128, level: &[usize], it: &mut [usize]) -> i128 {
        if v == t {
            return limit;
        }
        while it[v] < self.head[v].len() {
            let e = self.head[v][it[v]];
            let w = self.to[e];
            if self.cap[e] > 0 && level[w] == level[v] + 1 {
                let got = self.augment(w, t, limit.min(self.cap[e]), level, it);
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            it[v] += 1;
        }
        0
    }
}

fn scaled_weights(mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<(Vec<i128>, Vec<i128>, i128)> {
    let all: Vec<Q> = mu.atoms.iter().chain(&nu.atoms).map(|(_, w)| w.clone()).collect();
    let den = common_denominator(&all)
        .filter(|d| d.checked_mul(all.len() as i128 + 1).is_some())
        .ok_or_else(|| Error::Resource("measure weights need more than 128-bit arithmetic".into()))?;
    let scale = |w: &Q| (w * Q::from_integer(BigInt::from(den))).to_integer().to_i128().expect("fits");
    Ok((
        mu.atoms.iter().map(|(_, w)| scale(w)).collect(),
        nu.atoms.iter().map(|(_, w)| scale(w)).collect(),
        den,
    ))
}

/// Exact Prokhorov distance between finite-support measures.
///
/// For `ε` in `(d_k, d_{k+1}]` the neighbourhoods `B^ε` use the pairs at
/// distance `<= d_k`, and the worst defect `sup_B μ(B) − ν(B^ε)` equals
/// `1 − F_k` where `F_k` is the maximal transport mass on those pairs.
/// Hence `π = min_k max(d_k, 1 − F_k)`; the first term increases and the
/// second decreases in `k`, so a binary search locates the minimum.
pub fn prokhorov(mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<Q> {
    ensure_space(mu.space(), nu.space())?;
    if mu == nu {
        return Ok(Q::zero());
    }
    let (levels, dist) = distance_levels(mu, nu);
    let (supply, demand, den) = scaled_weights(mu, nu)?;
    let transport = Transport { supply, demand };
    let defect = |k: usize| {
        let f = transport.max_flow(&|i, j| dist[i][j] <= levels[k]);
        Q::new(BigInt::from(den - f), BigInt::from(den))
    };
    // Least k with defect(k) <= d_k; the last level always qualifies.
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if defect(mid) <= levels[mid] {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut best = levels[lo].clone();
    if lo > 0 {
        best = best.min(defect(lo - 1));
    }
    Ok(best)
}

/// Largest support accepted by [`prokhorov_bruteforce`].
pub const BRUTEFORCE_MAX_SUPPORT: usize = 12;

/// Prokhorov distance from the symmetric definition by enumerating every
/// subset of both supports at every distance level.
pub fn prokhorov_bruteforce(mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<Q> {
    ensure_space(mu.space(), nu.space())?;
    if mu.support_size() > BRUTEFORCE_MAX_SUPPORT || nu.support_size() > BRUTEFORCE_MAX_SUPPORT {
        return param(format!("brute force needs supports of size <= {BRUTEFORCE_MAX_SUPPORT}"));
    }
    let (levels, dist) = distance_levels(mu, nu);
    let (m, n) = (mu.support_size(), nu.support_size());
    let subset_mass = |atoms: &[(Point, Q)], mask: usize| -> Q {
        let mut s = ExactSum::new();
        (0..atoms.len()).filter(|i| mask >> i & 1 == 1).for_each(|i| s.add(&atoms[i].1));
        s.value()
    };
    let mu_mass: Vec<Q> = (0..1usize << m).map(|b| subset_mass(&mu.atoms, b)).collect();
    let nu_mass: Vec<Q> = (0..1usize << n).map(|b| subset_mass(&nu.atoms, b)).collect();
    let mut best: Option<Q> = None;
    for d in &levels {
        // Neighbourhood masks for ε slightly above d.
        let near_mu: Vec<usize> = (0..m).map(|i| (0..n).filter(|&j| dist[i][j] <= *d).fold(0, |a, j| a | 1 << j)).collect();
        let near_nu: Vec<usize> = (0..n).map(|j| (0..m).filter(|&i| dist[i][j] <= *d).fold(0, |a, i| a | 1 << i)).collect();
        let mut worst = Q::zero();
        for b in 0..1usize << m {
            let hull = (0..m).filter(|i| b >> i & 1 == 1).fold(0, |a, i| a | near_mu[i]);
            worst = worst.max(&mu_mass[b] - &nu_mass[hull]);
        }
        for b in 0..1usize << n {
            let hull = (0..n).filter(|j| b >> j & 1 == 1).fold(0, |a, j| a | near_nu[j]);
            worst = worst.max(&nu_mass[b] - &mu_mass[hull]);
        }
        let candidate = worst.max(d.clone());
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("levels contain 0"))
}

/// `π(μ, T̂μ)`.
pub fn invariance_defect(map: &dyn PointMap, mu: &FiniteMeasure) -> Result<Q> {
    prokhorov(mu, &pushforward(map, mu)?)
}

fn directed(a: &MeasureSet, b: &MeasureSet) -> Result<Q> {
    let mut sup = Q::zero();
    for m in &a.members {
        let mut inf: Option<Q> = None;
        for n in &b.members {
            let d = prokhorov(m, n)?;
            if inf.as_ref().is_none_or(|i| d < *i) {
                inf = Some(d);
            }
        }
        sup = sup.max(inf.expect("nonempty"));
    }
    Ok(sup)
}

/// Hausdorff distance between finite sets of measures under Prokhorov.
pub fn hausdorff(a: &MeasureSet, b: &MeasureSet) -> Result<Q> {
    ensure_space(a.members[0].space(), b.members[0].space())?;
    Ok(directed(a, b)?.max(directed(b, a)?))
}

/// Empirical measures at the checkpoints, with repeats collapsed.
pub fn omega_hat_snapshots(x: &PointSequence, checkpoints: &[usize]) -> Result<MeasureSet> {
    if checkpoints.is_empty() {
        return param("need at least one checkpoint");
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return param("checkpoints must be strictly increasing");
    }
    let mut members: Vec<FiniteMeasure> = Vec::new();
    for &n in checkpoints {
        let m = empirical(x, n)?;
        if !members.contains(&m) {
            members.push(m);
        }
    }
    MeasureSet::new(members)
}

/// Density of `{n < horizon : |(1/k) Σ_{j<k} f(x_{n+j}) − target| > alpha}`.
/// The caller reports the result as [`EVIDENCE_NOTE`].
pub fn oxtoby_bad_density(
    x: &PointSequence,
    f: &Observable,
    alpha: &Q,
    k: usize,
    target: &Q,
    horizon: usize,
) -> Result<DensityEstimate> {
    if k == 0 {
        return param("window length k must be >= 1");
    }
    if alpha.is_negative() {
        return param("alpha must be nonnegative");
    }
    let needed = horizon + k - 1;
    if x.horizon() < needed {
        return Err(Error::OutOfRange { index: needed, horizon: x.horizon() });
    }
    let values: Vec<Q> = x.points()[..needed].iter().map(|p| f.eval(p)).collect();
    let kq = Q::from_integer(k.into());
    let mut window = ExactSum::new();
    values[..k].iter().for_each(|v| window.add(v));
    let mut sum = window.value();
    let mut bad = Vec::with_capacity(horizon);
    for n in 0..horizon {
        if n > 0 {
            sum = sum - &values[n - 1] + &values[n + k - 1];
        }
        bad.push((&sum / &kq - target).abs() > *alpha);
    }
    upper_density(bad, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::seqcore::{Alphabet, FnMap, Identity, Symbol};

    fn disc() -> Space {
        Space::Discrete(Alphabet::binary())
    }

    fn a() -> Point {
        Point::Symbol(Symbol(0))
    }

    fn b() -> Point {
        Point::Symbol(Symbol(1))
    }

    #[test]
    fn empirical_examples() {
        let c = PointSequence::new(disc(), vec![a(); 7]).unwrap();
        assert_eq!(empirical(&c, 7).unwrap(), FiniteMeasure::dirac(disc(), a()).unwrap());
        let ab = PointSequence::new(disc(), vec![a(), b(), a(), b()]).unwrap();
        let m = empirical(&ab, 4).unwrap();
        assert_eq!(m.weight_of(&a()), q(1, 2));
        assert_eq!(m.weight_of(&b()), q(1, 2));
        assert!(empirical(&ab, 5).is_err());
        assert!(empirical(&ab, 0).is_err());
    }

    #[test]
    fn prokhorov_examples() {
        let da = FiniteMeasure::dirac(disc(), a()).unwrap();
        let db = FiniteMeasure::dirac(disc(), b()).unwrap();
        let half = FiniteMeasure::uniform(disc(), &[a(), b()]).unwrap();
        assert_eq!(prokhorov(&da, &da).unwrap(), Q::zero());
        assert_eq!(prokhorov(&da, &db).unwrap(), Q::one());
        assert_eq!(prokhorov(&half, &da).unwrap(), q(1, 2));
        assert_eq!(prokhorov_bruteforce(&half, &da).unwrap(), q(1, 2));
        for d in [q(1, 8), q(3, 10), q(1, 2)] {
            let x = FiniteMeasure::dirac(Space::Circle, Point::circle(Q::zero())).unwrap();
            let y = FiniteMeasure::dirac(Space::Circle, Point::circle(&d / Q::from_integer(2.into()))).unwrap();
            assert_eq!(prokhorov(&x, &y).unwrap(), d);
            assert_eq!(prokhorov_bruteforce(&x, &y).unwrap(), d);
        }
    }

    #[test]
    fn bruteforce_rejects_large_support() {
        let pts: Vec<Point> = (0..13).map(|i| Point::circle(q(i, 13))).collect();
        let m = FiniteMeasure::uniform(Space::Circle, &pts).unwrap();
        assert!(prokhorov_bruteforce(&m, &m).is_err());
    }

    #[test]
    fn space_mismatch() {
        let da = FiniteMeasure::dirac(disc(), a()).unwrap();
        let c = FiniteMeasure::dirac(Space::Circle, Point::circle(Q::zero())).unwrap();
        assert!(matches!(prokhorov(&da, &c), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn weights_validated() {
        assert!(FiniteMeasure::new(disc(), [(a(), q(1, 2))]).is_err());
        assert!(FiniteMeasure::new(disc(), [(a(), q(3, 2)), (b(), q(-1, 2))]).is_err());
        let merged = FiniteMeasure::new(disc(), [(a(), q(1, 4)), (a(), q(3, 4))]).unwrap();
        assert_eq!(merged.support_size(), 1);
    }

    #[test]
    fn pushforward_examples() {
        let half = FiniteMeasure::uniform(disc(), &[a(), b()]).unwrap();
        assert_eq!(pushforward(&Identity(disc()), &half).unwrap(), half);
        let collapse = FnMap::new(disc(), "collapse", |_| Point::Symbol(Symbol(0)));
        let pushed = pushforward(&collapse, &half).unwrap();
        assert_eq!(pushed, FiniteMeasure::dirac(disc(), a()).unwrap());
    }

    #[test]
    fn invariance_defect_examples() {
        let rot = crate::seqcore::Rotation { alpha: q(1, 5) };
        let orbit: Vec<Point> = (0..5).map(|i| Point::circle(q(i, 5))).collect();
        let m = FiniteMeasure::uniform(Space::Circle, &orbit).unwrap();
        assert_eq!(invariance_defect(&rot, &m).unwrap(), Q::zero());
        let fixed = FiniteMeasure::dirac(disc(), a()).unwrap();
        assert_eq!(invariance_defect(&Identity(disc()), &fixed).unwrap(), Q::zero());
    }

    #[test]
    fn hausdorff_examples() {
        let x = Point::circle(Q::zero());
        let y = Point::circle(q(1, 8));
        let dx = FiniteMeasure::dirac(Space::Circle, x).unwrap();
        let dy = FiniteMeasure::dirac(Space::Circle, y).unwrap();
        let one = MeasureSet::new(vec![dx.clone()]).unwrap();
        let two = MeasureSet::new(vec![dx.clone(), dy.clone()]).unwrap();
        assert_eq!(hausdorff(&one, &one).unwrap(), Q::zero());
        assert_eq!(hausdorff(&one, &two).unwrap(), prokhorov(&dx, &dy).unwrap());
        assert_eq!(hausdorff(&two, &one).unwrap(), q(1, 4));
    }

    #[test]
    fn snapshots_of_periodic_orbit() {
        let pts: Vec<Point> = (0..60).map(|i| Point::circle(q(i % 3, 3))).collect();
        let x = PointSequence::new(Space::Circle, pts).unwrap();
        assert_eq!(omega_hat_snapshots(&x, &[3, 6, 30, 60]).unwrap().len(), 1);
        assert_eq!(omega_hat_snapshots(&x, &[2, 3]).unwrap().len(), 2);
        assert!(omega_hat_snapshots(&x, &[3, 3]).is_err());
    }

    #[test]
    fn oxtoby_examples() {
        let ind = Observable::new("1_a", Q::one(), |p| if *p == Point::Symbol(Symbol(0)) { Q::one() } else { Q::zero() });
        let ab = PointSequence::new(disc(), (0..101).map(|i| if i % 2 == 0 { a() } else { b() }).collect()).unwrap();
        let quarter = q(1, 4);
        assert_eq!(oxtoby_bad_density(&ab, &ind, &quarter, 2, &q(1, 2), 100).unwrap().final_value, Q::zero());
        assert_eq!(oxtoby_bad_density(&ab, &ind, &quarter, 1, &q(1, 2), 100).unwrap().final_value, Q::one());
        let fixed = PointSequence::new(disc(), vec![b(); 10]).unwrap();
        assert_eq!(oxtoby_bad_density(&fixed, &ind, &Q::zero(), 3, &Q::zero(), 8).unwrap().final_value, Q::zero());
    }

    #[test]
    fn json_round_trip() {
        let m = FiniteMeasure::new(Space::Circle, [(Point::circle(q(1, 3)), q(2, 5)), (Point::circle(q(0, 1)), q(3, 5))]).unwrap();
        let v = m.to_json();
        assert_eq!(v["atoms"][0]["num"], json!(3));
        assert_eq!(FiniteMeasure::from_json(Space::Circle, &v).unwrap(), m);
    }
}
