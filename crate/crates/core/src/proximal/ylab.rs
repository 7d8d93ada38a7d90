use num::bigint::BigInt;
use num::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::gst::{p_is_zero, random_path, GstAutomaton, GstParams, DIAMOND, ONE, ZERO};
use crate::error::{param, Error, Result};
use crate::rational::{pow2_neg, q_usize, Q};
use crate::seqcore::{Alphabet, Symbol, SymbolicSequence};

/// `s_i = 2^i`.
pub fn s_i(i: u32) -> u128 {
    1u128 << i
}

/// `t_i = 10^i`, if it fits in `u128`.
pub fn t_i(i: u32) -> Option<u128> {
    10u128.checked_pow(i)
}

/// `t_i > 3 s_i + 2i > 5i`, checked in exact integers.
pub fn growth_condition(i: u32) -> bool {
    let t = BigInt::from(10).pow(i);
    let s = BigInt::from(2).pow(i);
    let mid = s * 3 + 2 * i;
    t > mid && mid > BigInt::from(5 * i)
}

/// `Σ_{i=1}^{terms} s_i / t_i`, exactly.
pub fn schedule_sum(terms: u32) -> Q {
    let mut acc = Q::zero();
    let fifth = Q::new(1.into(), 5.into());
    let mut term = fifth.clone();
    for _ in 0..terms {
        acc += &term;
        term *= &fifth;
    }
    acc
}

/// `Σ_{i>n} s_i/t_i = (1/4)·5^{-n}`.
pub fn tail_sum(n: u32) -> Q {
    Q::new(1.into(), BigInt::from(4) * BigInt::from(5).pow(n))
}

/// Truncation parameters for the intersection over `i >= 1` of `F^(2^i, 10^i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct YParams {
    /// Levels `1..=depth` are decided exactly.
    pub depth: u32,
    /// Levels `depth+1 ..= depth+tail_terms` enter the tail mask.
    pub tail_terms: u32,
}

impl YParams {
    pub fn new(depth: u32) -> Result<Self> {
        Self::with_tail(depth, 20)
    }

    pub fn with_tail(depth: u32, tail_terms: u32) -> Result<Self> {
        if depth == 0 || depth > 30 {
            return param(format!("depth must be in 1..=30, got {depth}"));
        }
        if let Some(i) = (1..=40).find(|&i| !growth_condition(i)) {
            return Err(Error::Invariant(format!("t_i > 3 s_i + 2i > 5i fails at i = {i}")));
        }
        let total = crate::rational::to_f64(&schedule_sum(40));
        if (total - 0.25).abs() > 1e-12 {
            return Err(Error::Invariant(format!("schedule sum {total} is not 1/4")));
        }
        Ok(YParams { depth, tail_terms })
    }

    pub fn level(&self, i: u32) -> Result<GstParams> {
        let t = t_i(i).filter(|t| *t <= usize::MAX as u128).ok_or_else(|| {
            Error::Resource(format!("level {i} has t = 10^{i}, too large to build"))
        })?;
        GstParams::new(s_i(i) as usize, t as usize)
    }

    /// Is position `j` a zero of the tail mask built from levels
    /// `depth+1 ..= depth+tail_terms`?
    pub fn tail_zero(&self, j: usize) -> bool {
        tail_zero_from(self.depth, self.tail_terms, j)
    }

    /// The tail-mask point as a `{0,⋄}` sequence.
    pub fn tail_mask(&self) -> SymbolicSequence {
        let (depth, terms) = (self.depth, self.tail_terms);
        SymbolicSequence::from_index_fn(Alphabet::zero_diamond(), move |j| {
            if tail_zero_from(depth, terms, j) {
                ZERO
            } else {
                DIAMOND
            }
        })
    }

    /// Whether the exact levels already cover the horizon (`t_depth > horizon`).
    pub fn truncation_justified(&self, horizon: usize) -> bool {
        t_i(self.depth).is_none_or(|t| t > horizon as u128)
    }
}

fn tail_zero_from(depth: u32, terms: u32, j: usize) -> bool {
    let j = j as u128;
    (depth + 1..=depth + terms).any(|i| match t_i(i) {
        Some(t) => j >= t - s_i(i) && p_is_zero(s_i(i), t, j),
        // t_i exceeds u128, so its zeros lie beyond any usize index
        None => false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Decision {
    /// The exact witness search for level `level` failed at `position`.
    Level { level: u32, position: usize },
    /// `x` is nonzero at a tail-mask zero.
    TailMask { position: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct YMembership {
    pub accepted: bool,
    pub horizon: usize,
    pub depth: u32,
    /// One entry per exact level, `true` when a witness exists.
    pub levels: Vec<bool>,
    pub tail_mask_ok: bool,
    /// The first criterion that rejected, if any.
    pub rejected_by: Option<Decision>,
    pub truncation_justified: bool,
}

/// Horizon membership: exact witness search for levels `1..=depth` and
/// the sufficient tail-mask test for deeper levels.
pub fn in_y_horizon(yp: &YParams, x: &SymbolicSequence, horizon: usize) -> Result<YMembership> {
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    x.alphabet().ensure_same(&Alphabet::binary())?;
    let word = x.prefix(horizon)?;
    let mut levels = Vec::new();
    let mut rejected_by = None;
    for i in 1..=yp.depth {
        let fail = GstAutomaton::new(yp.level(i)?).first_failure(&word);
        levels.push(fail.is_none());
        if let (Some(position), None) = (fail, &rejected_by) {
            rejected_by = Some(Decision::Level { level: i, position });
        }
    }
    let tail_violation = word.iter().enumerate().position(|(j, &s)| s == ONE && yp.tail_zero(j));
    if let (Some(position), None) = (tail_violation, &rejected_by) {
        rejected_by = Some(Decision::TailMask { position });
    }
    Ok(YMembership {
        accepted: rejected_by.is_none(),
        horizon,
        depth: yp.depth,
        levels,
        tail_mask_ok: tail_violation.is_none(),
        rejected_by,
        truncation_justified: yp.truncation_justified(horizon),
    })
}

/// Zero `x` wherever the tail mask vanishes. The result lies in every
/// level beyond `depth` and keeps the exact levels of `x`.
pub fn project_to_y(yp: &YParams, x: &SymbolicSequence, eps: &Q) -> Result<SymbolicSequence> {
    x.alphabet().ensure_same(&Alphabet::binary())?;
    if tail_sum(yp.depth) >= *eps {
        return param(format!(
            "tail sum {} at depth {} is not below eps = {eps}",
            tail_sum(yp.depth),
            yp.depth
        ));
    }
    if let Some(h) = x.horizon() {
        let word: Vec<Symbol> =
            x.prefix(h)?.into_iter().enumerate().map(|(j, s)| if yp.tail_zero(j) { ZERO } else { s }).collect();
        return SymbolicSequence::finite(Alphabet::binary(), word);
    }
    let (yp, x) = (*yp, x.clone());
    Ok(SymbolicSequence::from_index_fn(Alphabet::binary(), move |j| if yp.tail_zero(j) { ZERO } else { x.at(j) }))
}

/// Output of the return-times construction.
#[derive(Debug, Clone)]
pub struct ReturnTimes {
    pub y: SymbolicSequence,
    /// Level `n` whose period `t_n` aligns the copies.
    pub level: u32,
    pub residue: usize,
    /// Positions `b < horizon` with `y[b, b+k) = cylinder`, all `≡ residue (mod t_n)`.
    pub certified: Vec<usize>,
    pub density: Q,
    pub gamma: Q,
    /// `γ / t_n`.
    pub bound: Q,
    pub met_bound: bool,
}

/// Builds a point that revisits the cylinder `[word]` along a residue
/// class mod `t_n`, keeping copies only where the tail mask is `⋄` on the
/// whole window.
pub fn return_times_point(cylinder: &[Symbol], n: u32, horizon: usize) -> Result<ReturnTimes> {
    let k = cylinder.len();
    if k == 0 {
        return param("cylinder word must be nonempty");
    }
    if cylinder.iter().any(|s| s.index() > 1) {
        return Err(Error::AlphabetMismatch("cylinder must be a {0,1} word".into()));
    }
    let yp = YParams::new(n)?;
    let tn = yp.level(n)?.t();
    let sn = yp.level(n)?.s();
    if tn - sn <= k {
        return param(format!("need t_n - s_n > k, got t_n={tn}, s_n={sn}, k={k}"));
    }
    let gamma = Q::one() - Q::from_integer(k.into()) * tail_sum(n);
    if gamma <= Q::zero() {
        return param("gamma = 1 - k·tail(n) must be positive");
    }
    // the periodic point (word 0^{t_n-k})^∞ must clear the exact levels
    let mut period = cylinder.to_vec();
    period.resize(tn, ZERO);
    let x = SymbolicSequence::periodic(Alphabet::binary(), Vec::new(), period.clone())?;
    let membership = in_y_horizon(&yp, &x, (2 * tn).max(horizon.min(4 * tn)))?;
    if !membership.levels.iter().all(|b| *b) {
        return param("cylinder is not admissible at the exact levels");
    }

    let good = |b: usize| (b..b + k).all(|j| !yp.tail_zero(j));
    let mut counts = vec![0usize; tn];
    for b in 0..horizon {
        if good(b) {
            counts[b % tn] += 1;
        }
    }
    let (residue, _) = counts.iter().enumerate().fold((0, 0), |best, (j, &c)| if c > best.1 { (j, c) } else { best });

    let word = cylinder.to_vec();
    let y = SymbolicSequence::from_index_fn(Alphabet::binary(), move |i| {
        if i < residue {
            return ZERO;
        }
        let off = (i - residue) % tn;
        let b = i - off;
        if off < word.len() && (b..b + word.len()).all(|j| !yp.tail_zero(j)) {
            word[off]
        } else {
            ZERO
        }
    });

    let window = y.prefix(horizon + k)?;
    let certified: Vec<usize> =
        (0..horizon).filter(|&b| b % tn == residue && good(b) && window[b..b + k] == *cylinder).collect();
    let density = q_usize(certified.len(), horizon);
    let bound = &gamma / Q::from_integer(tn.into());
    Ok(ReturnTimes { y, level: n, residue, met_bound: density >= bound, certified, density, gamma, bound })
}

/// `min_{n < horizon} ρ(σⁿx, σⁿy)` with `ρ = 2^{-first difference}`;
/// agreement up to the horizon counts as a difference at the horizon.
pub fn proximality_probe(x: &SymbolicSequence, y: &SymbolicSequence, horizon: usize) -> Result<Q> {
    x.alphabet().ensure_same(y.alphabet())?;
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let a = x.prefix(horizon)?;
    let b = y.prefix(horizon)?;
    // run[n] = length of agreement starting at n, clipped to the horizon
    let mut best = 0usize;
    let mut run = 0usize;
    for n in (0..horizon).rev() {
        run = if a[n] == b[n] { run + 1 } else { 0 };
        best = best.max(run);
    }
    Ok(pow2_neg(best))
}

/// A random point of `F^(s_1,t_1) ∩ ... ∩ F^(s_depth,t_depth)` on
/// `[0, horizon)`: `1`s only where random witness paths all read `⋄`.
pub fn sample_member<R: Rng + ?Sized>(yp: &YParams, horizon: usize, rng: &mut R, ones: f64) -> Result<SymbolicSequence> {
    let mut free = vec![true; horizon];
    for i in 1..=yp.depth {
        let path = random_path(yp.level(i)?, horizon, rng);
        for (f, s) in free.iter_mut().zip(path) {
            *f &= s == DIAMOND;
        }
    }
    let word = free.into_iter().map(|f| if f && rng.gen_bool(ones) { ONE } else { ZERO }).collect();
    SymbolicSequence::finite(Alphabet::binary(), word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_constants() {
        let s = schedule_sum(40);
        assert!((crate::rational::to_f64(&s) - 0.25).abs() < 1e-12);
        assert_eq!(tail_sum(1), q(1, 20));
        assert_eq!(tail_sum(2), q(1, 100));
        // closed form against the partial sums
        assert_eq!(schedule_sum(3) + tail_sum(3), q(1, 4));
        assert!((1..=40).all(growth_condition));
    }

    #[test]
    fn membership_examples() {
        let yp = YParams::new(2).unwrap();
        let b = Alphabet::binary();
        let zero = SymbolicSequence::parse(&b, "|0").unwrap();
        assert!(in_y_horizon(&yp, &zero, 1000).unwrap().accepted);
        let ones = SymbolicSequence::parse(&b, "|1").unwrap();
        let m = in_y_horizon(&yp, &ones, 1000).unwrap();
        assert!(!m.accepted);
        assert!(matches!(m.rejected_by, Some(Decision::Level { level: 1, .. })));
    }

    #[test]
    fn tail_mask_counts() {
        let yp = YParams::new(2).unwrap();
        let zeros = (0..10_000).filter(|&j| yp.tail_zero(j)).count();
        // p^(8,1000) has 10·8 zeros, p^(16,10^4) has 16, and 9992..9999 are shared
        assert_eq!(zeros, 80 + 16 - 8);
    }

    #[test]
    fn projection_rejects_large_tail() {
        let yp = YParams::new(1).unwrap();
        let x = SymbolicSequence::parse(&Alphabet::binary(), "|0").unwrap();
        assert!(project_to_y(&yp, &x, &q(1, 20)).is_err());
        assert!(project_to_y(&yp, &x, &q(1, 10)).is_ok());
    }

    #[test]
    fn projection_lands_in_y() {
        let yp = YParams::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let x = sample_member(&yp, 5000, &mut rng, 0.5).unwrap();
            let z = project_to_y(&yp, &x, &q(1, 50)).unwrap();
            assert!(in_y_horizon(&yp, &z, 5000).unwrap().accepted);
        }
    }

    #[test]
    fn membership_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = Alphabet::binary();
        for _ in 0..40 {
            let word: Vec<Symbol> = (0..3000).map(|_| Symbol(rng.gen_bool(0.02) as u8)).collect();
            let x = SymbolicSequence::finite(b.clone(), word).unwrap();
            let mut prev = true;
            for h in [10, 100, 1000, 3000] {
                let now = in_y_horizon(&YParams::new(2).unwrap(), &x, h).unwrap().accepted;
                assert!(prev || !now, "horizon antitone");
                prev = now;
            }
            // deeper exact levels only replace a sufficient test by an exact one
            let mut prev = false;
            for d in 1..=3 {
                let now = in_y_horizon(&YParams::new(d).unwrap(), &x, 3000).unwrap().accepted;
                assert!(!prev || now, "depth never flips true to false");
                prev = now;
            }
        }
    }

    #[test]
    fn return_times_for_single_symbol() {
        let r = return_times_point(&[ONE], 2, 10_000).unwrap();
        assert!(r.gamma > q(3, 4));
        assert!(r.met_bound);
        assert!(in_y_horizon(&YParams::new(2).unwrap(), &r.y, 10_000).unwrap().accepted);
        let y = r.y.prefix(10_000).unwrap();
        for &b in &r.certified {
            assert_eq!(y[b], ONE);
        }
    }

    #[test]
    fn proximality_examples() {
        let b = Alphabet::binary();
        let x = SymbolicSequence::parse(&b, "|0110").unwrap();
        assert_eq!(proximality_probe(&x, &x, 50).unwrap(), pow2_neg(50));
        let y = SymbolicSequence::parse(&b, "|1001").unwrap();
        assert_eq!(proximality_probe(&x, &y, 50).unwrap(), Q::one());
        let mut prev = Q::one();
        let z = SymbolicSequence::parse(&b, "|0111011").unwrap();
        for h in [1, 5, 20, 80] {
            let v = proximality_probe(&x, &z, h).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn y1_members_come_close() {
        let yp = YParams::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let x = sample_member(&yp, 10_000, &mut rng, 0.5).unwrap();
            let y = sample_member(&yp, 10_000, &mut rng, 0.5).unwrap();
            assert!(proximality_probe(&x, &y, 10_000).unwrap() <= pow2_neg(2));
        }
    }
}
