use std::sync::Arc;

use num::integer::Roots;
use num::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::rational::Q;
use crate::seqcore::{Point, PointMap};

/// Closed forms for `g(n, ε)`; `Custom` covers anything else.
#[derive(Clone)]
pub enum MistakeForm {
    Zero,
    Constant(u64),
    /// `⌈√n⌉`.
    SqrtCeil,
    /// `⌊n·r⌋`.
    Floor(Q),
    Custom(Arc<dyn Fn(u64, &Q) -> u64 + Send + Sync>),
}

impl std::fmt::Debug for MistakeForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MistakeForm::Zero => write!(f, "0"),
            MistakeForm::Constant(c) => write!(f, "{c}"),
            MistakeForm::SqrtCeil => write!(f, "ceil(sqrt(n))"),
            MistakeForm::Floor(r) => write!(f, "floor(n*{r})"),
            MistakeForm::Custom(_) => write!(f, "custom"),
        }
    }
}

/// `g : ℕ × (0, ε0) → ℕ0`.
#[derive(Debug, Clone)]
pub struct MistakeFunction {
    pub form: MistakeForm,
    pub eps0: Q,
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MistakeCheck {
    pub monotone: bool,
    /// `g(n)/n` on the schedule `1, 2, 4, ...` never increases after its
    /// first positive value.
    pub ratio_nonincreasing: bool,
    pub final_ratio: f64,
}

impl MistakeFunction {
    pub fn new(form: MistakeForm, eps0: Q) -> Result<Self> {
        if !eps0.is_positive() {
            return param("eps0 must be positive");
        }
        Ok(MistakeFunction { form, eps0 })
    }

    pub fn eval(&self, n: u64, eps: &Q) -> u64 {
        match &self.form {
            MistakeForm::Zero => 0,
            MistakeForm::Constant(c) => *c,
            MistakeForm::SqrtCeil => ceil_sqrt(n),
            MistakeForm::Floor(r) => (r * Q::from_integer(n.into())).floor().to_integer().to_u64().unwrap_or(u64::MAX),
            MistakeForm::Custom(f) => f(n, eps),
        }
    }

    fn check_eps(&self, eps: &Q) -> Result<()> {
        if !eps.is_positive() || *eps >= self.eps0 {
            return param(format!("eps must lie in (0, {}), got {eps}", self.eps0));
        }
        Ok(())
    }

    /// Samples monotonicity in `n` and the decay of `g(n)/n` up to `limit`.
    pub fn verify(&self, eps: &Q, limit: u64) -> Result<MistakeCheck> {
        self.check_eps(eps)?;
        let mut monotone = true;
        let mut ratio_nonincreasing = true;
        let mut last_ratio: Option<f64> = None;
        let mut n = 1u64;
        while n <= limit {
            // Dense steps around each schedule point.
            for m in n..(n + 16).min(limit + 1) {
                if self.eval(m, eps) > self.eval(m + 1, eps) {
                    monotone = false;
                }
            }
            let ratio = self.eval(n, eps) as f64 / n as f64;
            if let Some(prev) = last_ratio {
                if ratio > prev + 1e-12 {
                    ratio_nonincreasing = false;
                }
            }
            if ratio > 0.0 || last_ratio.is_some() {
                last_ratio = Some(ratio);
            }
            n *= 2;
        }
        Ok(MistakeCheck { monotone, ratio_nonincreasing, final_ratio: last_ratio.unwrap_or(0.0) })
    }
}

/// Why the scanned value of `k_g` also holds beyond the scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// `g ≡ 0`.
    Zero,
    /// `c < Nε` at the scan limit `N`.
    Constant,
    /// `⌈√m⌉ <= √m + 1 <= mε` at the limit, and `(√m + 1)/m` decreases.
    SqrtCeil,
    /// `⌊m r⌋ <= m r < m ε` for every `m`.
    Floor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KgReport {
    Found { k: u64, scan_limit: u64, certificate: Option<Certificate> },
    /// `g(m, ε) >= mε` at `last_failure`, which is the scan limit itself.
    NotFound { scan_limit: u64, last_failure: u64 },
}

/// `k_g(ε) = min{n : g(m, ε) < mε for all m >= n}`, scanned on
/// `[1, scan_limit]`.
pub fn k_g(g: &MistakeFunction, eps: &Q, scan_limit: u64) -> Result<KgReport> {
    g.check_eps(eps)?;
    if scan_limit == 0 {
        return param("scan_limit must be >= 1");
    }
    let fails = |m: u64| Q::from_integer(g.eval(m, eps).into()) >= eps * Q::from_integer(m.into());
    let mut m = scan_limit;
    let last_failure = loop {
        if fails(m) {
            break Some(m);
        }
        if m == 1 {
            break None;
        }
        m -= 1;
    };
    if last_failure == Some(scan_limit) {
        return Ok(KgReport::NotFound { scan_limit, last_failure: scan_limit });
    }
    let k = last_failure.map_or(1, |f| f + 1);
    let big_n = Q::from_integer(scan_limit.into());
    let certificate = match &g.form {
        MistakeForm::Zero => Some(Certificate::Zero),
        MistakeForm::Constant(c) if Q::from_integer((*c).into()) < eps * &big_n => Some(Certificate::Constant),
        MistakeForm::SqrtCeil => {
            // √N + 1 <= Nε  ⟺  Nε − 1 >= 0 and N <= (Nε − 1)².
            let slack = eps * &big_n - Q::one();
            (!slack.is_negative() && big_n <= &slack * &slack).then_some(Certificate::SqrtCeil)
        }
        MistakeForm::Floor(r) if r < eps => Some(Certificate::Floor),
        _ => None,
    };
    Ok(KgReport::Found { k, scan_limit, certificate })
}

fn distances_along(map: &dyn PointMap, x: &Point, y: &Point, n: usize) -> Result<Vec<Q>> {
    if n == 0 {
        return param("n must be >= 1");
    }
    let space = map.space();
    space.check(x)?;
    space.check(y)?;
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        if j > 0 {
            a = map.apply(&a);
            b = map.apply(&b);
        }
        out.push(space.distance(&a, &b));
    }
    Ok(out)
}

/// `y ∈ B_n(x, ε)`: `ρ(T^j x, T^j y) < ε` for all `j < n`.
pub fn bowen_ball_member(map: &dyn PointMap, x: &Point, y: &Point, n: usize, eps: &Q) -> Result<bool> {
    Ok(distances_along(map, x, y, n)?.iter().all(|d| d < eps))
}

/// `y ∈ B_n(g; x, ε)`: at least `n − g(n, ε)` indices `j < n` satisfy
/// `ρ(T^j x, T^j y) < ε`.
pub fn bowen_ball_mistakes_member(
    map: &dyn PointMap,
    g: &MistakeFunction,
    x: &Point,
    y: &Point,
    n: usize,
    eps: &Q,
) -> Result<bool> {
    g.check_eps(eps)?;
    let allowed = g.eval(n as u64, eps);
    if allowed >= n as u64 {
        return Err(Error::Parameter(format!("g({n}, {eps}) = {allowed} >= n; the ball would be everything")));
    }
    let good = distances_along(map, x, y, n)?.iter().filter(|d| *d < eps).count() as u64;
    Ok(good >= n as u64 - allowed)
}
