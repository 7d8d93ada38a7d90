//! Exact rational helpers shared by every module.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::{BigRational, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number used for distances, weights and densities.
pub type Q = BigRational;

/// Build `num/den` as an exact rational.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_usize(num: usize, den: usize) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Lossy conversion for display and floating comparisons.
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Reduce into `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn pow2_neg(k: usize) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k)
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"0.25"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, dec)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if !dec.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = BigInt::from(10u32).pow(dec.len() as u32);
        let dec_part: BigInt = if dec.is_empty() { BigInt::zero() } else { dec.parse().ok()? };
        let mag = int_part.clone() * &scale + if neg { -dec_part } else { dec_part };
        return Some(Q::new(mag, scale));
    }
    Some(Q::from_integer(s.parse().ok()?))
}

/// JSON form of a rational: `{num, den}`; integers that fit in `i64` are
/// emitted as numbers, anything larger as decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

fn int_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

fn json_int(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl From<&Q> for RationalJson {
    fn from(x: &Q) -> Self {
        RationalJson { num: int_json(x.numer()), den: int_json(x.denom()) }
    }
}

impl RationalJson {
    pub fn to_q(&self) -> Option<Q> {
        let d = json_int(&self.den)?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(json_int(&self.num)?, d))
    }
}

pub fn q_json(x: &Q) -> serde_json::Value {
    serde_json::to_value(RationalJson::from(x)).expect("rational serializes")
}

/// Serde adapter: `#[serde(with = "crate::rational::serde_q")]`.
pub mod serde_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        RationalJson::from(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let r = RationalJson::deserialize(d)?;
        r.to_q().ok_or_else(|| serde::de::Error::custom("invalid rational"))
    }
}

/// Exact accumulator that groups terms by denominator so long sums of
/// small-denominator rationals stay in machine integers.
#[derive(Debug, Default, Clone)]
pub struct ExactSum {
    small: HashMap<i64, i128>,
    big: Q,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: &Q) {
        if x.is_zero() {
            return;
        }
        if let (Some(n), Some(d)) = (x.numer().to_i64(), x.denom().to_i64()) {
            let slot = self.small.entry(d).or_insert(0);
            match slot.checked_add(n as i128) {
                Some(v) => *slot = v,
                None => {
                    self.big += Q::new(BigInt::from(*slot), BigInt::from(d));
                    *slot = n as i128;
                }
            }
            return;
        }
        self.big += x;
    }

    pub fn value(&self) -> Q {
        let mut out = self.big.clone();
        for (d, n) in &self.small {
            if *n != 0 {
                out += Q::new(BigInt::from(*n), BigInt::from(*d));
            }
        }
        out
    }
}

/// The geometric evaluation schedule `{ceil(horizon / 2^j)}` in increasing
/// order, always ending at `horizon`.
pub fn geometric_schedule(horizon: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = 0u32;
    loop {
        let n = horizon.div_ceil(1usize << j.min(63));
        if out.last() != Some(&n) {
            out.push(n);
        }
        if n <= 1 {
            break;
        }
        j += 1;
    }
    out.reverse();
    out
}

/// Least common multiple of the denominators, if it fits in `i128`.
pub fn common_denominator(xs: &[Q]) -> Option<i128> {
    let mut l: i128 = 1;
    for x in xs {
        let d = x.denom().to_i128()?;
        let g = num::integer::gcd(l, d);
        l = (l / g).checked_mul(d)?;
    }
    Some(l)
}

/// Numerators over a common denominator, if everything fits in `i128`
/// with headroom for sums of `xs.len()` terms.
pub fn scale_to_integers(xs: &[Q]) -> Option<(Vec<i128>, i128)> {
    let den = common_denominator(xs)?;
    let bound = i128::MAX / (xs.len() as i128 + 1);
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        let factor = den / x.denom().to_i128()?;
        let v = x.numer().to_i128()?.checked_mul(factor)?;
        if v.abs() > bound {
            return None;
        }
        out.push(v);
    }
    Some((out, den))
}

pub fn is_unit_interval(x: &Q) -> bool {
    x >= &Q::zero() && x <= &Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_increasing_and_ends_at_horizon() {
        assert_eq!(geometric_schedule(10), vec![1, 2, 3, 5, 10]);
        assert_eq!(geometric_schedule(1), vec![1]);
        let s = geometric_schedule(10_000);
        assert_eq!(*s.last().unwrap(), 10_000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_sum_matches_naive() {
        let xs = [q(1, 3), q(2, 7), q(5, 3), q(-1, 7), q(1, 2)];
        let mut acc = ExactSum::new();
        let mut naive = Q::zero();
        for x in &xs {
            acc.add(x);
            naive += x;
        }
        assert_eq!(acc.value(), naive);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/4"), Some(q(3, 4)));
        assert_eq!(parse_q("0.25"), Some(q(1, 4)));
        assert_eq!(parse_q("2"), Some(qi(2)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn json_round_trip() {
        let x = q(-5, 12);
        let j = RationalJson::from(&x);
        assert_eq!(j.num, serde_json::json!(-5));
        assert_eq!(j.to_q(), Some(x));
    }
}
