use nalgebra::{DMatrix, Schur};
use num::{BigInt, One, ToPrimitive, Zero};
use serde::Serialize;

use super::maps::TorusAuto;
use crate::error::{param, Error, Result};

/// Integer polynomial, lowest degree first.
type Poly = Vec<BigInt>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Exact division by a monic divisor: `(quotient, remainder)`.
fn divmod(num: &[BigInt], den: &[BigInt]) -> (Poly, Poly) {
    let mut r: Poly = num.to_vec();
    let dd = den.len() - 1;
    if r.len() <= dd {
        return (vec![BigInt::zero()], trim(r));
    }
    let mut quot = vec![BigInt::zero(); r.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = r[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            r[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    r.truncate(dd.max(1));
    (trim(quot), trim(r))
}

/// The cyclotomic polynomial `Φ_d`.
pub fn cyclotomic(d: usize) -> Vec<BigInt> {
    assert!(d >= 1);
    let mut p: Poly = vec![BigInt::zero(); d + 1];
    p[0] = -BigInt::one();
    p[d] = BigInt::one();
    for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
        p = divmod(&p, &cyclotomic(e)).0;
    }
    p
}

/// `det(xI − M)` by Faddeev–LeVerrier in exact integers.
pub fn characteristic_polynomial(m: &[Vec<i64>]) -> Vec<BigInt> {
    let k = m.len();
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect();
    let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
        (0..k).map(|i| (0..k).map(|j| (0..k).map(|l| &x[i][l] * &y[l][j]).sum()).collect()).collect()
    };
    let mut coeffs = vec![BigInt::zero(); k + 1];
    coeffs[k] = BigInt::one();
    let mut mk: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); k]; k];
    for step in 1..=k {
        let mut next = mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[k - step + 1];
        }
        mk = next;
        let am = mul(&a, &mk);
        let tr: BigInt = (0..k).map(|i| am[i][i].clone()).sum();
        coeffs[k - step] = -tr / BigInt::from(step);
    }
    coeffs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HasRootOfUnity,
    NoneUpToOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenReport {
    pub verdict: Verdict,
    /// Orders `d` with `Φ_d | χ`.
    pub root_of_unity_orders: Vec<usize>,
    pub checked_up_to: usize,
    /// Every `d` with `φ(d) <= k` was checked, so the verdict covers all
    /// roots of unity.
    pub exhaustive: bool,
    /// Some eigenvalue has modulus within `1e-9` of 1 (floating point).
    pub unit_modulus_eigenvalue: bool,
    pub hyperbolic: bool,
    /// Characteristic polynomial, lowest degree first.
    pub char_poly: Vec<i64>,
    pub eigenvalue_moduli: Vec<f64>,
}

fn euler_phi(mut n: usize) -> usize {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Largest `d` with `φ(d) <= k`; `φ(d) >= sqrt(d/2)` bounds the search.
fn max_cyclotomic_order(k: usize) -> usize {
    (1..=2 * k * k + 2).filter(|&d| euler_phi(d) <= k).max().unwrap_or(1)
}

const UNIT_TOL: f64 = 1e-9;

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of `M + cI` minus `c`; a nonzero shift unsticks the QR
/// iteration when the spectrum is symmetric under `λ ↦ −λ`.
const SHIFTS: [f64; 4] = [0.0, 0.317_3, -0.712_9, 1.418_3];

fn moduli(m: &[Vec<i64>]) -> Result<Vec<f64>> {
    let k = m.len();
    for c in SHIFTS {
        let mat = DMatrix::from_fn(k, k, |i, j| m[i][j] as f64 + if i == j { c } else { 0.0 });
        if let Some(schur) = Schur::try_new(mat, f64::EPSILON, SCHUR_MAX_ITER) {
            let mut out: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| (z - c).norm()).collect();
            out.sort_by(f64::total_cmp);
            return Ok(out);
        }
    }
    Err(Error::Resource("Schur iteration did not converge".into()))
}

pub fn root_of_unity_eigencheck(s: &TorusAuto, max_order: usize) -> Result<EigenReport> {
    if max_order == 0 {
        return param("max_order must be >= 1");
    }
    let chi = characteristic_polynomial(s.matrix());
    let orders: Vec<usize> = (1..=max_order)
        .filter(|&d| euler_phi(d) <= s.dim())
        .filter(|&d| divmod(&chi, &cyclotomic(d)).1.iter().all(Zero::is_zero))
        .collect();
    let mods = moduli(s.matrix())?;
    let unit = mods.iter().any(|m| (m - 1.0).abs() < UNIT_TOL);
    Ok(EigenReport {
        verdict: if orders.is_empty() { Verdict::NoneUpToOrder } else { Verdict::HasRootOfUnity },
        root_of_unity_orders: orders,
        checked_up_to: max_order,
        exhaustive: max_order >= max_cyclotomic_order(s.dim()),
        unit_modulus_eigenvalue: unit,
        hyperbolic: !unit,
        char_poly: chi.iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect(),
        eigenvalue_moduli: mods,
    })
}

fn companion(coeffs_low: &[i64]) -> Vec<Vec<i64>> {
    let k = coeffs_low.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if j == k - 1 { -coeffs_low[i] } else { i64::from(i == j + 1) })
                .collect()
        })
        .collect()
}

/// Companion matrices of `x^4 + a x^3 + b x^2 + a x + 1` with
/// `|a|, |b| <= range` that are nonhyperbolic and have no root of unity
/// among their eigenvalues.
pub fn search_nonhyperbolic(range: i64) -> Result<Vec<TorusAuto>> {
    let mut out = Vec::new();
    for a in -range..=range {
        for b in -range..=range {
            let s = TorusAuto::new(companion(&[1, a, b, a])).expect("constant term 1 gives det 1");
            let r = root_of_unity_eigencheck(&s, 64)?;
            if r.verdict == Verdict::NoneUpToOrder && r.exhaustive && r.unit_modulus_eigenvalue {
                out.push(s);
            }
        }
    }
    Ok(out)
}
