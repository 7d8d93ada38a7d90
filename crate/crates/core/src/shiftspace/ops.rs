use serde::Serialize;

use super::graph::{Edge, LabelledGraph};
use super::language::{ln_biguint, Language, Shift, SoficShift};
use super::sft::Sft;
use crate::bits::BitSet;
use crate::error::{param, Error, Result};

/// Order-`m` finite type approximation: the SFT forbidding exactly the
/// length-`m+1` words missing from the language of `space`.
pub fn finite_type_approximation(space: &dyn Language, m: usize) -> Result<Sft> {
    if m == 0 {
        return param("approximation order must be >= 1");
    }
    let allowed = space.words(m + 1)?;
    let alphabet = space.alphabet().clone();
    let k = alphabet.len();
    let total = k.checked_pow((m + 1) as u32).filter(|t| *t <= super::max_words());
    let total = total.ok_or_else(|| Error::Resource(format!("{k}^{} blocks exceed the word budget", m + 1)))?;
    let mut forbidden = Vec::new();
    let mut it = allowed.iter().peekable();
    for code in 0..total {
        let mut w = vec![crate::seqcore::Symbol(0); m + 1];
        let mut c = code;
        for slot in w.iter_mut().rev() {
            *slot = crate::seqcore::Symbol((c % k) as u8);
            c /= k;
        }
        if it.peek() == Some(&&w) {
            it.next();
        } else {
            forbidden.push(w);
        }
    }
    Sft::new(alphabet, forbidden)
}

fn bool_mul(a: &[BitSet], b: &[BitSet]) -> Vec<BitSet> {
    a.iter()
        .map(|row| {
            let mut out = BitSet::new(b.len());
            for j in row.ones() {
                out.union_with(&b[j]);
            }
            out
        })
        .collect()
}

fn bool_pow(a: &[BitSet], mut e: usize) -> Vec<BitSet> {
    let n = a.len();
    let mut result: Vec<BitSet> = (0..n)
        .map(|i| {
            let mut r = BitSet::new(n);
            r.insert(i);
            r
        })
        .collect();
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = bool_mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = bool_mul(&base, &base);
        }
    }
    result
}

/// Adjacency of the higher-block graph together with Wielandt's exponent.
pub struct PrimitivityReport {
    pub dimension: usize,
    pub exponent: usize,
    pub primitive: bool,
}

pub fn primitivity(g: &LabelledGraph) -> PrimitivityReport {
    let n = g.vertex_count();
    let adj: Vec<BitSet> = (0..n)
        .map(|v| {
            let mut row = BitSet::new(n);
            for a in g.alphabet().symbols() {
                for &t in g.successors(v, a) {
                    row.insert(t);
                }
            }
            row
        })
        .collect();
    let exponent = (n.saturating_sub(1)).pow(2) + 1;
    let power = bool_pow(&adj, exponent);
    let primitive = n > 0 && power.iter().all(|row| row.count() == n);
    PrimitivityReport { dimension: n, exponent, primitive }
}

/// Decides topological mixing by primitivity of the higher-block graph.
pub fn is_mixing_sft(s: &Sft) -> Result<bool> {
    let g = s.block_graph()?;
    if g.is_empty() {
        return Err(Error::Parameter("the SFT is empty".into()));
    }
    Ok(primitivity(&g).primitive)
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    /// `(n, log(#B_n) / n)` for `n = 1..=nmax`.
    pub values: Vec<(usize, f64)>,
    pub final_value: f64,
    pub nonincreasing: bool,
}

pub fn entropy_estimate(space: &dyn Language, nmax: usize) -> Result<EntropyEstimate> {
    if nmax < 2 {
        return param("entropy estimate needs nmax >= 2");
    }
    let counts = space.block_counts(nmax)?;
    let values: Vec<(usize, f64)> =
        counts.iter().enumerate().map(|(i, c)| (i + 1, ln_biguint(c) / (i + 1) as f64)).collect();
    let nonincreasing = values.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(EntropyEstimate { final_value: values.last().expect("nmax >= 2").1, values, nonincreasing })
}

#[derive(Debug, Clone)]
pub struct Intersection {
    pub shift: SoficShift,
    pub empty: bool,
}

/// Synchronized product of the presentations, trimmed to vertices with an
/// infinite future. An empty result is flagged rather than rejected.
pub fn intersect(spaces: &[Shift]) -> Result<Intersection> {
    let first = spaces.first().ok_or_else(|| Error::Parameter("nothing to intersect".into()))?;
    let alphabet = first.alphabet().clone();
    for s in spaces {
        alphabet.ensure_same(s.alphabet())?;
    }
    let mut acc = first.presentation()?;
    for s in &spaces[1..] {
        acc = product(&acc, &s.presentation()?)?;
    }
    let empty = acc.is_empty();
    Ok(Intersection { shift: SoficShift::new(acc)?, empty })
}

fn product(a: &LabelledGraph, b: &LabelledGraph) -> Result<LabelledGraph> {
    let limit = super::max_states();
    let (na, nb) = (a.vertex_count(), b.vertex_count());
    if na.saturating_mul(nb) > limit {
        return Err(Error::Resource(format!("product automaton {na}x{nb} exceeds {limit} states")));
    }
    let mut edges = Vec::new();
    for u in 0..na {
        for v in 0..nb {
            for s in a.alphabet().symbols() {
                for &x in a.successors(u, s) {
                    for &y in b.successors(v, s) {
                        edges.push(Edge { from: u * nb + v, to: x * nb + y, label: s });
                    }
                }
            }
        }
    }
    let names = (0..na * nb).map(|i| format!("({},{})", a.names()[i / nb], b.names()[i % nb])).collect();
    LabelledGraph::trimmed(a.alphabet().clone(), names, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{Alphabet, Symbol};

    #[test]
    fn mixing_examples() {
        assert!(is_mixing_sft(&Sft::full(Alphabet::binary())).unwrap());
        assert!(is_mixing_sft(&Sft::golden_mean()).unwrap());
        let two_points = Sft::parse(Alphabet::binary(), &["01", "10"]).unwrap();
        assert!(!is_mixing_sft(&two_points).unwrap());
        let empty = Sft::parse(Alphabet::binary(), &["0", "1"]).unwrap();
        assert!(is_mixing_sft(&empty).is_err());
    }

    #[test]
    fn period_two_is_not_mixing() {
        let s = Sft::parse(Alphabet::binary(), &["00", "11"]).unwrap();
        assert!(!is_mixing_sft(&s).unwrap());
    }

    #[test]
    fn approximation_examples() {
        let full = Sft::full(Alphabet::binary());
        for m in 1..4 {
            assert!(finite_type_approximation(&full, m).unwrap().forbidden().is_empty());
        }
        let gm = Sft::golden_mean();
        assert_eq!(finite_type_approximation(&gm, 1).unwrap(), gm);
    }

    #[test]
    fn full_shift_entropy_is_log2() {
        let e = entropy_estimate(&Sft::full(Alphabet::binary()), 10).unwrap();
        for (_, v) in &e.values {
            assert!((v - 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn intersection_with_full_shift() {
        let gm = Shift::Sft(Sft::golden_mean());
        let full = Shift::Sft(Sft::full(Alphabet::binary()));
        let i = intersect(&[gm.clone(), full]).unwrap();
        assert!(!i.empty);
        for n in 1..=10 {
            assert_eq!(i.shift.words(n).unwrap(), gm.words(n).unwrap());
        }
        let zeros = Shift::Sft(Sft::new(Alphabet::binary(), vec![vec![Symbol(1)]]).unwrap());
        let ones = Shift::Sft(Sft::new(Alphabet::binary(), vec![vec![Symbol(0)]]).unwrap());
        assert!(intersect(&[zeros, ones]).unwrap().empty);
    }
}
