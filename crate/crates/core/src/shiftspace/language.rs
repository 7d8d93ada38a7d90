use std::collections::{HashMap, HashSet};

use num::bigint::BigUint;
use num::{ToPrimitive, Zero};

use super::graph::LabelledGraph;
use super::sft::Sft;
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::seqcore::{Alphabet, Symbol};

/// Anything that can decide which finite words occur in its points.
pub trait Language {
    fn alphabet(&self) -> &Alphabet;

    /// Does `word` occur in some point of the shift?
    fn admits(&self, word: &[Symbol]) -> bool;

    /// Block counts `#B_1, ..., #B_nmax`.
    fn block_counts(&self, nmax: usize) -> Result<Vec<BigUint>>;

    /// All admissible words of length `n`, in lexicographic order.
    fn words(&self, n: usize) -> Result<Vec<Vec<Symbol>>> {
        let limit = super::max_words();
        let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &layer {
                for a in self.alphabet().symbols() {
                    let mut v = w.clone();
                    v.push(a);
                    if self.admits(&v) {
                        next.push(v);
                    }
                }
                if next.len() > limit {
                    return Err(Error::Resource(format!("language exceeds {limit} words")));
                }
            }
            layer = next;
        }
        Ok(layer)
    }
}

/// Shift space presented by the labels of infinite paths in a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SoficShift {
    graph: LabelledGraph,
}

impl SoficShift {
    /// The graph is trimmed first, so the language is factorial and
    /// extendable by construction.
    pub fn new(graph: LabelledGraph) -> Result<Self> {
        let g = LabelledGraph::trimmed(graph.alphabet().clone(), graph.names().to_vec(), graph.edges().to_vec())?;
        Ok(SoficShift { graph: g })
    }

    pub fn graph(&self) -> &LabelledGraph {
        &self.graph
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

/// Either kind of shift space.
#[derive(Debug, Clone, PartialEq)]
pub enum Shift {
    Sft(Sft),
    Sofic(SoficShift),
}

impl Shift {
    pub fn presentation(&self) -> Result<LabelledGraph> {
        match self {
            Shift::Sft(s) => s.presentation(),
            Shift::Sofic(s) => Ok(s.graph().clone()),
        }
    }
}

/// Counts distinct label words. Hereditary binary presentations go
/// through [`hereditary_counts`]; anything else (or an overflow there)
/// runs the subset construction from the set of all vertices.
pub(crate) fn determinized_counts(g: &LabelledGraph, nmax: usize) -> Result<Vec<BigUint>> {
    if is_hereditary(g) && nmax <= 64 {
        if let Ok(counts) = hereditary_counts(g, nmax) {
            return Ok(counts);
        }
    }
    subset_counts(g, nmax)
}

/// Binary alphabet and every `1` edge has a parallel `0` edge, so the
/// language is closed under turning any `1` into a `0`.
pub(crate) fn is_hereditary(g: &LabelledGraph) -> bool {
    g.alphabet().len() == 2
        && (0..g.vertex_count()).all(|v| {
            let zeros = g.successors(v, Symbol(0));
            g.successors(v, Symbol(1)).iter().all(|t| zeros.binary_search(t).is_ok())
        })
}

/// For a hereditary graph the words of length `n` are the subsets of the
/// masks `D(π)` (positions where the path `π` could read a `1`), so the
/// count is the size of a union of down-sets. Every path of the trimmed
/// graph extends, so the length-`n` masks are prefixes of the length-`nmax`
/// ones.
pub(crate) fn hereditary_counts(g: &LabelledGraph, nmax: usize) -> Result<Vec<BigUint>> {
    debug_assert!(nmax <= 64);
    let limit = super::max_states();
    let mut layer: HashSet<(usize, u64)> = (0..g.vertex_count()).map(|v| (v, 0)).collect();
    for i in 0..nmax {
        let mut next = HashSet::new();
        for &(v, mask) in &layer {
            let ones = g.successors(v, Symbol(1));
            for &t in g.successors(v, Symbol(0)) {
                let bit = if ones.binary_search(&t).is_ok() { 1u64 << i } else { 0 };
                next.insert((t, mask | bit));
            }
        }
        if next.len() > limit {
            return Err(Error::Resource(format!("path masks exceed {limit} states")));
        }
        layer = next;
    }
    let full: Vec<u64> = layer.into_iter().map(|(_, m)| m).collect();
    let mut counts = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let low = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let masks = maximal(full.iter().map(|m| m & low).collect());
        let mut memo = HashMap::new();
        counts.push(BigUint::from(down_union(masks, 0, n, &mut memo)));
    }
    Ok(counts)
}

// Deduplicate and drop masks contained in another one.
fn maximal(mut masks: Vec<u64>) -> Vec<u64> {
    masks.sort_unstable_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
    masks.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for m in masks {
        if !kept.iter().any(|k| m & !k == 0) {
            kept.push(m);
        }
    }
    kept.sort_unstable();
    kept
}

// Number of subsets of positions `[p, n)` lying inside some mask.
fn down_union(masks: Vec<u64>, mut p: usize, n: usize, memo: &mut HashMap<(usize, Vec<u64>), u128>) -> u128 {
    match masks.len() {
        0 => return 0,
        1 => return 1u128 << (masks[0] >> p).count_ones(),
        _ => {}
    }
    let any = masks.iter().fold(0u64, |a, m| a | m);
    while p < n && any & (1u64 << p) == 0 {
        p += 1;
    }
    if p >= n {
        return 1;
    }
    let key = (p, masks);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let bit = 1u64 << p;
    let without = maximal(key.1.iter().map(|m| m & !bit).collect());
    let with = maximal(key.1.iter().filter(|m| *m & bit != 0).map(|m| m & !bit).collect());
    let c = down_union(without, p + 1, n, memo) + down_union(with, p + 1, n, memo);
    memo.insert(key, c);
    c
}

fn subset_counts(g: &LabelledGraph, nmax: usize) -> Result<Vec<BigUint>> {
    let limit = super::max_states();
    let mut layer: HashMap<BitSet, BigUint> = HashMap::new();
    if !g.is_empty() {
        layer.insert(g.all_vertices(), BigUint::from(1u32));
    }
    let mut counts = Vec::with_capacity(nmax);
    for _ in 0..nmax {
        let mut next: HashMap<BitSet, BigUint> = HashMap::new();
        for (set, c) in &layer {
            for a in g.alphabet().symbols() {
                let s = g.step(set, a);
                if !s.is_empty() {
                    *next.entry(s).or_insert_with(BigUint::zero) += c;
                }
            }
        }
        if next.len() > limit {
            return Err(Error::Resource(format!("subset construction exceeds {limit} states")));
        }
        counts.push(next.values().sum());
        layer = next;
    }
    Ok(counts)
}

impl Language for LabelledGraph {
    fn alphabet(&self) -> &Alphabet {
        LabelledGraph::alphabet(self)
    }
    fn admits(&self, word: &[Symbol]) -> bool {
        self.accepts(word)
    }
    fn block_counts(&self, nmax: usize) -> Result<Vec<BigUint>> {
        determinized_counts(self, nmax)
    }
}

impl Language for SoficShift {
    fn alphabet(&self) -> &Alphabet {
        self.graph.alphabet()
    }
    fn admits(&self, word: &[Symbol]) -> bool {
        self.graph.accepts(word)
    }
    fn block_counts(&self, nmax: usize) -> Result<Vec<BigUint>> {
        determinized_counts(&self.graph, nmax)
    }
}

impl Language for Sft {
    fn alphabet(&self) -> &Alphabet {
        Sft::alphabet(self)
    }
    fn admits(&self, word: &[Symbol]) -> bool {
        self.member(word) && self.presentation().map(|g| g.accepts(word)).unwrap_or(false)
    }
    fn block_counts(&self, nmax: usize) -> Result<Vec<BigUint>> {
        // the context presentation is deterministic from each vertex, but
        // the same word can start at several contexts, so still determinize
        determinized_counts(&self.presentation()?, nmax)
    }
    fn words(&self, n: usize) -> Result<Vec<Vec<Symbol>>> {
        self.presentation()?.words(n)
    }
}

impl Language for Shift {
    fn alphabet(&self) -> &Alphabet {
        match self {
            Shift::Sft(s) => s.alphabet(),
            Shift::Sofic(s) => Language::alphabet(s),
        }
    }
    fn admits(&self, word: &[Symbol]) -> bool {
        match self {
            Shift::Sft(s) => s.admits(word),
            Shift::Sofic(s) => s.admits(word),
        }
    }
    fn block_counts(&self, nmax: usize) -> Result<Vec<BigUint>> {
        match self {
            Shift::Sft(s) => s.block_counts(nmax),
            Shift::Sofic(s) => s.block_counts(nmax),
        }
    }
    fn words(&self, n: usize) -> Result<Vec<Vec<Symbol>>> {
        match self {
            Shift::Sft(s) => s.words(n),
            Shift::Sofic(s) => s.words(n),
        }
    }
}

/// `language(space, n)`.
pub fn language(space: &dyn Language, n: usize) -> Result<Vec<Vec<Symbol>>> {
    if n == 0 {
        return Err(Error::Parameter("block length must be >= 1".into()));
    }
    space.words(n)
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::graph::Edge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hereditary(rng: &mut ChaCha8Rng) -> LabelledGraph {
        let n = rng.gen_range(1..7);
        let mut edges = Vec::new();
        for from in 0..n {
            for _ in 0..rng.gen_range(1..4) {
                let to = rng.gen_range(0..n);
                edges.push(Edge { from, to, label: Symbol(0) });
                if rng.gen_bool(0.5) {
                    edges.push(Edge { from, to, label: Symbol(1) });
                }
            }
        }
        LabelledGraph::trimmed(Alphabet::binary(), (0..n).map(|i| format!("v{i}")).collect(), edges).unwrap()
    }

    #[test]
    fn hereditary_counts_match_subset_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let g = random_hereditary(&mut rng);
            assert!(is_hereditary(&g));
            assert_eq!(hereditary_counts(&g, 12).unwrap(), subset_counts(&g, 12).unwrap());
        }
    }

    #[test]
    fn golden_mean_context_graph_is_not_hereditary() {
        assert!(!is_hereditary(&Sft::golden_mean().presentation().unwrap()));
    }
}
