use rand::Rng;

use crate::bits::BitSet;
use crate::error::{param, Result};
use crate::seqcore::{Alphabet, Symbol, SymbolicSequence};
use crate::shiftspace::{Edge, LabelledGraph};

/// `0` in both `{0,⋄}` and `{0,1}`.
pub const ZERO: Symbol = Symbol(0);
/// `⋄` in `{0,⋄}`.
pub const DIAMOND: Symbol = Symbol(1);
/// `1` in `{0,1}`.
pub const ONE: Symbol = Symbol(1);

/// Block parameters `1 < s < t`: zero runs of length `s` separated by
/// `⋄`-runs of length `t-s` or `t-s+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GstParams {
    s: usize,
    t: usize,
}

impl GstParams {
    pub fn new(s: usize, t: usize) -> Result<Self> {
        if !(1 < s && s < t) {
            return param(format!("need 1 < s < t, got s={s}, t={t}"));
        }
        Ok(GstParams { s, t })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Vertex index of `v_j` (`0 <= j <= t-s`).
    pub fn v(&self, j: usize) -> usize {
        j
    }

    /// Vertex index of `w_j` (`0 <= j < s`).
    pub fn w(&self, j: usize) -> usize {
        self.t - self.s + 1 + j
    }

    fn edge_list(&self) -> Vec<(usize, usize, bool)> {
        // (from, to, labelled ⋄)
        let (s, t) = (self.s, self.t);
        let mut edges = Vec::with_capacity(t + 2);
        for i in 1..=t - s {
            edges.push((self.v(i - 1), self.v(i), true));
        }
        for i in 1..s {
            edges.push((self.w(i - 1), self.w(i), false));
        }
        edges.push((self.v(t - s), self.w(0), true));
        edges.push((self.v(t - s), self.w(1), false));
        edges.push((self.w(s - 1), self.v(0), false));
        edges
    }

    fn names(&self) -> Vec<String> {
        (0..=self.t - self.s).map(|j| format!("v{j}")).chain((0..self.s).map(|j| format!("w{j}"))).collect()
    }
}

/// The labelled graph over `{0,⋄}` presenting `X_(s,t)`.
pub fn build_gst(p: GstParams) -> LabelledGraph {
    let edges = p
        .edge_list()
        .into_iter()
        .map(|(from, to, d)| Edge { from, to, label: if d { DIAMOND } else { ZERO } })
        .collect();
    LabelledGraph::new(Alphabet::zero_diamond(), p.names(), edges).expect("every vertex has an outgoing edge")
}

/// The same graph over `{0,1}` presenting `F^(s,t)`: a `⋄` edge may carry
/// either `0` or `1`, a `0` edge only `0`.
pub fn build_f_graph(p: GstParams) -> LabelledGraph {
    let mut edges = Vec::new();
    for (from, to, d) in p.edge_list() {
        edges.push(Edge { from, to, label: ZERO });
        if d {
            edges.push(Edge { from, to, label: ONE });
        }
    }
    LabelledGraph::new(Alphabet::binary(), p.names(), edges).expect("every vertex has an outgoing edge")
}

/// `(⋄^{t-s} 0^s)^∞`.
pub fn periodic_p(p: GstParams) -> SymbolicSequence {
    let mut period = vec![DIAMOND; p.t - p.s];
    period.extend(std::iter::repeat_n(ZERO, p.s));
    SymbolicSequence::periodic(Alphabet::zero_diamond(), Vec::new(), period).expect("valid period")
}

/// Is position `i` a zero of `p^(s,t)`?
pub fn p_is_zero(s: u128, t: u128, i: u128) -> bool {
    i % t >= t - s
}

/// `x ∈ P^(s,t)` on `[0, horizon)`: `x` vanishes wherever `p^(s,t)` does.
pub fn in_p(p: GstParams, x: &SymbolicSequence, horizon: usize) -> Result<bool> {
    let word = x.prefix(horizon)?;
    Ok(word.iter().enumerate().all(|(i, &sym)| sym == ZERO || !p_is_zero(p.s as u128, p.t as u128, i as u128)))
}

/// Vertex-set dynamic programming on the graph, using that every edge
/// except the two wrap-around ones moves a vertex index up by one.
#[derive(Debug, Clone)]
pub struct GstAutomaton {
    p: GstParams,
    diamond_sources: BitSet,
}

impl GstAutomaton {
    pub fn new(p: GstParams) -> Self {
        let mut diamond_sources = BitSet::new(p.t + 1);
        for j in 0..=p.t - p.s {
            diamond_sources.insert(j);
        }
        GstAutomaton { p, diamond_sources }
    }

    pub fn start(&self) -> BitSet {
        BitSet::full(self.p.t + 1)
    }

    /// One step reading `x_i`: `1` forces a `⋄` edge, `0` allows any edge.
    pub fn step(&self, set: &BitSet, x_is_one: bool) -> BitSet {
        if x_is_one {
            let mut d = set.clone();
            d.intersect_with(&self.diamond_sources);
            return d.shifted_up();
        }
        let mut next = set.shifted_up();
        if set.contains(self.p.t) {
            next.insert(0);
        }
        if set.contains(self.p.t - self.p.s) {
            next.insert(self.p.w(1));
        }
        next
    }

    /// Is there a label path `y` of length `word.len()` with
    /// `y_i = 0 ⟹ word_i = 0`?
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.first_failure(word).is_none()
    }

    /// Index at which the reachable vertex set becomes empty.
    pub fn first_failure(&self, word: &[Symbol]) -> Option<usize> {
        let mut set = self.start();
        for (i, &sym) in word.iter().enumerate() {
            set = self.step(&set, sym != ZERO);
            if set.is_empty() {
                return Some(i);
            }
        }
        None
    }
}

/// `x ∈ F^(s,t)` at horizon: some finite witness path exists.
pub fn in_f_horizon(p: GstParams, x: &SymbolicSequence, horizon: usize) -> Result<bool> {
    if horizon == 0 {
        return param("horizon must be >= 1");
    }
    let word = x.prefix(horizon)?;
    Ok(GstAutomaton::new(p).accepts(&word))
}

/// A uniformly random walk on the graph of length `len`, as a `{0,⋄}` word.
pub fn random_path<R: Rng + ?Sized>(p: GstParams, len: usize, rng: &mut R) -> Vec<Symbol> {
    let mut v = rng.gen_range(0..=p.t);
    let mut out = Vec::with_capacity(len);
    let split = p.t - p.s;
    for _ in 0..len {
        if v < split {
            out.push(DIAMOND);
            v += 1;
        } else if v == split {
            if rng.gen_bool(0.5) {
                out.push(DIAMOND);
                v = p.w(0);
            } else {
                out.push(ZERO);
                v = p.w(1);
            }
        } else {
            out.push(ZERO);
            v = if v == p.t { 0 } else { v + 1 };
        }
    }
    out
}
