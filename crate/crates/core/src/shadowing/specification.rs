use std::collections::HashSet;
use std::sync::Arc;

use num::{One, Signed};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::rational::Q;
use crate::seqcore::{EventuallyPeriodic, Point, Space, Symbol};
use crate::shiftspace::{finite_type_approximation, LabelledGraph, Sft, SoficShift};

/// Orbit segment `T^{[a, b]}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub a: usize,
    pub b: usize,
    pub point: Point,
}

/// Ordered orbit segments with a spacing function `M`.
#[derive(Clone)]
pub struct Specification {
    segments: Vec<Segment>,
    spacing: Arc<dyn Fn(usize) -> usize + Send + Sync>,
}

impl std::fmt::Debug for Specification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Specification").field("segments", &self.segments).finish_non_exhaustive()
    }
}

impl Specification {
    pub fn new(segments: Vec<Segment>, spacing: impl Fn(usize) -> usize + Send + Sync + 'static) -> Result<Self> {
        if segments.is_empty() {
            return param("a specification needs at least one segment");
        }
        for (i, s) in segments.iter().enumerate() {
            if s.a > s.b {
                return param(format!("segment {i} has a > b"));
            }
            if i > 0 && s.a <= segments[i - 1].b {
                return param(format!("segment {i} starts before segment {} ends", i - 1));
            }
        }
        Ok(Specification { segments, spacing: Arc::new(spacing) })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn spacing(&self, n: usize) -> usize {
        (self.spacing)(n)
    }
}

/// `a_i − b_{i−1} >= M(b_i − a_i + 1)` for every consecutive pair.
pub fn check_spaced_specification(spec: &Specification) -> bool {
    spec.segments.windows(2).all(|w| w[1].a - w[0].b >= spec.spacing(w[1].b - w[1].a + 1))
}

pub const SOFIC_WARNING: &str =
    "traced in a finite-type approximation X_m, which contains X; a witness in X_m need not lie in X";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceWitness {
    /// The constrained cylinder `y_0 .. y_{L-1}`.
    pub word: String,
    /// An admissible point in that cylinder.
    pub point: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    pub witness: Option<TraceWitness>,
    pub span: usize,
    pub precision: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<&'static str>,
}

/// Least `w` with `2^{-w} <= ε`.
fn precision_window(eps: &Q) -> usize {
    let mut w = 0;
    let mut p = Q::one();
    while p > *eps {
        p /= Q::from_integer(2.into());
        w += 1;
    }
    w
}

/// Exhaustive search for `y` in the SFT with
/// `ρ(σ^k y, σ^k x_i) <= ε` for all `a_i <= k <= b_i`.
///
/// Under `2^{-first difference}` this pins `y_j = (x_i)_j` on
/// `[a_i, b_i + w)`, `w = ⌈log2(1/ε)⌉`, and the search walks the SFT
/// presentation over words of that length.
pub fn brute_force_tracer(space: &Sft, spec: &Specification, eps: &Q, max_depth: usize) -> Result<TraceResult> {
    if !eps.is_positive() {
        return param("eps must be positive");
    }
    let w = precision_window(eps);
    let mut seqs = Vec::with_capacity(spec.segments.len());
    for s in &spec.segments {
        match &s.point {
            Point::Seq(ep) => {
                if ep.prefix().iter().chain(ep.period()).any(|c| (c.0 as usize) >= space.alphabet().len()) {
                    return Err(Error::AlphabetMismatch("segment point uses symbols outside the shift's alphabet".into()));
                }
                seqs.push(ep);
            }
            _ => return Err(Error::SpaceMismatch("tracing needs shift-space points".into())),
        }
    }
    let span = if w == 0 { 0 } else { spec.segments.iter().map(|s| s.b + w).max().unwrap_or(0) };
    if span > max_depth {
        return Err(Error::Resource(format!("trace span {span} exceeds max_depth {max_depth}")));
    }
    let mut required: Vec<Option<Symbol>> = vec![None; span];
    if w > 0 {
        for (s, x) in spec.segments.iter().zip(&seqs) {
            for (j, slot) in required.iter_mut().enumerate().take(s.b + w).skip(s.a) {
                let c = x.at(j);
                match slot {
                    Some(prev) if *prev != c => {
                        return Ok(TraceResult { witness: None, span, precision: w, warning: None });
                    }
                    _ => *slot = Some(c),
                }
            }
        }
    }
    let g = space.presentation()?;
    let Some(start) = g.vertex("[]") else {
        return Ok(TraceResult { witness: None, span, precision: w, warning: None });
    };
    let mut dead: HashSet<(usize, usize)> = HashSet::new();
    let mut word = Vec::with_capacity(span);
    let found = search(&g, &required, start, &mut word, &mut dead);
    let Some(end) = found else {
        return Ok(TraceResult { witness: None, span, precision: w, warning: None });
    };
    let (tail, cycle) = extend_to_cycle(&g, end);
    let mut prefix = word.clone();
    prefix.extend(tail);
    let y = EventuallyPeriodic::new(prefix, cycle)?;

    // Post-verification against the literal tracing condition.
    let shift_space = Space::Shift(space.alphabet().clone());
    for (s, x) in spec.segments.iter().zip(&seqs) {
        for k in s.a..=s.b {
            let d = shift_space.distance(&Point::Seq(y.shifted(k)), &Point::Seq(x.shifted(k)));
            if d > *eps {
                return Err(Error::Invariant(format!("witness misses segment at time {k} by {d}")));
            }
        }
    }
    if !space.member(&word) {
        return Err(Error::Invariant("witness word is not admissible".into()));
    }
    let a = space.alphabet();
    Ok(TraceResult {
        witness: Some(TraceWitness { word: a.render(&word), point: y.render(a) }),
        span,
        precision: w,
        warning: None,
    })
}

fn search(
    g: &LabelledGraph,
    required: &[Option<Symbol>],
    v: usize,
    word: &mut Vec<Symbol>,
    dead: &mut HashSet<(usize, usize)>,
) -> Option<usize> {
    let pos = word.len();
    if pos == required.len() {
        return Some(v);
    }
    if dead.contains(&(pos, v)) {
        return None;
    }
    let choices: Vec<Symbol> = match required[pos] {
        Some(c) => vec![c],
        None => g.alphabet().symbols().collect(),
    };
    for c in choices {
        for &next in g.successors(v, c) {
            word.push(c);
            if let Some(end) = search(g, required, next, word, dead) {
                return Some(end);
            }
            word.pop();
        }
    }
    dead.insert((pos, v));
    None
}

/// Follows outgoing edges from `v` until a vertex repeats; returns the
/// labels before the cycle and the cycle labels.
fn extend_to_cycle(g: &LabelledGraph, mut v: usize) -> (Vec<Symbol>, Vec<Symbol>) {
    let mut seen: Vec<usize> = Vec::new();
    let mut labels = Vec::new();
    loop {
        if let Some(i) = seen.iter().position(|u| *u == v) {
            let cycle = labels.split_off(i);
            return (labels, cycle);
        }
        seen.push(v);
        let (c, next) = g
            .alphabet()
            .symbols()
            .find_map(|c| g.successors(v, c).first().map(|n| (c, *n)))
            .expect("trimmed graphs have an outgoing edge at every vertex");
        labels.push(c);
        v = next;
    }
}

/// Traces in the order-`m` finite-type approximation of a sofic shift.
pub fn brute_force_tracer_sofic(
    space: &SoficShift,
    m: usize,
    spec: &Specification,
    eps: &Q,
    max_depth: usize,
) -> Result<TraceResult> {
    let sft = finite_type_approximation(space, m)?;
    let mut r = brute_force_tracer(&sft, spec, eps, max_depth)?;
    r.warning = Some(SOFIC_WARNING);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::seqcore::Alphabet;

    fn seq(s: &str) -> Point {
        Point::Seq(EventuallyPeriodic::parse(&Alphabet::binary(), s).unwrap())
    }

    fn seg(a: usize, b: usize, s: &str) -> Segment {
        Segment { a, b, point: seq(s) }
    }

    #[test]
    fn spacing_examples() {
        let one = Specification::new(vec![seg(0, 4, "|0")], |n| n).unwrap();
        assert!(check_spaced_specification(&one));
        let ok = Specification::new(vec![seg(0, 4, "|0"), seg(9, 13, "|1")], |n| n).unwrap();
        assert!(check_spaced_specification(&ok));
        let close = Specification::new(vec![seg(0, 4, "|0"), seg(8, 12, "|1")], |n| n).unwrap();
        assert!(!check_spaced_specification(&close));
        assert!(Specification::new(vec![seg(0, 4, "|0"), seg(4, 6, "|1")], |n| n).is_err());
    }

    #[test]
    fn actual_orbit_traces_itself() {
        let sft = Sft::golden_mean();
        let spec = Specification::new(vec![seg(0, 10, "|01")], |_| 0).unwrap();
        let r = brute_force_tracer(&sft, &spec, &q(1, 64), 100).unwrap();
        assert!(r.witness.unwrap().word.starts_with("0101010101"));
    }

    #[test]
    fn golden_mean_glues_segments() {
        let sft = Sft::golden_mean();
        let spec = Specification::new(vec![seg(0, 3, "|10"), seg(6, 9, "|01")], |_| 2).unwrap();
        // Precision 2 pins [0, 5) and [6, 11), leaving y_5 free for gluing.
        let r = brute_force_tracer(&sft, &spec, &q(1, 4), 100).unwrap();
        assert_eq!(r.witness.unwrap().word, "10101001010");
        // At precision 12 the pinned windows overlap and disagree.
        assert!(brute_force_tracer(&sft, &spec, &q(1, 1 << 12), 100).unwrap().witness.is_none());
    }

    #[test]
    fn contradictory_demands() {
        let sft = Sft::full(Alphabet::binary());
        let spec = Specification::new(vec![seg(0, 2, "|0"), seg(3, 5, "|1")], |_| 0).unwrap();
        // Precision 4 makes the first segment pin y_3 = 0 while the second
        // pins y_3 = 1.
        assert!(brute_force_tracer(&sft, &spec, &q(1, 16), 100).unwrap().witness.is_none());
        assert!(brute_force_tracer(&sft, &spec, &Q::one(), 100).unwrap().witness.is_some());
        assert!(brute_force_tracer(&sft, &spec, &q(1, 16), 5).is_err());
    }

    #[test]
    fn forbidden_pattern_blocks_trace() {
        let sft = Sft::golden_mean();
        let spec = Specification::new(vec![seg(0, 0, "1|0"), seg(1, 1, "01|0")], |_| 0).unwrap();
        // Needs y_0 y_1 = 11, which the golden mean shift forbids.
        assert!(brute_force_tracer(&sft, &spec, &q(1, 2), 100).unwrap().witness.is_none());
    }
}
