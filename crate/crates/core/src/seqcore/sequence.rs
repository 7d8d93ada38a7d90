use std::fmt;
use std::sync::{Arc, Mutex};

use super::alphabet::{Alphabet, Symbol};
use crate::error::{param, Error, Result};

/// Canonical eventually periodic word `prefix · period^∞`: the period is
/// primitive and the prefix is as short as possible, so structural
/// equality is sequence equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventuallyPeriodic {
    prefix: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl EventuallyPeriodic {
    pub fn new(mut prefix: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return param("period word must be nonempty");
        }
        let p = period.len();
        let d = (1..=p)
            .find(|d| p.is_multiple_of(*d) && (0..p).all(|i| period[i] == period[i % d]))
            .unwrap_or(p);
        let mut period: Vec<Symbol> = period[..d].to_vec();
        while let Some(&last) = prefix.last() {
            if last != *period.last().expect("nonempty") {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(EventuallyPeriodic { prefix, period })
    }

    pub fn constant(s: Symbol) -> Self {
        EventuallyPeriodic { prefix: Vec::new(), period: vec![s] }
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    pub fn at(&self, i: usize) -> Symbol {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn shifted(&self, k: usize) -> Self {
        if k <= self.prefix.len() {
            return EventuallyPeriodic { prefix: self.prefix[k..].to_vec(), period: self.period.clone() };
        }
        let mut period = self.period.clone();
        let r = (k - self.prefix.len()) % period.len();
        period.rotate_left(r);
        EventuallyPeriodic { prefix: Vec::new(), period }
    }

    /// First index where the two sequences differ, or `None` if equal.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        if self == other {
            return None;
        }
        let pa = self.period.len();
        let pb = other.period.len();
        let bound = self.prefix.len().max(other.prefix.len()) + pa / num::integer::gcd(pa, pb) * pb;
        (0..bound).find(|&i| self.at(i) != other.at(i))
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        format!("{}|{}", alphabet.render(&self.prefix), alphabet.render(&self.period))
    }

    pub fn parse(alphabet: &Alphabet, s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("expected prefix|period, got {s:?}")))?;
        Self::new(alphabet.parse_word(pre)?, alphabet.parse_word(per)?)
    }
}

type Pull = Box<dyn FnMut() -> Symbol + Send>;

struct Generator {
    state: Mutex<(Vec<Symbol>, Pull)>,
}

impl Generator {
    fn get(&self, i: usize) -> Symbol {
        let mut guard = self.state.lock().expect("generator lock poisoned");
        let (memo, pull) = &mut *guard;
        while memo.len() <= i {
            let s = pull();
            memo.push(s);
        }
        memo[i]
    }

    fn range(&self, start: usize, end: usize) -> Vec<Symbol> {
        if end > start {
            self.get(end - 1);
        }
        let guard = self.state.lock().expect("generator lock poisoned");
        guard.0[start..end].to_vec()
    }
}

#[derive(Clone)]
enum Repr {
    Finite(Arc<[Symbol]>),
    Periodic(Arc<EventuallyPeriodic>),
    Generated(Arc<Generator>),
}

/// A one-sided sequence over a finite alphabet: a finite word, an
/// eventually periodic word, or a memoized pull-based generator.
#[derive(Clone)]
pub struct SymbolicSequence {
    alphabet: Alphabet,
    repr: Repr,
    offset: usize,
}

impl SymbolicSequence {
    pub fn finite(alphabet: Alphabet, word: Vec<Symbol>) -> Result<Self> {
        check_word(&alphabet, &word)?;
        Ok(SymbolicSequence { alphabet, repr: Repr::Finite(word.into()), offset: 0 })
    }

    pub fn periodic(alphabet: Alphabet, prefix: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        check_word(&alphabet, &prefix)?;
        check_word(&alphabet, &period)?;
        let ep = EventuallyPeriodic::new(prefix, period)?;
        Ok(SymbolicSequence { alphabet, repr: Repr::Periodic(Arc::new(ep)), offset: 0 })
    }

    pub fn from_eventually_periodic(alphabet: Alphabet, ep: EventuallyPeriodic) -> Result<Self> {
        check_word(&alphabet, ep.prefix())?;
        check_word(&alphabet, ep.period())?;
        Ok(SymbolicSequence { alphabet, repr: Repr::Periodic(Arc::new(ep)), offset: 0 })
    }

    /// Generator-backed sequence; `pull` is called once per new index, in
    /// order, and every produced symbol is memoized forever.
    pub fn from_pull(alphabet: Alphabet, pull: impl FnMut() -> Symbol + Send + 'static) -> Self {
        let n = alphabet.len();
        let mut pull = pull;
        let checked = move || {
            let s = pull();
            assert!(s.index() < n, "generator produced symbol outside the alphabet");
            s
        };
        let generator = Generator { state: Mutex::new((Vec::new(), Box::new(checked))) };
        SymbolicSequence { alphabet, repr: Repr::Generated(Arc::new(generator)), offset: 0 }
    }

    /// Generator-backed sequence defined positionally.
    pub fn from_index_fn(alphabet: Alphabet, f: impl Fn(usize) -> Symbol + Send + 'static) -> Self {
        let mut i = 0usize;
        Self::from_pull(alphabet, move || {
            let s = f(i);
            i += 1;
            s
        })
    }

    /// Parse `prefix|period` (eventually periodic) or a plain finite word.
    pub fn parse(alphabet: &Alphabet, s: &str) -> Result<Self> {
        if s.contains('|') {
            let ep = EventuallyPeriodic::parse(alphabet, s)?;
            Self::from_eventually_periodic(alphabet.clone(), ep)
        } else {
            Self::finite(alphabet.clone(), alphabet.parse_word(s)?)
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `Some(len)` for finite sequences, `None` for infinite ones.
    pub fn horizon(&self) -> Option<usize> {
        match &self.repr {
            Repr::Finite(w) => Some(w.len() - self.offset),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.horizon().is_some()
    }

    pub fn get(&self, i: usize) -> Option<Symbol> {
        let j = i.checked_add(self.offset)?;
        match &self.repr {
            Repr::Finite(w) => w.get(j).copied(),
            Repr::Periodic(ep) => Some(ep.at(j)),
            Repr::Generated(g) => Some(g.get(j)),
        }
    }

    /// Symbol at `i`; panics past the end of a finite word.
    pub fn at(&self, i: usize) -> Symbol {
        self.get(i).unwrap_or_else(|| panic!("index {i} past horizon {:?}", self.horizon()))
    }

    /// The first `n` symbols.
    pub fn prefix(&self, n: usize) -> Result<Vec<Symbol>> {
        if let Some(h) = self.horizon() {
            if n > h {
                return Err(Error::OutOfRange { index: n, horizon: h });
            }
        }
        Ok(match &self.repr {
            Repr::Finite(w) => w[self.offset..self.offset + n].to_vec(),
            Repr::Periodic(ep) => (0..n).map(|i| ep.at(i + self.offset)).collect(),
            Repr::Generated(g) => g.range(self.offset, self.offset + n),
        })
    }

    pub fn shift(&self, k: usize) -> Result<Self> {
        if let Some(h) = self.horizon() {
            if k >= h {
                return Err(Error::EmptySequence(format!("shift by {k} of a word of length {h}")));
            }
        }
        let mut out = self.clone();
        match &self.repr {
            Repr::Periodic(ep) => {
                out.repr = Repr::Periodic(Arc::new(ep.shifted(self.offset + k)));
                out.offset = 0;
            }
            _ => out.offset += k,
        }
        Ok(out)
    }

    /// Canonical eventually periodic form, when the sequence has one.
    pub fn as_eventually_periodic(&self) -> Option<EventuallyPeriodic> {
        match &self.repr {
            Repr::Periodic(ep) => Some(ep.shifted(self.offset)),
            _ => None,
        }
    }

    /// String form: `prefix|period`, or the plain word for finite
    /// sequences. Generated sequences have no finite description.
    pub fn render(&self) -> Option<String> {
        match &self.repr {
            Repr::Finite(w) => Some(self.alphabet.render(&w[self.offset..])),
            Repr::Periodic(ep) => Some(ep.shifted(self.offset).render(&self.alphabet)),
            Repr::Generated(_) => None,
        }
    }

    /// Whichever horizon is usable: the sequence's own, clipped to `limit`.
    pub fn effective_horizon(&self, limit: usize) -> usize {
        self.horizon().map_or(limit, |h| h.min(limit))
    }
}

impl fmt::Debug for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.render() {
            Some(s) => write!(f, "SymbolicSequence({s})"),
            None => write!(f, "SymbolicSequence(<generator>+{})", self.offset),
        }
    }
}

fn check_word(alphabet: &Alphabet, w: &[Symbol]) -> Result<()> {
    match w.iter().find(|s| !alphabet.contains(**s)) {
        Some(s) => Err(Error::AlphabetMismatch(format!("symbol index {} not in {alphabet}", s.0))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Alphabet {
        Alphabet::new(['a', 'b', 'c']).unwrap()
    }

    #[test]
    fn shift_periodic() {
        let a = abc();
        let x = SymbolicSequence::parse(&a, "|abc").unwrap();
        let y = x.shift(1).unwrap();
        assert_eq!(y.render().unwrap(), "|bca");
        assert_eq!(x.shift(0).unwrap().render(), x.render());
    }

    #[test]
    fn shift_finite_past_end_errors() {
        let a = abc();
        let x = SymbolicSequence::parse(&a, "abc").unwrap();
        assert_eq!(x.shift(2).unwrap().render().unwrap(), "c");
        assert!(matches!(x.shift(3), Err(Error::EmptySequence(_))));
    }

    #[test]
    fn canonical_form() {
        let a = Alphabet::zero_diamond();
        let x = SymbolicSequence::parse(&a, "00|dd0000dd0000").unwrap();
        assert_eq!(x.render().unwrap(), "|00dd00");
        let y = SymbolicSequence::parse(&a, "|dd0000").unwrap();
        assert_eq!(y.shift(4).unwrap().render().unwrap(), "|00dd00");
    }

    #[test]
    fn generator_matches_materialized_slice() {
        let a = Alphabet::binary();
        let g = SymbolicSequence::from_index_fn(a.clone(), |i| Symbol(((i * i + 3 * i) % 7 % 2) as u8));
        let all = g.prefix(10_000).unwrap();
        let s = g.shift(1234).unwrap();
        assert_eq!(s.prefix(10_000 - 1234).unwrap(), all[1234..].to_vec());
        assert_eq!(g.at(17), g.at(17));
    }

    #[test]
    fn first_difference_bounded() {
        let a = Alphabet::binary();
        let x = EventuallyPeriodic::parse(&a, "|01").unwrap();
        let y = EventuallyPeriodic::parse(&a, "0101|10").unwrap();
        assert_eq!(x.first_difference(&y), Some(4));
        assert_eq!(x.first_difference(&x.clone()), None);
    }
}
