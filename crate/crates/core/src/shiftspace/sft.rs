use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::graph::{Edge, LabelledGraph};
use crate::error::{param, Error, Result};
use crate::seqcore::{Alphabet, Symbol};

/// A one-sided shift of finite type given by a minimized forbidden set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    alphabet: Alphabet,
    forbidden: Vec<Vec<Symbol>>,
    memory: usize,
}

fn occurs_in(needle: &[Symbol], hay: &[Symbol]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

impl Sft {
    /// Forbidden words are deduplicated and any word containing another
    /// forbidden word is dropped.
    pub fn new(alphabet: Alphabet, forbidden: Vec<Vec<Symbol>>) -> Result<Self> {
        for w in &forbidden {
            if w.is_empty() {
                return param("the empty word cannot be forbidden");
            }
            if let Some(s) = w.iter().find(|s| !alphabet.contains(**s)) {
                return Err(Error::AlphabetMismatch(format!("symbol {} not in {alphabet}", s.0)));
            }
        }
        let mut words = forbidden;
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        words.dedup();
        let mut kept: Vec<Vec<Symbol>> = Vec::new();
        for w in words {
            if !kept.iter().any(|k| occurs_in(k, &w)) {
                kept.push(w);
            }
        }
        kept.sort();
        let memory = kept.iter().map(|w| w.len() - 1).max().unwrap_or(0);
        Ok(Sft { alphabet, forbidden: kept, memory })
    }

    pub fn full(alphabet: Alphabet) -> Self {
        Sft { alphabet, forbidden: Vec::new(), memory: 0 }
    }

    /// Golden-mean shift over `{0,1}`: no two adjacent 1s.
    pub fn golden_mean() -> Self {
        Sft::new(Alphabet::binary(), vec![vec![Symbol(1), Symbol(1)]]).expect("valid")
    }

    pub fn parse(alphabet: Alphabet, forbidden: &[&str]) -> Result<Self> {
        let words = forbidden.iter().map(|w| alphabet.parse_word(w)).collect::<Result<Vec<_>>>()?;
        Sft::new(alphabet, words)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Vec<Symbol>] {
        &self.forbidden
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// True iff no forbidden word occurs in `w`.
    pub fn member(&self, w: &[Symbol]) -> bool {
        w.iter().all(|s| self.alphabet.contains(*s)) && !self.forbidden.iter().any(|f| occurs_in(f, w))
    }

    fn ends_forbidden(&self, w: &[Symbol]) -> bool {
        self.forbidden.iter().any(|f| w.ends_with(f))
    }

    /// Presentation whose vertices are the forbidden-free words of length
    /// at most `max(memory, 1)` (the recent context, starting from the empty
    /// context), trimmed to vertices with an infinite future. Its language
    /// is exactly the language of the one-sided shift.
    pub fn presentation(&self) -> Result<LabelledGraph> {
        let window = self.memory.max(1);
        let states = self.context_words(window)?;
        let index: HashMap<&[Symbol], usize> = states.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
        let mut edges = Vec::new();
        for (i, u) in states.iter().enumerate() {
            for a in self.alphabet.symbols() {
                let mut ua = u.clone();
                ua.push(a);
                if self.ends_forbidden(&ua) {
                    continue;
                }
                let ctx = &ua[ua.len().saturating_sub(window)..];
                if let Some(&j) = index.get(ctx) {
                    edges.push(Edge { from: i, to: j, label: a });
                }
            }
        }
        let names = states.iter().map(|w| format!("[{}]", self.alphabet.render(w))).collect();
        LabelledGraph::trimmed(self.alphabet.clone(), names, edges)
    }

    /// The higher-block graph on forbidden-free words of length
    /// `max(memory, 1)`, trimmed to vertices with an infinite future.
    pub fn block_graph(&self) -> Result<LabelledGraph> {
        let window = self.memory.max(1);
        let states: Vec<Vec<Symbol>> =
            self.context_words(window)?.into_iter().filter(|w| w.len() == window).collect();
        let index: HashMap<&[Symbol], usize> = states.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
        let mut edges = Vec::new();
        for (i, u) in states.iter().enumerate() {
            for a in self.alphabet.symbols() {
                let mut ua = u.clone();
                ua.push(a);
                if self.ends_forbidden(&ua) {
                    continue;
                }
                if let Some(&j) = index.get(&ua[1..]) {
                    edges.push(Edge { from: i, to: j, label: a });
                }
            }
        }
        let names = states.iter().map(|w| self.alphabet.render(w)).collect();
        LabelledGraph::trimmed(self.alphabet.clone(), names, edges)
    }

    fn context_words(&self, window: usize) -> Result<Vec<Vec<Symbol>>> {
        let limit = super::max_states();
        let mut all = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..window {
            let mut next = Vec::new();
            for w in &frontier {
                for a in self.alphabet.symbols() {
                    let mut v: Vec<Symbol> = w.clone();
                    v.push(a);
                    if !self.ends_forbidden(&v) {
                        next.push(v);
                    }
                }
            }
            all.extend(next.iter().cloned());
            if all.len() > limit {
                return Err(Error::Resource(format!("SFT context graph exceeds {limit} states")));
            }
            frontier = next;
        }
        Ok(all)
    }

    pub fn to_json(&self) -> SftJson {
        SftJson {
            alphabet: self.alphabet.glyphs().iter().map(|c| c.to_string()).collect(),
            forbidden: self.forbidden.iter().map(|w| self.alphabet.render(w)).collect(),
        }
    }

    pub fn from_json(doc: &SftJson) -> Result<Self> {
        let glyphs = doc
            .alphabet
            .iter()
            .map(|s| {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(Error::Parse(format!("expected a single glyph, got {s:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let alphabet = Alphabet::new(glyphs)?;
        let words = doc.forbidden.iter().map(|w| alphabet.parse_word(w)).collect::<Result<Vec<_>>>()?;
        Sft::new(alphabet, words)
    }
}

/// Serialized SFT: `{alphabet, forbidden}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftJson {
    pub alphabet: Vec<String>,
    pub forbidden: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_membership() {
        let s = Sft::golden_mean();
        let a = s.alphabet().clone();
        assert!(s.member(&a.parse_word("0101").unwrap()));
        assert!(!s.member(&a.parse_word("0110").unwrap()));
        assert_eq!(s.memory(), 1);
    }

    #[test]
    fn empty_forbidden_accepts_everything() {
        let s = Sft::full(Alphabet::binary());
        assert!(s.member(&Alphabet::binary().parse_word("0110111").unwrap()));
    }

    #[test]
    fn minimization_drops_superwords() {
        let s = Sft::parse(Alphabet::binary(), &["11", "011", "111", "11"]).unwrap();
        assert_eq!(s.forbidden().len(), 1);
        assert_eq!(s.memory(), 1);
    }

    #[test]
    fn json_round_trip() {
        let s = Sft::golden_mean();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(text, r#"{"alphabet":["0","1"],"forbidden":["11"]}"#);
        assert_eq!(Sft::from_json(&serde_json::from_str(&text).unwrap()).unwrap(), s);
    }
}
