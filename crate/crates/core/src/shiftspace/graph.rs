use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{param, Error, Result};
use crate::seqcore::{Alphabet, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Symbol,
}

/// A finite graph with symbol-labelled edges. With one-sided semantics
/// every vertex must have an outgoing edge; incoming edges are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledGraph {
    alphabet: Alphabet,
    names: Vec<String>,
    edges: Vec<Edge>,
    // out[v][a] = targets of edges leaving v labelled a
    out: Vec<Vec<Vec<usize>>>,
}

impl LabelledGraph {
    pub fn new(alphabet: Alphabet, names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let g = Self::build(alphabet, names, edges)?;
        if let Some(v) = (0..g.vertex_count()).find(|&v| g.out[v].iter().all(Vec::is_empty)) {
            return param(format!("vertex {} has no outgoing edge", g.names[v]));
        }
        Ok(g)
    }

    fn build(alphabet: Alphabet, names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let n = names.len();
        let mut out = vec![vec![Vec::new(); alphabet.len()]; n];
        for e in &edges {
            if e.from >= n || e.to >= n {
                return param(format!("edge {e:?} references a missing vertex"));
            }
            if !alphabet.contains(e.label) {
                return Err(Error::AlphabetMismatch(format!("edge label {} not in {alphabet}", e.label.0)));
            }
            out[e.from][e.label.index()].push(e.to);
        }
        for per_vertex in &mut out {
            for targets in per_vertex.iter_mut() {
                targets.sort_unstable();
                targets.dedup();
            }
        }
        Ok(LabelledGraph { alphabet, names, edges, out })
    }

    /// Build and then drop every vertex without an infinite forward path.
    /// The result may be empty.
    pub fn trimmed(alphabet: Alphabet, names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let g = Self::build(alphabet, names, edges)?;
        Ok(g.trim())
    }

    fn trim(self) -> Self {
        let n = self.vertex_count();
        let mut alive = vec![true; n];
        let mut outdeg: Vec<usize> = self.out.iter().map(|o| o.iter().map(Vec::len).sum()).collect();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for per_vertex in self.out.iter().enumerate() {
            for targets in per_vertex.1 {
                for &t in targets {
                    preds[t].push(per_vertex.0);
                }
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| outdeg[v] == 0).collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &p in &preds[v] {
                if alive[p] {
                    outdeg[p] -= 1;
                    if outdeg[p] == 0 {
                        stack.push(p);
                    }
                }
            }
        }
        if alive.iter().all(|a| *a) {
            return self;
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        for v in 0..n {
            if alive[v] {
                remap[v] = names.len();
                names.push(self.names[v].clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| Edge { from: remap[e.from], to: remap[e.to], label: e.label })
            .collect();
        Self::build(self.alphabet, names, edges).expect("trimmed graph is consistent")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn successors(&self, v: usize, a: Symbol) -> &[usize] {
        &self.out[v][a.index()]
    }

    pub fn all_vertices(&self) -> BitSet {
        BitSet::full(self.vertex_count())
    }

    /// Vertices reachable from `set` by one edge labelled `a`.
    pub fn step(&self, set: &BitSet, a: Symbol) -> BitSet {
        let mut next = BitSet::new(self.vertex_count());
        for v in set.ones() {
            for &t in &self.out[v][a.index()] {
                next.insert(t);
            }
        }
        next
    }

    /// Is `word` the label of a path (starting anywhere) whose end vertex
    /// has an outgoing edge? That is membership of `[word]` in the
    /// language of the presented one-sided shift.
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        if word.iter().any(|s| !self.alphabet.contains(*s)) {
            return false;
        }
        let mut set = self.all_vertices();
        for &a in word {
            set = self.step(&set, a);
            if set.is_empty() {
                return false;
            }
        }
        // every vertex has an outgoing edge, so nonempty means extendable
        !set.is_empty() || (word.is_empty() && !self.is_empty())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            alphabet: Some(self.alphabet.glyphs().iter().map(|c| c.to_string()).collect()),
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: self.names[e.from].clone(),
                    to: self.names[e.to].clone(),
                    label: self.alphabet.glyph(e.label).to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &GraphJson) -> Result<Self> {
        let glyphs: Vec<char> = match &doc.alphabet {
            Some(a) => a.iter().map(|s| single_char(s)).collect::<Result<_>>()?,
            None => {
                let mut g: Vec<char> = Vec::new();
                for e in &doc.edges {
                    let c = single_char(&e.label)?;
                    if !g.contains(&c) {
                        g.push(c);
                    }
                }
                g.sort_unstable();
                g
            }
        };
        let alphabet = Alphabet::new(glyphs)?;
        let index: HashMap<&str, usize> = doc.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        if index.len() != doc.vertices.len() {
            return param("duplicate vertex names");
        }
        let lookup = |name: &str| {
            index.get(name).copied().ok_or_else(|| Error::Parse(format!("unknown vertex {name:?}")))
        };
        let edges = doc
            .edges
            .iter()
            .map(|e| {
                Ok(Edge { from: lookup(&e.from)?, to: lookup(&e.to)?, label: alphabet.symbol(single_char(&e.label)?)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, doc.vertices.clone(), edges)
    }
}

fn single_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse(format!("expected a single glyph, got {s:?}"))),
    }
}

/// Serialized labelled graph: `{vertices, edges: [{from, to, label}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    pub label: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_a() -> LabelledGraph {
        let a = Alphabet::new(['a']).unwrap();
        LabelledGraph::new(a, vec!["v".into()], vec![Edge { from: 0, to: 0, label: Symbol(0) }]).unwrap()
    }

    #[test]
    fn self_loop_accepts_powers() {
        let g = loop_a();
        assert!(g.accepts(&[Symbol(0); 3]));
    }

    #[test]
    fn rejects_sink_vertex() {
        let a = Alphabet::binary();
        let edges = vec![Edge { from: 0, to: 1, label: Symbol(0) }];
        assert!(LabelledGraph::new(a.clone(), vec!["x".into(), "y".into()], edges.clone()).is_err());
        let t = LabelledGraph::trimmed(a, vec!["x".into(), "y".into()], edges).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let g = loop_a();
        let doc = g.to_json();
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(text, r#"{"alphabet":["a"],"vertices":["v"],"edges":[{"from":"v","to":"v","label":"a"}]}"#);
        assert_eq!(LabelledGraph::from_json(&serde_json::from_str(&text).unwrap()).unwrap(), g);
    }
}
