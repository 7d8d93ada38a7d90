//! Shifts of finite type and sofic shifts: membership, languages,
//! finite-type approximation, mixing and entropy.

mod graph;
mod language;
mod ops;
mod sft;

pub use graph::{Edge, EdgeJson, GraphJson, LabelledGraph};
pub use language::{language, Language, Shift, SoficShift};
pub use ops::{
    entropy_estimate, finite_type_approximation, intersect, is_mixing_sft, primitivity, EntropyEstimate,
    Intersection, PrimitivityReport,
};
pub use sft::{Sft, SftJson};


use crate::seqcore::Symbol;

/// State cap for automaton constructions; `BESICO_MAX_STATES` overrides it.
pub fn max_states() -> usize {
    std::env::var("BESICO_MAX_STATES").ok().and_then(|v| v.parse().ok()).unwrap_or(4_000_000)
}

pub(crate) fn max_words() -> usize {
    1 << 22
}

/// Labels-of-a-path membership of a cylinder word.
pub fn sofic_member_horizon(g: &LabelledGraph, w: &[Symbol]) -> bool {
    g.accepts(w)
}

pub fn sft_member(s: &Sft, w: &[Symbol]) -> bool {
    s.member(w)
}
