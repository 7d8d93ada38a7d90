//! Average pseudo-orbits, shadowing in average, segment schedules and
//! spaced specifications.

mod pseudo_orbit;
mod schedule;
mod specification;

pub use pseudo_orbit::{
    check_asymptotic_average_po, check_asymptotically_shadowed, check_delta_average_po, check_shadowed_in_average,
    jump_errors, PseudoOrbitReport, ShadowReport, DEFAULT_TOLERANCE,
};
pub use schedule::{
    expand_from_power, lift_to_power, sigmund_pseudo_orbit, QuasiGeneric, SegmentSchedule, SigmundOrbit,
    DEFAULT_RATIO,
};
pub use specification::{
    brute_force_tracer, brute_force_tracer_sofic, check_spaced_specification, Segment, Specification, TraceResult,
    TraceWitness, SOFIC_WARNING,
};
