//! The `G^(s,t)` graphs, the shifts `F^(s,t)` built from them, and
//! finite-horizon tools for their intersection over `s_i = 2^i`,
//! `t_i = 10^i`.

mod gst;
mod ylab;

pub use gst::{
    build_f_graph, build_gst, in_f_horizon, in_p, p_is_zero, periodic_p, random_path, GstAutomaton, GstParams,
    DIAMOND, ONE, ZERO,
};
pub use ylab::{
    growth_condition, in_y_horizon, project_to_y, proximality_probe, return_times_point, s_i, sample_member, schedule_sum, t_i,
    tail_sum, Decision, ReturnTimes, YMembership, YParams,
};
