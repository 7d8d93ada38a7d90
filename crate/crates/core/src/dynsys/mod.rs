//! The interval map `T_n`, toral automorphisms, their product, periodic
//! decompositions, mistake functions and Bowen balls.

mod decomposition;
mod eigen;
mod maps;
mod mistakes;

pub use decomposition::{
    interval_decomposition, power_invariance, product_decomposition, verify_decomposition, Decomposition,
    DecompositionReport, Piece, PieceReport, SAMPLED_NOTE,
};
pub use eigen::{
    characteristic_polynomial, cyclotomic, root_of_unity_eigencheck, search_nonhyperbolic, EigenReport, Verdict,
};
pub use maps::{product_map, tn_samples, ProductMap, TnMap, TorusAuto};
pub use mistakes::{
    bowen_ball_member, bowen_ball_mistakes_member, k_g, Certificate, KgReport, MistakeCheck, MistakeForm,
    MistakeFunction,
};
