//! Finite-horizon machinery for Besicovitch pseudometrics, shift spaces,
//! finite-support measures and average shadowing.

pub mod dynsys;
pub mod error;
pub mod rational;
pub mod seqcore;
pub mod shadowing;
pub mod measures;
pub mod proximal;
pub mod pseudometrics;
pub mod shiftspace;

mod bits;

pub use error::{Error, Result};
pub use rational::Q;
