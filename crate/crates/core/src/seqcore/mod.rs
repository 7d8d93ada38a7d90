//! Alphabets, sequences, the shift action and the ambient metric spaces.

mod alphabet;
mod sequence;
mod space;

pub use alphabet::{Alphabet, Symbol};
pub use sequence::{EventuallyPeriodic, SymbolicSequence};
pub use space::{
    circle_distance, discrete_distance, ensure_space, orbit, FnMap, Identity, Point, PointMap, PointSequence,
    PowerMap, Rotation, ShiftMap, Space,
};
