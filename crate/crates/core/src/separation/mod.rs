//! One-step alternating thresholding, concrete and abstract.

mod abstract_frame;
mod materialize;
mod one_step;

pub use abstract_frame::{
    abstract_one_step, harmonic_frame, random_orthogonal, separation_bound, AbstractFrame,
    AbstractOutput, BoundCheck,
};
pub use materialize::{frame_matrix, from_real, to_real, MaterializedFrames};
pub use one_step::{
    one_step_threshold, residual_identity_check, separation_error, ThresholdOutput,
    ThresholdParams, ThresholdUnits,
};
