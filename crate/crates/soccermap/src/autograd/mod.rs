//! Minimal reverse-mode grid engine.
//!
//! Exactly the layer set the pass-surface network needs: conv2d with
//! symmetric padding, 2x max-pool, 2x nearest upsampling, ReLU / sigmoid /
//! identity / 2-D softmax activations, channel concatenation, pairwise mean,
//! single-cell losses and Adam. No general graph machinery — the
//! architecture is static, so a flat tape replayed in reverse is enough.

mod adam;
pub mod gradcheck;
mod params;
mod real;
mod tape;
mod tensor;

pub use adam::Adam;
pub use params::{init_conv, truncated_normal, ParamId, ParamShape, Parameter, Params};
pub use real::Real;
pub use tape::{NodeId, Tape, PROB_CLAMP};
pub use tensor::GridTensor;

/// Errors raised by the grid engine: contract violations on shapes and
/// dims, tape misuse, and optimizer aborts.
#[derive(Debug, Clone, PartialEq)]
pub enum AutogradError {
    ShapeMismatch { op: &'static str, detail: String },
    OddSpatialDims { op: &'static str, nx: usize, ny: usize },
    InvalidNode { id: usize, len: usize },
    NotAScalar { op: &'static str, numel: usize },
    CellOutOfRange { ix: usize, iy: usize, nx: usize, ny: usize },
    BackwardConsumed,
    NonFiniteGradient { param: String },
}

impl std::fmt::Display for AutogradError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AutogradError::ShapeMismatch { op, detail } => {
                write!(f, "{op}: shape mismatch: {detail}")
            }
            AutogradError::OddSpatialDims { op, nx, ny } => {
                write!(f, "{op}: spatial dims {nx}x{ny} must be even")
            }
            AutogradError::InvalidNode { id, len } => {
                write!(f, "node id {id} out of range for tape of {len} nodes")
            }
            AutogradError::NotAScalar { op, numel } => {
                write!(f, "{op}: expected a scalar node, got {numel} elements")
            }
            AutogradError::CellOutOfRange { ix, iy, nx, ny } => {
                write!(f, "cell ({ix},{iy}) outside {nx}x{ny} grid")
            }
            AutogradError::BackwardConsumed => {
                write!(f, "backward already replayed on this tape; record a new forward pass")
            }
            AutogradError::NonFiniteGradient { param } => {
                write!(f, "non-finite gradient on parameter '{param}'; step aborted")
            }
        }
    }
}

impl std::error::Error for AutogradError {}
