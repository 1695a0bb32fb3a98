//! Full-field pass analysis for soccer tracking data.
//!
//! The crate turns raw tracking snapshots (22 players, ball, one tagged pass)
//! into calibrated probability surfaces over a coarse grid of the pitch:
//!
//! * [`autograd`] — a minimal reverse-mode grid-tensor engine (conv2d with
//!   symmetric padding, 2x max-pool, nearest upsampling, pointwise
//!   activations, a 2-D softmax and the Adam optimizer). Generic over
//!   `f32`/`f64`.
//! * [`channels`] — converts a normalized [`channels::TrackingSnapshot`] into
//!   the 13-channel game-state stack the network consumes.
//! * [`network`] — assembles the multi-scale fully convolutional model,
//!   with sigmoid / softmax / value heads, ablation switches and a binary
//!   checkpoint format.
//! * [`training`] — single-cell losses, stratified splits, grid search,
//!   early stopping and team fine-tuning.
//! * [`metrics`] — log-loss, expected calibration error and reliability
//!   tables.
//! * [`baselines`] — the constant, logistic and two-layer benchmark models
//!   over handcrafted features.
//! * [`synthgen`] — a seeded synthetic match generator whose physics-based
//!   outcome oracle doubles as the verification reference.
//! * [`applications`] — optimal passing / positioning, pass-completion-added
//!   rankings and team tendency maps.
//! * [`io`] — the line-delimited tracking format, surface files (text +
//!   PGM), flat key=value configs and CSV export.
//!
//! The `smap` binary exposes the whole pipeline as subcommands; the
//! `examples/` directory has one runnable program per capability.

pub mod autograd;
pub mod applications;
pub mod baselines;
pub mod channels;
pub mod cli;
pub mod io;
pub mod metrics;
pub mod network;
pub mod synthgen;
pub mod training;
pub mod util;

pub use autograd::{GridTensor, Parameter, Params, Real, Tape};
pub use channels::{GameState, PassEvent, TrackingSnapshot};
pub use network::{Head, Model, NetworkSpec, Surface};
