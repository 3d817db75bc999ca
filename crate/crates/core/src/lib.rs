//! Closed-loop simulator for training neural decoders by online imitation
//! learning.
//!
//! The library is organized around the pieces of a closed-loop
//! brain-computer-interface training run:
//!
//! - [`encoder`]: synthetic linear-Gaussian neural encoding of intended
//!   velocities, SNR calibration, and intention-mismatch models.
//! - [`decoder`]: the steady-state velocity Kalman filter policy and
//!   oracle-assist blending.
//! - [`oracle`]: goal-directed intention oracles — straight-line cursor
//!   velocities and damped-least-squares joint updates for a kinematic arm.
//! - [`learner`]: dataset aggregation and the decoder update rules (online
//!   gradient descent, moving average, follow-the-leader, recursive least
//!   squares), plus loss and empirical regret.
//! - [`harness`]: the closed-loop experiment runner and its analyses
//!   (learning curves, encoder recovery, mismatch sweeps, regret rates).
//!
//! All numerical code is generic over the scalar type through the
//! [`scalar::Scalar`] trait; `f64` aliases for the main types live at the
//! crate root.

pub mod decoder;
pub mod encoder;
pub mod error;
pub mod harness;
pub mod learner;
pub mod oracle;
pub mod rates;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default scalar type used by the CLI and presets.
pub type Real = f64;

pub type EncoderModel64 = encoder::EncoderModel<f64>;
pub type IntentMismatch64 = encoder::IntentMismatch<f64>;
pub type EffectorState64 = decoder::EffectorState<f64>;
pub type DecoderParams64 = decoder::DecoderParams<f64>;
pub type AssistSpec64 = decoder::AssistSpec<f64>;
pub type GoalSpec64 = oracle::GoalSpec<f64>;
pub type ArmModel64 = oracle::arm::ArmModel<f64>;
pub type AggregatedDataset64 = learner::AggregatedDataset<f64>;
pub type RegretReport64 = learner::RegretReport<f64>;
pub type ExperimentResult64 = harness::ExperimentResult<f64>;

pub type EncoderModel32 = encoder::EncoderModel<f32>;
pub type DecoderParams32 = decoder::DecoderParams<f32>;
pub type EffectorState32 = decoder::EffectorState<f32>;
