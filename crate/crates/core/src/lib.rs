//! Simulation of a discrete multitone (DMT) link over an intensity-modulated,
//! directly detected optical channel.
//!
//! The crate is organized along the signal path:
//!
//! - [`qam`]: Gray-labeled constellations, mapping and hard demapping.
//! - [`modem`]: DMT framing, synthesis, clipping, Schmidl-Cox timing,
//!   channel estimation and decision-directed equalization.
//! - [`channel`]: MZM, fiber dispersion, ASE loading, photodetection and
//!   resampling.
//! - [`loading`]: SNR estimation and Levin-Campello bit/power loading.
//! - [`harness`]: probe/load/measure experiments and report output.

// Negated comparisons are how config checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dsp;
mod error;
pub mod harness;
pub mod loading;
pub mod modem;
pub mod qam;

pub use channel::{ElectricalWaveform, LinkConfig, OpticalField};
pub use error::{DmtError, Result};
pub use harness::{ExperimentConfig, OsnrPoint, PointResult, SweepReport};
pub use loading::{LoadingTable, SnrProfile};
pub use modem::{ChannelEstimate, DmtConfig, DmtFrame};
pub use qam::Constellation;
