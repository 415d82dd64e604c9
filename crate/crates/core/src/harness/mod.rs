//! Experiment driver: probe and load, Monte-Carlo BER points, OSNR sweeps
//! and report emission.

pub mod analysis;
mod config;
mod experiment;
pub mod report;

pub use analysis::analytic_fading;
pub use config::{
    ExperimentConfig, OsnrPoint, DEFAULT_MIN_BITS, HD_FEC_THRESHOLD, SD_FEC_THRESHOLD,
};
pub use experiment::{
    delayed_capture, measure_snr_profile, osnr_sweep, probe_and_load, run_point, simulate_link,
    PointResult, ProbeOutcome, SweepReport,
};
pub use report::{report_render, write_report, PlotTables};
