use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, OsnrPoint, HD_FEC_THRESHOLD, SD_FEC_THRESHOLD};
use crate::channel::{
    demux_filter, load_ase, mzm_modulate, photodetect, propagate_dispersion, resample,
    ElectricalWaveform, LinkConfig,
};
use crate::error::{DmtError, Result};
use crate::loading::{
    bit_load, estimate_snr_profile, gap_from_ber, power_load, LoadingTable, SnrProfile,
};
use crate::modem::{build_frame, receive_frame, DmtConfig, DmtFrame};
use crate::qam::MAX_ORDER;

/// Stream reserved for the probe frame.
const PROBE_STREAM: u64 = u64::MAX;

/// Share of frames allowed to lose sync before a point is flagged unreliable.
const MAX_SYNC_FAILURE_RATE: f64 = 0.1;

/// Outcome of the probe-and-load step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub table: LoadingTable,
    pub profile: SnrProfile,
}

/// Counted errors at one OSNR.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub osnr: OsnrPoint,
    pub errors: u64,
    pub bits: u64,
    pub ber: f64,
    pub hd_pass: bool,
    pub sd_pass: bool,
    pub frames: usize,
    pub sync_failures: usize,
    /// Fewer counted bits than the configured floor.
    pub low_confidence: bool,
    /// More than 10% of frames failed to synchronize.
    pub unreliable: bool,
}

impl PointResult {
    fn from_counts(
        osnr: OsnrPoint,
        errors: u64,
        bits: u64,
        frames: usize,
        sync_failures: usize,
        min_bits: u64,
    ) -> Self {
        let ber = if bits == 0 {
            0.5
        } else {
            errors as f64 / bits as f64
        };
        Self {
            osnr,
            errors,
            bits,
            ber,
            hd_pass: bits > 0 && ber < HD_FEC_THRESHOLD,
            sd_pass: bits > 0 && ber < SD_FEC_THRESHOLD,
            frames,
            sync_failures,
            low_confidence: bits < min_bits,
            unreliable: sync_failures as f64 > MAX_SYNC_FAILURE_RATE * frames as f64,
        }
    }
}

/// Full result of an OSNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub fingerprint: String,
    pub table: LoadingTable,
    pub profile: SnrProfile,
    pub points: Vec<PointResult>,
}

impl SweepReport {
    /// Lowest sweep OSNR that passes the HD-FEC threshold.
    pub fn required_osnr(&self) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.hd_pass)
            .filter_map(|p| p.osnr.as_option())
            .min_by(f64::total_cmp)
    }
}

/// Sends one period of the DAC waveform through the optical link and
/// returns the received electrical waveform, resampled back to the DAC rate.
///
/// Chain: upsample to the optical rate, MZM, fiber, ASE, demultiplexer,
/// photodiode, capture at the ADC rate, resample to the DAC rate.
pub fn simulate_link(
    tx: &[f64],
    dmt: &DmtConfig,
    link: &LinkConfig,
    osnr_db: Option<f64>,
    noise_seed: u64,
) -> Result<Vec<f64>> {
    let drive = resample(
        &ElectricalWaveform {
            samples: tx.to_vec(),
            rate: dmt.dac_rate,
        },
        link.optical_rate,
    )?;
    let field = mzm_modulate(&drive, link)?;
    let field = propagate_dispersion(&field, link);
    let field = load_ase(&field, osnr_db, link, noise_seed)?;
    let field = demux_filter(&field, link);
    let detected = photodetect(&field, link);
    let captured = resample(&detected, dmt.adc_rate)?;
    Ok(resample(&captured, dmt.dac_rate)?.samples)
}

/// Two consecutive periods of a cyclically repeated waveform, delayed by
/// `delay` samples.
pub fn delayed_capture(period: &[f64], delay: usize) -> Vec<f64> {
    let n = period.len();
    (0..2 * n)
        .map(|i| period[(i + 2 * n - delay % n) % n])
        .collect()
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let word: u64 = rng.random();
        let take = (n - out.len()).min(64);
        out.extend((0..take).map(|i| ((word >> i) & 1) as u8));
    }
    out
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct FrameRun {
    frame: DmtFrame,
    received: Result<crate::modem::ReceivedFrame>,
}

fn run_frame(
    cfg: &ExperimentConfig,
    loading: &LoadingTable,
    osnr_db: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<FrameRun> {
    let bits = random_bits(rng, cfg.dmt.payload_bits(loading));
    let frame = build_frame(&bits, loading, &cfg.dmt)?;
    let noise_seed: u64 = rng.random::<u64>() ^ cfg.link.noise_seed;
    let delay = rng.random_range(0..frame.waveform.len());
    let rx = simulate_link(&frame.waveform, &cfg.dmt, &cfg.link, osnr_db, noise_seed)?;
    let capture = delayed_capture(&rx, delay);
    let received = receive_frame(&capture, loading, &cfg.dmt, &frame.training);
    Ok(FrameRun { frame, received })
}

/// Per-carrier SNR seen by a uniform 16-QAM probe frame at `osnr`.
pub fn measure_snr_profile(cfg: &ExperimentConfig, osnr: OsnrPoint) -> Result<SnrProfile> {
    let probe = LoadingTable::uniform(cfg.dmt.n_modulated, 4)?;
    let mut rng = stream_rng(cfg.seed, PROBE_STREAM);
    let run = run_frame(cfg, &probe, osnr.as_option(), &mut rng)?;
    let received = run.received?;
    estimate_snr_profile(&received.equalized, &run.frame.payload_symbols)
}

/// Measures the per-carrier SNR with the probe (noise loading off) and
/// derives the loading table for the configured rate.
pub fn probe_and_load(cfg: &ExperimentConfig) -> Result<ProbeOutcome> {
    cfg.validate()?;
    let target = cfg.target_bits();
    let max_bits = usize::from(MAX_ORDER) * cfg.dmt.n_modulated;
    if target > max_bits {
        return Err(DmtError::InfeasibleRate {
            requested: target,
            max_achievable: max_bits,
        });
    }
    let profile = measure_snr_profile(cfg, OsnrPoint::Off)?;
    let gap_db = match cfg.gap_db {
        Some(g) => g,
        None => gap_from_ber(cfg.target_ber, 4)?,
    };
    let table = bit_load(&profile, target, gap_db, MAX_ORDER)?;
    Ok(ProbeOutcome {
        table: power_load(&table, &profile),
        profile,
    })
}

/// Monte-Carlo error count at one OSNR. Each point owns the PRNG stream
/// `(seed, point_index)`.
pub fn run_point(
    cfg: &ExperimentConfig,
    loading: &LoadingTable,
    osnr: OsnrPoint,
    point_index: u64,
) -> Result<PointResult> {
    let per_frame = cfg.dmt.payload_bits(loading) as u64;
    if per_frame == 0 {
        return Err(DmtError::Framing("loading table carries no bits".into()));
    }
    let wanted = cfg.n_frames.max(cfg.min_bits.div_ceil(per_frame) as usize);
    // Frames lost to sync failures are replaced, up to this many attempts.
    let max_attempts = 4 * wanted;
    let mut rng = stream_rng(cfg.seed, point_index);
    let (mut errors, mut bits, mut frames, mut sync_failures) = (0u64, 0u64, 0usize, 0usize);
    while frames - sync_failures < wanted && frames < max_attempts {
        let run = run_frame(cfg, loading, osnr.as_option(), &mut rng)?;
        frames += 1;
        match run.received {
            Ok(rx) => {
                errors += rx
                    .bits
                    .iter()
                    .zip(&run.frame.payload_bits)
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                bits += per_frame;
            }
            Err(DmtError::SyncNotFound { .. }) => sync_failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(PointResult::from_counts(
        osnr,
        errors,
        bits,
        frames,
        sync_failures,
        cfg.min_bits,
    ))
}

/// Probe, load, then count errors at every configured OSNR point.
pub fn osnr_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    if cfg.osnr_points.is_empty() {
        return Err(DmtError::InvalidConfig("no OSNR points to sweep".into()));
    }
    let probe = probe_and_load(cfg)?;
    let points = cfg
        .osnr_points
        .par_iter()
        .enumerate()
        .map(|(i, &osnr)| run_point(cfg, &probe.table, osnr, i as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        config: cfg.clone(),
        fingerprint: cfg.fingerprint(),
        table: probe.table,
        profile: probe.profile,
        points,
    })
}
