//! Schmidl-Cox frame timing.
//!
//! The synchronization symbol repeats with period `N/2`, so the metric
//! `M(d) = |P(d)|^2 / R(d)^2` with
//! `P(d) = sum r(d+i) r(d+i+N/2)` and `R(d) = sum r(d+i+N/2)^2`
//! (`i < N/2`) forms a plateau over the cyclic prefix. The timing estimate is
//! the plateau center; when the plateau is cut by the search window the
//! estimate is anchored on its surviving edge instead.
//!
//! The plateau center wanders by a few tens of samples with the data around
//! the synchronization symbol, so [`locate_frame`] refines it by correlating
//! against the known symbol body near the coarse estimate.

use super::{hermitian_spectrum, DmtConfig, TrainingSymbols};
use crate::dsp;
use crate::error::{DmtError, Result};

/// Samples between a recomputation of the running sums.
const RESYNC_INTERVAL: usize = 4096;

/// Timing metric `M(d)` for `d in 0..=last`.
pub fn timing_metric(rx: &[f64], fft_size: usize, last: usize) -> Vec<f64> {
    let half = fft_size / 2;
    assert!(last + fft_size <= rx.len(), "metric window exceeds capture");
    let exact = |d: usize| {
        let mut p = 0.0;
        let mut r = 0.0;
        for i in 0..half {
            let b = rx[d + i + half];
            p += rx[d + i] * b;
            r += b * b;
        }
        (p, r)
    };
    let (mut p, mut r) = exact(0);
    let floor = {
        let peak_energy = rx.iter().map(|x| x * x).fold(0.0, f64::max);
        peak_energy * half as f64 * 1e-12
    };
    let mut out = Vec::with_capacity(last + 1);
    for d in 0..=last {
        if d > 0 {
            if d % RESYNC_INTERVAL == 0 {
                (p, r) = exact(d);
            } else {
                let a0 = rx[d - 1];
                let b0 = rx[d - 1 + half];
                let b1 = rx[d - 1 + fft_size];
                p += b0 * b1 - a0 * b0;
                r += b1 * b1 - b0 * b0;
            }
        }
        out.push(if r > floor { (p * p) / (r * r) } else { 0.0 });
    }
    out
}

/// Locates the body start of the synchronization symbol.
///
/// The capture must hold a complete frame after the returned index; the
/// search window is limited accordingly.
pub fn schmidl_cox_locate(rx: &[f64], cfg: &DmtConfig) -> Result<usize> {
    let n = cfg.fft_size;
    let tail = cfg.frame_samples() - cfg.cp_len;
    if rx.len() < tail {
        return Err(DmtError::Framing(format!(
            "capture of {} samples is shorter than one frame ({tail})",
            rx.len()
        )));
    }
    let last = rx.len() - tail;
    let metric = timing_metric(rx, n, last);

    let (peak_at, peak) =
        metric
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (d, m)| {
                if m > best.1 {
                    (d, m)
                } else {
                    best
                }
            });
    if !(peak >= cfg.sync_threshold) {
        return Err(DmtError::SyncNotFound {
            peak: peak.max(0.0),
            threshold: cfg.sync_threshold,
        });
    }

    let level = cfg.sync_plateau * peak;
    let mut left = peak_at;
    while left > 0 && metric[left - 1] >= level {
        left -= 1;
    }
    let mut right = peak_at;
    while right < last && metric[right + 1] >= level {
        right += 1;
    }

    // Distance the metric stays above `level` outside the ideal region.
    let spill = (n as f64 / 2.0 * (1.0 - cfg.sync_plateau.sqrt())).round() as usize;
    let half_cp = cfg.cp_len / 2;
    let estimate = match (left == 0, right == last) {
        (true, false) => right.saturating_sub(spill + half_cp),
        (false, true) => left + spill + half_cp,
        _ => (left + right) / 2,
    };
    Ok(estimate.min(last))
}

/// Coarse Schmidl-Cox timing followed by correlation with the known
/// synchronization body. Returns a body start backed off by half the cyclic
/// prefix, so moderate channel memory stays inside the prefix.
pub fn locate_frame(rx: &[f64], cfg: &DmtConfig, training: &TrainingSymbols) -> Result<usize> {
    let coarse = schmidl_cox_locate(rx, cfg)?;
    let n = cfg.fft_size;
    let last = rx.len() - (cfg.frame_samples() - cfg.cp_len);

    let mut reference = hermitian_spectrum(&training.sync, n)?;
    dsp::ifft(&mut reference);
    let reference: Vec<f64> = reference.iter().map(|x| x.re).collect();

    let spill = (n as f64 / 2.0 * (1.0 - cfg.sync_plateau.sqrt())).round() as usize;
    let reach = cfg.cp_len + 2 * spill;
    let lo = coarse.saturating_sub(reach);
    let hi = (coarse + reach).min(last);
    let peak = (lo..=hi)
        .map(|d| {
            let c: f64 = rx[d..d + n]
                .iter()
                .zip(&reference)
                .map(|(a, b)| a * b)
                .sum();
            (d, c.abs())
        })
        .fold((coarse, f64::NEG_INFINITY), |best, (d, c)| {
            if c > best.1 {
                (d, c)
            } else {
                best
            }
        });
    Ok(peak.0.saturating_sub(cfg.cp_len / 2).min(last))
}
