use num_complex::Complex64;

use super::{locate_frame, DmtConfig, TrainingSymbols};
use crate::dsp;
use crate::error::{DmtError, Result};
use crate::loading::LoadingTable;
use crate::qam;

/// Per-carrier complex gain; entry `i` is carrier `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub h: Vec<Complex64>,
    /// Index of the payload symbol that last updated the estimate.
    pub snapshot_symbol: usize,
}

/// Output of payload demodulation.
#[derive(Debug, Clone)]
pub struct Demodulated {
    pub bits: Vec<u8>,
    /// Equalized values per payload symbol and carrier (zero where unloaded).
    pub equalized: Vec<Vec<Complex64>>,
}

/// A fully received frame.
#[derive(Debug, Clone)]
pub struct ReceivedFrame {
    /// Capture index used as the body start of the synchronization symbol.
    pub timing: usize,
    pub estimate: ChannelEstimate,
    pub bits: Vec<u8>,
    pub equalized: Vec<Vec<Complex64>>,
}

/// Unitary FFT of `rx[start..start + N]`, returning bins `1..=n_modulated`.
pub fn extract_carriers(rx: &[f64], start: usize, cfg: &DmtConfig) -> Result<Vec<Complex64>> {
    let end = start + cfg.fft_size;
    if end > rx.len() {
        return Err(DmtError::Framing(format!(
            "symbol window {start}..{end} exceeds capture of {} samples",
            rx.len()
        )));
    }
    let mut spectrum = dsp::fft_real(&rx[start..end]);
    spectrum.truncate(cfg.n_modulated + 1);
    spectrum.remove(0);
    Ok(spectrum)
}

/// Least-squares estimate averaged over the training symbols.
pub fn estimate_channel(
    received: &[Vec<Complex64>],
    known: &[Vec<Complex64>],
) -> Result<ChannelEstimate> {
    if received.is_empty() || received.len() != known.len() {
        return Err(DmtError::Framing(format!(
            "{} received training symbols for {} known ones",
            received.len(),
            known.len()
        )));
    }
    let n = known[0].len();
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for (y, x) in received.iter().zip(known) {
        if y.len() != n || x.len() != n {
            return Err(DmtError::Framing("ragged training symbol".into()));
        }
        for k in 0..n {
            if x[k].norm_sqr() == 0.0 {
                return Err(DmtError::InvalidTrainingSymbol { carrier: k + 1 });
            }
            h[k] += y[k] / x[k];
        }
    }
    let count = received.len() as f64;
    h.iter_mut().for_each(|v| *v /= count);
    Ok(ChannelEstimate {
        h,
        snapshot_symbol: 0,
    })
}

/// Demodulates the payload of a frame aligned at the body of its
/// synchronization symbol, tracking the channel decision-directed.
pub fn demodulate_frame(
    aligned: &[f64],
    loading: &LoadingTable,
    cfg: &DmtConfig,
    est: &mut ChannelEstimate,
) -> Result<Demodulated> {
    cfg.check_loading(loading)?;
    if est.h.len() != cfg.n_modulated {
        return Err(DmtError::Framing(format!(
            "channel estimate covers {} carriers, modem modulates {}",
            est.h.len(),
            cfg.n_modulated
        )));
    }
    let alpha = cfg.dd_alpha;
    let sqrt_g: Vec<f64> = loading.power.iter().map(|g| g.sqrt()).collect();
    let mut bits = Vec::with_capacity(cfg.payload_bits(loading));
    let mut equalized = Vec::with_capacity(cfg.n_payload());

    for s in 0..cfg.n_payload() {
        let start = (cfg.n_ts + s) * cfg.symbol_len();
        let y = extract_carriers(aligned, start, cfg)?;
        let mut eq = vec![Complex64::new(0.0, 0.0); cfg.n_modulated];
        for k in 0..cfg.n_modulated {
            let b = loading.bits[k];
            if b == 0 {
                continue;
            }
            let gain = est.h[k] * sqrt_g[k];
            let z = y[k] / gain;
            eq[k] = z;
            let table = qam::constellation(b)?;
            let label = table.nearest_label(z);
            qam::push_label_bits(label, b, &mut bits);
            let decided = table.point(label);
            est.h[k] = est.h[k] * (1.0 - alpha) + y[k] / (decided * sqrt_g[k]) * alpha;
        }
        est.snapshot_symbol = s;
        equalized.push(eq);
    }
    Ok(Demodulated { bits, equalized })
}

/// Synchronizes, estimates the channel from the training symbols and
/// demodulates the payload.
pub fn receive_frame(
    capture: &[f64],
    loading: &LoadingTable,
    cfg: &DmtConfig,
    training: &TrainingSymbols,
) -> Result<ReceivedFrame> {
    let timing = locate_frame(capture, cfg, training)?;
    let aligned = &capture[timing..];
    let received = (1..cfg.n_ts)
        .map(|j| extract_carriers(aligned, j * cfg.symbol_len(), cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut estimate = estimate_channel(&received, &training.estimation)?;
    let Demodulated { bits, equalized } = demodulate_frame(aligned, loading, cfg, &mut estimate)?;
    Ok(ReceivedFrame {
        timing,
        estimate,
        bits,
        equalized,
    })
}
