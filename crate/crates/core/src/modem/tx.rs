use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DmtConfig;
use crate::dsp;
use crate::error::{DmtError, Result};
use crate::loading::LoadingTable;
use crate::qam;

/// Fixed seed for the training content; both ends regenerate it.
const TRAINING_SEED: u64 = 0x5eed_d317_0001;

/// Known frequency-domain content of the training symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSymbols {
    /// Synchronization symbol: QPSK on even carriers, zero on odd ones, so the
    /// time-domain body consists of two identical halves.
    pub sync: Vec<Complex64>,
    /// Channel-estimation symbols, full QPSK on every modulated carrier.
    pub estimation: Vec<Vec<Complex64>>,
}

impl TrainingSymbols {
    pub fn new(cfg: &DmtConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(TRAINING_SEED);
        let qpsk = qam::constellation(2).expect("QPSK exists");
        let draw = |rng: &mut ChaCha8Rng| qpsk.point(rng.random_range(0..4));
        let sync = (1..=cfg.n_modulated)
            .map(|k| {
                if k % 2 == 0 {
                    draw(&mut rng) * std::f64::consts::SQRT_2
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let estimation = (1..cfg.n_ts)
            .map(|_| (0..cfg.n_modulated).map(|_| draw(&mut rng)).collect())
            .collect();
        Self { sync, estimation }
    }
}

/// One transmitted frame.
#[derive(Debug, Clone)]
pub struct DmtFrame {
    /// Real samples at the DAC rate, clipped.
    pub waveform: Vec<f64>,
    pub payload_bits: Vec<u8>,
    /// Unscaled constellation points per payload symbol and carrier
    /// (zero on unloaded carriers).
    pub payload_symbols: Vec<Vec<Complex64>>,
    pub loading: LoadingTable,
    pub training: TrainingSymbols,
}

/// Places carrier values into bins `1..=n` of an `fft_size` spectrum and
/// mirrors them into the upper half.
pub fn hermitian_spectrum(carriers: &[Complex64], fft_size: usize) -> Result<Vec<Complex64>> {
    if carriers.len() > fft_size / 2 - 1 {
        return Err(DmtError::Framing(format!(
            "{} carriers do not fit a {fft_size}-point spectrum",
            carriers.len()
        )));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); fft_size];
    for (i, &c) in carriers.iter().enumerate() {
        let k = i + 1;
        x[k] = c;
        x[fft_size - k] = c.conj();
    }
    Ok(x)
}

/// Scales per-carrier symbols by `sqrt(g_k)` and builds the Hermitian spectrum.
pub fn assemble_spectrum(
    symbols: &[Complex64],
    loading: &LoadingTable,
    cfg: &DmtConfig,
) -> Result<Vec<Complex64>> {
    if symbols.len() != cfg.n_modulated {
        return Err(DmtError::Framing(format!(
            "{} symbols for {} modulated carriers",
            symbols.len(),
            cfg.n_modulated
        )));
    }
    cfg.check_loading(loading)?;
    let scaled: Vec<Complex64> = symbols
        .iter()
        .zip(&loading.power)
        .map(|(s, g)| s * g.sqrt())
        .collect();
    hermitian_spectrum(&scaled, cfg.fft_size)
}

/// Unitary IFFT of a Hermitian spectrum with the cyclic prefix prepended.
pub fn dmt_modulate(spectrum: &[Complex64], cfg: &DmtConfig) -> Result<Vec<f64>> {
    let n = cfg.fft_size;
    if spectrum.len() != n {
        return Err(DmtError::Framing(format!(
            "spectrum has {} bins, FFT size is {n}",
            spectrum.len()
        )));
    }
    let scale = spectrum.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut deviation = spectrum[0].im.abs().max(spectrum[n / 2].im.abs());
    for k in 1..n / 2 {
        deviation = deviation.max((spectrum[n - k] - spectrum[k].conj()).norm());
    }
    if deviation > 1e-12 * scale {
        return Err(DmtError::SymmetryViolation { deviation });
    }

    let mut buf = spectrum.to_vec();
    dsp::ifft(&mut buf);
    let power = dsp::mean_power_complex(&buf);
    let residue = buf.iter().map(|x| x.im * x.im).sum::<f64>() / n as f64;
    debug_assert!(residue.sqrt() <= 1e-9 * power.sqrt().max(f64::MIN_POSITIVE));

    let mut out = Vec::with_capacity(n + cfg.cp_len);
    out.extend(buf[n - cfg.cp_len..].iter().map(|x| x.re));
    out.extend(buf.iter().map(|x| x.re));
    Ok(out)
}

/// Hard-limits to `+-rms * 10^(ratio/20)` using the waveform's own RMS.
pub fn clip(waveform: &[f64], clip_ratio_db: f64) -> Result<Vec<f64>> {
    let sigma = dsp::rms(waveform);
    if waveform.is_empty() || sigma == 0.0 {
        return Err(DmtError::DegenerateSignal(
            "cannot clip a zero-power waveform",
        ));
    }
    Ok(clip_with_rms(waveform, sigma, clip_ratio_db))
}

/// Hard-limits against an externally supplied RMS.
pub fn clip_with_rms(waveform: &[f64], sigma: f64, clip_ratio_db: f64) -> Vec<f64> {
    let limit = sigma * 10f64.powf(clip_ratio_db / 20.0);
    waveform.iter().map(|x| x.clamp(-limit, limit)).collect()
}

/// Maps payload bits, frames them behind the training symbols and clips.
pub fn build_frame(
    payload_bits: &[u8],
    loading: &LoadingTable,
    cfg: &DmtConfig,
) -> Result<DmtFrame> {
    cfg.validate()?;
    cfg.check_loading(loading)?;
    let per_symbol = loading.bits_per_symbol();
    let expected = cfg.n_payload() * per_symbol;
    if payload_bits.len() != expected {
        return Err(DmtError::Framing(format!(
            "frame carries {expected} payload bits, got {}",
            payload_bits.len()
        )));
    }

    let training = TrainingSymbols::new(cfg);
    let mut waveform = Vec::with_capacity(cfg.frame_samples());
    waveform.extend(dmt_modulate(
        &hermitian_spectrum(&training.sync, cfg.fft_size)?,
        cfg,
    )?);
    for ts in &training.estimation {
        waveform.extend(dmt_modulate(&hermitian_spectrum(ts, cfg.fft_size)?, cfg)?);
    }

    let mut payload_symbols = Vec::with_capacity(cfg.n_payload());
    let mut cursor = 0;
    for _ in 0..cfg.n_payload() {
        let mut symbols = Vec::with_capacity(cfg.n_modulated);
        for &b in &loading.bits {
            if b == 0 {
                symbols.push(Complex64::new(0.0, 0.0));
            } else {
                let b = usize::from(b);
                symbols.push(qam::map_bits(&payload_bits[cursor..cursor + b], b as u8)?);
                cursor += b;
            }
        }
        waveform.extend(dmt_modulate(
            &assemble_spectrum(&symbols, loading, cfg)?,
            cfg,
        )?);
        payload_symbols.push(symbols);
    }

    let waveform = clip(&waveform, cfg.clip_ratio_db)?;
    Ok(DmtFrame {
        waveform,
        payload_bits: payload_bits.to_vec(),
        payload_symbols,
        loading: loading.clone(),
        training,
    })
}
