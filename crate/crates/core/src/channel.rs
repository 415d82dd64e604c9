//! Optical link model: quadrature-biased MZM, dispersive fiber, ASE loading,
//! square-law photodetection and rational resampling.
//!
//! Fields are complex baseband envelopes relative to the optical carrier, in
//! units of sqrt(W). All spectral operations are circular, which matches a
//! transmitter that replays one frame from memory.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dsp;
use crate::error::{DmtError, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// OSNR reference bandwidth (0.1 nm at 1550 nm).
pub const OSNR_REFERENCE_BANDWIDTH: f64 = 12.5e9;

/// Physical parameters of the link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    /// Optical carrier frequency, Hz.
    pub carrier_freq: f64,
    /// Fiber length, m.
    pub fiber_len: f64,
    /// Dispersion coefficient, s/m^2 (17e-6 is 17 ps/nm/km).
    pub dispersion: f64,
    /// Attenuation, dB/m.
    pub loss: f64,
    pub launch_power_dbm: f64,
    /// OSNR in the 12.5 GHz reference bandwidth; `None` disables noise loading.
    pub osnr_db: Option<f64>,
    /// Photodiode (electrical) bandwidth, Hz.
    pub pd_bandwidth: f64,
    /// Full optical bandwidth of the demultiplexer, Hz.
    pub demux_bandwidth: f64,
    /// Peak drive as a fraction of V_pi.
    pub mod_index: f64,
    pub noise_seed: u64,
    /// Sample rate of the optical simulation, Hz.
    pub optical_rate: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            carrier_freq: 192.5e12,
            fiber_len: 0.0,
            dispersion: 17e-6,
            loss: 0.2e-3,
            launch_power_dbm: 5.0,
            osnr_db: None,
            pd_bandwidth: 50e9,
            demux_bandwidth: 100e9,
            mod_index: 0.5,
            noise_seed: 0,
            optical_rate: 160e9,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DmtError::InvalidConfig(msg));
        if !(self.fiber_len >= 0.0) || !self.fiber_len.is_finite() {
            return bad(format!("fiber length {} m", self.fiber_len));
        }
        if !self.dispersion.is_finite() || !self.loss.is_finite() || self.loss < 0.0 {
            return bad("dispersion and loss must be finite, loss non-negative".into());
        }
        if !(self.pd_bandwidth > 0.0 && self.demux_bandwidth > 0.0) {
            return bad("filter bandwidths must be positive".into());
        }
        if !(self.mod_index > 0.0 && self.mod_index <= 0.5) {
            return bad(format!(
                "modulation index {} outside (0, 0.5]",
                self.mod_index
            ));
        }
        if !(self.carrier_freq > 0.0 && self.optical_rate > 0.0) {
            return bad("carrier frequency and optical rate must be positive".into());
        }
        if let Some(osnr) = self.osnr_db {
            if !osnr.is_finite() {
                return bad(format!("OSNR {osnr} dB"));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    /// Group-velocity dispersion beta2 in s^2/m.
    pub fn beta2(&self) -> f64 {
        let lambda = self.wavelength();
        -self.dispersion * lambda * lambda / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT)
    }

    pub fn launch_power_w(&self) -> f64 {
        1e-3 * 10f64.powf(self.launch_power_dbm / 10.0)
    }
}

/// Complex optical envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalField {
    pub samples: Vec<Complex64>,
    pub rate: f64,
}

impl OpticalField {
    pub fn power(&self) -> f64 {
        dsp::mean_power_complex(&self.samples)
    }
}

/// Real electrical waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectricalWaveform {
    pub samples: Vec<f64>,
    pub rate: f64,
}

/// MZM at the quadrature point: `E = E0 cos(pi/4 + pi/2 * mod_index * v)`
/// with the drive normalized to `max |v| = 1` and `E0` set for the launch power.
pub fn mzm_modulate(drive: &ElectricalWaveform, cfg: &LinkConfig) -> Result<OpticalField> {
    let peak = drive.samples.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let swing = std::f64::consts::FRAC_PI_2 * cfg.mod_index;
    let bias = std::f64::consts::FRAC_PI_4;
    let transfer: Vec<f64> = if drive.samples.is_empty() {
        return Err(DmtError::DegenerateSignal("empty MZM drive"));
    } else if peak == 0.0 {
        vec![bias.cos(); drive.samples.len()]
    } else {
        drive
            .samples
            .iter()
            .map(|v| (bias + swing * v / peak).cos())
            .collect()
    };
    let mean_sq = dsp::mean_power(&transfer);
    if mean_sq == 0.0 {
        return Err(DmtError::DegenerateSignal("MZM output has no power"));
    }
    let e0 = (cfg.launch_power_w() / mean_sq).sqrt();
    Ok(OpticalField {
        samples: transfer
            .iter()
            .map(|t| Complex64::new(e0 * t, 0.0))
            .collect(),
        rate: drive.rate,
    })
}

/// All-pass dispersion `exp(j beta2/2 w^2 L)` plus span attenuation.
pub fn propagate_dispersion(field: &OpticalField, cfg: &LinkConfig) -> OpticalField {
    let n = field.samples.len();
    let attenuation = 10f64.powf(-cfg.loss * cfg.fiber_len / 20.0);
    if cfg.fiber_len == 0.0 || n == 0 {
        return OpticalField {
            samples: field.samples.iter().map(|x| x * attenuation).collect(),
            rate: field.rate,
        };
    }
    let half_beta_l = 0.5 * cfg.beta2() * cfg.fiber_len;
    let mut spec = field.samples.clone();
    dsp::fft(&mut spec);
    for (k, x) in spec.iter_mut().enumerate() {
        let w = 2.0 * std::f64::consts::PI * dsp::bin_frequency(k, n, field.rate);
        *x *= Complex64::from_polar(attenuation, half_beta_l * w * w);
    }
    dsp::ifft(&mut spec);
    OpticalField {
        samples: spec,
        rate: field.rate,
    }
}

/// Brick-wall optical filter of full width `demux_bandwidth` around the carrier.
pub fn demux_filter(field: &OpticalField, cfg: &LinkConfig) -> OpticalField {
    let n = field.samples.len();
    let edge = cfg.demux_bandwidth / 2.0;
    if edge >= field.rate / 2.0 {
        return field.clone();
    }
    let mut spec = field.samples.clone();
    dsp::fft(&mut spec);
    for (k, x) in spec.iter_mut().enumerate() {
        if dsp::bin_frequency(k, n, field.rate).abs() > edge {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    dsp::ifft(&mut spec);
    OpticalField {
        samples: spec,
        rate: field.rate,
    }
}

/// ASE realization for a target OSNR relative to `signal`, already
/// band-limited by the demultiplexer.
pub fn ase_noise(
    signal: &OpticalField,
    osnr_db: f64,
    cfg: &LinkConfig,
    seed: u64,
) -> Result<OpticalField> {
    let p_sig = signal.power();
    if !(p_sig > 0.0) {
        return Err(DmtError::DegenerateSignal(
            "cannot load noise onto a dark field",
        ));
    }
    if !osnr_db.is_finite() {
        return Err(DmtError::InvalidConfig(format!("OSNR target {osnr_db} dB")));
    }
    let n0 = p_sig / (OSNR_REFERENCE_BANDWIDTH * 10f64.powf(osnr_db / 10.0));
    let per_sample = n0 * signal.rate;
    if !(per_sample > 0.0 && per_sample.is_finite()) {
        return Err(DmtError::InvalidConfig(format!(
            "noise power {per_sample} W from OSNR {osnr_db} dB"
        )));
    }
    // White noise of per-sample variance s^2 has per-bin variance s^2 under
    // a unitary DFT, so the in-band bins can be drawn directly.
    let gauss = Normal::new(0.0, (per_sample / 2.0).sqrt()).expect("finite variance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = signal.samples.len();
    let edge = cfg.demux_bandwidth / 2.0;
    let mut spec: Vec<Complex64> = (0..n)
        .map(|k| {
            let re = gauss.sample(&mut rng);
            let im = gauss.sample(&mut rng);
            if dsp::bin_frequency(k, n, signal.rate).abs() > edge {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(re, im)
            }
        })
        .collect();
    dsp::ifft(&mut spec);
    Ok(OpticalField {
        samples: spec,
        rate: signal.rate,
    })
}

/// Adds demux-limited ASE for `osnr_db`; `None` returns the field unchanged.
pub fn load_ase(
    field: &OpticalField,
    osnr_db: Option<f64>,
    cfg: &LinkConfig,
    seed: u64,
) -> Result<OpticalField> {
    let Some(osnr) = osnr_db else {
        return Ok(field.clone());
    };
    let noise = ase_noise(field, osnr, cfg, seed)?;
    Ok(OpticalField {
        samples: field
            .samples
            .iter()
            .zip(&noise.samples)
            .map(|(s, n)| s + n)
            .collect(),
        rate: field.rate,
    })
}

/// OSNR (dB) from separately known signal and noise fields. The noise PSD is
/// read from the periodogram within the reference bandwidth around the
/// carrier. Returns `+inf` when there is no noise.
pub fn measure_osnr(signal: &OpticalField, noise: &OpticalField) -> f64 {
    let n = noise.samples.len();
    let mut spec = noise.samples.clone();
    dsp::fft(&mut spec);
    let half_ref = OSNR_REFERENCE_BANDWIDTH / 2.0;
    let (sum, count) = spec
        .iter()
        .enumerate()
        .filter(|(k, _)| dsp::bin_frequency(*k, n, noise.rate).abs() <= half_ref)
        .fold((0.0, 0usize), |(s, c), (_, x)| (s + x.norm_sqr(), c + 1));
    if count == 0 || sum == 0.0 {
        return f64::INFINITY;
    }
    let n0 = sum / count as f64 / noise.rate;
    10.0 * (signal.power() / (n0 * OSNR_REFERENCE_BANDWIDTH)).log10()
}

/// Formats an OSNR value, rendering `+inf` as `off`.
pub fn format_osnr(osnr_db: f64) -> String {
    if osnr_db.is_infinite() {
        "off".to_string()
    } else {
        format!("{osnr_db}")
    }
}

/// Square-law detection, brick-wall low-pass at `pd_bandwidth`, DC removed.
pub fn photodetect(field: &OpticalField, cfg: &LinkConfig) -> ElectricalWaveform {
    let intensity: Vec<f64> = field.samples.iter().map(|x| x.norm_sqr()).collect();
    let mut samples = lowpass(&intensity, field.rate, cfg.pd_bandwidth);
    let mean = samples.iter().sum::<f64>() / samples.len().max(1) as f64;
    samples.iter_mut().for_each(|x| *x -= mean);
    ElectricalWaveform {
        samples,
        rate: field.rate,
    }
}

/// Brick-wall low-pass on a real waveform.
pub fn lowpass(samples: &[f64], rate: f64, cutoff: f64) -> Vec<f64> {
    if cutoff >= rate / 2.0 || samples.is_empty() {
        return samples.to_vec();
    }
    let n = samples.len();
    let mut spec = dsp::fft_real(samples);
    for (k, x) in spec.iter_mut().enumerate() {
        if dsp::bin_frequency(k, n, rate).abs() > cutoff {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    dsp::ifft(&mut spec);
    spec.iter().map(|x| x.re).collect()
}

fn integral_rate(rate: f64) -> Result<u64> {
    if rate > 0.0 && rate.fract() == 0.0 && rate < 9.0e15 {
        Ok(rate as u64)
    } else {
        Err(DmtError::InvalidConfig(format!(
            "sample rate {rate} is not a positive whole number of Hz"
        )))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Band-limited rational resampling by zero-padding or truncating the
/// spectrum. The ratio must map the waveform onto a whole number of samples.
pub fn resample(w: &ElectricalWaveform, target_rate: f64) -> Result<ElectricalWaveform> {
    let from = integral_rate(w.rate)?;
    let to = integral_rate(target_rate)?;
    if from == to {
        return Ok(w.clone());
    }
    let g = gcd(from, to);
    let (up, down) = (to / g, from / g);
    let n = w.samples.len();
    let scaled = n as u128 * up as u128;
    if !scaled.is_multiple_of(down as u128) {
        return Err(DmtError::InvalidConfig(format!(
            "{n} samples at {from} Hz do not map onto a whole number of samples at {to} Hz"
        )));
    }
    let m = (scaled / down as u128) as usize;
    if n == 0 {
        return Ok(ElectricalWaveform {
            samples: Vec::new(),
            rate: target_rate,
        });
    }

    let x = dsp::fft_real(&w.samples);
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    let h = n.min(m);
    for k in 0..=(h - 1) / 2 {
        y[k] = x[k];
        if k > 0 {
            y[m - k] = x[n - k];
        }
    }
    if h.is_multiple_of(2) {
        let k = h / 2;
        if n < m {
            // Split the old Nyquist bin across both new half-band edges.
            y[k] = x[k] * 0.5;
            y[m - k] = x[k] * 0.5;
        } else {
            y[k] = x[k] + x[n - k];
        }
    }
    let scale = (m as f64 / n as f64).sqrt();
    y.iter_mut().for_each(|v| *v *= scale);
    dsp::ifft(&mut y);
    Ok(ElectricalWaveform {
        samples: y.iter().map(|v| v.re).collect(),
        rate: target_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn tone(n: usize, rate: f64, f: f64, amp: f64, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * f * i as f64 / rate + phase).cos())
            .collect()
    }

    fn random_field(n: usize, rate: f64, seed: u64) -> OpticalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        OpticalField {
            samples: (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
            rate,
        }
    }

    /// Amplitude of the component at exactly bin `k`.
    fn tone_amplitude(x: &[f64], k: usize) -> f64 {
        let spec = dsp::fft_real(x);
        2.0 * spec[k].norm() / (x.len() as f64).sqrt()
    }

    #[test]
    fn beta2_of_standard_fiber() {
        let cfg = LinkConfig::default();
        // -D lambda^2 / (2 pi c) with D = 17 ps/nm/km at 192.5 THz: about -21.9 ps^2/km.
        assert!(
            (cfg.beta2() * 1e27 - (-21.89)).abs() < 0.05,
            "{}",
            cfg.beta2() * 1e27
        );
        assert!((cfg.wavelength() - 1557.36e-9).abs() < 0.01e-9);
    }

    #[test]
    fn mzm_quadrature_bias() {
        let cfg = LinkConfig::default();
        let drive = ElectricalWaveform {
            samples: vec![0.0; 64],
            rate: 1.0,
        };
        let e = mzm_modulate(&drive, &cfg).unwrap();
        assert!((e.power() - cfg.launch_power_w()).abs() < 1e-15);
        let e0_sq = cfg.launch_power_w() / 0.5;
        assert!(e
            .samples
            .iter()
            .all(|x| (x.norm_sqr() - 0.5 * e0_sq).abs() < 1e-15));
        assert!(mzm_modulate(
            &ElectricalWaveform {
                samples: vec![],
                rate: 1.0
            },
            &cfg
        )
        .is_err());
    }

    #[test]
    fn mzm_full_swing() {
        let cfg = LinkConfig {
            mod_index: 0.5,
            ..LinkConfig::default()
        };
        let drive = ElectricalWaveform {
            samples: vec![1.0, -1.0, 1.0, -1.0],
            rate: 1.0,
        };
        let e = mzm_modulate(&drive, &cfg).unwrap();
        // v=+1 -> cos(pi/2) = 0, v=-1 -> cos(0) = 1; never negative.
        assert!(e.samples[0].re.abs() < 1e-12);
        assert!(e.samples[1].re > 0.0);
        assert!(e.samples.iter().all(|x| x.re >= -1e-12 && x.im == 0.0));
    }

    #[test]
    fn mzm_small_signal_is_linear() {
        let n = 1024;
        let drive = ElectricalWaveform {
            samples: tone(n, 1024.0, 8.0, 1.0, 0.0),
            rate: 1024.0,
        };
        let fundamental: Vec<f64> = [0.05, 0.1, 0.2]
            .iter()
            .map(|&m| {
                let cfg = LinkConfig {
                    mod_index: m,
                    ..LinkConfig::default()
                };
                let e = mzm_modulate(&drive, &cfg).unwrap();
                let i: Vec<f64> = e.samples.iter().map(|x| x.norm_sqr()).collect();
                tone_amplitude(&i, 8) / m
            })
            .collect();
        for f in &fundamental[1..] {
            assert!((f / fundamental[0] - 1.0).abs() < 0.05, "{fundamental:?}");
        }
    }

    #[test]
    fn dispersion_identity_and_all_pass() {
        let field = random_field(4096, 160e9, 1);
        let zero = LinkConfig {
            fiber_len: 0.0,
            ..LinkConfig::default()
        };
        assert_eq!(propagate_dispersion(&field, &zero).samples, field.samples);

        let lossless = LinkConfig {
            fiber_len: 50.5e3,
            loss: 0.0,
            ..LinkConfig::default()
        };
        let out = propagate_dispersion(&field, &lossless);
        assert!((out.power() / field.power() - 1.0).abs() < 1e-9);

        let lossy = LinkConfig {
            fiber_len: 50.5e3,
            ..LinkConfig::default()
        };
        let out = propagate_dispersion(&field, &lossy);
        let loss_sq = 10f64.powf(-0.2e-3 * 50.5e3 / 10.0);
        assert!((out.power() / (field.power() * loss_sq) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dispersion_composes() {
        let field = random_field(2048, 160e9, 2);
        let half = LinkConfig {
            fiber_len: 25e3,
            ..LinkConfig::default()
        };
        let full = LinkConfig {
            fiber_len: 50e3,
            ..LinkConfig::default()
        };
        let twice = propagate_dispersion(&propagate_dispersion(&field, &half), &half);
        let once = propagate_dispersion(&field, &full);
        let scale = once.power().sqrt();
        for (a, b) in twice.samples.iter().zip(&once.samples) {
            assert!((a - b).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn osnr_calibration_round_trip() {
        let cfg = LinkConfig::default();
        let signal = random_field(1 << 16, 160e9, 3);
        for target in [15.0, 25.0, 31.0, 45.0] {
            let noise = ase_noise(&signal, target, &cfg, 9).unwrap();
            let measured = measure_osnr(&signal, &noise);
            assert!((measured - target).abs() < 0.1, "{target}: {measured}");
        }
        let doubled = OpticalField {
            samples: signal.samples.iter().map(|x| x * 2f64.sqrt()).collect(),
            rate: signal.rate,
        };
        let noise = ase_noise(&signal, 31.0, &cfg, 9).unwrap();
        let gain = measure_osnr(&doubled, &noise) - measure_osnr(&signal, &noise);
        assert!((gain - 10.0 * 2f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn independent_seeds_same_osnr() {
        let cfg = LinkConfig::default();
        let signal = random_field(1 << 16, 160e9, 4);
        let a = ase_noise(&signal, 31.0, &cfg, 1).unwrap();
        let b = ase_noise(&signal, 31.0, &cfg, 2).unwrap();
        assert_ne!(a.samples, b.samples);
        for seed in 0..20 {
            let n = ase_noise(&signal, 31.0, &cfg, seed).unwrap();
            assert!((measure_osnr(&signal, &n) - 31.0).abs() < 0.1);
        }
        assert_eq!(ase_noise(&signal, 31.0, &cfg, 1).unwrap(), a);
    }

    #[test]
    fn noise_off_and_no_noise() {
        let cfg = LinkConfig::default();
        let signal = random_field(256, 160e9, 5);
        assert_eq!(load_ase(&signal, None, &cfg, 0).unwrap(), signal);
        let silent = OpticalField {
            samples: vec![Complex64::new(0.0, 0.0); 256],
            rate: 160e9,
        };
        let osnr = measure_osnr(&signal, &silent);
        assert!(osnr.is_infinite());
        assert_eq!(format_osnr(osnr), "off");
        assert!(ase_noise(&silent, 20.0, &cfg, 0).is_err());
    }

    #[test]
    fn noise_is_band_limited() {
        let cfg = LinkConfig::default();
        let signal = random_field(4096, 160e9, 6);
        let noise = ase_noise(&signal, 20.0, &cfg, 1).unwrap();
        let mut spec = noise.samples.clone();
        dsp::fft(&mut spec);
        for (k, x) in spec.iter().enumerate() {
            if dsp::bin_frequency(k, 4096, 160e9).abs() > 50e9 {
                assert!(x.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn photodetect_constant_field() {
        let cfg = LinkConfig::default();
        let field = OpticalField {
            samples: vec![Complex64::new(0.7, 0.1); 512],
            rate: 160e9,
        };
        let w = photodetect(&field, &cfg);
        assert!(w.samples.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn photodetect_beat_tone() {
        let cfg = LinkConfig::default();
        let (n, rate) = (1600usize, 160e9);
        let f = 10e9;
        let field = OpticalField {
            samples: (0..n)
                .map(|i| {
                    Complex64::new(1.0, 0.0)
                        + Complex64::from_polar(0.1, 2.0 * PI * f * i as f64 / rate)
                })
                .collect(),
            rate,
        };
        let w = photodetect(&field, &cfg);
        let k = (f * n as f64 / rate) as usize;
        assert!((tone_amplitude(&w.samples, k) - 0.2).abs() < 1e-9);
        let spec = dsp::fft_real(&w.samples);
        let other: f64 = spec
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k && *i != n - k)
            .map(|(_, x)| x.norm_sqr())
            .sum();
        assert!(other < 1e-20);
    }

    #[test]
    fn photodetect_respects_bandwidth() {
        let cfg = LinkConfig {
            pd_bandwidth: 20e9,
            ..LinkConfig::default()
        };
        let (n, rate) = (1600usize, 160e9);
        let field = OpticalField {
            samples: (0..n)
                .map(|i| {
                    Complex64::new(1.0, 0.0)
                        + Complex64::from_polar(0.1, 2.0 * PI * 30e9 * i as f64 / rate)
                })
                .collect(),
            rate,
        };
        let w = photodetect(&field, &cfg);
        assert!(w.samples.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn resample_identity_is_exact() {
        let w = ElectricalWaveform {
            samples: vec![0.1, -0.4, 0.3],
            rate: 64e9,
        };
        assert_eq!(resample(&w, 64e9).unwrap(), w);
    }

    #[test]
    fn resample_rejects_unsupported_ratios() {
        let w = ElectricalWaveform {
            samples: vec![0.0; 10],
            rate: 64e9,
        };
        assert!(resample(&w, 80e9).is_err()); // 10 * 5/4 is fractional
        assert!(resample(&w, 64.5).is_err());
        let w = ElectricalWaveform {
            samples: vec![0.0; 10],
            rate: 1.5,
        };
        assert!(resample(&w, 3.0).is_err());
    }

    #[test]
    fn resample_round_trip() {
        let n = 2048;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Random band-limited signal with energy up to and including Nyquist.
        let mut spec: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        for k in 1..n / 2 {
            spec[k] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            spec[n - k] = spec[k].conj();
        }
        spec[n / 2] = Complex64::new(0.4, 0.0);
        dsp::ifft(&mut spec);
        let x = ElectricalWaveform {
            samples: spec.iter().map(|v| v.re).collect(),
            rate: 64e9,
        };
        let up = resample(&x, 80e9).unwrap();
        assert_eq!(up.samples.len(), 2560);
        let back = resample(&up, 64e9).unwrap();
        let err = x
            .samples
            .iter()
            .zip(&back.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn resample_preserves_tone() {
        let n = 4096;
        let x = ElectricalWaveform {
            samples: tone(n, 64e9, 10e9, 0.8, 0.3),
            rate: 64e9,
        };
        for target in [80e9, 160e9] {
            let y = resample(&x, target).unwrap();
            let expected = tone(y.samples.len(), target, 10e9, 0.8, 0.3);
            let err = y
                .samples
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-6 * 0.8, "{target}: {err}");
        }
    }
}
