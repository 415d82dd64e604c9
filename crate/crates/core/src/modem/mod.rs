//! DMT transmitter and receiver.
//!
//! A frame is `frame_len` cyclic-prefixed symbols: one Schmidl-Cox
//! synchronization symbol, `n_ts - 1` channel-estimation symbols, then the
//! payload. Carrier `k` (`1..=n_modulated`) sits in FFT bin `k`; the upper
//! half of the spectrum mirrors it so the time signal is real.

mod rx;
mod sync;
mod tx;

use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};
use crate::loading::LoadingTable;

pub use rx::{
    demodulate_frame, estimate_channel, extract_carriers, receive_frame, ChannelEstimate,
    Demodulated, ReceivedFrame,
};
pub use sync::{locate_frame, schmidl_cox_locate, timing_metric};
pub use tx::{
    assemble_spectrum, build_frame, clip, clip_with_rms, dmt_modulate, hermitian_spectrum,
    DmtFrame, TrainingSymbols,
};

/// Framing constants of the modem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DmtConfig {
    pub fft_size: usize,
    pub cp_len: usize,
    pub n_usable: usize,
    pub n_modulated: usize,
    /// Transmit (DAC) sample rate in samples/s.
    pub dac_rate: f64,
    /// Capture (oscilloscope) sample rate in samples/s.
    pub adc_rate: f64,
    pub clip_ratio_db: f64,
    /// Symbols per frame including training symbols.
    pub frame_len: usize,
    pub n_ts: usize,
    /// Decision-directed channel tracking step.
    pub dd_alpha: f64,
    /// Plateau level of the timing metric, as a fraction of its peak.
    pub sync_plateau: f64,
    /// Minimum timing-metric peak accepted as a frame.
    pub sync_threshold: f64,
}

impl Default for DmtConfig {
    fn default() -> Self {
        Self {
            fft_size: 2048,
            cp_len: 32,
            n_usable: 1023,
            n_modulated: 852,
            dac_rate: 64e9,
            adc_rate: 80e9,
            clip_ratio_db: 12.0,
            frame_len: 124,
            n_ts: 5,
            dd_alpha: 0.1,
            sync_plateau: 0.9,
            sync_threshold: 0.3,
        }
    }
}

impl DmtConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DmtError::InvalidConfig(msg));
        if !self.fft_size.is_power_of_two() || self.fft_size < 8 {
            return bad(format!(
                "FFT size {} must be a power of two >= 8",
                self.fft_size
            ));
        }
        if self.cp_len >= self.fft_size {
            return bad(format!("cyclic prefix {} exceeds FFT size", self.cp_len));
        }
        if self.n_usable > self.fft_size / 2 - 1 {
            return bad(format!(
                "{} usable carriers do not fit a {}-point FFT",
                self.n_usable, self.fft_size
            ));
        }
        if self.n_modulated == 0 || self.n_modulated > self.n_usable {
            return bad(format!(
                "modulated carriers {} must lie in 1..={}",
                self.n_modulated, self.n_usable
            ));
        }
        if self.n_ts < 2 || self.frame_len <= self.n_ts {
            return bad(format!(
                "frame of {} symbols cannot hold {} training symbols plus payload",
                self.frame_len, self.n_ts
            ));
        }
        if !(self.dac_rate > 0.0 && self.adc_rate > 0.0) {
            return bad("sample rates must be positive".into());
        }
        if !(self.clip_ratio_db > 0.0) {
            return bad(format!(
                "clipping ratio {} dB must be positive",
                self.clip_ratio_db
            ));
        }
        if !(self.dd_alpha > 0.0 && self.dd_alpha <= 1.0) {
            return bad(format!("tracking step {} outside (0, 1]", self.dd_alpha));
        }
        if !(self.sync_plateau > 0.0 && self.sync_plateau < 1.0)
            || !(self.sync_threshold > 0.0 && self.sync_threshold < 1.0)
        {
            return bad("sync plateau and threshold must lie in (0, 1)".into());
        }
        Ok(())
    }

    pub fn symbol_len(&self) -> usize {
        self.fft_size + self.cp_len
    }

    pub fn frame_samples(&self) -> usize {
        self.frame_len * self.symbol_len()
    }

    pub fn n_payload(&self) -> usize {
        self.frame_len - self.n_ts
    }

    /// Frequency of carrier `k` in Hz.
    pub fn carrier_frequency(&self, k: usize) -> f64 {
        k as f64 * self.dac_rate / self.fft_size as f64
    }

    /// Bits per DMT symbol needed for a gross line rate (training included).
    pub fn bits_for_rate(&self, rate_bps: f64) -> usize {
        (rate_bps * self.symbol_len() as f64 / self.dac_rate).round() as usize
    }

    /// Payload bits carried by one frame under `loading`.
    pub fn payload_bits(&self, loading: &LoadingTable) -> usize {
        self.n_payload() * loading.bits_per_symbol()
    }

    pub(crate) fn check_loading(&self, loading: &LoadingTable) -> Result<()> {
        if loading.n_carriers() != self.n_modulated {
            return Err(DmtError::Framing(format!(
                "loading table covers {} carriers, modem modulates {}",
                loading.n_carriers(),
                self.n_modulated
            )));
        }
        loading.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let cfg = DmtConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.cp_len, cfg.fft_size / 64);
        assert_eq!(cfg.symbol_len(), 2080);
        assert_eq!(cfg.frame_samples(), 257_920);
        assert_eq!(cfg.n_payload(), 119);
    }

    #[test]
    fn rate_arithmetic() {
        let cfg = DmtConfig::default();
        assert_eq!(cfg.bits_for_rate(56e9), 1820);
        assert_eq!(cfg.bits_for_rate(112e9), 3640);
        assert_eq!(cfg.bits_for_rate(200e9), 6500);
        assert!((cfg.carrier_frequency(852) - 26.625e9).abs() < 1.0);
    }

    #[test]
    fn rejects_bad_framing() {
        let mut cfg = DmtConfig {
            n_ts: 124,
            ..DmtConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.n_ts = 1;
        assert!(cfg.validate().is_err());
        let cfg = DmtConfig {
            n_modulated: 1000,
            n_usable: 1024,
            ..DmtConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = DmtConfig {
            fft_size: 2000,
            ..DmtConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
