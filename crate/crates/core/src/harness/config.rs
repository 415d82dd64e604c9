use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::channel::LinkConfig;
use crate::error::{DmtError, Result};
use crate::modem::DmtConfig;

/// Pre-FEC BER below which a 7% hard-decision FEC decodes error free.
pub const HD_FEC_THRESHOLD: f64 = 4e-3;
/// Pre-FEC BER threshold of the soft-decision FEC.
pub const SD_FEC_THRESHOLD: f64 = 1.9e-2;
/// Counted bits per point below which a BER is flagged low-confidence.
pub const DEFAULT_MIN_BITS: u64 = 100_000;

/// One sweep point: a target OSNR in dB, or noise loading switched off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OsnrPoint {
    Off,
    Db(f64),
}

impl OsnrPoint {
    pub fn as_option(self) -> Option<f64> {
        match self {
            OsnrPoint::Off => None,
            OsnrPoint::Db(v) => Some(v),
        }
    }

    /// Parses `off` or a comma-separated list such as `25,26,27` or `25:40`
    /// (inclusive range on a 1 dB grid).
    pub fn parse_list(text: &str) -> Result<Vec<OsnrPoint>> {
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some((lo, hi)) = item.split_once(':') {
                let lo: f64 = parse_db(lo)?;
                let hi: f64 = parse_db(hi)?;
                if hi < lo {
                    return Err(DmtError::InvalidConfig(format!("empty OSNR range {item}")));
                }
                let steps = (hi - lo).floor() as usize;
                out.extend((0..=steps).map(|i| OsnrPoint::Db(lo + i as f64)));
            } else {
                out.push(item.parse()?);
            }
        }
        Ok(out)
    }
}

fn parse_db(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DmtError::InvalidConfig(format!("cannot parse OSNR value {s:?}")))
}

impl std::str::FromStr for OsnrPoint {
    type Err = DmtError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("off") {
            Ok(OsnrPoint::Off)
        } else {
            parse_db(s).map(OsnrPoint::Db)
        }
    }
}

impl fmt::Display for OsnrPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OsnrPoint::Off => f.write_str("off"),
            OsnrPoint::Db(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for OsnrPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OsnrPoint::Off => s.serialize_str("off"),
            OsnrPoint::Db(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for OsnrPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl Visitor<'_> for PointVisitor {
            type Value = OsnrPoint;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an OSNR in dB or \"off\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<OsnrPoint, E> {
                Ok(OsnrPoint::Db(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<OsnrPoint, E> {
                Ok(OsnrPoint::Db(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<OsnrPoint, E> {
                Ok(OsnrPoint::Db(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<OsnrPoint, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(PointVisitor)
    }
}

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Gross line rate including training overhead, Gb/s.
    pub rate_gbps: f64,
    pub osnr_points: Vec<OsnrPoint>,
    /// Frames simulated per point (more are added to reach `min_bits`).
    pub n_frames: usize,
    pub min_bits: u64,
    /// Target BER from which the loading gap is derived.
    pub target_ber: f64,
    /// Explicit loading gap in dB; overrides `target_ber`.
    pub gap_db: Option<f64>,
    pub seed: u64,
    /// Output directory. Not part of the fingerprint.
    #[serde(skip_serializing)]
    pub output_path: Option<PathBuf>,
    pub dmt: DmtConfig,
    pub link: LinkConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            rate_gbps: 56.0,
            osnr_points: (25..=40).map(|v| OsnrPoint::Db(f64::from(v))).collect(),
            n_frames: 1,
            min_bits: DEFAULT_MIN_BITS,
            target_ber: HD_FEC_THRESHOLD,
            gap_db: None,
            seed: 1,
            output_path: None,
            dmt: DmtConfig::default(),
            link: LinkConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| DmtError::InvalidConfig(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.dmt.validate()?;
        self.link.validate()?;
        if self.n_frames == 0 {
            return Err(DmtError::InvalidConfig(
                "n_frames must be at least 1".into(),
            ));
        }
        if !(self.rate_gbps > 0.0 && self.rate_gbps.is_finite()) {
            return Err(DmtError::InvalidConfig(format!(
                "rate {} Gb/s",
                self.rate_gbps
            )));
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(DmtError::InvalidConfig(format!(
                "target BER {}",
                self.target_ber
            )));
        }
        if self.link.fiber_len > 0.0 && self.dmt.dac_rate > self.link.optical_rate {
            return Err(DmtError::InvalidConfig(
                "optical simulation rate below the DAC rate".into(),
            ));
        }
        Ok(())
    }

    /// Bits per DMT symbol for the configured gross rate.
    pub fn target_bits(&self) -> usize {
        self.dmt.bits_for_rate(self.rate_gbps * 1e9)
    }

    /// Short stable hash of the serialized configuration.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
