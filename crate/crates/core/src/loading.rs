//! Channel-adaptive bit and power loading.
//!
//! Loading uses the QAM gap approximation: a carrier with linear SNR `snr`
//! needs energy `E(b) = gap * (2^b - 1) / snr` to carry `b` bits at the
//! target error rate. Bits are granted greedily (Levin-Campello) to the
//! carrier with the cheapest next bit, and power is then redistributed so
//! that every loaded carrier runs at the same margin.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{DmtError, Result};
use crate::qam::MAX_ORDER;

/// Ceiling applied to estimated SNRs, in dB.
pub const SNR_CEILING_DB: f64 = 60.0;

/// Minimum number of probe symbols per carrier for SNR estimation.
pub const MIN_PROBE_SYMBOLS: usize = 32;

/// Linear SNR per modulated carrier; entry `i` is carrier `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrProfile {
    pub snr: Vec<f64>,
}

impl SnrProfile {
    pub fn new(snr: Vec<f64>) -> Result<Self> {
        if let Some(bad) = snr.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(DmtError::InvalidConfig(format!(
                "SNR entries must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self { snr })
    }

    pub fn len(&self) -> usize {
        self.snr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr.is_empty()
    }

    pub fn snr_db(&self) -> impl Iterator<Item = f64> + '_ {
        self.snr.iter().map(|s| 10.0 * s.log10())
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            snr: self.snr.iter().map(|s| s * factor).collect(),
        }
    }
}

/// Per-carrier bit counts and power scalings shared by transmitter and receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingTable {
    /// Bits per carrier, `0..=7`. Entry `i` is carrier `i + 1`.
    pub bits: Vec<u8>,
    /// Linear power scale per carrier; zero where no bits are loaded.
    pub power: Vec<f64>,
    pub target_bits: usize,
    pub gap_db: f64,
}

impl LoadingTable {
    /// Same order and unit power on every carrier; used for the probe frame.
    pub fn uniform(n_carriers: usize, bits: u8) -> Result<Self> {
        if bits > MAX_ORDER {
            return Err(DmtError::InvalidOrder(bits));
        }
        let power = if bits == 0 { 0.0 } else { 1.0 };
        Ok(Self {
            bits: vec![bits; n_carriers],
            power: vec![power; n_carriers],
            target_bits: n_carriers * usize::from(bits),
            gap_db: 0.0,
        })
    }

    pub fn n_carriers(&self) -> usize {
        self.bits.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits.iter().map(|&b| usize::from(b)).sum()
    }

    pub fn n_loaded(&self) -> usize {
        self.bits.iter().filter(|&&b| b > 0).count()
    }

    pub fn max_bits(&self) -> u8 {
        self.bits.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits.len() != self.power.len() {
            return Err(DmtError::Parse(format!(
                "{} bit entries but {} power entries",
                self.bits.len(),
                self.power.len()
            )));
        }
        for (k, (&b, &g)) in self.bits.iter().zip(&self.power).enumerate() {
            if b > MAX_ORDER {
                return Err(DmtError::InvalidOrder(b));
            }
            if !g.is_finite() || g < 0.0 {
                return Err(DmtError::Parse(format!("carrier {}: power {g}", k + 1)));
            }
            if b > 0 && g == 0.0 {
                return Err(DmtError::Parse(format!(
                    "carrier {} carries {b} bits at zero power",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// CSV form: `#`-comment header lines with the target and gap, then
    /// `carrier,bits,power` rows.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "# target_bits={}", self.target_bits);
        let _ = writeln!(out, "# gap_db={}", self.gap_db);
        out.push_str("carrier,bits,power\n");
        for (k, (b, g)) in self.bits.iter().zip(&self.power).enumerate() {
            let _ = writeln!(out, "{},{},{}", k + 1, b, g);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut target_bits = None;
        let mut gap_db = 0.0;
        let mut bits = Vec::new();
        let mut power = Vec::new();
        let mut saw_header = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("target_bits=") {
                    target_bits = Some(v.parse().map_err(|_| parse_err(line))?);
                } else if let Some(v) = comment.strip_prefix("gap_db=") {
                    gap_db = v.parse().map_err(|_| parse_err(line))?;
                }
                continue;
            }
            if !saw_header {
                if line != "carrier,bits,power" {
                    return Err(DmtError::Parse(format!("unexpected header {line:?}")));
                }
                saw_header = true;
                continue;
            }
            let mut fields = line.split(',');
            let (Some(c), Some(b), Some(g), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(parse_err(line));
            };
            let carrier: usize = c.trim().parse().map_err(|_| parse_err(line))?;
            if carrier != bits.len() + 1 {
                return Err(DmtError::Parse(format!(
                    "carrier {carrier} out of sequence (expected {})",
                    bits.len() + 1
                )));
            }
            bits.push(b.trim().parse().map_err(|_| parse_err(line))?);
            power.push(g.trim().parse().map_err(|_| parse_err(line))?);
        }
        if !saw_header {
            return Err(DmtError::Parse(
                "missing `carrier,bits,power` header".into(),
            ));
        }
        let total = bits.iter().map(|&b: &u8| usize::from(b)).sum();
        let table = Self {
            bits,
            power,
            target_bits: target_bits.unwrap_or(total),
            gap_db,
        };
        table.validate()?;
        Ok(table)
    }
}

fn parse_err(line: &str) -> DmtError {
    DmtError::Parse(format!("cannot parse line {line:?}"))
}

/// Data-aided per-carrier SNR: signal power over error-vector power.
///
/// Both slices are indexed `[symbol][carrier]`. Noiseless carriers are
/// clamped at [`SNR_CEILING_DB`].
pub fn estimate_snr_profile(
    equalized: &[Vec<Complex64>],
    known: &[Vec<Complex64>],
) -> Result<SnrProfile> {
    if equalized.len() != known.len() {
        return Err(DmtError::Framing(format!(
            "{} equalized symbols but {} reference symbols",
            equalized.len(),
            known.len()
        )));
    }
    if equalized.len() < MIN_PROBE_SYMBOLS {
        return Err(DmtError::InvalidConfig(format!(
            "SNR estimation needs at least {MIN_PROBE_SYMBOLS} probe symbols, got {}",
            equalized.len()
        )));
    }
    let n = known[0].len();
    let mut sig = vec![0.0; n];
    let mut err = vec![0.0; n];
    for (y, x) in equalized.iter().zip(known) {
        if y.len() != n || x.len() != n {
            return Err(DmtError::Framing("ragged probe symbol".into()));
        }
        for k in 0..n {
            sig[k] += x[k].norm_sqr();
            err[k] += (y[k] - x[k]).norm_sqr();
        }
    }
    let ceiling = 10f64.powf(SNR_CEILING_DB / 10.0);
    let snr = sig
        .iter()
        .zip(&err)
        .map(|(&s, &e)| if e * ceiling <= s { ceiling } else { s / e })
        .collect();
    SnrProfile::new(snr)
}

/// Energy needed to add bit number `b` on a carrier: `gap * 2^(b-1) / snr`.
///
/// A dead carrier (`snr == 0`) costs `+inf` and is never loaded.
pub fn incremental_energy(b: u8, snr: f64, gap: f64) -> f64 {
    debug_assert!((1..=MAX_ORDER).contains(&b));
    if snr <= 0.0 {
        return f64::INFINITY;
    }
    gap * f64::from(1u32 << (b - 1)) / snr
}

/// Energy of the whole allocation under the gap model, summed in carrier order.
pub fn total_energy(bits: &[u8], profile: &SnrProfile, gap: f64) -> f64 {
    bits.iter()
        .zip(&profile.snr)
        .map(|(&b, &snr)| {
            if b == 0 {
                0.0
            } else {
                gap * f64::from((1u32 << b) - 1) / snr
            }
        })
        .sum()
}

#[derive(Debug, PartialEq)]
struct Candidate {
    cost: f64,
    carrier: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // Reversed so the max-heap pops the cheapest bit, lowest carrier first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.carrier.cmp(&self.carrier))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy Levin-Campello bit allocation of exactly `target_bits` bits.
///
/// The returned table has unit power on loaded carriers; run
/// [`power_load`] afterwards for margin equalization.
pub fn bit_load(
    profile: &SnrProfile,
    target_bits: usize,
    gap_db: f64,
    b_max: u8,
) -> Result<LoadingTable> {
    if b_max == 0 || b_max > MAX_ORDER {
        return Err(DmtError::InvalidOrder(b_max));
    }
    let live = profile.snr.iter().filter(|&&s| s > 0.0).count();
    let max_achievable = live * usize::from(b_max);
    if target_bits > max_achievable {
        return Err(DmtError::InfeasibleRate {
            requested: target_bits,
            max_achievable,
        });
    }
    let gap = db_to_linear(gap_db);
    let mut bits = vec![0u8; profile.len()];
    let mut heap: BinaryHeap<Candidate> = profile
        .snr
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(carrier, &snr)| Candidate {
            cost: incremental_energy(1, snr, gap),
            carrier,
        })
        .collect();
    for _ in 0..target_bits {
        let Candidate { carrier, .. } = heap.pop().expect("feasibility checked above");
        bits[carrier] += 1;
        if bits[carrier] < b_max {
            heap.push(Candidate {
                cost: incremental_energy(bits[carrier] + 1, profile.snr[carrier], gap),
                carrier,
            });
        }
    }
    let power = bits
        .iter()
        .map(|&b| if b > 0 { 1.0 } else { 0.0 })
        .collect();
    Ok(LoadingTable {
        bits,
        power,
        target_bits,
        gap_db,
    })
}

/// Equal-margin power loading: each loaded carrier gets power proportional
/// to the energy its constellation needs, renormalized so the powers sum to
/// the number of loaded carriers.
pub fn power_load(table: &LoadingTable, profile: &SnrProfile) -> LoadingTable {
    let gap = db_to_linear(table.gap_db);
    let mut power: Vec<f64> = table
        .bits
        .iter()
        .zip(&profile.snr)
        .map(|(&b, &snr)| {
            if b == 0 || snr <= 0.0 {
                0.0
            } else {
                gap * f64::from((1u32 << b) - 1) / snr
            }
        })
        .collect();
    let sum: f64 = power.iter().sum();
    let loaded = table.n_loaded();
    if sum > 0.0 {
        let scale = loaded as f64 / sum;
        power.iter_mut().for_each(|g| *g *= scale);
    }
    LoadingTable {
        bits: table.bits.clone(),
        power,
        target_bits: table.target_bits,
        gap_db: table.gap_db,
    }
}

/// SNR gap (dB) for a target bit error ratio, from the square-QAM symbol
/// error bound `SER = 4 Q(sqrt(3 * snr / gap_snr))` with Gray mapping
/// (`SER ~ BER * bits_per_symbol`).
pub fn gap_from_ber(target_ber: f64, bits_per_symbol: u8) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return Err(DmtError::InvalidConfig(format!(
            "target BER must lie in (0, 0.5), got {target_ber}"
        )));
    }
    if bits_per_symbol == 0 {
        return Err(DmtError::InvalidOrder(0));
    }
    let ser = (target_ber * f64::from(bits_per_symbol)).min(0.999);
    let q_arg = ser / 4.0;
    let std_normal = Normal::standard();
    // Q^-1(p) = Phi^-1(1 - p)
    let q_inv = -std_normal.inverse_cdf(q_arg);
    Ok(linear_to_db(q_inv * q_inv / 3.0))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
