//! Closed-form fading oracle and helpers for reading loading tables and SNR
//! profiles.

use crate::channel::{LinkConfig, SPEED_OF_LIGHT};
use crate::modem::DmtConfig;

/// Small-signal electrical response of chirp-free DSB intensity modulation
/// after dispersion: `|cos(pi lambda^2 D L f^2 / c)|`.
pub fn analytic_fading(f: f64, link: &LinkConfig) -> f64 {
    let lambda = link.wavelength();
    let phase = std::f64::consts::PI * lambda * lambda * link.dispersion * link.fiber_len * f * f
        / SPEED_OF_LIGHT;
    phase.cos().abs()
}

/// Frequencies of the fading nulls below `f_max`:
/// `f_n = sqrt((2n - 1) c / (2 lambda^2 D L))`.
pub fn fading_nulls(link: &LinkConfig, f_max: f64) -> Vec<f64> {
    let lambda = link.wavelength();
    let dl = link.dispersion.abs() * link.fiber_len;
    if dl == 0.0 {
        return Vec::new();
    }
    (1..)
        .map(|n: u32| (f64::from(2 * n - 1) * SPEED_OF_LIGHT / (2.0 * lambda * lambda * dl)).sqrt())
        .take_while(|&f| f <= f_max)
        .collect()
}

/// Index of the smallest value of `values` within `[lo, hi]` (inclusive).
pub fn argmin_in(values: &[f64], lo: usize, hi: usize) -> Option<usize> {
    let hi = hi.min(values.len().checked_sub(1)?);
    (lo..=hi).min_by(|&a, &b| values[a].total_cmp(&values[b]))
}

/// Frequency of the deepest SNR dip within `+-window` (relative) of
/// `expected`, with carrier `i` at `dmt.carrier_frequency(i + 1)`.
pub fn locate_dip(snr_db: &[f64], dmt: &DmtConfig, expected: f64, window: f64) -> Option<f64> {
    let spacing = dmt.carrier_frequency(1);
    let lo = ((expected * (1.0 - window) / spacing).floor() as usize).max(1) - 1;
    let hi = ((expected * (1.0 + window) / spacing).ceil() as usize).saturating_sub(1);
    argmin_in(snr_db, lo, hi).map(|i| dmt.carrier_frequency(i + 1))
}

/// Fading notches in a bit allocation: maximal runs of at least `min_width`
/// carriers whose load sits two or more bits below the 90th-percentile load,
/// with loaded carriers on both sides.
pub fn count_notches(bits: &[u8], min_width: usize) -> usize {
    notch_ranges(bits, min_width).len()
}

/// Carrier index ranges (`start..end`, zero-based) of the notches counted by
/// [`count_notches`].
pub fn notch_ranges(bits: &[u8], min_width: usize) -> Vec<std::ops::Range<usize>> {
    if bits.is_empty() {
        return Vec::new();
    }
    let mut sorted = bits.to_vec();
    sorted.sort_unstable();
    let reference = sorted[(sorted.len() - 1) * 9 / 10];
    let Some(ceiling) = reference.checked_sub(2) else {
        return Vec::new();
    };
    let low: Vec<bool> = bits.iter().map(|&b| b <= ceiling).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < low.len() {
        if !low[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < low.len() && low[i] {
            i += 1;
        }
        let interior = start > 0 && i < low.len();
        if interior && i - start >= min_width {
            out.push(start..i);
        }
    }
    out
}

/// Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Mean load of carriers below and above `f_split`.
pub fn mean_bits_split(bits: &[u8], dmt: &DmtConfig, f_split: f64) -> (f64, f64) {
    let (mut lo, mut n_lo, mut hi, mut n_hi) = (0.0, 0usize, 0.0, 0usize);
    for (i, &b) in bits.iter().enumerate() {
        if dmt.carrier_frequency(i + 1) < f_split {
            lo += f64::from(b);
            n_lo += 1;
        } else {
            hi += f64::from(b);
            n_hi += 1;
        }
    }
    (lo / n_lo.max(1) as f64, hi / n_hi.max(1) as f64)
}
