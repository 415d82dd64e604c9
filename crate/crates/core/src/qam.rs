//! Gray-labeled QAM alphabets for 1 to 7 bits per symbol.
//!
//! Even orders (and BPSK) are square constellations built from two
//! independent Gray-coded PAM axes. The first half of the label drives the
//! in-phase axis, the second half the quadrature axis, and a `0` bit selects
//! the positive half-plane on its axis.
//!
//! 8-QAM is a 4x2 rectangle. 32- and 128-QAM are cross constellations
//! obtained from a Gray-labeled rectangle whose outermost in-phase columns
//! are folded onto new quadrature rows; the fold keeps most neighbor pairs
//! at Hamming distance 1, but perfect Gray labeling is impossible there.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{DmtError, Result};

/// Largest supported order in bits per symbol.
pub const MAX_ORDER: u8 = 7;

/// A unit-energy constellation indexed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order_bits: u8,
    /// `points[label]` is the symbol carrying `label`.
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn order_bits(&self) -> u8 {
        self.order_bits
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Labels in point order; label `i` belongs to `points()[i]`.
    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.points.len() as u32
    }

    pub fn point(&self, label: u32) -> Complex64 {
        self.points[label as usize]
    }

    /// Nearest point by Euclidean distance. Exact ties resolve to the
    /// smallest label.
    pub fn nearest_label(&self, y: Complex64) -> u32 {
        let mut best = 0u32;
        let mut best_d = (y - self.points[0]).norm_sqr();
        for (label, p) in self.points.iter().enumerate().skip(1) {
            let d = (y - p).norm_sqr();
            // Treat distances equal to within rounding as ties.
            if d < best_d - 1e-12 * best_d {
                best_d = d;
                best = label as u32;
            }
        }
        best
    }
}

/// Builds the Gray-labeled constellation for `m` bits per symbol.
pub fn build_constellation(m: u8) -> Result<Constellation> {
    if !(1..=MAX_ORDER).contains(&m) {
        return Err(DmtError::InvalidOrder(m));
    }
    let raw: Vec<(i32, i32)> = match m {
        1 => vec![(1, 0), (-1, 0)],
        3 => rectangular(2, 1),
        5 | 7 => cross(m),
        _ => rectangular(m / 2, m / 2),
    };
    let energy = raw
        .iter()
        .map(|&(i, q)| f64::from(i * i + q * q))
        .sum::<f64>()
        / raw.len() as f64;
    let scale = energy.sqrt().recip();
    let points = raw
        .into_iter()
        .map(|(i, q)| Complex64::new(f64::from(i) * scale, f64::from(q) * scale))
        .collect();
    Ok(Constellation {
        order_bits: m,
        points,
    })
}

/// Cached constellation table for order `m`.
pub fn constellation(m: u8) -> Result<&'static Constellation> {
    static TABLES: OnceLock<Vec<Constellation>> = OnceLock::new();
    if !(1..=MAX_ORDER).contains(&m) {
        return Err(DmtError::InvalidOrder(m));
    }
    let tables = TABLES.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|m| build_constellation(m).expect("orders 1..=7 are valid"))
            .collect()
    });
    Ok(&tables[usize::from(m - 1)])
}

/// Maps an MSB-first bit slice onto its constellation point.
pub fn map_bits(bits: &[u8], m: u8) -> Result<Complex64> {
    let table = constellation(m)?;
    if bits.len() != usize::from(m) {
        return Err(DmtError::Framing(format!(
            "expected {m} bits for one symbol, got {}",
            bits.len()
        )));
    }
    Ok(table.point(bits_to_label(bits)))
}

/// Hard decision: label of the nearest point, MSB first.
pub fn demap_hard(y: Complex64, m: u8) -> Result<Vec<u8>> {
    let table = constellation(m)?;
    let mut out = Vec::with_capacity(usize::from(m));
    push_label_bits(table.nearest_label(y), m, &mut out);
    Ok(out)
}

pub(crate) fn bits_to_label(bits: &[u8]) -> u32 {
    bits.iter()
        .fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1))
}

pub(crate) fn push_label_bits(label: u32, m: u8, out: &mut Vec<u8>) {
    for shift in (0..m).rev() {
        out.push(((label >> shift) & 1) as u8);
    }
}

fn gray_decode(mut g: u32) -> u32 {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

/// Amplitude of a Gray-coded PAM level: code 0 sits at the positive extreme.
fn pam_level(code: u32, bits: u8) -> i32 {
    let levels = 1i32 << bits;
    levels - 1 - 2 * gray_decode(code) as i32
}

fn rectangular(i_bits: u8, q_bits: u8) -> Vec<(i32, i32)> {
    let m = i_bits + q_bits;
    (0..1u32 << m)
        .map(|label| {
            let i_code = label >> q_bits;
            let q_code = label & ((1 << q_bits) - 1);
            (pam_level(i_code, i_bits), pam_level(q_code, q_bits))
        })
        .collect()
}

fn cross(m: u8) -> Vec<(i32, i32)> {
    let q_bits = (m - 1) / 2;
    let q_max = (1i32 << q_bits) - 1;
    // Number of extra quadrature rows each side of the rectangle.
    let extra = 1i32 << (q_bits - 2);
    let i_keep = q_max + 2 * extra;
    rectangular(q_bits + 1, q_bits)
        .into_iter()
        .map(|(i, q)| {
            if i.abs() <= i_keep {
                (i, q)
            } else {
                let column = (i.abs() - i_keep - 1) / 2;
                (
                    i.signum() * q.abs(),
                    q.signum() * (q_max + 2 * (column + 1)),
                )
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn all_bits(m: u8) -> Vec<Vec<u8>> {
        (0..1u32 << m)
            .map(|label| {
                let mut v = Vec::new();
                push_label_bits(label, m, &mut v);
                v
            })
            .collect()
    }

    #[test]
    fn rejects_out_of_range_orders() {
        assert_eq!(build_constellation(0), Err(DmtError::InvalidOrder(0)));
        assert_eq!(build_constellation(8), Err(DmtError::InvalidOrder(8)));
        assert!(map_bits(&[0; 8], 8).is_err());
    }

    #[test]
    fn qpsk_convention() {
        let p = map_bits(&[0, 0], 2).unwrap();
        assert!((p - Complex64::new(SQRT2_INV, SQRT2_INV)).norm() < 1e-15);
        let p = map_bits(&[1, 0], 2).unwrap();
        assert!((p - Complex64::new(-SQRT2_INV, SQRT2_INV)).norm() < 1e-15);
        let p = map_bits(&[0, 1], 2).unwrap();
        assert!((p - Complex64::new(SQRT2_INV, -SQRT2_INV)).norm() < 1e-15);
    }

    #[test]
    fn qam16_grid_scaling() {
        let c = build_constellation(4).unwrap();
        let s = 10f64.sqrt();
        for p in c.points() {
            let (i, q) = (p.re * s, p.im * s);
            assert!([-3.0, -1.0, 1.0, 3.0].iter().any(|l| (l - i).abs() < 1e-12));
            assert!([-3.0, -1.0, 1.0, 3.0].iter().any(|l| (l - q).abs() < 1e-12));
        }
    }

    #[test]
    fn bpsk_is_real() {
        for bits in all_bits(1) {
            let p = map_bits(&bits, 1).unwrap();
            assert_eq!(p.im, 0.0);
            assert!((p.re.abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn point_counts_and_unit_energy() {
        for m in 1..=MAX_ORDER {
            let c = build_constellation(m).unwrap();
            assert_eq!(c.size(), 1 << m);
            let e = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.size() as f64;
            assert!((e - 1.0).abs() < 1e-12, "m={m} energy {e}");
            // distinct points
            for (a, pa) in c.points().iter().enumerate() {
                for pb in &c.points()[a + 1..] {
                    assert!((pa - pb).norm() > 1e-6);
                }
            }
        }
    }

    #[test]
    fn cross_shapes() {
        // 32-QAM: 6x6 grid without corners; 128-QAM: 12x12 without 2x2 corners.
        for (m, max_level, corner) in [(5u8, 5, 5), (7, 11, 9)] {
            let c = build_constellation(m).unwrap();
            let scale = {
                let e: f64 = cross(m)
                    .iter()
                    .map(|&(i, q)| f64::from(i * i + q * q))
                    .sum::<f64>()
                    / f64::from(1u32 << m);
                e.sqrt()
            };
            for p in c.points() {
                let i = (p.re * scale).round() as i32;
                let q = (p.im * scale).round() as i32;
                assert!(i.abs() <= max_level && q.abs() <= max_level);
                assert!(
                    !(i.abs() >= corner && q.abs() >= corner),
                    "corner point {i},{q}"
                );
                assert!(i % 2 != 0 && q % 2 != 0);
            }
        }
    }

    #[test]
    fn gray_neighbors_square() {
        for m in [1u8, 2, 4, 6] {
            let c = build_constellation(m).unwrap();
            let pts = c.points();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(a, pa)| pts[a + 1..].iter().map(move |pb| (pa - pb).norm()))
                .fold(f64::INFINITY, f64::min);
            for (a, pa) in pts.iter().enumerate() {
                for (b, pb) in pts.iter().enumerate().skip(a + 1) {
                    if (pa - pb).norm() < dmin * (1.0 + 1e-9) {
                        assert_eq!((a ^ b).count_ones(), 1, "m={m} labels {a:b} {b:b}");
                    }
                }
            }
        }
    }

    #[test]
    fn demap_examples() {
        let y = Complex64::new(0.9, 1.1) * SQRT2_INV;
        assert_eq!(demap_hard(y, 2).unwrap(), vec![0, 0]);
        for m in 1..=MAX_ORDER {
            for bits in all_bits(m) {
                let p = map_bits(&bits, m).unwrap();
                assert_eq!(demap_hard(p, m).unwrap(), bits);
            }
        }
    }

    #[test]
    fn demap_tie_prefers_smaller_label() {
        // Midway between the +3 and +1 in-phase levels of 16-QAM.
        let s = 10f64.sqrt().recip();
        let y = Complex64::new(2.0 * s, 3.0 * s);
        let (a, b) = (
            map_bits(&[0, 0, 0, 0], 4).unwrap(),
            map_bits(&[0, 1, 0, 0], 4).unwrap(),
        );
        assert!(((y - a).norm() - (y - b).norm()).abs() < 1e-12);
        assert_eq!(demap_hard(y, 4).unwrap(), vec![0, 0, 0, 0]);
        // Origin is equidistant from the four inner points.
        assert_eq!(
            demap_hard(Complex64::new(0.0, 0.0), 4).unwrap(),
            vec![0, 1, 0, 1]
        );
    }

    #[test]
    fn framing_error_on_length_mismatch() {
        assert!(matches!(map_bits(&[0, 1, 0], 2), Err(DmtError::Framing(_))));
    }

    #[test]
    fn symmetric_under_negation_and_conjugation() {
        for m in 1..=MAX_ORDER {
            let c = build_constellation(m).unwrap();
            let contains = |z: Complex64| c.points().iter().any(|p| (p - z).norm() < 1e-12);
            for p in c.points() {
                assert!(contains(-p), "m={m}");
                assert!(contains(p.conj()), "m={m}");
            }
        }
    }

    #[test]
    fn empirical_unit_energy() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in 1..=MAX_ORDER {
            let c = constellation(m).unwrap();
            let n = 1_000_000;
            let e: f64 = (0..n)
                .map(|_| c.point(rng.random_range(0..c.size() as u32)).norm_sqr())
                .sum::<f64>()
                / n as f64;
            assert!((e - 1.0).abs() < 0.01, "m={m} e={e}");
        }
    }

    proptest! {
        #[test]
        fn roundtrip(m in 1u8..=7, seed in any::<u32>()) {
            let label = seed & ((1u32 << m) - 1);
            let mut bits = Vec::new();
            push_label_bits(label, m, &mut bits);
            let p = map_bits(&bits, m).unwrap();
            prop_assert_eq!(demap_hard(p, m).unwrap(), bits);
        }

        #[test]
        fn small_perturbation_keeps_decision(m in 1u8..=7, label in any::<u32>(), dx in -0.01f64..0.01, dy in -0.01f64..0.01) {
            let label = label & ((1u32 << m) - 1);
            let c = constellation(m).unwrap();
            let y = c.point(label) + Complex64::new(dx, dy);
            prop_assert_eq!(c.nearest_label(y), label);
        }
    }
}
