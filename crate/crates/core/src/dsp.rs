//! FFT helpers shared by the modem and channel models.
//!
//! Every transform here is unitary (scaled by `1/sqrt(n)` in both directions).

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    fft.process(buf);
    let scale = 1.0 / (n as f64).sqrt();
    for x in buf.iter_mut() {
        *x *= scale;
    }
}

pub fn fft(buf: &mut [Complex64]) {
    transform(buf, false);
}

pub fn ifft(buf: &mut [Complex64]) {
    transform(buf, true);
}

pub fn fft_real(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft(&mut buf);
    buf
}

/// Signed frequency of DFT bin `k` for a transform of length `n` at `rate`.
pub fn bin_frequency(k: usize, n: usize, rate: f64) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    if (k as usize) < n.div_ceil(2) {
        k * rate / n_f
    } else {
        (k - n_f) * rate / n_f
    }
}

pub fn mean_power(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64
}

pub fn mean_power_complex(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|x| x.norm_sqr()).sum::<f64>() / samples.len() as f64
}

pub fn rms(samples: &[f64]) -> f64 {
    mean_power(samples).sqrt()
}
