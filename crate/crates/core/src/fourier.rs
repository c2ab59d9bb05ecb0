//! Envelope transforms in the optics sign convention.
//!
//! The spectrum of an envelope is `Ã(ω) = ∫ A(t) exp(+iωt) dt`, so a time
//! derivative becomes multiplication by `-iω` and a positive `ω` is a
//! component above the carrier. Both directions here are unscaled DFTs;
//! callers apply `dt` or `1/n` as needed.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned forward/backward pair for one transform length.
#[derive(Clone)]
pub(crate) struct Transform {
    to_freq: Arc<dyn Fft<f64>>,
    to_time: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl Transform {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        // rustfft's inverse carries exp(+i), which is our time -> frequency.
        let to_freq = planner.plan_fft_inverse(n);
        let to_time = planner.plan_fft_forward(n);
        let scratch_len = to_freq
            .get_inplace_scratch_len()
            .max(to_time.get_inplace_scratch_len());
        Transform {
            to_freq,
            to_time,
            scratch_len,
        }
    }

    pub(crate) fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len]
    }

    /// Σ_j a_j exp(+2πi jk/n), in place.
    pub(crate) fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.to_freq.process_with_scratch(data, scratch);
    }

    /// (1/n) Σ_k a_k exp(-2πi jk/n), in place.
    pub(crate) fn backward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.to_time.process_with_scratch(data, scratch);
        let inv = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|x| *x *= inv);
    }
}

/// Angular frequency offset (rad/s) of each DFT bin in natural order.
pub(crate) fn angular_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let df = 1.0 / (n as f64 * dt);
    (0..n)
        .map(|k| {
            let k = if k < n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            2.0 * std::f64::consts::PI * k * df
        })
        .collect()
}

/// Index permutation putting bins in ascending frequency order.
pub(crate) fn ascending_order(n: usize) -> impl Iterator<Item = usize> {
    (n / 2..n).chain(0..n / 2)
}
