//! Complex pulse envelopes on a uniform time grid.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;
use std::io::BufRead;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{angular_frequencies, ascending_order, Transform};
use crate::spectral::{PowerSpectrum, SpectralGrid, SPEED_OF_LIGHT_CM_S};

/// `2 ln(1 + √2)`: ratio of the intensity FWHM of a sech pulse to its `t0`.
pub const SECH_FWHM_FACTOR: f64 = 1.762_747_174_039_086;

/// `n` samples spaced `dt` seconds apart, centred on `t = 0`
/// (sample `n/2` sits at zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    n: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        const OP: &str = "pulse::TimeGrid::new";
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::invalid(
                OP,
                format!("sample count must be a power of two >= 64, got {n}"),
            ));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(OP, format!("dt must be positive, got {dt}")));
        }
        Ok(TimeGrid { n, dt })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn window(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.time(j))
    }

    /// Spectral bin width in cm^-1.
    pub fn wavenumber_step(&self) -> f64 {
        1.0 / (self.window() * SPEED_OF_LIGHT_CM_S)
    }

    fn check_window(&self, duration: f64, op: &'static str) -> Result<()> {
        if self.window() <= 20.0 * duration {
            return Err(Error::invalid(
                op,
                format!(
                    "time window {:.3e} s must exceed 20x the pulse duration {:.3e} s",
                    self.window(),
                    duration
                ),
            ));
        }
        Ok(())
    }
}

/// Sampled complex envelope `A(t)` with `|A|²` in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    grid: TimeGrid,
    samples: Vec<Complex64>,
    center_wavelength: f64,
}

impl ComplexEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>, center_wavelength_um: f64) -> Result<Self> {
        const OP: &str = "pulse::ComplexEnvelope::new";
        if samples.len() != grid.n() {
            return Err(Error::invalid(
                OP,
                format!("{} samples for a grid of {}", samples.len(), grid.n()),
            ));
        }
        if !(1.0..=3.0).contains(&center_wavelength_um) {
            return Err(Error::invalid(
                OP,
                format!("center wavelength {center_wavelength_um} um outside 1.0-3.0 um"),
            ));
        }
        if samples
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::invalid(OP, "envelope contains non-finite samples"));
        }
        Ok(ComplexEnvelope {
            grid,
            samples,
            center_wavelength: center_wavelength_um,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn center_wavelength(&self) -> f64 {
        self.center_wavelength
    }

    pub fn center_wavenumber(&self) -> f64 {
        1.0e4 / self.center_wavelength
    }

    /// Carrier angular frequency in rad/s.
    pub fn carrier_angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT_CM_S * self.center_wavenumber()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn peak_power(&self) -> f64 {
        self.samples
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// `∫|A|² dt` in joules.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ComplexEnvelope {
            samples: self.samples.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        ComplexEnvelope {
            samples,
            ..self.clone()
        }
    }

    /// Spectrum `Ã` in natural DFT bin order, scaled by `dt` so that
    /// `Σ|Ã|² df` is the pulse energy.
    pub fn spectral_amplitude(&self) -> Vec<Complex64> {
        let t = Transform::new(self.grid.n);
        let mut data = self.samples.clone();
        t.forward(&mut data, &mut t.scratch());
        data.iter_mut().for_each(|x| *x *= self.grid.dt);
        data
    }

    /// `Σ|Ã|² df`, the frequency-side energy (J).
    pub fn spectral_energy(&self) -> f64 {
        let df = 1.0 / self.grid.window();
        self.spectral_amplitude()
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * df
    }

    /// CSV with columns `time_s,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,re,im\n");
        for (t, a) in self.grid.times().zip(&self.samples) {
            let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e}", a.re, a.im);
        }
        out
    }

    pub fn from_csv(reader: impl BufRead, center_wavelength_um: f64) -> Result<Self> {
        const OP: &str = "pulse::ComplexEnvelope::from_csv";
        let mut lines = reader.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "time_s,re,im" => {}
            _ => return Err(Error::invalid(OP, "missing or wrong header row")),
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::invalid(OP, e.to_string()))?;
            if v.len() != 3 {
                return Err(Error::invalid(OP, "expected three columns"));
            }
            times.push(v[0]);
            samples.push(Complex64::new(v[1], v[2]));
        }
        if times.len() < 2 {
            return Err(Error::invalid(OP, "need at least two rows"));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        let grid = TimeGrid::new(times.len(), dt)?;
        ComplexEnvelope::new(grid, samples, center_wavelength_um)
    }
}

/// `|A(t)|² = p_peak · exp(-4 ln2 · t²/t_fwhm²)`, flat phase.
pub fn gaussian_pulse(
    t_fwhm: f64,
    p_peak: f64,
    center_wavelength_um: f64,
    grid: TimeGrid,
) -> Result<ComplexEnvelope> {
    const OP: &str = "pulse::gaussian_pulse";
    if !(t_fwhm > 0.0 && p_peak > 0.0) {
        return Err(Error::invalid(
            OP,
            "duration and peak power must be positive",
        ));
    }
    grid.check_window(t_fwhm, OP)?;
    let amp = p_peak.sqrt();
    let samples = grid
        .times()
        .map(|t| Complex64::new(amp * (-2.0 * LN_2 * (t / t_fwhm).powi(2)).exp(), 0.0))
        .collect();
    ComplexEnvelope::new(grid, samples, center_wavelength_um)
}

/// `A(t) = √p0 · sech(t/t0)`.
pub fn sech_pulse(
    t0: f64,
    p0: f64,
    center_wavelength_um: f64,
    grid: TimeGrid,
) -> Result<ComplexEnvelope> {
    const OP: &str = "pulse::sech_pulse";
    if !(t0 > 0.0 && p0 > 0.0) {
        return Err(Error::invalid(OP, "t0 and peak power must be positive"));
    }
    grid.check_window(SECH_FWHM_FACTOR * t0, OP)?;
    let amp = p0.sqrt();
    let samples = grid
        .times()
        .map(|t| Complex64::new(amp / (t / t0).cosh(), 0.0))
        .collect();
    ComplexEnvelope::new(grid, samples, center_wavelength_um)
}

/// Peak power of a Gaussian pulse of the given energy and intensity FWHM.
pub fn gaussian_peak_power(energy: f64, t_fwhm: f64) -> f64 {
    energy / (t_fwhm * (PI / (4.0 * LN_2)).sqrt())
}

/// Power spectrum of the envelope on the wavenumber grid implied by the
/// time grid, centred on the carrier, normalized to the quasi-cw average
/// power `avg_power_mw` (mW).
///
/// Before normalization the density is the energy spectral density times
/// `f_rep`, so for a correctly scaled envelope the normalization is a no-op.
/// Bins at or below zero wavenumber are dropped.
pub fn to_spectrum(e: &ComplexEnvelope, avg_power_mw: f64, f_rep: f64) -> Result<PowerSpectrum> {
    const OP: &str = "pulse::to_spectrum";
    if !(avg_power_mw > 0.0 && f_rep > 0.0) {
        return Err(Error::invalid(
            OP,
            "average power and repetition rate must be positive",
        ));
    }
    let n = e.grid.n;
    let spec = e.spectral_amplitude();
    let step = e.grid.wavenumber_step();
    let nu0 = e.center_wavenumber();
    let first_nu = nu0 - (n / 2) as f64 * step;

    // J/Hz -> J per cm^-1 -> W per cm^-1 -> μW per cm^-1
    let scale = SPEED_OF_LIGHT_CM_S * f_rep * 1e6;
    let skip = if first_nu > 0.0 {
        0
    } else {
        ((-first_nu) / step).floor() as usize + 1
    };
    let density: Vec<f64> = ascending_order(n)
        .skip(skip)
        .map(|k| spec[k].norm_sqr() * scale)
        .collect();
    let grid = SpectralGrid::new(first_nu + skip as f64 * step, step, density.len())?;
    PowerSpectrum::new(grid, density)?
        .normalized_to(avg_power_mw * 1e3)
        .map_err(|_| Error::invalid(OP, "envelope carries no energy"))
}

/// Applies the spectral phase `exp(i·gdd·ω²/2)` about the carrier. `gdd`
/// in s².
pub fn apply_chirp(e: &ComplexEnvelope, gdd: f64) -> ComplexEnvelope {
    if gdd == 0.0 {
        return e.clone();
    }
    let n = e.grid.n;
    let t = Transform::new(n);
    let mut scratch = t.scratch();
    let mut data = e.samples.clone();
    t.forward(&mut data, &mut scratch);
    for (x, w) in data.iter_mut().zip(angular_frequencies(n, e.grid.dt)) {
        *x *= Complex64::from_polar(1.0, 0.5 * gdd * w * w);
    }
    t.backward(&mut data, &mut scratch);
    e.with_samples(data)
}

/// Intensity FWHM in seconds with linear interpolation.
pub fn duration_fwhm(e: &ComplexEnvelope) -> Result<f64> {
    let (lo, hi) = crate::spectral::outer_crossings(&e.intensity(), 0.5, "pulse::duration_fwhm")?;
    Ok((hi - lo) * e.grid.dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{fwhm, total_power};
    use proptest::prelude::*;

    const FS: f64 = 1e-15;

    fn grid() -> TimeGrid {
        TimeGrid::new(8192, 1.0 * FS).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(100, FS).is_err());
        assert!(TimeGrid::new(32, FS).is_err());
        assert!(TimeGrid::new(64, 0.0).is_err());
        // 64 fs window cannot hold a 100 fs pulse.
        let small = TimeGrid::new(64, FS).unwrap();
        assert!(gaussian_pulse(100.0 * FS, 1.0, 1.55, small).is_err());
        assert!(sech_pulse(100.0 * FS, 1.0, 1.55, small).is_err());
        assert!(gaussian_pulse(100.0 * FS, 1.0, 0.8, grid()).is_err());
    }

    #[test]
    fn gaussian_constructor() {
        let e = gaussian_pulse(100.0 * FS, 2.0e4, 1.55, grid()).unwrap();
        assert!((duration_fwhm(&e).unwrap() - 100.0 * FS).abs() < FS);
        assert!((e.samples()[4096].norm_sqr() - 2.0e4).abs() < 1e-10);
        let expected = 2.0e4 * 100.0 * FS * (PI / (4.0 * LN_2)).sqrt();
        assert!((e.energy() - expected).abs() / expected < 1e-3);
    }

    #[test]
    fn sech_constructor() {
        let t0 = 50.0 * FS;
        let e = sech_pulse(t0, 3.0e3, 1.55, grid()).unwrap();
        assert!((e.samples()[4096].norm_sqr() - 3.0e3).abs() < 1e-9);
        assert!((SECH_FWHM_FACTOR - 2.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
        assert!((duration_fwhm(&e).unwrap() - SECH_FWHM_FACTOR * t0).abs() < FS);
        assert!((e.energy() - 2.0 * 3.0e3 * t0).abs() / (6.0e3 * t0) < 1e-3);
    }

    #[test]
    fn transform_limited_bandwidth() {
        let e = gaussian_pulse(
            100.0 * FS,
            1.0e4,
            1.55,
            TimeGrid::new(16384, 2.0 * FS).unwrap(),
        )
        .unwrap();
        let s = to_spectrum(&e, 360.0, 40e6).unwrap();
        // 2 ln2 / π = 0.441 time-bandwidth product.
        let expected = 2.0 * LN_2 / PI / (100.0 * FS) / SPEED_OF_LIGHT_CM_S;
        assert!((expected - 147.1).abs() < 0.1);
        let w = fwhm(&s).unwrap();
        assert!((w - expected).abs() / expected < 0.02, "{w}");
        assert!((total_power(&s) - 360.0e3).abs() < 1e-6);
        assert!((s.peak_wavenumber() - 1.0e4 / 1.55).abs() <= s.grid().step());
    }

    #[test]
    fn spectrum_normalization_ignores_amplitude() {
        let e = gaussian_pulse(100.0 * FS, 1.0e4, 1.55, grid()).unwrap();
        let a = to_spectrum(&e, 160.0, 40e6).unwrap();
        let b = to_spectrum(&e.scaled(2.0), 160.0, 40e6).unwrap();
        assert!((fwhm(&a).unwrap() - fwhm(&b).unwrap()).abs() < 1e-9);
        for (x, y) in a.density().iter().zip(b.density()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn quasi_cw_scaling_is_consistent() {
        // 9 nJ at 40 MHz is 360 mW: normalization should barely move anything.
        let energy = 9e-9;
        let p = gaussian_peak_power(energy, 100.0 * FS);
        let e = gaussian_pulse(100.0 * FS, p, 1.55, grid()).unwrap();
        assert!((e.energy() - energy).abs() / energy < 1e-3);
        assert!((e.spectral_energy() - e.energy()).abs() / e.energy() < 1e-10);
    }

    #[test]
    fn parseval() {
        let e = apply_chirp(&sech_pulse(30.0 * FS, 1e3, 2.0, grid()).unwrap(), 1e-27);
        assert!((e.spectral_energy() - e.energy()).abs() / e.energy() < 1e-10);
    }

    #[test]
    fn chirp_broadening_matches_gaussian_formula() {
        let t_fwhm = 100.0 * FS;
        let e = gaussian_pulse(t_fwhm, 1.0, 1.55, TimeGrid::new(16384, 1.0 * FS).unwrap()).unwrap();
        assert_eq!(apply_chirp(&e, 0.0), e);
        let t0 = t_fwhm / (2.0 * LN_2.sqrt());
        let mut last = t_fwhm;
        for phi2 in [2000.0 * FS * FS, 5000.0 * FS * FS, -8000.0 * FS * FS] {
            let c = apply_chirp(&e, phi2);
            let expected = t_fwhm * (1.0 + (phi2 / (t0 * t0)).powi(2)).sqrt();
            let got = duration_fwhm(&c).unwrap();
            assert!(
                (got - expected).abs() / expected < 0.01,
                "{phi2}: {got} vs {expected}"
            );
            assert!((c.energy() - e.energy()).abs() / e.energy() < 1e-10);
            if phi2 > 0.0 {
                assert!(got >= last);
                last = got;
            }
            let s0 = to_spectrum(&e, 1.0, 40e6).unwrap();
            let s1 = to_spectrum(&c, 1.0, 40e6).unwrap();
            assert!((fwhm(&s0).unwrap() - fwhm(&s1).unwrap()).abs() < s0.grid().step());
        }
    }

    #[test]
    fn flat_top_duration() {
        let g = TimeGrid::new(256, FS).unwrap();
        let samples = (0..256)
            .map(|j| Complex64::new(if (100..140).contains(&j) { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let e = ComplexEnvelope::new(g, samples, 1.55).unwrap();
        assert!((duration_fwhm(&e).unwrap() - 40.0 * FS).abs() <= FS);
        let zero = ComplexEnvelope::new(g, vec![Complex64::new(0.0, 0.0); 256], 1.55).unwrap();
        assert!(duration_fwhm(&zero).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let e = apply_chirp(
            &gaussian_pulse(
                100.0 * FS,
                5.0,
                1.55,
                TimeGrid::new(4096, 2.0 * FS).unwrap(),
            )
            .unwrap(),
            3e-27,
        );
        let back = ComplexEnvelope::from_csv(e.to_csv().as_bytes(), 1.55).unwrap();
        assert_eq!(back.samples(), e.samples());
        assert!((back.grid().dt() - e.grid().dt()).abs() < 1e-12 * e.grid().dt());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn chirp_is_a_pure_spectral_phase(gdd_fs2 in -20000.0f64..20000.0) {
            let e = gaussian_pulse(100.0 * FS, 1.0, 1.55, TimeGrid::new(4096, 2.0 * FS).unwrap()).unwrap();
            let c = apply_chirp(&e, gdd_fs2 * FS * FS);
            let a = e.spectral_amplitude();
            let b = c.spectral_amplitude();
            let peak = a.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-9 * peak);
            }
            prop_assert!((c.energy() - e.energy()).abs() / e.energy() < 1e-10);
        }

        #[test]
        fn round_trip_reproduces_samples(gdd_fs2 in -5000.0f64..5000.0) {
            let e = gaussian_pulse(80.0 * FS, 3.0, 1.9, TimeGrid::new(2048, 2.0 * FS).unwrap()).unwrap();
            let there = apply_chirp(&e, gdd_fs2 * FS * FS);
            let back = apply_chirp(&there, -gdd_fs2 * FS * FS);
            let num: f64 = e.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).norm_sqr()).sum();
            let den: f64 = e.samples().iter().map(|a| a.norm_sqr()).sum();
            prop_assert!((num / den).sqrt() < 1e-12);
        }
    }
}
