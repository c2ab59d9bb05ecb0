//! Generalized nonlinear Schrödinger propagation in optical fiber by the
//! symmetric split-step Fourier method.
//!
//! The field obeys
//!
//! ```text
//! ∂A/∂z = -(α/2)A - i(β2/2)∂²A/∂t² + (β3/6)∂³A/∂t³
//!         + iγ(1 + iτ_sh ∂/∂t)[A · (R ⊛ |A|²)]
//! R(t) = (1 - f_R)δ(t) + f_R h_R(t)
//! ```
//!
//! Each step is half a linear step, a full nonlinear step and another half
//! linear step. The state is kept in the frequency domain, where the
//! linear part is a diagonal multiplier. The nonlinear step is an exact
//! phase rotation for pure Kerr media and a classical RK4 step otherwise.
//!
//! Frequency-dependent γ and dispersion beyond β3 are not modeled.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{angular_frequencies, Transform};
use crate::pulse::{apply_chirp, to_spectrum, ComplexEnvelope};
use crate::spectral::{PowerSpectrum, SpectralGrid};

/// Spectral energy fraction allowed in the outer 5% of bins on each side.
pub const EDGE_ENERGY_LIMIT: f64 = 1e-6;

/// Fiber description; units are SI (m, s, W).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberParams {
    pub length: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub gamma: f64,
    /// Power attenuation coefficient (1/m).
    pub alpha: f64,
    pub raman_fraction: f64,
    pub raman_tau1: f64,
    pub raman_tau2: f64,
    pub self_steepening: bool,
}

impl FiberParams {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "propagation::FiberParams";
        let finite = [
            self.length,
            self.beta2,
            self.beta3,
            self.gamma,
            self.alpha,
            self.raman_fraction,
            self.raman_tau1,
            self.raman_tau2,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid(OP, "all fiber parameters must be finite"));
        }
        if !(self.length > 0.0) {
            return Err(Error::invalid(
                OP,
                format!("length must be > 0, got {}", self.length),
            ));
        }
        if self.gamma < 0.0 || self.alpha < 0.0 {
            return Err(Error::invalid(OP, "gamma and alpha must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.raman_fraction) {
            return Err(Error::invalid(
                OP,
                format!(
                    "raman_fraction must lie in [0, 1), got {}",
                    self.raman_fraction
                ),
            ));
        }
        if self.raman_fraction > 0.0 && !(self.raman_tau1 > 0.0 && self.raman_tau2 > 0.0) {
            return Err(Error::invalid(OP, "Raman time constants must be > 0"));
        }
        Ok(())
    }

    /// Linear, lossless, dispersionless fiber of the given length.
    pub fn passive(length: f64) -> Self {
        FiberParams {
            length,
            beta2: 0.0,
            beta3: 0.0,
            gamma: 0.0,
            alpha: 0.0,
            raman_fraction: 0.0,
            raman_tau1: 12.2e-15,
            raman_tau2: 32.0e-15,
            self_steepening: false,
        }
    }
}

/// Step-size control. The step actually taken is
/// `min(dz, max_nonlinear_phase_per_step / (γ · P_peak))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControl {
    pub dz: f64,
    pub max_nonlinear_phase_per_step: f64,
    pub hard_step_cap: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            dz: 1e-3,
            max_nonlinear_phase_per_step: 0.005,
            hard_step_cap: 2_000_000,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "propagation::StepControl";
        if !(self.dz > 0.0) || !self.dz.is_finite() {
            return Err(Error::invalid(
                OP,
                format!("dz must be > 0, got {}", self.dz),
            ));
        }
        let phi = self.max_nonlinear_phase_per_step;
        if !(phi > 0.0 && phi <= 0.1) {
            return Err(Error::invalid(
                OP,
                format!("max_nonlinear_phase_per_step must lie in (0, 0.1], got {phi}"),
            ));
        }
        if self.hard_step_cap == 0 {
            return Err(Error::invalid(OP, "hard_step_cap must be >= 1"));
        }
        Ok(())
    }
}

/// Result of a propagation with its step statistics.
#[derive(Debug, Clone)]
pub struct Propagated {
    pub envelope: ComplexEnvelope,
    pub steps: usize,
}

/// Propagates `e` through `fiber`.
pub fn propagate(
    e: &ComplexEnvelope,
    fiber: &FiberParams,
    ctl: &StepControl,
) -> Result<ComplexEnvelope> {
    propagate_counted(e, fiber, ctl).map(|p| p.envelope)
}

/// [`propagate`], also reporting how many steps were taken.
pub fn propagate_counted(
    e: &ComplexEnvelope,
    fiber: &FiberParams,
    ctl: &StepControl,
) -> Result<Propagated> {
    const OP: &str = "propagation::propagate";
    fiber.validate()?;
    ctl.validate()?;

    let n = e.grid().n();
    let dt = e.grid().dt();
    let omega = angular_frequencies(n, dt);
    let transform = Transform::new(n);
    let mut scratch = transform.scratch();

    let mut spectrum = e.samples().to_vec();
    transform.forward(&mut spectrum, &mut scratch);
    check_edges(&spectrum, OP)?;

    let tau_shock = if fiber.self_steepening {
        1.0 / e.carrier_angular_frequency()
    } else {
        0.0
    };
    let kerr_only = fiber.raman_fraction == 0.0 && tau_shock == 0.0;
    let nonlinear = Nonlinear::new(fiber, tau_shock, &omega, dt, transform.clone());

    let dispersion: Vec<Complex64> = omega
        .iter()
        .map(|&w| {
            Complex64::new(
                -0.5 * fiber.alpha,
                0.5 * fiber.beta2 * w * w + fiber.beta3 * w * w * w / 6.0,
            )
        })
        .collect();
    let mut half_step = HalfStep::default();

    let mut z = 0.0;
    let mut steps = 0usize;
    let mut field = vec![Complex64::new(0.0, 0.0); n];
    while z < fiber.length {
        if steps >= ctl.hard_step_cap {
            return Err(Error::numerical(
                OP,
                format!(
                    "hard step cap {} reached at z = {z:.6e} m",
                    ctl.hard_step_cap
                ),
            ));
        }
        let mut h = (fiber.length - z).min(ctl.dz);
        if fiber.gamma > 0.0 {
            field.copy_from_slice(&spectrum);
            transform.backward(&mut field, &mut scratch);
            let p_peak = field.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
            if p_peak > 0.0 {
                h = h.min(ctl.max_nonlinear_phase_per_step / (fiber.gamma * p_peak));
            }
        }
        // Avoid a sliver step from rounding at the fiber end.
        if fiber.length - (z + h) < 1e-12 * fiber.length {
            h = fiber.length - z;
        }

        let lin = half_step.operator(&dispersion, 0.5 * h);
        spectrum.iter_mut().zip(lin).for_each(|(a, l)| *a *= l);
        if fiber.gamma > 0.0 {
            if kerr_only {
                nonlinear.kerr_phase(&mut spectrum, h, &mut scratch);
            } else {
                nonlinear.rk4(&mut spectrum, h, &mut scratch);
            }
        }
        let lin = half_step.operator(&dispersion, 0.5 * h);
        spectrum.iter_mut().zip(lin).for_each(|(a, l)| *a *= l);

        z += h;
        steps += 1;
        if spectrum
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::numerical(
                OP,
                format!("non-finite field at z = {z:.6e} m (step {steps})"),
            ));
        }
        check_edges(&spectrum, OP)?;
    }

    transform.backward(&mut spectrum, &mut scratch);
    let envelope = e.with_samples(spectrum);
    Ok(Propagated { envelope, steps })
}

/// Caches `exp(D·h)` for the most recent `h`.
#[derive(Default)]
struct HalfStep {
    h: f64,
    op: Vec<Complex64>,
}

impl HalfStep {
    fn operator(&mut self, dispersion: &[Complex64], h: f64) -> &[Complex64] {
        if self.op.len() != dispersion.len() || self.h != h {
            self.h = h;
            self.op = dispersion.iter().map(|d| (d * h).exp()).collect();
        }
        &self.op
    }
}

struct Nonlinear {
    gamma: f64,
    raman_fraction: f64,
    /// DFT of the sampled Raman response, scaled so that `Σ h dt = 1`.
    raman_response: Vec<Complex64>,
    /// `1 + τ_sh ω` per bin.
    shock: Vec<f64>,
    transform: Transform,
}

impl Nonlinear {
    fn new(
        fiber: &FiberParams,
        tau_shock: f64,
        omega: &[f64],
        dt: f64,
        transform: Transform,
    ) -> Self {
        let n = omega.len();
        let raman_response = if fiber.raman_fraction > 0.0 {
            let (t1, t2) = (fiber.raman_tau1, fiber.raman_tau2);
            let mut h: Vec<Complex64> = (0..n)
                .map(|j| {
                    if j < n / 2 {
                        let t = j as f64 * dt;
                        Complex64::new((-t / t2).exp() * (t / t1).sin(), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            let norm: f64 = h.iter().map(|x| x.re).sum();
            h.iter_mut().for_each(|x| *x /= norm);
            let mut scratch = transform.scratch();
            transform.forward(&mut h, &mut scratch);
            h
        } else {
            Vec::new()
        };
        Nonlinear {
            gamma: fiber.gamma,
            raman_fraction: fiber.raman_fraction,
            raman_response,
            shock: omega.iter().map(|w| 1.0 + tau_shock * w).collect(),
            transform,
        }
    }

    /// Exact solution of `∂A/∂z = iγ|A|²A` over `h`.
    fn kerr_phase(&self, spectrum: &mut [Complex64], h: f64, scratch: &mut [Complex64]) {
        self.transform.backward(spectrum, scratch);
        for a in spectrum.iter_mut() {
            *a *= Complex64::from_polar(1.0, self.gamma * a.norm_sqr() * h);
        }
        self.transform.forward(spectrum, scratch);
    }

    /// Frequency-domain nonlinear operator `N(Ã)`.
    fn evaluate(&self, spectrum: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = spectrum.len();
        let mut field = spectrum.to_vec();
        self.transform.backward(&mut field, scratch);
        let intensity: Vec<f64> = field.iter().map(|a| a.norm_sqr()).collect();

        let response: Vec<f64> = if self.raman_fraction > 0.0 {
            let mut conv: Vec<Complex64> =
                intensity.iter().map(|&i| Complex64::new(i, 0.0)).collect();
            self.transform.forward(&mut conv, scratch);
            conv.iter_mut()
                .zip(&self.raman_response)
                .for_each(|(c, r)| *c *= r);
            self.transform.backward(&mut conv, scratch);
            let fr = self.raman_fraction;
            intensity
                .iter()
                .zip(&conv)
                .map(|(i, c)| (1.0 - fr) * i + fr * c.re)
                .collect()
        } else {
            intensity
        };

        for j in 0..n {
            out[j] = field[j] * response[j];
        }
        self.transform.forward(out, scratch);
        let ig = Complex64::new(0.0, self.gamma);
        out.iter_mut()
            .zip(&self.shock)
            .for_each(|(x, s)| *x *= ig * s);
    }

    fn rk4(&self, spectrum: &mut [Complex64], h: f64, scratch: &mut [Complex64]) {
        let n = spectrum.len();
        let mut k1 = vec![Complex64::new(0.0, 0.0); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut tmp = k1.clone();

        self.evaluate(spectrum, &mut k1, scratch);
        for j in 0..n {
            tmp[j] = spectrum[j] + k1[j] * (0.5 * h);
        }
        self.evaluate(&tmp, &mut k2, scratch);
        for j in 0..n {
            tmp[j] = spectrum[j] + k2[j] * (0.5 * h);
        }
        self.evaluate(&tmp, &mut k3, scratch);
        for j in 0..n {
            tmp[j] = spectrum[j] + k3[j] * h;
        }
        self.evaluate(&tmp, &mut k4, scratch);
        for j in 0..n {
            spectrum[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }
    }
}

fn check_edges(spectrum: &[Complex64], op: &'static str) -> Result<()> {
    let n = spectrum.len();
    let edge = (n / 20).max(1);
    let total: f64 = spectrum.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(());
    }
    // Natural order: the highest |ω| bins surround n/2.
    let edge_energy: f64 = spectrum[n / 2 - edge..n / 2 + edge]
        .iter()
        .map(|a| a.norm_sqr())
        .sum();
    let fraction = edge_energy / total;
    if fraction > EDGE_ENERGY_LIMIT {
        return Err(Error::numerical(
            op,
            format!(
                "spectral energy fraction {fraction:.3e} at the grid edge exceeds {EDGE_ENERGY_LIMIT:.0e}; \
                 use a finer time step"
            ),
        ));
    }
    Ok(())
}

/// Chirps the seed by `gdd` (s²), propagates it through `fiber` and returns
/// the output spectrum normalized to `avg_power_mw`.
pub fn simulate_supercontinuum(
    seed: &ComplexEnvelope,
    fiber: &FiberParams,
    ctl: &StepControl,
    gdd: f64,
    avg_power_mw: f64,
    f_rep: f64,
) -> Result<PowerSpectrum> {
    let chirped = apply_chirp(seed, gdd);
    let out = propagate(&chirped, fiber, ctl)?;
    to_spectrum(&out, avg_power_mw, f_rep)
}

/// Gaussian near-infrared continuum, bypassing fiber propagation.
///
/// `center_um` must lie in 1.6-2.4 μm. The grid spans ±4 FWHM around the
/// centre.
pub fn phenomenological_continuum(
    center_um: f64,
    fwhm_cm: f64,
    power_mw: f64,
) -> Result<PowerSpectrum> {
    const OP: &str = "propagation::phenomenological_continuum";
    if !(1.6..=2.4).contains(&center_um) {
        return Err(Error::invalid(
            OP,
            format!("center {center_um} um outside 1.6-2.4 um"),
        ));
    }
    if !(fwhm_cm > 0.0 && power_mw > 0.0) {
        return Err(Error::invalid(OP, "fwhm and power must be positive"));
    }
    let center = 1.0e4 / center_um;
    let step = (fwhm_cm / 100.0).min(1.0);
    let lo = (center - 4.0 * fwhm_cm).max(step);
    let grid = SpectralGrid::spanning(lo, center + 4.0 * fwhm_cm, step)?;
    PowerSpectrum::gaussian(grid, center, fwhm_cm, 1.0)?.normalized_to(power_mw * 1e3)
}

/// Fraction of total power at wavelengths longer than `lambda_um`, and the
/// power-weighted mean wavenumber of that red part.
pub fn red_band_stats(s: &PowerSpectrum, lambda_um: f64) -> (f64, f64) {
    let edge = 1.0e4 / lambda_um;
    let g = s.grid();
    let total = s.integrate_between(g.start(), g.end());
    let red = s.integrate_between(g.start(), edge);
    let (mut w, mut m) = (0.0, 0.0);
    for (nu, d) in g.points().zip(s.density()) {
        if nu < edge {
            w += d;
            m += d * nu;
        }
    }
    let centroid = if w > 0.0 { m / w } else { f64::NAN };
    (if total > 0.0 { red / total } else { 0.0 }, centroid)
}

/// Soliton order `N` for a sech input of peak power `p0` and width `t0`.
pub fn soliton_number(fiber: &FiberParams, p0: f64, t0: f64) -> f64 {
    (fiber.gamma * p0 * t0 * t0 / fiber.beta2.abs()).sqrt()
}

/// Soliton period `π/2 · t0²/|β2|` in metres.
pub fn soliton_period(fiber: &FiberParams, t0: f64) -> f64 {
    0.5 * PI * t0 * t0 / fiber.beta2.abs()
}
