//! Read-out side: FTIR interferograms, dual-comb down-conversion, a
//! synthetic gas cell, the detector model and the S/N budget.
//!
//! Interferogram intensities are in watts; spectra stay in μW per cm^-1.

use std::fmt::Write as _;
use std::io::BufRead;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fourier::Transform;
use crate::spectral::{
    frequency_to_wavenumber, wavenumber_to_frequency, Band, PowerSpectrum, SpectralGrid,
};

const UW: f64 = 1e-6;

/// Triangular apodization widens the boxcar line shape by this factor
/// (FWHM of sinc² over FWHM of sinc).
pub const TRIANGULAR_WIDENING: f64 = 1.467_954;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// Optical path difference, cm.
    Opd,
    /// Laboratory time, s.
    LabTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Apodization {
    None,
    Triangular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    axis: AxisKind,
    step: f64,
    samples: Vec<f64>,
}

impl Interferogram {
    pub fn new(axis: AxisKind, step: f64, samples: Vec<f64>) -> Result<Self> {
        const OP: &str = "spectrometer::Interferogram::new";
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(OP, format!("step must be > 0, got {step}")));
        }
        if samples.len() < 2 {
            return Err(Error::invalid(OP, "need at least two samples"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(OP, "samples must be finite"));
        }
        Ok(Interferogram {
            axis,
            step,
            samples,
        })
    }

    pub fn axis(&self) -> AxisKind {
        self.axis
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Largest axis value (OPD or time).
    pub fn extent(&self) -> f64 {
        self.step * (self.samples.len() - 1) as f64
    }

    fn header(axis: AxisKind) -> &'static str {
        match axis {
            AxisKind::Opd => "opd_cm,intensity_w",
            AxisKind::LabTime => "time_s,intensity_w",
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::header(self.axis));
        for (j, v) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{v:.16e}", j as f64 * self.step);
        }
        out
    }

    pub fn from_csv(reader: impl BufRead) -> Result<Self> {
        const OP: &str = "spectrometer::Interferogram::from_csv";
        let mut lines = reader.lines();
        let axis = match lines.next().transpose()?.as_deref().map(str::trim) {
            Some(h) if h == Self::header(AxisKind::Opd) => AxisKind::Opd,
            Some(h) if h == Self::header(AxisKind::LabTime) => AxisKind::LabTime,
            _ => return Err(Error::invalid(OP, "missing or wrong header row")),
        };
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',').map(|v| v.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => {
                    x.push(a);
                    y.push(b);
                }
                _ => return Err(Error::invalid(OP, format!("malformed row '{line}'"))),
            }
        }
        if x.len() < 2 {
            return Err(Error::invalid(OP, "need at least two rows"));
        }
        let step = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
        Interferogram::new(axis, step, y)
    }
}

/// Samples needed on `[0, opd_max]` to satisfy Nyquist up to `nu_max`.
pub fn required_samples(opd_max: f64, nu_max: f64) -> usize {
    (2.0 * nu_max * opd_max).ceil() as usize + 1
}

/// `I(δ) = ∫ S(ν)(1 + cos 2πνδ) dν` on `n_samples` points from 0 to
/// `opd_max`.
pub fn interferogram_from_spectrum(
    s: &PowerSpectrum,
    opd_max: f64,
    n_samples: usize,
) -> Result<Interferogram> {
    const OP: &str = "spectrometer::interferogram_from_spectrum";
    if !(opd_max > 0.0 && opd_max.is_finite()) {
        return Err(Error::invalid(
            OP,
            format!("opd_max must be > 0, got {opd_max}"),
        ));
    }
    let nu_max = s.grid().end();
    let needed = required_samples(opd_max, nu_max);
    if n_samples < needed {
        return Err(Error::invalid(
            OP,
            format!("{n_samples} samples undersample {nu_max:.1} cm^-1 over {opd_max} cm; need n_samples >= {needed}"),
        ));
    }
    let step = opd_max / (n_samples - 1) as f64;
    let grid = s.grid();
    let last = grid.count() - 1;
    let weighted: Vec<(f64, f64)> = grid
        .points()
        .zip(s.density())
        .enumerate()
        .map(|(k, (nu, d))| {
            let w = if k == 0 || k == last { 0.5 } else { 1.0 };
            (nu, w * d * grid.step() * UW)
        })
        .collect();
    let samples = (0..n_samples)
        .map(|j| {
            let delta = j as f64 * step;
            weighted
                .iter()
                .map(|(nu, p)| p * (1.0 + (2.0 * std::f64::consts::PI * nu * delta).cos()))
                .sum()
        })
        .collect();
    Interferogram::new(AxisKind::Opd, step, samples)
}

/// Nominal resolution (cm^-1) for a maximum OPD: `1/opd_max` unapodized,
/// widened by [`TRIANGULAR_WIDENING`] with triangular apodization.
pub fn resolution(opd_max: f64, apodization: Apodization) -> f64 {
    match apodization {
        Apodization::None => 1.0 / opd_max,
        Apodization::Triangular => TRIANGULAR_WIDENING / opd_max,
    }
}

/// Pedestal-free cosine transform of a one-sided OPD interferogram. The
/// output grid is 8× finer than the resolution and runs up to the Nyquist
/// wavenumber; negative ringing is clipped to zero.
pub fn spectrum_from_interferogram(
    i: &Interferogram,
    apodization: Apodization,
) -> Result<PowerSpectrum> {
    const OP: &str = "spectrometer::spectrum_from_interferogram";
    if i.axis != AxisKind::Opd {
        return Err(Error::invalid(
            OP,
            "lab-time interferograms go through the dual-comb path",
        ));
    }
    let n = i.samples.len();
    let opd_max = i.extent();
    let pedestal = 0.5 * i.samples[0];
    let half = (8 * (n - 1)).next_power_of_two();
    let mut data = vec![Complex64::new(0.0, 0.0); 2 * half];
    for (j, v) in i.samples.iter().enumerate() {
        let apod = match apodization {
            Apodization::None => 1.0,
            Apodization::Triangular => 1.0 - j as f64 * i.step / opd_max,
        };
        let end = if j == n - 1 { 0.5 } else { 1.0 };
        let x = (v - pedestal) * apod * end;
        data[j].re = x;
        if j > 0 {
            data[2 * half - j].re = x;
        }
    }
    let t = Transform::new(2 * half);
    t.forward(&mut data, &mut t.scratch());
    let step = 1.0 / (2 * half) as f64 / i.step;
    let density = data[1..half]
        .iter()
        .map(|x| (2.0 * i.step * x.re / UW).max(0.0))
        .collect();
    PowerSpectrum::new(SpectralGrid::new(step, step, half - 1)?, density)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    /// Noise-equivalent power (W) at `integration_time`.
    pub nep: f64,
    pub integration_time: f64,
    /// Responsive band, cm^-1.
    pub band: Band,
    /// Everything at shorter wavelength (μm) is blocked.
    pub blocker_edge_um: f64,
}

impl DetectorModel {
    pub fn new(nep: f64, integration_time: f64, band: Band, blocker_edge_um: f64) -> Result<Self> {
        const OP: &str = "spectrometer::DetectorModel::new";
        if !(nep > 0.0 && nep.is_finite()) {
            return Err(Error::invalid(OP, format!("nep must be > 0, got {nep}")));
        }
        if !(integration_time > 0.0) {
            return Err(Error::invalid(OP, "integration time must be > 0"));
        }
        if !(blocker_edge_um > 0.0) {
            return Err(Error::invalid(OP, "blocker edge must be > 0"));
        }
        let band = Band::new(band.lo, band.hi)?;
        Ok(DetectorModel {
            nep,
            integration_time,
            band,
            blocker_edge_um,
        })
    }

    /// NEP rescaled to another integration time, `nep·√(t0/t)`.
    pub fn nep_at(&self, integration_time: f64) -> f64 {
        self.nep * (self.integration_time / integration_time).sqrt()
    }
}

impl Default for DetectorModel {
    /// 10 pW at 10 ms, flat over 3.7-20 μm, blocking below 3.5 μm.
    fn default() -> Self {
        DetectorModel {
            nep: 10e-12,
            integration_time: 10e-3,
            band: Band {
                lo: 1.0e4 / 20.0,
                hi: 1.0e4 / 3.7,
            },
            blocker_edge_um: 3.5,
        }
    }
}

/// In-band power (W): the spectrum integrated over the responsive band
/// with everything beyond the blocker edge removed.
pub fn sensor_reading(s: &PowerSpectrum, d: &DetectorModel) -> f64 {
    let hi = d.band.hi.min(1.0e4 / d.blocker_edge_um);
    if hi <= d.band.lo {
        return 0.0;
    }
    s.integrate_between(d.band.lo, hi) * UW
}

pub fn snr_direct(p_channel: f64, d: &DetectorModel) -> f64 {
    p_channel / d.nep
}

/// Power dynamic range of amplitude detection against a full-strength
/// reference channel: the square of [`snr_direct`].
pub fn snr_interferometric(p_ref_channel: f64, d: &DetectorModel) -> f64 {
    let r = snr_direct(p_ref_channel, d);
    r * r
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasLine {
    pub center: f64,
    pub peak_absorbance: f64,
    pub hwhm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasModel {
    lines: Vec<GasLine>,
    pathlength_scale: f64,
}

impl GasModel {
    pub fn new(lines: Vec<GasLine>, pathlength_scale: f64) -> Result<Self> {
        const OP: &str = "spectrometer::GasModel::new";
        for l in &lines {
            if !(l.hwhm > 0.0 && l.peak_absorbance >= 0.0 && l.center > 0.0) {
                return Err(Error::invalid(
                    OP,
                    format!("bad line {l:?}: need hwhm > 0, absorbance >= 0"),
                ));
            }
        }
        if !(pathlength_scale >= 0.0 && pathlength_scale.is_finite()) {
            return Err(Error::invalid(OP, "pathlength scale must be >= 0"));
        }
        Ok(GasModel {
            lines,
            pathlength_scale,
        })
    }

    pub fn lines(&self) -> &[GasLine] {
        &self.lines
    }

    pub fn pathlength_scale(&self) -> f64 {
        self.pathlength_scale
    }

    pub fn absorbance(&self, nu: f64) -> f64 {
        self.pathlength_scale
            * self
                .lines
                .iter()
                .map(|l| {
                    l.peak_absorbance * l.hwhm * l.hwhm
                        / ((nu - l.center).powi(2) + l.hwhm * l.hwhm)
                })
                .sum::<f64>()
    }

    pub fn transmittance(&self, nu: f64) -> f64 {
        (-self.absorbance(nu)).exp()
    }

    /// Line list CSV, header `center,peak_absorbance,hwhm`.
    pub fn from_csv(reader: impl BufRead, pathlength_scale: f64) -> Result<Self> {
        const OP: &str = "spectrometer::GasModel::from_csv";
        let mut lines = reader.lines();
        match lines.next().transpose()? {
            Some(h) if h.trim() == "center,peak_absorbance,hwhm" => {}
            _ => return Err(Error::invalid(OP, "missing or wrong header row")),
        }
        let mut out = Vec::new();
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
            out.push(GasLine {
                center: v[0],
                peak_absorbance: v[1],
                hwhm: v[2],
            });
        }
        GasModel::new(out, pathlength_scale)
    }
}

pub fn apply_gas_absorption(s: &PowerSpectrum, gas: &GasModel) -> PowerSpectrum {
    let density = s
        .grid()
        .points()
        .zip(s.density())
        .map(|(nu, d)| d * gas.transmittance(nu))
        .collect();
    PowerSpectrum::new(*s.grid(), density).expect("transmittance keeps density finite and >= 0")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCombConfig {
    pub f_rep: f64,
    pub delta_f_rep: f64,
    /// Optical band to record, cm^-1.
    pub optical_band: Band,
}

impl DualCombConfig {
    pub fn new(f_rep: f64, delta_f_rep: f64, optical_band: Band) -> Result<Self> {
        if !(delta_f_rep > 0.0 && delta_f_rep < f_rep && f_rep.is_finite()) {
            return Err(Error::invalid(
                "spectrometer::DualCombConfig::new",
                format!("need 0 < delta_f_rep < f_rep, got {delta_f_rep} and {f_rep}"),
            ));
        }
        let optical_band = Band::new(optical_band.lo, optical_band.hi)?;
        Ok(DualCombConfig {
            f_rep,
            delta_f_rep,
            optical_band,
        })
    }

    /// Optical-to-RF compression, `f_rep/Δf`.
    pub fn compression_factor(&self) -> f64 {
        self.f_rep / self.delta_f_rep
    }

    /// Spectra per second.
    pub fn refresh_rate(&self) -> f64 {
        self.delta_f_rep
    }

    /// Alias-free optical zone `[z·B, (z+1)·B]` (cm^-1) holding the
    /// lower band edge.
    pub fn nyquist_zone(&self) -> (u64, Band) {
        let b = frequency_to_wavenumber(dualcomb_nyquist_bandwidth(self));
        let z = (self.optical_band.lo / b).floor();
        (
            z as u64,
            Band {
                lo: z * b,
                hi: (z + 1.0) * b,
            },
        )
    }
}

/// `f_rep²/(2Δf)` in Hz.
pub fn dualcomb_nyquist_bandwidth(cfg: &DualCombConfig) -> f64 {
    cfg.f_rep * cfg.f_rep / (2.0 * cfg.delta_f_rep)
}

/// Largest `Δf` (Hz) that maps `width_cm` alias-free at `f_rep`.
pub fn max_delta_f_rep(f_rep: f64, width_cm: f64) -> f64 {
    f_rep * f_rep / (2.0 * wavenumber_to_frequency(width_cm))
}

/// Frame-level dual-comb simulation.
///
/// One frame of `N` samples spans `1/Δf`; RF bin `k` maps to one optical
/// slice of width `2B/N` in the Nyquist zone holding the band, reversed in
/// odd zones. `N` is the smallest power of two making a slice no wider
/// than the input grid step. Each frame carries the pedestal plus one
/// cosine per slice with the slice power as amplitude; white noise with
/// `σ = nep·√(t0·N·Δf)` is added per sample from a ChaCha8 stream seeded
/// by `noise_seed`. Frames are averaged, the mean is removed, and the
/// real part of the DFT gives the slice powers back.
///
/// Returns the full lab-time record and the recovered spectrum on the
/// slice grid restricted to the band (negative noise excursions clipped).
pub fn simulate_dualcomb(
    s: &PowerSpectrum,
    gas: Option<&GasModel>,
    cfg: &DualCombConfig,
    frames: usize,
    detector: &DetectorModel,
    noise_seed: u64,
) -> Result<(Interferogram, PowerSpectrum)> {
    const OP: &str = "spectrometer::simulate_dualcomb";
    if frames < 1 {
        return Err(Error::invalid(OP, "need at least one frame"));
    }
    let b_cm = frequency_to_wavenumber(dualcomb_nyquist_bandwidth(cfg));
    let band = cfg.optical_band;
    let (zone, zone_band) = cfg.nyquist_zone();
    if band.width() > b_cm || band.hi > zone_band.hi {
        return Err(Error::invalid(
            OP,
            format!(
                "optical band [{:.2}, {:.2}] cm^-1 does not fit one {b_cm:.3} cm^-1 Nyquist zone \
                 (zone {zone} is [{:.2}, {:.2}]); reduce delta_f_rep (this width needs <= {:.3} Hz, \
                 <= {:.3} Hz always fits) or move the band",
                band.lo,
                band.hi,
                zone_band.lo,
                zone_band.hi,
                max_delta_f_rep(cfg.f_rep, band.width()),
                max_delta_f_rep(cfg.f_rep, band.hi),
            ),
        ));
    }

    let absorbed;
    let s = match gas {
        Some(g) => {
            absorbed = apply_gas_absorption(s, g);
            &absorbed
        }
        None => s,
    };

    let n = ((2.0 * b_cm / s.grid().step()).ceil() as usize)
        .next_power_of_two()
        .max(16);
    let slice = 2.0 * b_cm / n as f64;
    let optical = |k: usize| {
        if zone % 2 == 0 {
            zone_band.lo + k as f64 * slice
        } else {
            zone_band.hi - k as f64 * slice
        }
    };
    let bins: Vec<(usize, f64)> = (1..n / 2)
        .map(|k| (k, optical(k)))
        .filter(|(_, nu)| band.contains(*nu))
        .collect();
    if bins.is_empty() {
        return Err(Error::invalid(
            OP,
            "optical band is narrower than one RF bin",
        ));
    }
    let powers: Vec<(usize, f64)> = bins
        .iter()
        .map(|&(k, nu)| {
            (
                k,
                s.integrate_between(nu - 0.5 * slice, nu + 0.5 * slice) * UW,
            )
        })
        .collect();
    let pedestal: f64 = powers.iter().map(|(_, p)| p).sum();
    let two_pi_over_n = 2.0 * std::f64::consts::PI / n as f64;
    let frame: Vec<f64> = (0..n)
        .map(|j| {
            pedestal
                + powers
                    .iter()
                    .map(|&(k, p)| p * (two_pi_over_n * ((k * j) % n) as f64).cos())
                    .sum::<f64>()
        })
        .collect();

    let sample_rate = n as f64 * cfg.delta_f_rep;
    let sigma = detector.nep * (detector.integration_time * sample_rate).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(OP, e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let record: Vec<f64> = (0..frames)
        .flat_map(|_| frame.iter())
        .map(|v| v + normal.sample(&mut rng))
        .collect();

    let mut averaged = vec![0.0; n];
    for chunk in record.chunks(n) {
        averaged.iter_mut().zip(chunk).for_each(|(a, v)| *a += v);
    }
    let mean = averaged.iter().sum::<f64>() / (n * frames) as f64;
    let mut data: Vec<Complex64> = averaged
        .iter()
        .map(|v| Complex64::new(v / frames as f64 - mean, 0.0))
        .collect();
    // exp(+i) vs exp(-i) is irrelevant for the real part.
    let t = Transform::new(n);
    t.forward(&mut data, &mut t.scratch());

    let mut recovered: Vec<(f64, f64)> = bins
        .iter()
        .map(|&(k, nu)| (nu, (2.0 * data[k].re / n as f64 / UW / slice).max(0.0)))
        .collect();
    recovered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let grid = SpectralGrid::new(recovered[0].0, slice, recovered.len().max(2))?;
    let mut density: Vec<f64> = recovered.into_iter().map(|(_, d)| d).collect();
    density.resize(grid.count(), 0.0);

    let record = Interferogram::new(AxisKind::LabTime, 1.0 / sample_rate, record)?;
    Ok((record, PowerSpectrum::new(grid, density)?))
}
