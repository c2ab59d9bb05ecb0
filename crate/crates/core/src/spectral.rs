//! Units, uniform wavenumber grids and scalar spectrum descriptors.
//!
//! Spectra live on grids that are uniform in wavenumber (cm^-1) with a
//! spectral power density in μW per cm^-1. Integrated powers are therefore
//! in μW.
//!
//! Note on the "4 − 17 μm" label often attached to the 600 − 2500 cm^-1
//! tuning range: 10^4 / 17 = 588.2 cm^-1, so the wavelength figure is a
//! rounded companion of the wavenumber figure. Everything here works in
//! wavenumbers and treats the cm^-1 values as authoritative.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Speed of light in cm/s (exact by SI definition).
pub const SPEED_OF_LIGHT_CM_S: f64 = 2.997_924_58e10;

pub fn wavenumber_to_frequency(nu_cm: f64) -> f64 {
    nu_cm * SPEED_OF_LIGHT_CM_S
}

pub fn frequency_to_wavenumber(f_hz: f64) -> f64 {
    f_hz / SPEED_OF_LIGHT_CM_S
}

/// μm → cm^-1.
pub fn wavelength_to_wavenumber(lambda_um: f64) -> Result<f64> {
    if !(lambda_um > 0.0) || !lambda_um.is_finite() {
        return Err(Error::invalid(
            "spectral::wavelength_to_wavenumber",
            format!("wavelength must be positive and finite, got {lambda_um} um"),
        ));
    }
    Ok(1.0e4 / lambda_um)
}

/// cm^-1 → μm. The map is its own inverse up to units.
pub fn wavenumber_to_wavelength(nu_cm: f64) -> Result<f64> {
    if !(nu_cm > 0.0) || !nu_cm.is_finite() {
        return Err(Error::invalid(
            "spectral::wavenumber_to_wavelength",
            format!("wavenumber must be positive and finite, got {nu_cm} cm^-1"),
        ));
    }
    Ok(1.0e4 / nu_cm)
}

/// Uniform wavenumber axis `start + i * step`, `i in 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl SpectralGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        const OP: &str = "spectral::SpectralGrid::new";
        if !(start > 0.0) || !start.is_finite() {
            return Err(Error::invalid(
                OP,
                format!("start must be > 0, got {start}"),
            ));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::invalid(OP, format!("step must be > 0, got {step}")));
        }
        if count < 2 {
            return Err(Error::invalid(
                OP,
                format!("need at least 2 points, got {count}"),
            ));
        }
        let grid = SpectralGrid { start, step, count };
        if !grid.end().is_finite() {
            return Err(Error::invalid(OP, "grid end is not finite"));
        }
        Ok(grid)
    }

    /// Grid covering `[lo, hi]` with the given step; `hi` is rounded to the
    /// nearest whole step.
    pub fn spanning(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let count = ((hi - lo) / step).round() as usize + 1;
        SpectralGrid::new(lo, step, count)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    pub fn contains(&self, nu: f64) -> bool {
        nu >= self.start && nu <= self.end()
    }

    /// Fractional index of `nu` on the grid.
    #[inline]
    pub fn position(&self, nu: f64) -> f64 {
        (nu - self.start) / self.step
    }

    pub fn band(&self) -> Band {
        Band {
            lo: self.start,
            hi: self.end(),
        }
    }
}

/// Closed wavenumber interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(
                "spectral::Band::new",
                format!("need 0 < lo < hi, got [{lo}, {hi}]"),
            ));
        }
        Ok(Band { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, nu: f64) -> bool {
        nu >= self.lo && nu <= self.hi
    }

    pub fn is_octave(&self) -> bool {
        is_octave(self)
    }
}

/// True when the upper edge is at least twice the lower edge. The exact
/// factor of two counts as an octave.
pub fn is_octave(band: &Band) -> bool {
    band.hi >= 2.0 * band.lo
}

/// Spectral power density (μW per cm^-1) sampled on a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    grid: SpectralGrid,
    density: Vec<f64>,
}

impl PowerSpectrum {
    pub fn new(grid: SpectralGrid, density: Vec<f64>) -> Result<Self> {
        const OP: &str = "spectral::PowerSpectrum::new";
        if density.len() != grid.count() {
            return Err(Error::invalid(
                OP,
                format!(
                    "density has {} samples, grid has {}",
                    density.len(),
                    grid.count()
                ),
            ));
        }
        if let Some((i, v)) = density
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::invalid(
                OP,
                format!("density must be finite and >= 0, sample {i} is {v}"),
            ));
        }
        Ok(PowerSpectrum { grid, density })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        PowerSpectrum {
            grid,
            density: vec![0.0; grid.count()],
        }
    }

    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let density = grid.points().map(f).collect();
        PowerSpectrum::new(grid, density)
    }

    /// Gaussian line shape centred at `center` (cm^-1) with the given FWHM
    /// and peak density.
    pub fn gaussian(grid: SpectralGrid, center: f64, fwhm: f64, peak: f64) -> Result<Self> {
        let sigma = fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
        PowerSpectrum::from_fn(grid, |nu| {
            let x = (nu - center) / sigma;
            peak * (-0.5 * x * x).exp()
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn into_parts(self) -> (SpectralGrid, Vec<f64>) {
        (self.grid, self.density)
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn density_at(&self, nu: f64) -> Option<f64> {
        if !self.grid.contains(nu) {
            return None;
        }
        Some(interpolate(&self.density, self.grid.position(nu)))
    }

    /// Index and value of the first global maximum.
    pub fn peak(&self) -> (usize, f64) {
        peak_of(&self.density)
    }

    pub fn peak_wavenumber(&self) -> f64 {
        self.grid.point(self.peak().0)
    }

    /// Multiplies the density by a non-negative factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PowerSpectrum::new(self.grid, self.density.iter().map(|d| d * factor).collect())
    }

    /// Rescales so that [`total_power`] equals `power_uw`.
    pub fn normalized_to(&self, power_uw: f64) -> Result<Self> {
        let p = total_power(self);
        if !(p > 0.0) {
            return Err(Error::invalid(
                "spectral::PowerSpectrum::normalized_to",
                "cannot normalize a spectrum with zero power",
            ));
        }
        self.scaled(power_uw / p)
    }

    /// Exact integral of the linear interpolant over `[a, b]` clipped to the
    /// grid, in μW.
    pub fn integrate_between(&self, a: f64, b: f64) -> f64 {
        let lo = a.max(self.grid.start());
        let hi = b.min(self.grid.end());
        if !(hi > lo) {
            return 0.0;
        }
        let step = self.grid.step();
        let p_lo = self.grid.position(lo);
        let p_hi = self.grid.position(hi);
        let first = (p_lo.floor() as usize).min(self.grid.count() - 2);
        let last = (p_hi.ceil() as usize).min(self.grid.count() - 1);
        let mut sum = 0.0;
        for seg in first..last {
            let u = p_lo.max(seg as f64);
            let v = p_hi.min((seg + 1) as f64);
            if v > u {
                let du = interpolate(&self.density, u);
                let dv = interpolate(&self.density, v);
                sum += 0.5 * (du + dv) * (v - u) * step;
            }
        }
        sum
    }

    /// Copy with the density zeroed outside `band`.
    pub fn masked(&self, band: &Band) -> Self {
        let density = self
            .grid
            .points()
            .zip(&self.density)
            .map(|(nu, &d)| if band.contains(nu) { d } else { 0.0 })
            .collect();
        PowerSpectrum {
            grid: self.grid,
            density,
        }
    }

    /// CSV with header `wavenumber_cm-1,density_uW_per_cm-1`, 17 significant
    /// digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * self.density.len());
        out.push_str("wavenumber_cm-1,density_uW_per_cm-1\n");
        for (nu, d) in self.grid.points().zip(&self.density) {
            let _ = writeln!(out, "{nu:.16e},{d:.16e}");
        }
        out
    }

    pub fn from_csv(reader: impl BufRead) -> Result<Self> {
        const OP: &str = "spectral::PowerSpectrum::from_csv";
        let mut lines = reader.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "wavenumber_cm-1,density_uW_per_cm-1" => {}
            _ => return Err(Error::invalid(OP, "missing or wrong header row")),
        }
        let mut nus = Vec::new();
        let mut density = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::invalid(OP, format!("bad value on data row {}", row + 1)))
            };
            nus.push(parse(cols.next())?);
            density.push(parse(cols.next())?);
        }
        if nus.len() < 2 {
            return Err(Error::invalid(OP, "need at least two rows"));
        }
        let step = (nus[nus.len() - 1] - nus[0]) / (nus.len() - 1) as f64;
        let grid = SpectralGrid::new(nus[0], step, nus.len())?;
        for (i, nu) in nus.iter().enumerate() {
            if (nu - grid.point(i)).abs() > 1e-9 * step.max(nu.abs() * 1e-6) {
                return Err(Error::invalid(
                    OP,
                    format!("row {} breaks the uniform grid", i + 1),
                ));
            }
        }
        PowerSpectrum::new(grid, density)
    }
}

/// Trapezoidal integral of the density over the whole grid, in μW.
pub fn total_power(s: &PowerSpectrum) -> f64 {
    trapezoid(s.density(), s.grid().step())
}

/// Full width at half maximum in cm^-1, measured between the outermost
/// half-maximum crossings with linear interpolation between grid points.
/// A single non-zero bin has a width of exactly one grid step.
pub fn fwhm(s: &PowerSpectrum) -> Result<f64> {
    let (lo, hi) = outer_crossings(s.density(), 0.5, "spectral::fwhm")?;
    Ok((hi - lo) * s.grid().step())
}

/// Widest contiguous band around the peak where the density stays at or
/// above `level` times the peak density.
pub fn usable_width(s: &PowerSpectrum, level: f64) -> Result<Band> {
    const OP: &str = "spectral::usable_width";
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(
            OP,
            format!("level must lie in (0, 1), got {level}"),
        ));
    }
    let (lo, hi) = contiguous_crossings(s.density(), level, OP)?;
    let grid = s.grid();
    Ok(Band {
        lo: grid.start() + lo * grid.step(),
        hi: grid.start() + hi * grid.step(),
    })
}

pub(crate) fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

#[inline]
pub(crate) fn interpolate(values: &[f64], pos: f64) -> f64 {
    let n = values.len();
    if pos <= 0.0 {
        return values[0];
    }
    let i = pos.floor() as usize;
    if i + 1 >= n {
        return values[n - 1];
    }
    let t = pos - i as f64;
    values[i] + t * (values[i + 1] - values[i])
}

pub(crate) fn peak_of(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        })
}

fn crossing_before(values: &[f64], i: usize, threshold: f64) -> f64 {
    // values[i - 1] < threshold <= values[i]
    let (a, b) = (values[i - 1], values[i]);
    (i - 1) as f64 + (threshold - a) / (b - a)
}

fn crossing_after(values: &[f64], i: usize, threshold: f64) -> f64 {
    // values[i] >= threshold > values[i + 1]
    let (a, b) = (values[i], values[i + 1]);
    i as f64 + (a - threshold) / (a - b)
}

/// Fractional indices of the outermost crossings of `frac * peak`.
pub(crate) fn outer_crossings(values: &[f64], frac: f64, op: &'static str) -> Result<(f64, f64)> {
    let (_, peak) = peak_of(values);
    if !(peak > 0.0) {
        return Err(Error::invalid(op, "profile has no positive maximum"));
    }
    let threshold = frac * peak;
    let first = values.iter().position(|&v| v >= threshold).unwrap_or(0);
    let last = values.iter().rposition(|&v| v >= threshold).unwrap_or(0);
    if first == 0 || last == values.len() - 1 {
        return Err(Error::invalid(
            op,
            "level crossing lies outside the sampled range (peak too close to the grid edge)",
        ));
    }
    Ok((
        crossing_before(values, first, threshold),
        crossing_after(values, last, threshold),
    ))
}

/// Fractional indices of the crossings of `frac * peak` that bound the
/// contiguous region containing the peak.
pub(crate) fn contiguous_crossings(
    values: &[f64],
    frac: f64,
    op: &'static str,
) -> Result<(f64, f64)> {
    let (ipk, peak) = peak_of(values);
    if !(peak > 0.0) {
        return Err(Error::invalid(op, "profile has no positive maximum"));
    }
    let threshold = frac * peak;
    let mut left = ipk;
    while left > 0 && values[left - 1] >= threshold {
        left -= 1;
    }
    let mut right = ipk;
    while right + 1 < values.len() && values[right + 1] >= threshold {
        right += 1;
    }
    if left == 0 || right == values.len() - 1 {
        return Err(Error::invalid(
            op,
            "level crossing lies outside the sampled range (peak too close to the grid edge)",
        ));
    }
    Ok((
        crossing_before(values, left, threshold),
        crossing_after(values, right, threshold),
    ))
}
