//! Uniaxial nonlinear crystals: dispersion, type-I birefringent phase
//! matching against external incidence angle, and intensity-level
//! difference-frequency synthesis.
//!
//! The interaction is type-I with the pump (highest frequency) on the
//! extraordinary ray and signal and idler ordinary. In a negative uniaxial
//! crystal this is the only collinear birefringent option. Refraction at
//! the entrance face uses `n_o` for every beam; for GaSe at these angles
//! the error against the true extraordinary refraction is below 0.3°.
//!
//! Walk-off, Fresnel losses, focusing and absorption of the inputs are not
//! modelled.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectral::{total_power, Band, PowerSpectrum, SpectralGrid};

/// Bundled GaSe data file.
pub const GASE_DATA: &str = include_str!("../data/gase.crystal");

/// Admissible DFG output range (cm^-1).
pub const OUTPUT_RANGE: (f64, f64) = (400.0, 3000.0);

/// Pump bins weaker than this fraction of the pump peak are ignored.
const PUMP_FLOOR: f64 = 1e-10;

/// Contents of a crystal data file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalData {
    pub name: String,
    pub formula_id: String,
    pub coefficients_o: Vec<f64>,
    pub coefficients_e: Vec<f64>,
    pub transparency_lo_um: f64,
    pub transparency_hi_um: f64,
    pub source_citation: String,
}

impl CrystalData {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("crystal data: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniaxialSign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Formula {
    /// `n² = A + B/λ² + C/λ⁴ + D/λ⁶ + Eλ²/(λ² − F)`.
    VodopyanovKulevskii,
}

/// A dispersion formula and its coefficients, wavelength in μm.
#[derive(Debug, Clone, PartialEq)]
pub struct Sellmeier {
    formula: Formula,
    coefficients: Vec<f64>,
}

impl Sellmeier {
    pub fn new(formula_id: &str, coefficients: Vec<f64>) -> Result<Self> {
        let formula = match formula_id {
            "vodopyanov-kulevskii" => Formula::VodopyanovKulevskii,
            other => return Err(Error::Config(format!("unknown formula_id '{other}'"))),
        };
        let expected = match formula {
            Formula::VodopyanovKulevskii => 6,
        };
        if coefficients.len() != expected {
            return Err(Error::Config(format!(
                "formula '{formula_id}' takes {expected} coefficients, got {}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("non-finite dispersion coefficient".into()));
        }
        Ok(Sellmeier {
            formula,
            coefficients,
        })
    }

    pub fn formula_id(&self) -> &'static str {
        match self.formula {
            Formula::VodopyanovKulevskii => "vodopyanov-kulevskii",
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Index at `lambda_um` with no range check.
    pub fn index(&self, lambda_um: f64) -> f64 {
        let c = &self.coefficients;
        match self.formula {
            Formula::VodopyanovKulevskii => {
                let l2 = lambda_um * lambda_um;
                let n2 = c[0]
                    + c[1] / l2
                    + c[2] / (l2 * l2)
                    + c[3] / (l2 * l2 * l2)
                    + c[4] * l2 / (l2 - c[5]);
                n2.sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniaxialCrystal {
    name: String,
    sellmeier_o: Sellmeier,
    sellmeier_e: Sellmeier,
    thickness_mm: f64,
    transparency_um: (f64, f64),
    sign: UniaxialSign,
    citation: String,
}

impl UniaxialCrystal {
    pub fn from_data(data: &CrystalData, thickness_mm: f64) -> Result<Self> {
        let (lo, hi) = (data.transparency_lo_um, data.transparency_hi_um);
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Config(format!(
                "transparency window [{lo}, {hi}] um is invalid"
            )));
        }
        let sellmeier_o = Sellmeier::new(&data.formula_id, data.coefficients_o.clone())?;
        let sellmeier_e = Sellmeier::new(&data.formula_id, data.coefficients_e.clone())?;

        let samples = 512;
        let (mut below, mut above) = (0, 0);
        for k in 0..=samples {
            let lambda = lo + (hi - lo) * k as f64 / samples as f64;
            let (no, ne) = (sellmeier_o.index(lambda), sellmeier_e.index(lambda));
            if !(no > 1.0 && ne > 1.0) {
                return Err(Error::Config(format!(
                    "{}: index not > 1 at {lambda:.3} um (n_o {no}, n_e {ne})",
                    data.name
                )));
            }
            if ne < no {
                below += 1;
            } else if ne > no {
                above += 1;
            }
        }
        let sign = match (below, above) {
            (_, 0) => UniaxialSign::Negative,
            (0, _) => UniaxialSign::Positive,
            _ => {
                return Err(Error::Config(format!(
                    "{}: birefringence changes sign inside the transparency window",
                    data.name
                )))
            }
        };

        let crystal = UniaxialCrystal {
            name: data.name.clone(),
            sellmeier_o,
            sellmeier_e,
            thickness_mm: 1.0,
            transparency_um: (lo, hi),
            sign,
            citation: data.source_citation.clone(),
        };
        crystal.with_thickness(thickness_mm)
    }

    pub fn load(path: &Path, thickness_mm: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        UniaxialCrystal::from_data(&CrystalData::parse(&text)?, thickness_mm)
    }

    /// Bundled GaSe.
    pub fn gase(thickness_mm: f64) -> Result<Self> {
        UniaxialCrystal::from_data(&CrystalData::parse(GASE_DATA)?, thickness_mm)
    }

    pub fn with_thickness(&self, thickness_mm: f64) -> Result<Self> {
        if !(thickness_mm > 0.0 && thickness_mm.is_finite()) {
            return Err(Error::invalid(
                "crystal::UniaxialCrystal",
                format!("thickness must be > 0 mm, got {thickness_mm}"),
            ));
        }
        Ok(UniaxialCrystal {
            thickness_mm,
            ..self.clone()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn citation(&self) -> &str {
        &self.citation
    }

    pub fn sellmeier_o(&self) -> &Sellmeier {
        &self.sellmeier_o
    }

    pub fn sellmeier_e(&self) -> &Sellmeier {
        &self.sellmeier_e
    }

    pub fn thickness_mm(&self) -> f64 {
        self.thickness_mm
    }

    pub fn thickness_cm(&self) -> f64 {
        self.thickness_mm * 0.1
    }

    pub fn sign(&self) -> UniaxialSign {
        self.sign
    }

    /// Transparency window in μm.
    pub fn transparency_um(&self) -> (f64, f64) {
        self.transparency_um
    }

    /// Transparency window in cm^-1.
    pub fn transparency(&self) -> Band {
        Band {
            lo: 1.0e4 / self.transparency_um.1,
            hi: 1.0e4 / self.transparency_um.0,
        }
    }

    pub fn transmits(&self, lambda_um: f64) -> bool {
        let (lo, hi) = self.transparency_um;
        lambda_um >= lo * (1.0 - 1e-12) && lambda_um <= hi * (1.0 + 1e-12)
    }

    fn transmits_wavenumber(&self, nu: f64) -> bool {
        nu > 0.0 && self.transmits(1.0e4 / nu)
    }

    fn check(&self, lambda_um: f64, op: &'static str) -> Result<()> {
        if !self.transmits(lambda_um) {
            let (lo, hi) = self.transparency_um;
            return Err(Error::domain(
                op,
                format!(
                    "{lambda_um:.4} um is outside the {} transparency band {lo}-{hi} um",
                    self.name
                ),
            ));
        }
        Ok(())
    }
}

pub fn index_o(c: &UniaxialCrystal, lambda_um: f64) -> Result<f64> {
    c.check(lambda_um, "crystal::index_o")?;
    Ok(c.sellmeier_o.index(lambda_um))
}

pub fn index_e_principal(c: &UniaxialCrystal, lambda_um: f64) -> Result<f64> {
    c.check(lambda_um, "crystal::index_e_principal")?;
    Ok(c.sellmeier_e.index(lambda_um))
}

/// Extraordinary index at internal angle `theta_deg` from the optic axis.
pub fn index_e(c: &UniaxialCrystal, lambda_um: f64, theta_deg: f64) -> Result<f64> {
    const OP: &str = "crystal::index_e";
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::invalid(
            OP,
            format!("theta must lie in [0, 90] deg, got {theta_deg}"),
        ));
    }
    c.check(lambda_um, OP)?;
    let (no, ne) = (
        c.sellmeier_o.index(lambda_um),
        c.sellmeier_e.index(lambda_um),
    );
    Ok(mixed_index(no, ne, theta_deg.to_radians()))
}

#[inline]
fn mixed_index(no: f64, ne: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    1.0 / ((c * c) / (no * no) + (s * s) / (ne * ne)).sqrt()
}

/// Snell refraction with the ordinary index, degrees in and out.
pub fn internal_angle(c: &UniaxialCrystal, theta_external_deg: f64, lambda_um: f64) -> Result<f64> {
    const OP: &str = "crystal::internal_angle";
    if !(theta_external_deg.abs() < 90.0) {
        return Err(Error::invalid(
            OP,
            format!("|theta_external| must be < 90 deg, got {theta_external_deg}"),
        ));
    }
    let n = index_o(c, lambda_um)?;
    Ok((theta_external_deg.to_radians().sin() / n)
        .asin()
        .to_degrees())
}

/// Inverse of [`internal_angle`].
pub fn external_angle(c: &UniaxialCrystal, theta_internal_deg: f64, lambda_um: f64) -> Result<f64> {
    const OP: &str = "crystal::external_angle";
    let s = index_o(c, lambda_um)? * theta_internal_deg.to_radians().sin();
    if s.abs() >= 1.0 {
        return Err(Error::domain(
            OP,
            format!("internal angle {theta_internal_deg} deg is beyond total internal reflection"),
        ));
    }
    Ok(s.asin().to_degrees())
}

/// Phase mismatch `k_p − k_s − k_i` in rad/cm for the type-I assignment.
pub fn delta_k(
    c: &UniaxialCrystal,
    nu_pump: f64,
    nu_idler: f64,
    theta_internal_deg: f64,
) -> Result<f64> {
    const OP: &str = "crystal::delta_k";
    let nu_signal = nu_pump - nu_idler;
    if !(nu_idler > 0.0 && nu_signal > 0.0) {
        return Err(Error::invalid(
            OP,
            format!("need 0 < nu_idler < nu_pump, got idler {nu_idler}, pump {nu_pump}"),
        ));
    }
    let kp = index_e(c, 1.0e4 / nu_pump, theta_internal_deg)? * nu_pump;
    let ks = index_o(c, 1.0e4 / nu_signal)? * nu_signal;
    let ki = index_o(c, 1.0e4 / nu_idler)? * nu_idler;
    Ok(2.0 * PI * (kp - ks - ki))
}

/// Root tolerance on `|Δk|` (rad/cm).
pub const PM_TOLERANCE: f64 = 1e-9;

/// Internal angle (deg) where `Δk = 0`, by bisection on (0°, 90°).
pub fn pm_angle(c: &UniaxialCrystal, nu_pump: f64, nu_idler: f64) -> Result<f64> {
    const OP: &str = "crystal::pm_angle";
    let f = |theta: f64| delta_k(c, nu_pump, nu_idler, theta);
    let (mut lo, mut hi) = (0.0, 90.0);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::domain(
            OP,
            format!("not phase-matchable: idler {nu_idler} cm^-1 with pump {nu_pump} cm^-1 has no root of delta_k in (0, 90) deg"),
        ));
    }
    let mut best = (f_hi.abs(), hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm.abs() < best.0 {
            best = (fm.abs(), mid);
        }
        if fm.abs() < PM_TOLERANCE {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.0 < PM_TOLERANCE {
        Ok(best.1)
    } else {
        Err(Error::numerical(
            OP,
            format!("bisection stalled at |delta_k| = {:.3e} rad/cm", best.0),
        ))
    }
}

/// `sinc²(Δk·L/2)`.
pub fn efficiency(delta_k: f64, thickness_cm: f64) -> f64 {
    let x = 0.5 * delta_k * thickness_cm;
    if x == 0.0 {
        1.0
    } else {
        let s = x.sin() / x;
        s * s
    }
}

/// Idler FWHM (cm^-1) of the phase-matching curve at fixed pump, with the
/// crystal angle set to match `nu_idler_center` exactly.
pub fn acceptance_fwhm(c: &UniaxialCrystal, nu_pump: f64, nu_idler_center: f64) -> Result<f64> {
    let theta = pm_angle(c, nu_pump, nu_idler_center)?;
    let l = c.thickness_cm();
    let eff = |nu_i: f64| delta_k(c, nu_pump, nu_i, theta).map_or(0.0, |dk| efficiency(dk, l));
    let half_width = |dir: f64| {
        let (mut inside, mut step) = (0.0, 1e-6);
        let mut outside = loop {
            let off = inside + step;
            if eff(nu_idler_center + dir * off) < 0.5 {
                break off;
            }
            inside = off;
            step *= 1.5;
        };
        for _ in 0..100 {
            let mid = 0.5 * (inside + outside);
            if eff(nu_idler_center + dir * mid) < 0.5 {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    Ok(half_width(1.0) + half_width(-1.0))
}

/// Crystal orientation for one run. The azimuth is carried as metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchSetting {
    pub theta_external_deg: f64,
    pub azimuth_deg: f64,
}

impl PhaseMatchSetting {
    pub fn new(theta_external_deg: f64) -> Result<Self> {
        if !(theta_external_deg > 0.0 && theta_external_deg < 80.0) {
            return Err(Error::invalid(
                "crystal::PhaseMatchSetting::new",
                format!("theta_external must lie in (0, 80) deg, got {theta_external_deg}"),
            ));
        }
        Ok(PhaseMatchSetting {
            theta_external_deg,
            azimuth_deg: 90.0,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    pump: u32,
    weight: f64,
    k_rest: f64,
}

/// Precomputed mixing terms for one (pump, continuum, crystal, grid)
/// combination, so the output can be re-evaluated cheaply per angle.
#[derive(Debug, Clone)]
pub struct DfgKernel {
    out_grid: SpectralGrid,
    thickness_cm: f64,
    pump_center_um: f64,
    pump_index_o: f64,
    pump_nu: Vec<f64>,
    pump_inv_no2: Vec<f64>,
    pump_inv_ne2: Vec<f64>,
    offsets: Vec<usize>,
    terms: Vec<Term>,
}

impl DfgKernel {
    pub fn new(
        pump: &PowerSpectrum,
        sc: &PowerSpectrum,
        c: &UniaxialCrystal,
        out_grid: SpectralGrid,
    ) -> Result<Self> {
        const OP: &str = "crystal::dfg_spectrum";
        if out_grid.start() < OUTPUT_RANGE.0 || out_grid.end() > OUTPUT_RANGE.1 {
            return Err(Error::invalid(
                OP,
                format!(
                    "output grid [{:.1}, {:.1}] cm^-1 must lie within {}-{} cm^-1",
                    out_grid.start(),
                    out_grid.end(),
                    OUTPUT_RANGE.0,
                    OUTPUT_RANGE.1
                ),
            ));
        }
        let pump_power = total_power(pump);
        if !(pump_power > 0.0) {
            return Err(Error::invalid(OP, "pump spectrum carries no power"));
        }
        let centroid = pump
            .grid()
            .points()
            .zip(pump.density())
            .map(|(nu, d)| nu * d)
            .sum::<f64>()
            / pump.density().iter().sum::<f64>();
        let pump_center_um = 1.0e4 / centroid;
        let pump_index_o = index_o(c, pump_center_um)?;

        let floor = pump.peak().1 * PUMP_FLOOR;
        let dnu = pump.grid().step();
        let (mut pump_nu, mut pump_weight, mut pump_inv_no2, mut pump_inv_ne2) =
            (vec![], vec![], vec![], vec![]);
        for (nu, &d) in pump.grid().points().zip(pump.density()) {
            if d > floor && d > 0.0 && c.transmits_wavenumber(nu) {
                let lambda = 1.0e4 / nu;
                let (no, ne) = (c.sellmeier_o.index(lambda), c.sellmeier_e.index(lambda));
                pump_nu.push(nu);
                pump_weight.push(d * dnu);
                pump_inv_no2.push(1.0 / (no * no));
                pump_inv_ne2.push(1.0 / (ne * ne));
            }
        }

        let per_bin: Vec<Vec<Term>> = (0..out_grid.count())
            .into_par_iter()
            .map(|j| {
                let nu_i = out_grid.point(j);
                if !c.transmits_wavenumber(nu_i) {
                    return Vec::new();
                }
                let k_i = c.sellmeier_o.index(1.0e4 / nu_i) * nu_i;
                pump_nu
                    .iter()
                    .zip(&pump_weight)
                    .enumerate()
                    .filter_map(|(k, (&nu_p, &w))| {
                        let nu_s = nu_p - nu_i;
                        if !c.transmits_wavenumber(nu_s) {
                            return None;
                        }
                        let s = sc.density_at(nu_s).filter(|&s| s > 0.0)?;
                        Some(Term {
                            pump: k as u32,
                            weight: w * s,
                            k_rest: c.sellmeier_o.index(1.0e4 / nu_s) * nu_s + k_i,
                        })
                    })
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(per_bin.len() + 1);
        offsets.push(0);
        let mut terms = Vec::with_capacity(per_bin.iter().map(Vec::len).sum());
        for bin in per_bin {
            terms.extend(bin);
            offsets.push(terms.len());
        }

        Ok(DfgKernel {
            out_grid,
            thickness_cm: c.thickness_cm(),
            pump_center_um,
            pump_index_o,
            pump_nu,
            pump_inv_no2,
            pump_inv_ne2,
            offsets,
            terms,
        })
    }

    pub fn out_grid(&self) -> &SpectralGrid {
        &self.out_grid
    }

    /// Power-weighted pump centre wavelength (μm).
    pub fn pump_center_um(&self) -> f64 {
        self.pump_center_um
    }

    /// True when no (pump, continuum) pair lands on the output grid.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Internal angle (deg) for a setting, refracted at the pump centre.
    pub fn theta_internal(&self, setting: &PhaseMatchSetting) -> f64 {
        (setting.theta_external_deg.to_radians().sin() / self.pump_index_o)
            .asin()
            .to_degrees()
    }

    /// Uncalibrated output density at an internal angle.
    pub fn raw(&self, theta_internal_deg: f64) -> Vec<f64> {
        let theta = theta_internal_deg.to_radians();
        let (s, c) = theta.sin_cos();
        let k_pump: Vec<f64> = self
            .pump_nu
            .iter()
            .zip(self.pump_inv_no2.iter().zip(&self.pump_inv_ne2))
            .map(|(nu, (io, ie))| nu / (c * c * io + s * s * ie).sqrt())
            .collect();
        let l = self.thickness_cm;
        (0..self.out_grid.count())
            .into_par_iter()
            .map(|j| {
                self.terms[self.offsets[j]..self.offsets[j + 1]]
                    .iter()
                    .map(|t| {
                        t.weight * efficiency(2.0 * PI * (k_pump[t.pump as usize] - t.k_rest), l)
                    })
                    .sum()
            })
            .collect()
    }

    pub fn raw_spectrum(&self, theta_internal_deg: f64) -> Result<PowerSpectrum> {
        PowerSpectrum::new(self.out_grid, self.raw(theta_internal_deg))
    }

    /// Output scaled to `power_calibration_mw`. An empty overlap gives an
    /// all-zero spectrum.
    pub fn spectrum(
        &self,
        setting: &PhaseMatchSetting,
        power_calibration_mw: f64,
    ) -> Result<PowerSpectrum> {
        if !(power_calibration_mw > 0.0) {
            return Err(Error::invalid(
                "crystal::dfg_spectrum",
                "power calibration must be > 0 mW",
            ));
        }
        let raw = self.raw_spectrum(self.theta_internal(setting))?;
        if total_power(&raw) > 0.0 {
            raw.normalized_to(power_calibration_mw * 1e3)
        } else {
            Ok(raw)
        }
    }
}

/// `S_i(ν_i) ∝ ∫ S_p(ν) S_sc(ν − ν_i) sinc²(Δk L/2) dν`, scaled so the
/// output carries `power_calibration_mw`.
pub fn dfg_spectrum(
    pump: &PowerSpectrum,
    sc: &PowerSpectrum,
    c: &UniaxialCrystal,
    setting: &PhaseMatchSetting,
    out_grid: SpectralGrid,
    power_calibration_mw: f64,
) -> Result<PowerSpectrum> {
    DfgKernel::new(pump, sc, c, out_grid)?.spectrum(setting, power_calibration_mw)
}

/// External angle search: 0.1° grid, then golden-section refinement
/// around the best grid point. Returns the maximising external angle.
pub fn optimize_theta(
    kernel: &DfgKernel,
    range_deg: (f64, f64),
    objective: impl Fn(&PowerSpectrum) -> f64,
) -> Result<f64> {
    const OP: &str = "crystal::optimize_theta";
    let (lo, hi) = range_deg;
    if !(lo > 0.0 && hi > lo && hi < 80.0) {
        return Err(Error::invalid(
            OP,
            format!("theta search [{lo}, {hi}] deg must satisfy 0 < lo < hi < 80"),
        ));
    }
    let score = |theta_ext: f64| -> Result<f64> {
        let setting = PhaseMatchSetting::new(theta_ext)?;
        let v = objective(&kernel.raw_spectrum(kernel.theta_internal(&setting))?);
        if v.is_nan() {
            return Err(Error::numerical(
                OP,
                format!("objective is NaN at {theta_ext} deg"),
            ));
        }
        Ok(v)
    };

    let n = ((hi - lo) / 0.1).round().max(1.0) as usize;
    let at = |k: usize| lo + (hi - lo) * k as f64 / n as f64;
    let mut best = (f64::NEG_INFINITY, 0);
    for k in 0..=n {
        let v = score(at(k))?;
        if v > best.0 {
            best = (v, k);
        }
    }

    let (mut a, mut b) = (at(best.1.saturating_sub(1)), at((best.1 + 1).min(n)));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (score(x1)?, score(x2)?);
    while b - a > 1e-6 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = score(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = score(x2)?;
        }
    }
    let refined = 0.5 * (a + b);
    if score(refined)? >= best.0 {
        Ok(refined)
    } else {
        Ok(at(best.1))
    }
}

/// Zero-bandwidth DFG reach (cm^-1) of a pump against a continuum band
/// given in μm. A collapsed continuum band gives a zero-width result.
pub fn coverage_band(pump_center_um: f64, sc_band_um: &Band) -> Result<Band> {
    if !(pump_center_um > 0.0 && sc_band_um.lo > pump_center_um && sc_band_um.hi >= sc_band_um.lo) {
        return Err(Error::invalid(
            "crystal::coverage_band",
            format!(
                "continuum band [{}, {}] um must lie above the pump at {pump_center_um} um",
                sc_band_um.lo, sc_band_um.hi
            ),
        ));
    }
    let pump = 1.0e4 / pump_center_um;
    let a = pump - 1.0e4 / sc_band_um.lo;
    let b = pump - 1.0e4 / sc_band_um.hi;
    Ok(Band {
        lo: a.min(b),
        hi: a.max(b),
    })
}
