//! End-to-end runs: laser setting → near-infrared continuum → DFG with an
//! angle search → mid-infrared comb report.
//!
//! The relative pump/continuum delay is taken as already optimal; the
//! intensity-level mixing model has no delay variable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::comb::{dfg_comb, mode_count, power_per_mode, CombDescriptor, DEFAULT_NIR_CEO_HZ};
use crate::crystal::{
    acceptance_fwhm, optimize_theta, DfgKernel, PhaseMatchSetting, UniaxialCrystal,
};
use crate::error::{Error, Result};
use crate::propagation::{
    phenomenological_continuum, simulate_supercontinuum, FiberParams, StepControl,
};
use crate::pulse::{gaussian_peak_power, gaussian_pulse, to_spectrum, TimeGrid};
use crate::spectral::{fwhm, total_power, usable_width, Band, PowerSpectrum, SpectralGrid};
use crate::spectrometer::{sensor_reading, DetectorModel};

/// Level used for the usable band.
pub const USABLE_LEVEL: f64 = 0.1;

/// One row of the setting table: either a phenomenological continuum
/// (`center_um` + `fwhm_cm`) or a chirp for the fiber model (`gdd_fs2`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub label: String,
    #[serde(default)]
    pub center_um: Option<f64>,
    #[serde(default)]
    pub fwhm_cm: Option<f64>,
    #[serde(default)]
    pub gdd_fs2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Continuum {
    Phenomenological {
        center_um: f64,
        fwhm_cm: f64,
    },
    /// Pre-fiber group-delay dispersion in s².
    Fiber {
        gdd: f64,
    },
}

impl SettingSpec {
    pub fn continuum(&self) -> Result<Continuum> {
        match (self.center_um, self.fwhm_cm, self.gdd_fs2) {
            (Some(center_um), Some(fwhm_cm), None) => {
                Ok(Continuum::Phenomenological { center_um, fwhm_cm })
            }
            (None, None, Some(gdd)) => Ok(Continuum::Fiber { gdd: gdd * 1e-30 }),
            _ => Err(Error::Config(format!(
                "setting '{}': give either center_um and fwhm_cm, or gdd_fs2",
                self.label
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// In-band power seen by the source's power sensor.
    Sensor,
    PeakDensity,
}

/// Fiber-model continuum generation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberModel {
    pub n_samples: usize,
    pub dt_s: f64,
    pub seed_energy_nj: f64,
    pub fiber: FiberParams,
    #[serde(default)]
    pub step: StepControl,
}

fn default_f_rep() -> f64 {
    40e6
}
fn default_pump_power() -> f64 {
    360.0
}
fn default_sc_power() -> f64 {
    160.0
}
fn default_pump_center() -> f64 {
    1.55
}
fn default_pulse_fwhm() -> f64 {
    100e-15
}
fn default_thickness() -> f64 {
    1.0
}
fn default_theta_search() -> [f64; 2] {
    [25.0, 45.0]
}
fn default_calibration() -> f64 {
    0.75
}
fn default_objective() -> Objective {
    Objective::Sensor
}
fn default_output_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default = "default_f_rep")]
    pub f_rep_hz: f64,
    #[serde(default = "default_pump_power")]
    pub pump_power_mw: f64,
    #[serde(default = "default_sc_power")]
    pub sc_power_mw: f64,
    #[serde(default = "default_pump_center")]
    pub pump_center_um: f64,
    #[serde(default = "default_pulse_fwhm")]
    pub pulse_fwhm_s: f64,
    /// Crystal data file; the bundled GaSe file when absent.
    #[serde(default)]
    pub crystal_file: Option<PathBuf>,
    #[serde(default = "default_thickness")]
    pub thickness_mm: f64,
    /// External angle search range in degrees.
    #[serde(default = "default_theta_search")]
    pub theta_search_deg: [f64; 2],
    #[serde(default = "default_calibration")]
    pub power_calibration_mw: f64,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default = "default_output_step")]
    pub output_step_cm: f64,
    #[serde(default)]
    pub fiber_model: Option<FiberModel>,
    pub settings: Vec<SettingSpec>,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("f_rep_hz", self.f_rep_hz),
            ("pump_power_mw", self.pump_power_mw),
            ("sc_power_mw", self.sc_power_mw),
            ("pulse_fwhm_s", self.pulse_fwhm_s),
            ("thickness_mm", self.thickness_mm),
            ("power_calibration_mw", self.power_calibration_mw),
            ("output_step_cm", self.output_step_cm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("source.{name} must be > 0, got {v}"));
            }
        }
        if !(1.0..=3.0).contains(&self.pump_center_um) {
            return bad(format!(
                "source.pump_center_um {} outside 1-3 um",
                self.pump_center_um
            ));
        }
        let [lo, hi] = self.theta_search_deg;
        if !(lo > 0.0 && hi > lo && hi < 80.0) {
            return bad(format!(
                "source.theta_search_deg [{lo}, {hi}] must satisfy 0 < lo < hi < 80"
            ));
        }
        if self.settings.is_empty() {
            return bad("source.settings must not be empty".into());
        }
        for s in &self.settings {
            let ok = !s.label.is_empty()
                && s.label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
            if !ok {
                return bad(format!(
                    "setting label '{}' may only use letters, digits, '-', '_' and '.'",
                    s.label
                ));
            }
        }
        let mut labels: Vec<&str> = self.settings.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("setting labels must be unique".into());
        }
        for s in &self.settings {
            if let Continuum::Fiber { .. } = s.continuum()? {
                match &self.fiber_model {
                    None => {
                        return bad(format!(
                            "setting '{}' needs a [source.fiber_model] section",
                            s.label
                        ))
                    }
                    Some(m) => {
                        m.fiber.validate()?;
                        m.step.validate()?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Everything reported for one setting. Every scalar is recomputable from
/// `spectrum` (see [`SettingReport::verify`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SettingReport {
    pub label: String,
    pub spectrum: PowerSpectrum,
    pub theta_external_deg: f64,
    pub theta_internal_deg: f64,
    pub peak_cm: f64,
    pub fwhm_cm: f64,
    pub usable: Band,
    pub octave: bool,
    pub mode_count: u64,
    /// W per comb mode at the peak.
    pub power_per_mode_w: f64,
    pub sensor_w: f64,
    pub total_power_uw: f64,
}

impl SettingReport {
    fn from_spectrum(
        label: &str,
        spectrum: PowerSpectrum,
        theta_external_deg: f64,
        theta_internal_deg: f64,
        comb: &CombDescriptor,
        detector: &DetectorModel,
    ) -> Result<Self> {
        let peak_cm = spectrum.peak_wavenumber();
        let usable = usable_width(&spectrum, USABLE_LEVEL)?;
        Ok(SettingReport {
            label: label.to_string(),
            theta_external_deg,
            theta_internal_deg,
            peak_cm,
            fwhm_cm: fwhm(&spectrum)?,
            usable,
            octave: usable.is_octave(),
            mode_count: mode_count(comb, &usable),
            power_per_mode_w: power_per_mode(&spectrum, comb.f_rep(), peak_cm)?,
            sensor_w: sensor_reading(&spectrum, detector),
            total_power_uw: total_power(&spectrum),
            spectrum,
        })
    }

    /// Recomputes every scalar from the stored spectrum.
    pub fn verify(&self, f_rep: f64, detector: &DetectorModel) -> Result<bool> {
        let comb = CombDescriptor::new(f_rep, 0.0, self.spectrum.clone())?;
        let again = SettingReport::from_spectrum(
            &self.label,
            self.spectrum.clone(),
            self.theta_external_deg,
            self.theta_internal_deg,
            &comb,
            detector,
        )?;
        Ok(&again == self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub settings: Vec<SettingReport>,
}

impl RunReport {
    /// Usable bands merged where they touch or overlap.
    pub fn usable_union(&self) -> Vec<Band> {
        let mut bands: Vec<Band> = self.settings.iter().map(|s| s.usable).collect();
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Band> = Vec::new();
        for b in bands {
            match out.last_mut() {
                Some(last) if b.lo <= last.hi => last.hi = last.hi.max(b.hi),
                _ => out.push(b),
            }
        }
        out
    }

    pub const CSV_HEADER: &'static str = "label,theta_external_deg,theta_internal_deg,peak_cm-1,fwhm_cm-1,\
usable_lo_cm-1,usable_hi_cm-1,usable_width_cm-1,octave,mode_count,power_per_mode_w,sensor_w,total_power_uw";

    /// One row per setting, in table order. Floats are written in their
    /// shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for s in &self.settings {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{:e},{:e},{}",
                s.label,
                s.theta_external_deg,
                s.theta_internal_deg,
                s.peak_cm,
                s.fwhm_cm,
                s.usable.lo,
                s.usable.hi,
                s.usable.width(),
                s.octave,
                s.mode_count,
                s.power_per_mode_w,
                s.sensor_w,
                s.total_power_uw
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessRow {
    pub thickness_mm: f64,
    pub theta_external_deg: f64,
    pub fwhm_cm: f64,
    pub usable: Band,
    /// Phase-matching FWHM at the pump centre and the reference idler.
    pub acceptance_fwhm_cm: f64,
}

impl ThicknessRow {
    pub const CSV_HEADER: &'static str =
        "thickness_mm,theta_external_deg,fwhm_cm-1,usable_lo_cm-1,usable_hi_cm-1,usable_width_cm-1,acceptance_fwhm_cm-1";

    pub fn table_csv(rows: &[ThicknessRow]) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.thickness_mm,
                r.theta_external_deg,
                r.fwhm_cm,
                r.usable.lo,
                r.usable.hi,
                r.usable.width(),
                r.acceptance_fwhm_cm
            );
        }
        out
    }
}

/// A configured source: crystal loaded and pump spectrum built once.
#[derive(Debug, Clone)]
pub struct Pipeline {
    cfg: SourceConfig,
    crystal: UniaxialCrystal,
    detector: DetectorModel,
    pump: PowerSpectrum,
    out_grid: SpectralGrid,
}

impl Pipeline {
    /// `base_dir` resolves a relative `crystal_file`.
    pub fn new(cfg: SourceConfig, detector: DetectorModel, base_dir: &Path) -> Result<Self> {
        cfg.validate()?;
        let crystal = match &cfg.crystal_file {
            Some(p) => UniaxialCrystal::load(&base_dir.join(p), cfg.thickness_mm)?,
            None => UniaxialCrystal::gase(cfg.thickness_mm)?,
        };
        let grid = TimeGrid::new(4096, 2e-15)?;
        let e = gaussian_pulse(cfg.pulse_fwhm_s, 1.0, cfg.pump_center_um, grid)?;
        let pump = to_spectrum(&e, cfg.pump_power_mw, cfg.f_rep_hz)?;
        let out_grid = SpectralGrid::spanning(400.0, 3000.0, cfg.output_step_cm)?;
        Ok(Pipeline {
            cfg,
            crystal,
            detector,
            pump,
            out_grid,
        })
    }

    pub fn config(&self) -> &SourceConfig {
        &self.cfg
    }

    pub fn crystal(&self) -> &UniaxialCrystal {
        &self.crystal
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    pub fn pump(&self) -> &PowerSpectrum {
        &self.pump
    }

    fn spec(&self, label: &str) -> Result<&SettingSpec> {
        self.cfg
            .settings
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| Error::Config(format!("no setting labelled '{label}'")))
    }

    /// Near-infrared continuum for a setting.
    pub fn continuum(&self, label: &str) -> Result<PowerSpectrum> {
        let spec = self.spec(label)?;
        let run = || match spec.continuum()? {
            Continuum::Phenomenological { center_um, fwhm_cm } => {
                phenomenological_continuum(center_um, fwhm_cm, self.cfg.sc_power_mw)
            }
            Continuum::Fiber { gdd } => {
                let m = self.cfg.fiber_model.as_ref().expect("validated");
                let grid = TimeGrid::new(m.n_samples, m.dt_s)?;
                let p0 = gaussian_peak_power(m.seed_energy_nj * 1e-9, self.cfg.pulse_fwhm_s);
                let seed =
                    gaussian_pulse(self.cfg.pulse_fwhm_s, p0, self.cfg.pump_center_um, grid)?;
                simulate_supercontinuum(
                    &seed,
                    &m.fiber,
                    &m.step,
                    gdd,
                    self.cfg.sc_power_mw,
                    self.cfg.f_rep_hz,
                )
            }
        };
        run().map_err(|e| e.in_setting(label))
    }

    /// Pump and continuum share one oscillator, so the offsets cancel.
    fn comb(&self, sc: &PowerSpectrum, spectrum: &PowerSpectrum) -> Result<CombDescriptor> {
        let f_rep = self.cfg.f_rep_hz;
        let pump = CombDescriptor::new(f_rep, DEFAULT_NIR_CEO_HZ, self.pump.clone())?;
        let sc = CombDescriptor::new(f_rep, DEFAULT_NIR_CEO_HZ, sc.clone())?;
        dfg_comb(&pump, &sc, spectrum.clone())
    }

    fn run_with(
        &self,
        label: &str,
        crystal: &UniaxialCrystal,
        sc: &PowerSpectrum,
    ) -> Result<SettingReport> {
        let kernel = DfgKernel::new(&self.pump, sc, crystal, self.out_grid)?;
        if kernel.is_empty() {
            return Err(Error::domain(
                "pipeline::run_setting",
                "continuum and pump have no phase-matchable overlap on the output grid",
            ));
        }
        let [lo, hi] = self.cfg.theta_search_deg;
        let theta = match self.cfg.objective {
            Objective::Sensor => {
                optimize_theta(&kernel, (lo, hi), |s| sensor_reading(s, &self.detector))?
            }
            Objective::PeakDensity => optimize_theta(&kernel, (lo, hi), |s| s.peak().1)?,
        };
        let setting = PhaseMatchSetting::new(theta)?;
        let spectrum = kernel.spectrum(&setting, self.cfg.power_calibration_mw)?;
        let comb = self.comb(sc, &spectrum)?;
        SettingReport::from_spectrum(
            label,
            spectrum,
            theta,
            kernel.theta_internal(&setting),
            &comb,
            &self.detector,
        )
    }

    pub fn run_setting(&self, label: &str) -> Result<SettingReport> {
        let sc = self.continuum(label)?;
        self.run_with(label, &self.crystal, &sc)
            .map_err(|e| e.in_setting(label))
    }

    /// Every setting, run concurrently, reported in table order.
    pub fn tuning_scan(&self) -> Result<RunReport> {
        let settings = self
            .cfg
            .settings
            .par_iter()
            .map(|s| self.run_setting(&s.label))
            .collect::<Result<Vec<_>>>()?;
        Ok(RunReport { settings })
    }

    /// Re-runs one laser setting at each crystal thickness, with the angle
    /// re-optimised every time. Acceptance is evaluated at the pump centre
    /// and the peak of the configured-thickness run.
    pub fn thickness_study(
        &self,
        label: &str,
        thicknesses_mm: &[f64],
    ) -> Result<Vec<ThicknessRow>> {
        if thicknesses_mm.is_empty() {
            return Err(Error::invalid(
                "pipeline::thickness_study",
                "no thicknesses given",
            ));
        }
        let sc = self.continuum(label)?;
        let reference = self
            .run_with(label, &self.crystal, &sc)
            .map_err(|e| e.in_setting(label))?;
        let nu_pump = 1.0e4 / self.cfg.pump_center_um;
        thicknesses_mm
            .par_iter()
            .map(|&t| {
                let crystal = self.crystal.with_thickness(t)?;
                let r = self.run_with(label, &crystal, &sc)?;
                Ok(ThicknessRow {
                    thickness_mm: t,
                    theta_external_deg: r.theta_external_deg,
                    fwhm_cm: r.fwhm_cm,
                    usable: r.usable,
                    acceptance_fwhm_cm: acceptance_fwhm(&crystal, nu_pump, reference.peak_cm)?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.in_setting(label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phenomenological(label: &str, center_um: f64, fwhm_cm: f64) -> SettingSpec {
        SettingSpec {
            label: label.into(),
            center_um: Some(center_um),
            fwhm_cm: Some(fwhm_cm),
            gdd_fs2: None,
        }
    }

    fn config(settings: Vec<SettingSpec>) -> SourceConfig {
        toml::from_str::<SourceConfig>("settings = []")
            .map(|c| SourceConfig { settings, ..c })
            .unwrap()
    }

    fn pipeline(settings: Vec<SettingSpec>) -> Pipeline {
        Pipeline::new(config(settings), DetectorModel::default(), Path::new(".")).unwrap()
    }

    #[test]
    fn defaults_match_the_source() {
        let c = config(vec![phenomenological("a", 2.0, 600.0)]);
        assert_eq!(
            (c.f_rep_hz, c.pump_power_mw, c.sc_power_mw),
            (40e6, 360.0, 160.0)
        );
        assert_eq!(
            (c.pump_center_um, c.pulse_fwhm_s, c.power_calibration_mw),
            (1.55, 100e-15, 0.75)
        );
        c.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        assert!(config(vec![]).validate().is_err());
        let dup = config(vec![
            phenomenological("a", 2.0, 600.0),
            phenomenological("a", 2.1, 600.0),
        ]);
        assert!(dup.validate().is_err());
        let both = SettingSpec {
            gdd_fs2: Some(1000.0),
            ..phenomenological("a", 2.0, 600.0)
        };
        assert!(matches!(
            config(vec![both]).validate(),
            Err(Error::Config(_))
        ));
        let fiber = SettingSpec {
            label: "f".into(),
            center_um: None,
            fwhm_cm: None,
            gdd_fs2: Some(0.0),
        };
        assert!(config(vec![fiber]).validate().is_err());
        assert!(toml::from_str::<SourceConfig>("settings = []\nbogus = 1").is_err());
    }

    #[test]
    fn single_setting_report() {
        let p = pipeline(vec![phenomenological("mid", 2.0, 1000.0)]);
        let report = p.tuning_scan().unwrap();
        assert_eq!(report.settings.len(), 1);
        let s = &report.settings[0];
        assert!(s.verify(40e6, p.detector()).unwrap());
        assert!((s.total_power_uw - 750.0).abs() < 1e-9);
        let ratio = s.sensor_w / 0.75e-3;
        assert!((0.9..=1.0 + 1e-12).contains(&ratio), "{ratio}");
        assert!(s.peak_cm > 1200.0 && s.peak_cm < 1800.0);
        assert_eq!(report.to_csv().lines().count(), 2);
    }

    #[test]
    fn order_does_not_change_results() {
        let a = phenomenological("a", 1.9, 1000.0);
        let b = phenomenological("b", 2.2, 1200.0);
        let one = pipeline(vec![a.clone(), b.clone()]).tuning_scan().unwrap();
        let two = pipeline(vec![b, a]).tuning_scan().unwrap();
        assert_eq!(one.settings[0], two.settings[1]);
        assert_eq!(one.settings[1], two.settings[0]);
        assert_eq!(one.usable_union(), two.usable_union());
    }

    #[test]
    fn unknown_label_and_error_annotation() {
        let p = pipeline(vec![phenomenological("a", 2.0, 600.0)]);
        assert!(matches!(p.run_setting("zz"), Err(Error::Config(_))));
        let bad = pipeline(vec![phenomenological("odd", 2.0, 600.0)]);
        let mut cfg = bad.config().clone();
        cfg.settings[0].center_um = Some(2.6);
        let err = Pipeline::new(cfg, DetectorModel::default(), Path::new("."))
            .unwrap()
            .run_setting("odd")
            .unwrap_err();
        assert!(err.to_string().starts_with("setting 'odd'"), "{err}");
    }

    #[test]
    fn thinner_crystals_widen_the_output() {
        let p = pipeline(vec![phenomenological("mid", 2.0, 1000.0)]);
        let rows = p.thickness_study("mid", &[0.5, 1.0, 2.0]).unwrap();
        assert!(rows[0].usable.width() > rows[1].usable.width());
        assert!(rows[1].usable.width() > rows[2].usable.width());
        let ratio = rows[0].acceptance_fwhm_cm / rows[1].acceptance_fwhm_cm;
        assert!((1.9..=2.1).contains(&ratio), "{ratio}");
        let default = p.run_setting("mid").unwrap();
        assert_eq!(rows[1].usable, default.usable);
        assert_eq!(rows[1].theta_external_deg, default.theta_external_deg);
    }

    #[test]
    fn usable_union_merges() {
        let p = pipeline(vec![phenomenological("a", 2.0, 600.0)]);
        let mut report = p.tuning_scan().unwrap();
        let mut second = report.settings[0].clone();
        second.usable = Band::new(report.settings[0].usable.hi - 1.0, 2900.0).unwrap();
        report.settings.push(second);
        let u = report.usable_union();
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].hi, 2900.0);
    }
}
