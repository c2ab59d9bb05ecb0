//! Command-line front end: strict TOML run configuration, one subcommand
//! per capability, CSV output written atomically, optional SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::comb::{mode_count, power_per_mode, CombDescriptor};
use crate::crystal::{
    acceptance_fwhm, external_angle, optimize_theta, pm_angle, DfgKernel, PhaseMatchSetting,
};
use crate::error::{Error, Result};
use crate::pipeline::{
    Objective, Pipeline, SettingReport, SourceConfig, ThicknessRow, USABLE_LEVEL,
};
use crate::propagation::{phenomenological_continuum, red_band_stats};
use crate::spectral::{
    fwhm, total_power, usable_width, wavenumber_to_frequency, Band, PowerSpectrum, SpectralGrid,
};
use crate::spectrometer::{
    dualcomb_nyquist_bandwidth, interferogram_from_spectrum, required_samples, resolution,
    sensor_reading, simulate_dualcomb, snr_direct, snr_interferometric,
    spectrum_from_interferogram, Apodization, DetectorModel, DualCombConfig, GasLine, GasModel,
};

/// Configuration used when `--config` is omitted.
pub const DEFAULT_CONFIG: &str = include_str!("../data/default.toml");

fn default_nep_pw() -> f64 {
    10.0
}
fn default_integration_ms() -> f64 {
    10.0
}
fn default_detector_band() -> [f64; 2] {
    [1.0e4 / 20.0, 1.0e4 / 3.7]
}
fn default_blocker() -> f64 {
    3.5
}
fn default_opd() -> f64 {
    0.04
}
fn default_margin() -> f64 {
    4.0
}
fn default_delta_f() -> f64 {
    950.0
}
fn default_dc_band() -> [f64; 2] {
    [985.0, 1009.0]
}
fn default_frames() -> usize {
    100
}
fn default_scale() -> f64 {
    1.0
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default = "default_nep_pw")]
    pub nep_pw: f64,
    #[serde(default = "default_integration_ms")]
    pub integration_ms: f64,
    #[serde(default = "default_detector_band")]
    pub band_cm: [f64; 2],
    #[serde(default = "default_blocker")]
    pub blocker_edge_um: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        toml::from_str("").expect("all fields defaulted")
    }
}

impl DetectorSection {
    pub fn model(&self) -> Result<DetectorModel> {
        let band =
            Band::new(self.band_cm[0], self.band_cm[1]).map_err(cfg_err("detector.band_cm"))?;
        DetectorModel::new(
            self.nep_pw * 1e-12,
            self.integration_ms * 1e-3,
            band,
            self.blocker_edge_um,
        )
        .map_err(cfg_err("detector"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ApodizationName {
    None,
    Triangular,
}

impl From<ApodizationName> for Apodization {
    fn from(a: ApodizationName) -> Self {
        match a {
            ApodizationName::None => Apodization::None,
            ApodizationName::Triangular => Apodization::Triangular,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtirSection {
    #[serde(default = "default_opd")]
    pub opd_max_cm: f64,
    #[serde(default = "default_apodization")]
    pub apodization: ApodizationName,
    /// Sampling density relative to the Nyquist minimum.
    #[serde(default = "default_margin")]
    pub nyquist_margin: f64,
    /// Setting whose output is measured; the first setting when absent.
    #[serde(default)]
    pub setting: Option<String>,
}

fn default_apodization() -> ApodizationName {
    ApodizationName::None
}

impl Default for FtirSection {
    fn default() -> Self {
        toml::from_str("").expect("all fields defaulted")
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualCombSection {
    #[serde(default = "default_delta_f")]
    pub delta_f_rep_hz: f64,
    #[serde(default = "default_dc_band")]
    pub band_cm: [f64; 2],
    #[serde(default = "default_frames")]
    pub frames: usize,
    #[serde(default)]
    pub setting: Option<String>,
}

impl Default for DualCombSection {
    fn default() -> Self {
        toml::from_str("").expect("all fields defaulted")
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    /// CSV with `center,peak_absorbance,hwhm`; added to `lines`.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default = "default_scale")]
    pub pathlength_scale: f64,
    #[serde(default)]
    pub lines: Vec<GasLine>,
}

impl Default for GasSection {
    fn default() -> Self {
        toml::from_str("").expect("all fields defaulted")
    }
}

/// Chirp table for the fiber-model continuum sweep, fs².
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScSection {
    #[serde(default)]
    pub gdd_fs2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThicknessSection {
    pub setting: String,
    pub thicknesses_mm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    #[serde(default)]
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        toml::from_str("").expect("all fields defaulted")
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub source: SourceConfig,
    #[serde(default)]
    pub detector: DetectorSection,
    #[serde(default)]
    pub ftir: FtirSection,
    #[serde(default)]
    pub dualcomb: DualCombSection,
    #[serde(default)]
    pub gas: GasSection,
    #[serde(default)]
    pub sc: ScSection,
    #[serde(default)]
    pub thickness: Option<ThicknessSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory that relative paths in the file resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn cfg_err(what: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Config(format!("{what}: {e}"))
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RunConfig::parse(&text, &base)
    }

    pub fn bundled() -> Self {
        RunConfig::parse(DEFAULT_CONFIG, Path::new(".")).expect("bundled config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.detector.model()?;
        let f = &self.ftir;
        if !(f.opd_max_cm > 0.0 && f.nyquist_margin >= 1.0) {
            return Err(Error::Config(
                "ftir: need opd_max_cm > 0 and nyquist_margin >= 1".into(),
            ));
        }
        if self.dualcomb.frames == 0 {
            return Err(Error::Config("dualcomb.frames must be >= 1".into()));
        }
        self.dualcomb_config(self.dualcomb.delta_f_rep_hz, self.dualcomb.band_cm)?;
        if self.gas.file.is_none() {
            GasModel::new(self.gas.lines.clone(), self.gas.pathlength_scale)
                .map_err(cfg_err("gas"))?;
        }
        for label in [&self.ftir.setting, &self.dualcomb.setting]
            .into_iter()
            .flatten()
        {
            self.require_setting(label)?;
        }
        if let Some(t) = &self.thickness {
            self.require_setting(&t.setting)?;
            if t.thicknesses_mm.is_empty() || t.thicknesses_mm.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Config(
                    "thickness.thicknesses_mm must be a non-empty list of values > 0".into(),
                ));
            }
        }
        if !self.sc.gdd_fs2.is_empty() && self.source.fiber_model.is_none() {
            return Err(Error::Config(
                "sc.gdd_fs2 needs a [source.fiber_model] section".into(),
            ));
        }
        Ok(())
    }

    fn require_setting(&self, label: &str) -> Result<()> {
        if self.source.settings.iter().any(|s| s.label == label) {
            Ok(())
        } else {
            Err(Error::Config(format!("no setting labelled '{label}'")))
        }
    }

    fn dualcomb_config(&self, delta_f: f64, band: [f64; 2]) -> Result<DualCombConfig> {
        let band = Band::new(band[0], band[1]).map_err(cfg_err("dualcomb.band_cm"))?;
        DualCombConfig::new(self.source.f_rep_hz, delta_f, band).map_err(cfg_err("dualcomb"))
    }

    pub fn gas_model(&self) -> Result<GasModel> {
        let mut lines = self.gas.lines.clone();
        if let Some(p) = &self.gas.file {
            let path = self.base_dir.join(p);
            let f = fs::File::open(&path).map_err(|e| {
                Error::Config(format!("cannot read gas file {}: {e}", path.display()))
            })?;
            let from_file = GasModel::from_csv(std::io::BufReader::new(f), 1.0)?;
            lines.extend_from_slice(from_file.lines());
        }
        GasModel::new(lines, self.gas.pathlength_scale)
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        Pipeline::new(self.source.clone(), self.detector.model()?, &self.base_dir)
    }

    fn first_setting(&self) -> String {
        self.source.settings[0].label.clone()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mircomb",
    version,
    about = "Mid-infrared DFG frequency comb simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Run configuration (TOML); the bundled defaults when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding output.dir.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Noise seed, overriding the config seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Also write an SVG plot next to each spectrum CSV.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between wavenumber, wavelength and frequency.
    Units(UnitsArgs),
    /// Count comb teeth in a band and report per-mode power.
    Comb(CombArgs),
    /// Phase-matching angles and acceptance in the crystal.
    Pm(PmArgs),
    /// Near-infrared continuum from the fiber model or a Gaussian stand-in.
    Sc(ScArgs),
    /// Mid-infrared DFG spectrum for one setting.
    Dfg(DfgArgs),
    /// FTIR interferogram and recovered spectrum.
    Ftir(FtirArgs),
    /// Dual-comb read-out with optional gas cell.
    Dualcomb(DualcombArgs),
    /// Direct and interferometric S/N per channel.
    Snr(SnrArgs),
    /// Every configured setting, written as report.csv.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct UnitsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_name = "CM-1", group = "quantity")]
    pub wavenumber: Option<f64>,
    #[arg(long, value_name = "UM", group = "quantity")]
    pub wavelength_um: Option<f64>,
    #[arg(long, value_name = "HZ", group = "quantity")]
    pub frequency_hz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CombArgs {
    #[command(flatten)]
    pub common: Common,
    /// Band width, cm^-1.
    #[arg(long, value_name = "CM-1")]
    pub band: f64,
    /// Lower band edge, cm^-1.
    #[arg(long, value_name = "CM-1", default_value_t = 600.0)]
    pub start: f64,
    /// Repetition rate, overriding source.f_rep_hz.
    #[arg(long, value_name = "MHZ")]
    pub frep_mhz: Option<f64>,
    /// Carrier-envelope offset.
    #[arg(long, value_name = "MHZ", default_value_t = 0.0)]
    pub ceo_mhz: f64,
}

#[derive(Debug, Args)]
pub struct PmArgs {
    #[command(flatten)]
    pub common: Common,
    /// Pump wavelength, overriding source.pump_center_um.
    #[arg(long, value_name = "UM")]
    pub pump_um: Option<f64>,
    /// Single idler wavenumber; scans 500-2900 cm^-1 when omitted.
    #[arg(long, value_name = "CM-1")]
    pub idler: Option<f64>,
    #[arg(long, value_name = "MM")]
    pub thickness_mm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScArgs {
    #[command(flatten)]
    pub common: Common,
    /// Chirp values for the fiber model, overriding sc.gdd_fs2.
    #[arg(long, value_name = "FS2", num_args = 1.., allow_negative_numbers = true)]
    pub gdd_fs2: Vec<f64>,
    /// Gaussian stand-in centre; needs --fwhm-cm.
    #[arg(long, value_name = "UM", requires = "fwhm_cm")]
    pub center_um: Option<f64>,
    #[arg(long, value_name = "CM-1", requires = "center_um")]
    pub fwhm_cm: Option<f64>,
    /// Continuum power, overriding source.sc_power_mw.
    #[arg(long, value_name = "MW")]
    pub power_mw: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveName {
    Sensor,
    PeakDensity,
}

#[derive(Debug, Args)]
pub struct DfgArgs {
    #[command(flatten)]
    pub common: Common,
    /// Setting label; the first setting when omitted.
    #[arg(long)]
    pub setting: Option<String>,
    /// Fixed external angle instead of the optimized one.
    #[arg(long, value_name = "DEG")]
    pub theta_deg: Option<f64>,
    #[arg(long, value_name = "MM")]
    pub thickness_mm: Option<f64>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveName>,
}

#[derive(Debug, Args)]
pub struct FtirArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub setting: Option<String>,
    /// Measure this spectrum CSV instead of a setting's output.
    #[arg(long, value_name = "PATH", conflicts_with = "setting")]
    pub spectrum: Option<PathBuf>,
    #[arg(long, value_name = "CM")]
    pub opd_cm: Option<f64>,
    #[arg(long, value_enum)]
    pub apodization: Option<ApodizationName>,
}

#[derive(Debug, Args)]
pub struct DualcombArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub setting: Option<String>,
    #[arg(long, value_name = "HZ")]
    pub delta_f_hz: Option<f64>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long, value_name = "CM-1", requires = "band_hi")]
    pub band_lo: Option<f64>,
    #[arg(long, value_name = "CM-1", requires = "band_lo")]
    pub band_hi: Option<f64>,
    /// Ignore the gas section.
    #[arg(long)]
    pub no_gas: bool,
}

#[derive(Debug, Args)]
pub struct SnrArgs {
    #[command(flatten)]
    pub common: Common,
    /// Total power spread over the channels.
    #[arg(long, value_name = "MW")]
    pub power_mw: f64,
    #[arg(long, default_value_t = 1000)]
    pub channels: u64,
    /// NEP, overriding detector.nep_pw.
    #[arg(long, value_name = "PW")]
    pub nep_pw: Option<f64>,
    #[arg(long, value_name = "MS")]
    pub integration_ms: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_name = "MM")]
    pub thickness_mm: Option<f64>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveName>,
    /// Skip the thickness study even when configured.
    #[arg(long)]
    pub no_thickness: bool,
}

/// What a command did: the printed summary and the files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub written: Vec<PathBuf>,
}

struct Output {
    dir: PathBuf,
    plot: bool,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(common: &Common, cfg: &RunConfig) -> Result<Self> {
        let dir = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
        fs::create_dir_all(&dir)?;
        Ok(Output {
            dir,
            plot: common.plot || cfg.output.plot,
            written: Vec::new(),
        })
    }

    fn csv(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        self.written.push(path);
        if self.plot {
            if let Some(svg) = svg_plot(text, name.trim_end_matches(".csv")) {
                let path = self.dir.join(name.replace(".csv", ".svg"));
                write_atomic(&path, svg.as_bytes())?;
                self.written.push(path);
            }
        }
        Ok(())
    }

    fn done(self, summary: String) -> Outcome {
        Outcome {
            summary,
            written: self.written,
        }
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Line plot of the second CSV column against the first. `None` when the
/// text has fewer than two numeric rows.
pub fn svg_plot(csv: &str, title: &str) -> Option<String> {
    let mut lines = csv.lines();
    let header = lines.next()?;
    let mut cols = header.split(',');
    let (xlabel, ylabel) = (cols.next()?, cols.next()?);
    let pts: Vec<(f64, f64)> = lines
        .filter_map(|l| {
            let mut c = l.split(',');
            Some((c.next()?.parse().ok()?, c.next()?.parse().ok()?))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (x0, x1) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut y0, mut y1) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (w, h, m) = (640.0, 400.0, 60.0);
    let sx = |x: f64| m + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut path = String::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        let _ = write!(
            path,
            "{}{:.2},{:.2} ",
            if i == 0 { "M" } else { "L" },
            sx(x),
            sy(y)
        );
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(
        svg,
        r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1.2"/>"#,
        path.trim_end()
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#,
        w / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 15.0,
        xml_escape(xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{}</text>"#,
        h / 2.0,
        h / 2.0,
        xml_escape(ylabel)
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">{x:.4e}</text>"#,
            sx(x),
            h - m + 15.0
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{y:.3e}</text>"#,
            m - 4.0,
            sy(y) + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::bundled(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn describe(s: &PowerSpectrum) -> Result<String> {
    let usable = usable_width(s, USABLE_LEVEL)?;
    Ok(format!(
        "peak {:.1} cm^-1, fwhm {:.1} cm^-1, usable {:.1}-{:.1} cm^-1 ({:.1} wide), power {:.4} mW",
        s.peak_wavenumber(),
        fwhm(s)?,
        usable.lo,
        usable.hi,
        usable.width(),
        total_power(s) * 1e-3
    ))
}

fn objective(name: ObjectiveName) -> Objective {
    match name {
        ObjectiveName::Sensor => Objective::Sensor,
        ObjectiveName::PeakDensity => Objective::PeakDensity,
    }
}

/// Runs one command.
pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Units(a) => units(a),
        Command::Comb(a) => comb(a),
        Command::Pm(a) => pm(a),
        Command::Sc(a) => sc(a),
        Command::Dfg(a) => dfg(a),
        Command::Ftir(a) => ftir(a),
        Command::Dualcomb(a) => dualcomb(a),
        Command::Snr(a) => snr(a),
        Command::Pipeline(a) => pipeline(a),
    }
}

fn units(a: UnitsArgs) -> Result<Outcome> {
    const OP: &str = "cli::units";
    let nu = match (a.wavenumber, a.wavelength_um, a.frequency_hz) {
        (Some(nu), _, _) => nu,
        (_, Some(l), _) => crate::spectral::wavelength_to_wavenumber(l)?,
        (_, _, Some(f)) => crate::spectral::frequency_to_wavenumber(f),
        _ => {
            return Err(Error::invalid(
                OP,
                "give --wavenumber, --wavelength-um or --frequency-hz",
            ))
        }
    };
    let lambda = crate::spectral::wavenumber_to_wavelength(nu)?;
    Ok(Outcome {
        summary: format!(
            "{nu} cm^-1 = {lambda} um = {:e} Hz",
            wavenumber_to_frequency(nu)
        ),
        written: Vec::new(),
    })
}

fn comb(a: CombArgs) -> Result<Outcome> {
    let cfg = load_config(&a.common)?;
    let f_rep = a.frep_mhz.map_or(cfg.source.f_rep_hz, |m| m * 1e6);
    let band = Band::new(a.start, a.start + a.band)?;
    let flat = PowerSpectrum::from_fn(SpectralGrid::new(band.lo, a.band, 2)?, |_| 1.0)?;
    let c = CombDescriptor::new(f_rep, a.ceo_mhz * 1e6, flat)?;
    let n = mode_count(&c, &band);
    let per_mode = power_per_mode(c.envelope(), f_rep, band.lo)?;
    Ok(Outcome {
        summary: format!(
            "{n} modes in [{}, {}] cm^-1 at f_rep {} MHz (spacing {:.6e} cm^-1, {:.4e} W per mode at 1 uW/cm^-1)",
            band.lo,
            band.hi,
            f_rep * 1e-6,
            c.spacing_wavenumber(),
            per_mode
        ),
        written: Vec::new(),
    })
}

fn pm(a: PmArgs) -> Result<Outcome> {
    let mut cfg = load_config(&a.common)?;
    if let Some(t) = a.thickness_mm {
        cfg.source.thickness_mm = t;
    }
    let pipeline = cfg.pipeline()?;
    let crystal = pipeline.crystal();
    let pump_um = a.pump_um.unwrap_or(cfg.source.pump_center_um);
    let nu_p = crate::spectral::wavelength_to_wavenumber(pump_um)?;
    let row = |nu_i: f64| -> Result<(f64, f64, f64)> {
        let inside = pm_angle(crystal, nu_p, nu_i)?;
        Ok((
            inside,
            external_angle(crystal, inside, pump_um)?,
            acceptance_fwhm(crystal, nu_p, nu_i)?,
        ))
    };
    if let Some(nu_i) = a.idler {
        let (inside, outside, acc) = row(nu_i)?;
        return Ok(Outcome {
            summary: format!(
                "{nu_i} cm^-1 from {pump_um} um: theta {inside:.3} deg internal, {outside:.3} deg external, \
                 acceptance fwhm {acc:.1} cm^-1 at {} mm",
                crystal.thickness_mm()
            ),
            written: Vec::new(),
        });
    }
    let mut out = Output::new(&a.common, &cfg)?;
    let mut csv =
        String::from("idler_cm-1,theta_external_deg,theta_internal_deg,acceptance_fwhm_cm-1\n");
    let mut range = (f64::MAX, f64::MIN);
    for k in 0..=48 {
        let nu_i = 500.0 + 50.0 * k as f64;
        let (inside, outside, acc) = row(nu_i)?;
        range = (range.0.min(outside), range.1.max(outside));
        let _ = writeln!(csv, "{nu_i},{outside},{inside},{acc}");
    }
    out.csv("pm.csv", &csv)?;
    Ok(out.done(format!(
        "external phase-matching angle {:.2}-{:.2} deg over 500-2900 cm^-1 from {pump_um} um",
        range.0, range.1
    )))
}

fn sc(a: ScArgs) -> Result<Outcome> {
    let cfg = load_config(&a.common)?;
    let power = a.power_mw.unwrap_or(cfg.source.sc_power_mw);
    let mut out = Output::new(&a.common, &cfg)?;
    if let (Some(center), Some(width)) = (a.center_um, a.fwhm_cm) {
        let s = phenomenological_continuum(center, width, power)?;
        out.csv("sc.csv", &s.to_csv())?;
        let summary = describe(&s)?;
        return Ok(out.done(summary));
    }
    let gdds = if a.gdd_fs2.is_empty() {
        cfg.sc.gdd_fs2.clone()
    } else {
        a.gdd_fs2
    };
    if gdds.is_empty() {
        return Err(Error::Config(
            "no chirp values: set sc.gdd_fs2 or pass --gdd-fs2".into(),
        ));
    }
    let mut source = cfg.source.clone();
    source.sc_power_mw = power;
    source.settings = gdds
        .iter()
        .enumerate()
        .map(|(i, &g)| crate::pipeline::SettingSpec {
            label: format!("gdd{i}"),
            center_um: None,
            fwhm_cm: None,
            gdd_fs2: Some(g),
        })
        .collect();
    let pipeline = Pipeline::new(source, cfg.detector.model()?, &cfg.base_dir)?;
    let spectra = {
        use rayon::prelude::*;
        (0..gdds.len())
            .into_par_iter()
            .map(|i| pipeline.continuum(&format!("gdd{i}")))
            .collect::<Result<Vec<_>>>()?
    };
    let mut table =
        String::from("gdd_fs2,red_fraction_above_1.65um,red_centroid_cm-1,peak_cm-1,power_mw\n");
    for (g, s) in gdds.iter().zip(&spectra) {
        let (frac, centroid) = red_band_stats(s, 1.65);
        let _ = writeln!(
            table,
            "{g},{frac},{centroid},{},{}",
            s.peak_wavenumber(),
            total_power(s) * 1e-3
        );
        out.csv(&format!("sc_gdd{g}.csv"), &s.to_csv())?;
    }
    out.csv("sc_summary.csv", &table)?;
    let stats: Vec<(f64, f64)> = spectra.iter().map(|s| red_band_stats(s, 1.65)).collect();
    let frac = stats.iter().map(|s| s.0).fold(f64::MAX, f64::min);
    Ok(out.done(format!(
        "{} chirp settings, red centroid {:.1}-{:.1} cm^-1, at least {:.1}% of power beyond 1.65 um",
        gdds.len(),
        stats.iter().map(|s| s.1).fold(f64::MAX, f64::min),
        stats.iter().map(|s| s.1).fold(f64::MIN, f64::max),
        100.0 * frac
    )))
}

fn report_line(r: &SettingReport) -> String {
    format!(
        "{}: theta {:.3} deg, peak {:.1} cm^-1, fwhm {:.1} cm^-1, usable {:.1}-{:.1} cm^-1 ({:.1} wide), power {:.4} mW",
        r.label,
        r.theta_external_deg,
        r.peak_cm,
        r.fwhm_cm,
        r.usable.lo,
        r.usable.hi,
        r.usable.width(),
        r.total_power_uw * 1e-3
    )
}

fn dfg(a: DfgArgs) -> Result<Outcome> {
    let mut cfg = load_config(&a.common)?;
    if let Some(t) = a.thickness_mm {
        cfg.source.thickness_mm = t;
    }
    if let Some(o) = a.objective {
        cfg.source.objective = objective(o);
    }
    let label = a.setting.unwrap_or_else(|| cfg.first_setting());
    let pipeline = cfg.pipeline()?;
    let mut out = Output::new(&a.common, &cfg)?;
    let summary = match a.theta_deg {
        None => {
            let r = pipeline.run_setting(&label)?;
            out.csv(&format!("dfg_{label}.csv"), &r.spectrum.to_csv())?;
            report_line(&r)
        }
        Some(theta) => {
            let sc = pipeline.continuum(&label)?;
            let grid = SpectralGrid::spanning(400.0, 3000.0, cfg.source.output_step_cm)?;
            let kernel = DfgKernel::new(pipeline.pump(), &sc, pipeline.crystal(), grid)?;
            let fixed = PhaseMatchSetting::new(theta)?;
            let s = kernel
                .spectrum(&fixed, cfg.source.power_calibration_mw)
                .map_err(|e| e.in_setting(&label))?;
            out.csv(&format!("dfg_{label}.csv"), &s.to_csv())?;
            if total_power(&s) == 0.0 {
                return Err(Error::domain(
                    "cli::dfg",
                    format!("no output at theta {theta} deg"),
                ));
            }
            let [lo, hi] = cfg.source.theta_search_deg;
            let det = pipeline.detector();
            let best = optimize_theta(&kernel, (lo, hi), |s| sensor_reading(s, det))?;
            let raw = |t: f64| -> Result<f64> {
                let th = kernel.theta_internal(&PhaseMatchSetting::new(t)?);
                Ok(sensor_reading(&kernel.raw_spectrum(th)?, det))
            };
            format!(
                "{label}: theta {theta} deg (fixed, {:.3e} of the in-band power at the optimum {best:.3} deg), {}",
                raw(theta)? / raw(best)?,
                describe(&s)?
            )
        }
    };
    Ok(out.done(summary))
}

fn measured_spectrum(
    cfg: &RunConfig,
    setting: Option<String>,
    file: Option<&Path>,
) -> Result<PowerSpectrum> {
    if let Some(p) = file {
        let f = fs::File::open(p)?;
        return PowerSpectrum::from_csv(std::io::BufReader::new(f));
    }
    let label = setting.unwrap_or_else(|| cfg.first_setting());
    Ok(cfg.pipeline()?.run_setting(&label)?.spectrum)
}

fn ftir(a: FtirArgs) -> Result<Outcome> {
    let cfg = load_config(&a.common)?;
    let opd = a.opd_cm.unwrap_or(cfg.ftir.opd_max_cm);
    let apod: Apodization = a.apodization.unwrap_or(cfg.ftir.apodization).into();
    let setting = a.setting.or_else(|| cfg.ftir.setting.clone());
    let s = measured_spectrum(&cfg, setting, a.spectrum.as_deref())?;
    let n =
        (required_samples(opd, s.grid().end()) as f64 * cfg.ftir.nyquist_margin).ceil() as usize;
    let ifg = interferogram_from_spectrum(&s, opd, n)?;
    let back = spectrum_from_interferogram(&ifg, apod)?;
    let mut out = Output::new(&a.common, &cfg)?;
    out.csv("interferogram.csv", &ifg.to_csv())?;
    out.csv("ftir_spectrum.csv", &back.to_csv())?;
    Ok(out.done(format!(
        "resolution {:.2} cm^-1, {n} samples, {}",
        resolution(opd, apod),
        describe(&back)?
    )))
}

fn dualcomb(a: DualcombArgs) -> Result<Outcome> {
    let cfg = load_config(&a.common)?;
    let delta_f = a.delta_f_hz.unwrap_or(cfg.dualcomb.delta_f_rep_hz);
    let band = match (a.band_lo, a.band_hi) {
        (Some(lo), Some(hi)) => [lo, hi],
        _ => cfg.dualcomb.band_cm,
    };
    let dc = DualCombConfig::new(cfg.source.f_rep_hz, delta_f, Band::new(band[0], band[1])?)?;
    let frames = a.frames.unwrap_or(cfg.dualcomb.frames);
    let setting = a.setting.or_else(|| cfg.dualcomb.setting.clone());
    let s = measured_spectrum(&cfg, setting, None)?;
    let gas = if a.no_gas {
        None
    } else {
        Some(cfg.gas_model()?)
    };
    let (ifg, rec) = simulate_dualcomb(
        &s,
        gas.as_ref(),
        &dc,
        frames,
        &cfg.detector.model()?,
        cfg.seed,
    )?;
    let mut out = Output::new(&a.common, &cfg)?;
    out.csv("dualcomb_interferogram.csv", &ifg.to_csv())?;
    out.csv("dualcomb_spectrum.csv", &rec.to_csv())?;
    let b = dualcomb_nyquist_bandwidth(&dc);
    Ok(out.done(format!(
        "Nyquist bandwidth {:.1} GHz ({:.2} cm^-1), {frames} frames at {delta_f} Hz, {} bins of {:.4} cm^-1, \
         recovered power {:.4e} mW",
        b * 1e-9,
        crate::spectral::frequency_to_wavenumber(b),
        rec.grid().count(),
        rec.grid().step(),
        total_power(&rec) * 1e-3
    )))
}

fn snr(a: SnrArgs) -> Result<Outcome> {
    const OP: &str = "cli::snr";
    let cfg = load_config(&a.common)?;
    let mut d = cfg.detector.model()?;
    if let Some(nep) = a.nep_pw {
        d.nep = nep * 1e-12;
    }
    if let Some(t) = a.integration_ms {
        d.nep = d.nep_at(t * 1e-3);
        d.integration_time = t * 1e-3;
    }
    if a.channels == 0 || !(a.power_mw > 0.0) || !(d.nep > 0.0) {
        return Err(Error::invalid(
            OP,
            "need power > 0, channels >= 1 and nep > 0",
        ));
    }
    let p = a.power_mw * 1e-3 / a.channels as f64;
    Ok(Outcome {
        summary: format!(
            "per-channel power {:.3e} W: snr_direct {:.1e}, snr_interferometric {:.1e}",
            p,
            snr_direct(p, &d),
            snr_interferometric(p, &d)
        ),
        written: Vec::new(),
    })
}

fn pipeline(a: PipelineArgs) -> Result<Outcome> {
    let mut cfg = load_config(&a.common)?;
    if let Some(t) = a.thickness_mm {
        cfg.source.thickness_mm = t;
    }
    if let Some(o) = a.objective {
        cfg.source.objective = objective(o);
    }
    let p = cfg.pipeline()?;
    let report = p.tuning_scan()?;
    let mut out = Output::new(&a.common, &cfg)?;
    out.csv("report.csv", &report.to_csv())?;
    for s in &report.settings {
        out.csv(&format!("spectrum_{}.csv", s.label), &s.spectrum.to_csv())?;
    }
    let mut union = String::from("usable_lo_cm-1,usable_hi_cm-1\n");
    for b in report.usable_union() {
        let _ = writeln!(union, "{},{}", b.lo, b.hi);
    }
    out.csv("usable_union.csv", &union)?;
    if let (Some(t), false) = (&cfg.thickness, a.no_thickness) {
        let rows = p.thickness_study(&t.setting, &t.thicknesses_mm)?;
        out.csv("thickness.csv", &ThicknessRow::table_csv(&rows))?;
    }
    let peaks = report.settings.iter().map(|s| s.peak_cm);
    let (lo, hi) = peaks.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
    let union = report.usable_union();
    let span = union
        .iter()
        .map(|b| format!("{:.0}-{:.0}", b.lo, b.hi))
        .collect::<Vec<_>>()
        .join(", ");
    let widest = report
        .settings
        .iter()
        .map(|s| s.usable.width())
        .fold(0.0, f64::max);
    Ok(out.done(format!(
        "{} settings, peaks {lo:.1}-{hi:.1} cm^-1, usable union {span} cm^-1, widest usable {widest:.1} cm^-1",
        report.settings.len()
    )))
}
