//! The bundled five-setting scan and the crystal-thickness study.

use mircomb::cli::RunConfig;

fn main() -> mircomb::Result<()> {
    let cfg = RunConfig::bundled();
    let pipeline = cfg.pipeline()?;
    let report = pipeline.tuning_scan()?;
    for s in &report.settings {
        println!(
            "{}: theta {:.2} deg, peak {:>6.1}, fwhm {:>5.1}, usable {:>6.1}-{:>6.1} ({:>5.1}), {} modes, octave {}",
            s.label, s.theta_external_deg, s.peak_cm, s.fwhm_cm, s.usable.lo, s.usable.hi, s.usable.width(), s.mode_count, s.octave
        );
    }
    for b in report.usable_union() {
        println!("usable union {:.0}-{:.0} cm^-1", b.lo, b.hi);
    }

    let t = cfg
        .thickness
        .as_ref()
        .expect("bundled config has a thickness study");
    for row in pipeline.thickness_study(&t.setting, &t.thicknesses_mm)? {
        println!(
            "{} mm: usable {:.0} cm^-1, acceptance {:.0} cm^-1",
            row.thickness_mm,
            row.usable.width(),
            row.acceptance_fwhm_cm
        );
    }
    Ok(())
}
