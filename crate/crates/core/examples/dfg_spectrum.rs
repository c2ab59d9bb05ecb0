//! One mid-infrared output spectrum: Gaussian continuum at 2.0 um mixed
//! with the 1.55 um pump in 1 mm GaSe, angle optimized for the power sensor.

use mircomb::crystal::{optimize_theta, DfgKernel, PhaseMatchSetting, UniaxialCrystal};
use mircomb::propagation::phenomenological_continuum;
use mircomb::pulse::{gaussian_pulse, to_spectrum, TimeGrid};
use mircomb::spectral::{fwhm, usable_width, SpectralGrid};
use mircomb::spectrometer::{sensor_reading, DetectorModel};

fn main() -> mircomb::Result<()> {
    let pulse = gaussian_pulse(100e-15, 1.0, 1.55, TimeGrid::new(4096, 2e-15)?)?;
    let pump = to_spectrum(&pulse, 360.0, 40e6)?;
    let continuum = phenomenological_continuum(2.0, 1000.0, 160.0)?;
    let gase = UniaxialCrystal::gase(1.0)?;
    let detector = DetectorModel::default();

    let kernel = DfgKernel::new(
        &pump,
        &continuum,
        &gase,
        SpectralGrid::spanning(400.0, 3000.0, 1.0)?,
    )?;
    let theta = optimize_theta(&kernel, (25.0, 45.0), |s| sensor_reading(s, &detector))?;
    let out = kernel.spectrum(&PhaseMatchSetting::new(theta)?, 0.75)?;
    let usable = usable_width(&out, 0.1)?;
    println!(
        "theta {theta:.3} deg: peak {} cm^-1, fwhm {:.1} cm^-1, usable {:.0}-{:.0} cm^-1, sensor {:.3} mW",
        out.peak_wavenumber(),
        fwhm(&out)?,
        usable.lo,
        usable.hi,
        sensor_reading(&out, &detector) * 1e3
    );
    for nu in (600..=2400).step_by(200) {
        let d = out.density_at(nu as f64).unwrap_or(0.0);
        println!(
            "{nu:>5} {:<60}",
            "#".repeat((60.0 * d / out.peak().1).round() as usize)
        );
    }
    Ok(())
}
