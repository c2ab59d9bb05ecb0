//! Red-shifted continuum from the bundled illustrative fiber, tuned by the
//! pre-fiber chirp. Takes a few seconds per chirp value.

use mircomb::cli::RunConfig;
use mircomb::propagation::{red_band_stats, simulate_supercontinuum};
use mircomb::pulse::{gaussian_peak_power, gaussian_pulse, TimeGrid};

fn main() -> mircomb::Result<()> {
    let cfg = RunConfig::bundled();
    let src = &cfg.source;
    let model = src
        .fiber_model
        .as_ref()
        .expect("bundled config has a fiber model");
    let grid = TimeGrid::new(model.n_samples, model.dt_s)?;
    let p0 = gaussian_peak_power(model.seed_energy_nj * 1e-9, src.pulse_fwhm_s);
    let seed = gaussian_pulse(src.pulse_fwhm_s, p0, src.pump_center_um, grid)?;

    for gdd_fs2 in [0.0, 3000.0, 6000.0] {
        let s = simulate_supercontinuum(
            &seed,
            &model.fiber,
            &model.step,
            gdd_fs2 * 1e-30,
            src.sc_power_mw,
            src.f_rep_hz,
        )?;
        let (red, centroid) = red_band_stats(&s, 1.65);
        println!(
            "gdd {gdd_fs2:>6} fs^2: {:.1}% beyond 1.65 um, red centroid {:.3} um",
            100.0 * red,
            1.0e4 / centroid
        );
    }
    Ok(())
}
