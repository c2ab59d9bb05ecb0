//! Type-I phase-matching angles and acceptance in GaSe pumped at 1.55 um.

use mircomb::crystal::{
    acceptance_fwhm, coverage_band, external_angle, index_e, index_o, pm_angle, UniaxialCrystal,
};
use mircomb::spectral::Band;

fn main() -> mircomb::Result<()> {
    let gase = UniaxialCrystal::gase(1.0)?;
    println!(
        "{} ({:?}), n_o(1.55) = {:.5}, n_e(1.55, 12 deg) = {:.5}",
        gase.name(),
        gase.sign(),
        index_o(&gase, 1.55)?,
        index_e(&gase, 1.55, 12.0)?
    );

    let nu_p = 1.0e4 / 1.55;
    println!("idler_cm-1  theta_int  theta_ext  acceptance@1mm  acceptance@0.5mm");
    let thin = gase.with_thickness(0.5)?;
    for nu_i in [600.0, 800.0, 1000.0, 1500.0, 2000.0, 2500.0] {
        let inside = pm_angle(&gase, nu_p, nu_i)?;
        println!(
            "{nu_i:>10}  {inside:>9.3}  {:>9.3}  {:>14.1}  {:>16.1}",
            external_angle(&gase, inside, 1.55)?,
            acceptance_fwhm(&gase, nu_p, nu_i)?,
            acceptance_fwhm(&thin, nu_p, nu_i)?
        );
    }

    let reach = coverage_band(1.55, &Band::new(1.7, 2.3)?)?;
    println!(
        "1.7-2.3 um continuum against 1.55 um reaches {:.1}-{:.1} cm^-1",
        reach.lo, reach.hi
    );
    Ok(())
}
