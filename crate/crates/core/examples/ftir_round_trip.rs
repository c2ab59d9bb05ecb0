//! Spectrum -> interferogram -> spectrum at 0.04 cm path difference.

use mircomb::spectral::{PowerSpectrum, SpectralGrid};
use mircomb::spectrometer::{
    interferogram_from_spectrum, required_samples, resolution, spectrum_from_interferogram,
    Apodization,
};

fn main() -> mircomb::Result<()> {
    let s = PowerSpectrum::gaussian(
        SpectralGrid::spanning(400.0, 3000.0, 1.0)?,
        1500.0,
        300.0,
        1.0,
    )?;
    let opd = 0.04;
    let n = 4 * (required_samples(opd, 3000.0) - 1) + 1;
    let ifg = interferogram_from_spectrum(&s, opd, n)?;
    println!(
        "{n} samples, step {:.3e} cm, zero-path signal {:.3e} W",
        ifg.step(),
        ifg.samples()[0]
    );

    for apod in [Apodization::None, Apodization::Triangular] {
        let back = spectrum_from_interferogram(&ifg, apod)?;
        let worst = s
            .grid()
            .points()
            .zip(s.density())
            .map(|(nu, d)| (back.density_at(nu).unwrap_or(0.0) - d).abs())
            .fold(0.0, f64::max);
        println!(
            "{apod:?}: resolution {:.2} cm^-1, worst deviation {:.2e} of peak",
            resolution(opd, apod),
            worst / s.peak().1
        );
    }
    Ok(())
}
