//! Tooth counting, per-mode power and offset cancellation for a 40 MHz comb.

use mircomb::comb::{dfg_comb, mode_count, power_per_mode, CombDescriptor, DEFAULT_NIR_CEO_HZ};
use mircomb::spectral::{Band, PowerSpectrum, SpectralGrid};

fn main() -> mircomb::Result<()> {
    let f_rep = 40e6;
    let flat = PowerSpectrum::from_fn(SpectralGrid::spanning(600.0, 1300.0, 1.0)?, |_| 1.0)?;

    let pump = CombDescriptor::new(f_rep, DEFAULT_NIR_CEO_HZ, flat.clone())?;
    let continuum = CombDescriptor::new(f_rep, DEFAULT_NIR_CEO_HZ, flat.clone())?;
    let mid_ir = dfg_comb(&pump, &continuum, flat.clone())?;
    println!(
        "input offsets {} Hz, DFG offset {} Hz, harmonic: {}",
        pump.f_ceo(),
        mid_ir.f_ceo(),
        mid_ir.is_harmonic()
    );

    let band = Band::new(600.0, 1300.0)?;
    println!(
        "{} modes in {}-{} cm^-1, spacing {:.6} cm^-1",
        mode_count(&mid_ir, &band),
        band.lo,
        band.hi,
        mid_ir.spacing_wavenumber()
    );
    println!(
        "1 uW/cm^-1 -> {:.3} nW per mode",
        power_per_mode(&flat, f_rep, 1000.0)? * 1e9
    );
    println!("tooth 750000 at {:.6e} Hz", mid_ir.tooth_frequency(750_000));
    Ok(())
}
