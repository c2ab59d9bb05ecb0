//! Dual-comb read-out of a gas line at 950 spectra per second.

use mircomb::spectral::{Band, PowerSpectrum, SpectralGrid};
use mircomb::spectrometer::{
    dualcomb_nyquist_bandwidth, max_delta_f_rep, simulate_dualcomb, DetectorModel, DualCombConfig,
    GasLine, GasModel,
};

fn main() -> mircomb::Result<()> {
    let cfg = DualCombConfig::new(40e6, 950.0, Band::new(985.0, 1009.0)?)?;
    let b = dualcomb_nyquist_bandwidth(&cfg);
    let (zone, zb) = cfg.nyquist_zone();
    println!(
        "B = {:.1} GHz, zone {zone} = {:.2}-{:.2} cm^-1, compression {:.0}",
        b * 1e-9,
        zb.lo,
        zb.hi,
        cfg.compression_factor()
    );
    println!(
        "a 700 cm^-1 band would need delta_f_rep <= {:.1} Hz",
        max_delta_f_rep(40e6, 700.0)
    );

    let source = PowerSpectrum::gaussian(
        SpectralGrid::spanning(900.0, 1100.0, 0.25)?,
        1000.0,
        80.0,
        1.0,
    )?;
    let gas = GasModel::new(
        vec![GasLine {
            center: 997.3,
            peak_absorbance: 0.5,
            hwhm: 1.5,
        }],
        1.0,
    )?;
    let (_, out) = simulate_dualcomb(&source, Some(&gas), &cfg, 100, &DetectorModel::default(), 7)?;
    for (nu, d) in out.grid().points().zip(out.density()) {
        let t = d / source.density_at(nu).unwrap();
        println!(
            "{nu:>9.3} {t:>6.3} {}",
            "#".repeat((40.0 * t).round().max(0.0) as usize)
        );
    }
    Ok(())
}
