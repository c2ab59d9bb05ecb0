//! Direct and interferometric S/N for 1 mW spread over 1000 channels.

use mircomb::spectrometer::{snr_direct, snr_interferometric, DetectorModel};

fn main() {
    let d = DetectorModel::default();
    for channels in [100.0, 1000.0, 10000.0] {
        let p = 1e-3 / channels;
        println!(
            "{channels:>6} channels: {p:.1e} W each, direct {:.1e}, interferometric {:.1e}",
            snr_direct(p, &d),
            snr_interferometric(p, &d)
        );
    }
    println!("NEP at 100 ms: {:.2e} W", d.nep_at(0.1));
}
