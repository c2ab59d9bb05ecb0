//! Frequency-comb bookkeeping: tooth positions, mode counting, per-mode
//! power and the offset cancellation of difference-frequency mixing.
//!
//! Teeth are indexed from zero frequency: tooth `n` sits at
//! `n * f_rep + f_ceo`.

use crate::error::{Error, Result};
use crate::spectral::{Band, PowerSpectrum, SPEED_OF_LIGHT_CM_S};

/// Offset used for the near-infrared branches when none is configured.
/// Any non-zero value exercises the cancellation path; the real oscillator
/// offset is not known.
pub const DEFAULT_NIR_CEO_HZ: f64 = 12.0e6;

/// A comb: repetition rate, carrier-envelope offset (reduced into
/// `[0, f_rep)`) and a spectral envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct CombDescriptor {
    f_rep: f64,
    f_ceo: f64,
    envelope: PowerSpectrum,
}

impl CombDescriptor {
    pub fn new(f_rep: f64, f_ceo: f64, envelope: PowerSpectrum) -> Result<Self> {
        if !(f_rep > 0.0) || !f_rep.is_finite() {
            return Err(Error::invalid(
                "comb::CombDescriptor::new",
                format!("repetition rate must be positive, got {f_rep} Hz"),
            ));
        }
        if !f_ceo.is_finite() {
            return Err(Error::invalid(
                "comb::CombDescriptor::new",
                "offset must be finite",
            ));
        }
        Ok(CombDescriptor {
            f_rep,
            f_ceo: f_ceo.rem_euclid(f_rep),
            envelope,
        })
    }

    pub fn f_rep(&self) -> f64 {
        self.f_rep
    }

    pub fn f_ceo(&self) -> f64 {
        self.f_ceo
    }

    pub fn envelope(&self) -> &PowerSpectrum {
        &self.envelope
    }

    /// Tooth spacing in cm^-1.
    pub fn spacing_wavenumber(&self) -> f64 {
        self.f_rep / SPEED_OF_LIGHT_CM_S
    }

    /// `(key, value)` pairs for run manifests; values are shortest
    /// round-trip decimal strings.
    pub fn manifest_entries(&self) -> [(&'static str, String); 2] {
        [
            ("f_rep_hz", format!("{}", self.f_rep)),
            ("f_ceo_hz", format!("{}", self.f_ceo)),
        ]
    }

    pub fn is_harmonic(&self) -> bool {
        is_harmonic(self)
    }

    pub fn tooth_frequency(&self, n: u64) -> f64 {
        tooth_frequency(self, n)
    }
}

/// Comb produced by mixing `a` and `b`: same repetition rate, offset
/// `a.f_ceo - b.f_ceo` reduced into `[0, f_rep)`.
pub fn dfg_comb(
    a: &CombDescriptor,
    b: &CombDescriptor,
    envelope: PowerSpectrum,
) -> Result<CombDescriptor> {
    if a.f_rep != b.f_rep {
        return Err(Error::invalid(
            "comb::dfg_comb",
            format!(
                "input combs must share one repetition rate, got {} Hz and {} Hz",
                a.f_rep, b.f_rep
            ),
        ));
    }
    CombDescriptor::new(a.f_rep, (a.f_ceo - b.f_ceo).rem_euclid(a.f_rep), envelope)
}

pub fn is_harmonic(c: &CombDescriptor) -> bool {
    c.f_ceo == 0.0
}

pub fn tooth_frequency(c: &CombDescriptor, n: u64) -> f64 {
    n as f64 * c.f_rep + c.f_ceo
}

/// Number of teeth `n >= 0` whose frequency lies in `[band.lo, band.hi]`
/// (both edges inclusive), compared in Hz.
pub fn mode_count(c: &CombDescriptor, band: &Band) -> u64 {
    count_teeth(c.f_rep, c.f_ceo, band)
}

pub(crate) fn count_teeth(f_rep: f64, f_ceo: f64, band: &Band) -> u64 {
    let lo = band.lo * SPEED_OF_LIGHT_CM_S;
    let hi = band.hi * SPEED_OF_LIGHT_CM_S;
    let tooth = |n: i64| n as f64 * f_rep + f_ceo;

    let mut first = ((lo - f_ceo) / f_rep).ceil().max(0.0) as i64;
    while first > 0 && tooth(first - 1) >= lo {
        first -= 1;
    }
    while tooth(first) < lo {
        first += 1;
    }
    let mut last = ((hi - f_ceo) / f_rep).floor() as i64;
    while tooth(last + 1) <= hi {
        last += 1;
    }
    while last >= 0 && tooth(last) > hi {
        last -= 1;
    }
    if last < first {
        0
    } else {
        (last - first + 1) as u64
    }
}

/// Power carried by one tooth at `nu` (cm^-1), in W: the interpolated
/// density times the tooth spacing `f_rep / c`.
pub fn power_per_mode(s: &PowerSpectrum, f_rep: f64, nu: f64) -> Result<f64> {
    let density = s.density_at(nu).ok_or_else(|| {
        Error::invalid(
            "comb::power_per_mode",
            format!(
                "{nu} cm^-1 lies outside the spectrum grid [{}, {}]",
                s.grid().start(),
                s.grid().end()
            ),
        )
    })?;
    Ok(density * 1e-6 * f_rep / SPEED_OF_LIGHT_CM_S)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{total_power, SpectralGrid};
    use proptest::prelude::*;

    fn flat(start: f64, count: usize) -> PowerSpectrum {
        PowerSpectrum::from_fn(SpectralGrid::new(start, 1.0, count).unwrap(), |_| 1.0).unwrap()
    }

    fn comb(f_rep: f64, f_ceo: f64) -> CombDescriptor {
        CombDescriptor::new(f_rep, f_ceo, flat(500.0, 10)).unwrap()
    }

    fn brute_force(f_rep: f64, f_ceo: f64, band: &Band) -> u64 {
        let lo = band.lo * SPEED_OF_LIGHT_CM_S;
        let hi = band.hi * SPEED_OF_LIGHT_CM_S;
        let n_max = (hi / f_rep) as u64 + 2;
        (0..=n_max)
            .filter(|&n| {
                let f = n as f64 * f_rep + f_ceo;
                f >= lo && f <= hi
            })
            .count() as u64
    }

    #[test]
    fn offset_cancellation() {
        let a = comb(40e6, 12e6);
        let b = comb(40e6, 12e6);
        let c = dfg_comb(&a, &b, flat(600.0, 5)).unwrap();
        assert_eq!(c.f_ceo(), 0.0);
        assert!(c.is_harmonic());

        let c = dfg_comb(&comb(40e6, 12e6), &comb(40e6, 5e6), flat(600.0, 5)).unwrap();
        assert_eq!(c.f_ceo(), 7e6);
        assert!(!is_harmonic(&c));
        let c = dfg_comb(&comb(40e6, 5e6), &comb(40e6, 12e6), flat(600.0, 5)).unwrap();
        assert_eq!(c.f_ceo(), 33e6);

        assert!(dfg_comb(&comb(40e6, 0.0), &comb(40.1e6, 0.0), flat(600.0, 5)).is_err());
    }

    #[test]
    fn teeth() {
        let h = comb(40e6, 0.0);
        assert_eq!(tooth_frequency(&h, 0), 0.0);
        let f = tooth_frequency(&h, 524_637);
        assert_eq!(f, 2.098_548e13);
        assert!((f / SPEED_OF_LIGHT_CM_S - 700.0).abs() < 0.01);
        assert_eq!(tooth_frequency(&comb(40e6, 7e6), 1), 47e6);
    }

    #[test]
    fn offset_is_reduced() {
        assert_eq!(comb(40e6, 47e6).f_ceo(), 7e6);
        assert_eq!(comb(40e6, -7e6).f_ceo(), 33e6);
        assert!(CombDescriptor::new(0.0, 0.0, flat(1.0, 2)).is_err());
    }

    #[test]
    fn mode_count_700_wavenumbers() {
        let h = comb(40e6, 0.0);
        let band = Band::new(1000.0, 1700.0).unwrap();
        let n = mode_count(&h, &band);
        assert_eq!(n, brute_force(40e6, 0.0, &band));
        assert!(n == 524_636 || n == 524_637, "{n}");
        assert!((n as f64 - 5e5).abs() / 5e5 < 0.05);
    }

    #[test]
    fn mode_count_edges() {
        let h = comb(40e6, 0.0);
        let spacing = h.spacing_wavenumber();
        // Strictly between teeth 100 and 101.
        let lo = 100.25 * spacing;
        assert_eq!(
            mode_count(
                &h,
                &Band {
                    lo,
                    hi: lo + 0.5 * spacing
                }
            ),
            0
        );
        // Exactly k spacings, aligned on teeth, via exactly representable
        // frequencies: f_rep = c / 1024 cm^-1 makes every tooth exact.
        let f_rep = SPEED_OF_LIGHT_CM_S / 1024.0;
        let aligned = CombDescriptor::new(f_rep, 0.0, flat(1.0, 2)).unwrap();
        let band = Band {
            lo: 2000.0 / 1024.0,
            hi: 2010.0 / 1024.0,
        };
        assert_eq!(mode_count(&aligned, &band), 11);
    }

    #[test]
    fn per_mode_power() {
        let s = flat(500.0, 1001);
        let p = power_per_mode(&s, 40e6, 1000.0).unwrap();
        let spacing: f64 = 40e6 / 2.997_924_58e10;
        assert!((spacing - 1.3343e-3).abs() < 1e-7);
        assert!((p - 1e-6 * spacing).abs() < 1e-20);
        assert!((p - 1.334e-9).abs() < 1e-12);
        assert!((power_per_mode(&s, 80e6, 1000.0).unwrap() - 2.0 * p).abs() < 1e-20);
        let zero = PowerSpectrum::zeros(*s.grid());
        assert_eq!(power_per_mode(&zero, 40e6, 1000.0).unwrap(), 0.0);
        assert!(power_per_mode(&s, 40e6, 10.0).is_err());
    }

    #[test]
    fn manifest_strings_round_trip() {
        let c = comb(40e6, 12.5e6);
        let [(k1, v1), (k2, v2)] = c.manifest_entries();
        assert_eq!((k1, v1.as_str()), ("f_rep_hz", "40000000"));
        assert_eq!((k2, v2.as_str()), ("f_ceo_hz", "12500000"));
    }

    #[test]
    fn summed_mode_power_matches_band_power() {
        let f_rep = 40e6;
        let band = Band::new(1000.0, 1020.0).unwrap();
        for step in [0.5, 0.25, 0.125] {
            let g = SpectralGrid::spanning(990.0, 1030.0, step).unwrap();
            let s =
                PowerSpectrum::from_fn(g, |nu| 1.0 + 0.3 * ((nu - 1000.0) / 3.0).sin()).unwrap();
            let c = CombDescriptor::new(f_rep, 0.0, s.clone()).unwrap();
            let first = (band.lo * SPEED_OF_LIGHT_CM_S / f_rep).ceil() as u64;
            let n = mode_count(&c, &band);
            let teeth_w: f64 = (first..first + n)
                .map(|k| {
                    power_per_mode(&s, f_rep, tooth_frequency(&c, k) / SPEED_OF_LIGHT_CM_S).unwrap()
                })
                .sum();
            let band_w = total_power(&s.masked(&band)) * 1e-6;
            let exact_w = s.integrate_between(band.lo, band.hi) * 1e-6;
            let err = (teeth_w - exact_w).abs() / exact_w;
            assert!(err < 1e-3, "step {step}: {err}");
            assert!(band_w > 0.0);
        }
    }

    proptest! {
        #[test]
        fn equal_offsets_always_cancel(ceo in 0.0f64..40e6, rep in 1e6f64..1e9) {
            let a = CombDescriptor::new(rep, ceo, flat(1.0, 2)).unwrap();
            let b = a.clone();
            let c = dfg_comb(&a, &b, flat(1.0, 2)).unwrap();
            prop_assert!(c.is_harmonic());
        }

        #[test]
        fn tooth_spacing_is_exact(n in 0u64..10_000_000, ceo_mhz in 0u32..40) {
            let c = comb(40e6, ceo_mhz as f64 * 1e6);
            prop_assert_eq!(tooth_frequency(&c, n + 1) - tooth_frequency(&c, n), 40e6);
        }

        #[test]
        fn mode_count_matches_enumeration(lo in 1.0f64..40.0, width in 0.0f64..20.0, ceo in 0.0f64..40e6) {
            let band = Band { lo, hi: lo + width };
            prop_assert_eq!(count_teeth(40e6, ceo, &band), brute_force(40e6, ceo, &band));
            let wider = Band { lo, hi: lo + width + 0.7 };
            prop_assert!(count_teeth(40e6, ceo, &wider) >= count_teeth(40e6, ceo, &band));
        }
    }
}
