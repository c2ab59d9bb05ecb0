use mircomb::cli::RunConfig;
use mircomb::pipeline::Pipeline;
use mircomb::spectral::Band;
use mircomb::spectrometer::sensor_reading;

fn bundled() -> (RunConfig, Pipeline) {
    let cfg = RunConfig::bundled();
    let p = cfg.pipeline().unwrap();
    (cfg, p)
}

#[test]
fn bundled_scan_report_integrity() {
    let (cfg, p) = bundled();
    let report = p.tuning_scan().unwrap();
    assert_eq!(report.settings.len(), 5);
    let labels: Vec<_> = report.settings.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["s1", "s2", "s3", "s4", "s5"]);
    for s in &report.settings {
        assert!(
            s.verify(cfg.source.f_rep_hz, p.detector()).unwrap(),
            "{}",
            s.label
        );
        let ratio =
            sensor_reading(&s.spectrum, p.detector()) / (cfg.source.power_calibration_mw * 1e-3);
        assert!((0.9..=1.0 + 1e-12).contains(&ratio), "{}: {ratio}", s.label);
        assert!((25.0..=45.0).contains(&s.theta_external_deg));
    }
    let peaks: Vec<f64> = report.settings.iter().map(|s| s.peak_cm).collect();
    assert!(peaks.windows(2).all(|w| w[0] < w[1]), "{peaks:?}");
    assert!(peaks[0] <= 800.0 && peaks[4] >= 2000.0, "{peaks:?}");
    assert!(report.settings[0].octave);
}

#[test]
fn usable_union_covers_tuning_range() {
    let (_, p) = bundled();
    let union = p.tuning_scan().unwrap().usable_union();
    let need = Band::new(650.0, 2050.0).unwrap();
    assert!(
        union.iter().any(|b| b.lo <= need.lo && b.hi >= need.hi),
        "{union:?}"
    );
}

#[test]
fn shuffled_table_gives_identical_rows() {
    let (cfg, p) = bundled();
    let mut shuffled = cfg.source.clone();
    shuffled.settings.reverse();
    shuffled.settings.swap(0, 2);
    let q = Pipeline::new(shuffled, *p.detector(), &cfg.base_dir).unwrap();
    let a = p.tuning_scan().unwrap();
    let b = q.tuning_scan().unwrap();
    for row in &a.settings {
        let twin = b.settings.iter().find(|r| r.label == row.label).unwrap();
        assert_eq!(row, twin);
    }
    let order: Vec<_> = b.settings.iter().map(|s| s.label.clone()).collect();
    let expect: Vec<_> = q
        .config()
        .settings
        .iter()
        .map(|s| s.label.clone())
        .collect();
    assert_eq!(order, expect);
}

#[test]
fn repeated_runs_pick_the_same_angle() {
    let (_, p) = bundled();
    let a = p.run_setting("s3").unwrap();
    let b = p.run_setting("s3").unwrap();
    assert_eq!(a.theta_external_deg, b.theta_external_deg);
    assert_eq!(a.spectrum, b.spectrum);
}

#[test]
fn thickness_study_is_monotone_and_consistent() {
    let (cfg, p) = bundled();
    let t = cfg.thickness.as_ref().unwrap();
    let rows = p.thickness_study(&t.setting, &t.thicknesses_mm).unwrap();
    let widths: Vec<f64> = rows.iter().map(|r| r.usable.width()).collect();
    assert!(widths.windows(2).all(|w| w[0] > w[1]), "{widths:?}");
    let acc: Vec<f64> = rows.iter().map(|r| r.acceptance_fwhm_cm).collect();
    assert!(acc.windows(2).all(|w| w[0] > w[1]), "{acc:?}");
    let one = rows.iter().find(|r| r.thickness_mm == 1.0).unwrap();
    let default = p.run_setting(&t.setting).unwrap();
    assert_eq!(one.usable, default.usable);
    assert_eq!(one.fwhm_cm, default.fwhm_cm);
    assert!(rows
        .iter()
        .any(|r| (0.3..=0.5).contains(&r.thickness_mm) && r.usable.width() >= 900.0));
}

#[test]
fn errors_carry_the_setting_label() {
    let (cfg, _) = bundled();
    let mut src = cfg.source.clone();
    src.settings[1].center_um = Some(2.6);
    let p = Pipeline::new(
        src,
        mircomb::spectrometer::DetectorModel::default(),
        &cfg.base_dir,
    )
    .unwrap();
    let e = p.tuning_scan().unwrap_err();
    assert!(e.to_string().starts_with("setting 's2'"), "{e}");
    assert_eq!(e.exit_code(), 2);
    let e = p.thickness_study("s2", &[]).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}
