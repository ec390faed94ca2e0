use zitterlab::efftheory::Axis;
use zitterlab::experiment::{
    analyze, run_sweep, simulate, summary_value, Scenario, ScenarioConfig, ScenarioKind, PRESETS,
};
use zitterlab::Error;

fn small(name: &str) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(name).unwrap();
    cfg.set("grid_n", "64").unwrap();
    cfg
}

#[test]
fn presets_build_with_expected_kinds() {
    let expected = [
        ("fig2a-ref", ScenarioKind::CaseA, 1.0),
        ("fig2a-j0half", ScenarioKind::CaseA, 0.5),
        ("fig2a-j0tenth", ScenarioKind::CaseA, 0.1),
        ("fig2b-ref", ScenarioKind::CaseB, 1.0),
        ("fig2b-141", ScenarioKind::CaseB, 0.7),
        ("fig2b-200", ScenarioKind::CaseB, 0.5),
    ];
    assert_eq!(PRESETS.len(), 7);
    for (name, kind, j0) in expected {
        let s = Scenario::preset(name).unwrap();
        assert_eq!(s.kind(), kind, "{name}");
        assert!((s.j0() - j0).abs() < 0.01, "{name}: J0 = {}", s.j0());
    }
    let reso = Scenario::preset("fig3-reso").unwrap();
    assert_eq!(reso.kind(), ScenarioKind::Resonance);
    assert_eq!(reso.kind().zb_axis(), Axis::X);
    assert_eq!(reso.t_end, 2.0 * Scenario::preset("fig2a-ref").unwrap().t_end);
}

#[test]
fn config_text_round_trips() {
    for (name, _) in PRESETS {
        let cfg = ScenarioConfig::preset(name).unwrap();
        let back = ScenarioConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back.to_text(), cfg.to_text(), "{name}");
    }
    let parsed = ScenarioConfig::parse("# comment\npreset = fig2b-ref\nv_d = 30 # trailing\n").unwrap();
    assert_eq!(parsed.v_d, 30.0);
    assert_eq!(parsed.p0, [5.0, 0.0]);
}

#[test]
fn bad_configs_are_usage_errors() {
    let mut cfg = ScenarioConfig::preset("fig2a-ref").unwrap();
    assert!(matches!(cfg.set("no_such_key", "1"), Err(Error::Config(_))));
    assert!(cfg.set("grid_n", "many").is_err());
    cfg.set("dt", "0.5").unwrap();
    let err = cfg.build().unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn sample_times_cover_the_run() {
    let s = Scenario::preset("fig2a-ref").unwrap();
    let t = s.sample_times();
    assert_eq!(t.len(), 601);
    assert_eq!(t[0], 0.0);
    assert_eq!(*t.last().unwrap(), s.t_end);
    assert_eq!(s.snapshot_indices(), vec![0, 150, 300, 450, 600]);
}

#[test]
fn references_follow_the_scenario_resolution() {
    let s = small("fig2a-j0half").build().unwrap();
    let r = s.reference_config().unwrap().unwrap();
    assert_eq!(r.name, "fig2a-ref");
    assert_eq!(r.grid_n, 64);
    assert_eq!(r.v_d, 0.0);

    let mut custom = small("fig2a-ref");
    custom.set("reference", "none").unwrap();
    custom.set("v_d", "20").unwrap();
    let r = custom.build().unwrap().reference_config().unwrap().unwrap();
    assert_eq!(r.v_d, 0.0);
    assert_eq!(r.p0, custom.p0);
    assert!(small("fig2a-ref").build().unwrap().reference_config().unwrap().is_none());
}

#[test]
fn static_scenario_matches_closed_form_values() {
    let mut cfg = small("fig2a-ref");
    cfg.set("density_snapshots", "0").unwrap();
    let s = cfg.build().unwrap();
    let out = simulate(&s).unwrap();
    let report = analyze(&s, &out, None).unwrap();
    let m = report.measured;
    assert!((m.omega - 10.0).abs() < 0.3, "omega {}", m.omega);
    assert!((m.amplitude - 0.1).abs() < 0.005, "amplitude {}", m.amplitude);
    assert!(report.norm_drift < 1e-10);
    let text = report.to_summary(&s);
    assert_eq!(summary_value(&text, "measured_omega"), Some(m.omega));
    assert!(summary_value(&text, "predicted_omega").is_some());
}

#[test]
fn static_packet_splits_and_resonant_packet_does_not() {
    let mut cfg = small("fig2a-ref");
    cfg.set("t_end", "10").unwrap();
    cfg.set("density_snapshots", "2").unwrap();
    let out = simulate(&cfg.build().unwrap()).unwrap();
    let (t, density) = out.snapshots.last().unwrap();
    assert_eq!(*t, 10.0);
    assert_eq!(density.count_modes(1, 0.1), 2);
    assert!(out.snapshots[0].1.is_unimodal());

    let mut cfg = small("fig3-reso");
    cfg.set("t_end", "20").unwrap();
    cfg.set("density_snapshots", "2").unwrap();
    let out = simulate(&cfg.build().unwrap()).unwrap();
    assert!(out.unimodal_all);
    assert!(out.series.overlap.iter().all(|o| *o >= 0.9));
}

#[test]
fn sweep_rejects_resonant_points_and_skips_cdt() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = small("fig3-reso");
    base.set("t_end", "2").unwrap();
    assert!(run_sweep(&base, &[10.0], &[50.0], dir.path(), Some(1)).is_err());

    let mut base = small("fig2b-ref");
    base.set("grid_n", "32").unwrap();
    let cdt = 50.0 * 2.404_825_557_695_773 / 2.0;
    let r = run_sweep(&base, &[cdt], &[50.0], dir.path(), Some(1)).unwrap();
    assert_eq!(r.points[0].status.label(), "cdt");
    assert!(r.points[0].near_cdt);
    assert!(dir.path().join("sweep.csv").exists());
}
