//! Margin sweeps, the 1-bit preset search and the command-line front end.

use std::process::Command;

use rfl_core::scenario::GateSpec;
use rfl_core::sweep::{
    run_sweep, search_one_bit, write_margin_csv, Axis, Grid, Objective, SearchBounds, SearchConfig,
    SweepSpec,
};
use rfl_core::UnitSystem;

fn idsn_spec(axis: Axis, values: Vec<f64>) -> SweepSpec {
    let mut s = SweepSpec::new(
        GateSpec::named("idsn", &UnitSystem::default()).unwrap(),
        axis,
    );
    s.grid = Some(Grid::Values(values));
    s
}

#[test]
fn sweep_is_independent_of_jobs() {
    let mut s = idsn_spec(Axis::V0, vec![0.4, 0.6, 0.8]);
    let one = run_sweep(&s).unwrap();
    s.jobs = 2;
    let two = run_sweep(&s).unwrap();
    assert_eq!(one, two);
    assert_eq!(one.nominal_index, 1);
    assert_eq!(one.points.len(), 3);
    for p in &one.points {
        assert_eq!(p.single.len(), 2);
        assert!(p.pair.is_some());
    }
}

#[test]
fn symmetric_axis_gives_coinciding_single_series() {
    let s = idsn_spec(Axis::Param("CJB_over_CJ".into()), vec![12.0, 16.7, 21.0]);
    let r = run_sweep(&s).unwrap();
    for (x, s1, s2) in r.single_series() {
        match (s1, s2) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-6, "at {x}: {a} vs {b}"),
            (a, b) => assert_eq!(a.is_some(), b.is_some(), "at {x}"),
        }
    }
    let (lo, hi) = r.window.expect("nominal point passes");
    assert!(lo <= 16.7 && 16.7 <= hi);
}

#[test]
fn margin_csv_has_both_files() {
    let s = idsn_spec(Axis::Dx, vec![-0.5, 0.0, 0.5]);
    let r = run_sweep(&s).unwrap();
    assert!(r.points.iter().all(|p| p.single.is_empty()));
    let dir = tempfile::tempdir().unwrap();
    let files = write_margin_csv(&r, dir.path(), "dx").unwrap();
    let two = files
        .iter()
        .find(|p| p.ends_with("dx_two.csv"))
        .expect("two-fluxon csv");
    let text = std::fs::read_to_string(two).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis_value,vf_over_v0_S1p,vf_over_v0_S2p,errbar,pass"
    );
    assert_eq!(lines.count(), 3);
}

fn bounds(lo: [f64; 4], hi: [f64; 4]) -> SearchBounds {
    SearchBounds { lo, hi }
}

#[test]
fn invert_search_from_idsn_values() {
    let mut cfg = SearchConfig::new(
        Objective::Invert,
        bounds([3.0, 0.8, 8.0, 0.8], [9.0, 2.5, 22.0, 2.5]),
        12,
    );
    cfg.seed = Some([5.8, 1.5, 15.0, 1.5]);
    let r = search_one_bit(&cfg).unwrap();
    assert!(r.evaluations.len() <= 12);
    assert_eq!(r.evaluations[0].params, [5.8, 1.5, 15.0, 1.5]);
    assert!(r.evaluations[0].feasible);
    let best = &r.ranked[0];
    assert_eq!(best.classification, "0->1");
    assert!(best.vf_over_v0.unwrap() >= 0.6, "{best:?}");
}

#[test]
fn preserve_search_at_large_termination_capacitance() {
    let cfg = SearchConfig::new(
        Objective::Preserve,
        bounds([15.0, 0.5, 1.0, 0.5], [40.0, 3.0, 20.0, 6.0]),
        40,
    );
    let r = search_one_bit(&cfg).unwrap();
    let best = r.ranked.first().expect("an identity-type preset");
    println!("preserve: {best:?} after {} runs", r.evaluations.len());
    assert_eq!(best.classification, "0->0");
    assert!(best.vf_over_v0.unwrap() >= 0.6, "{best:?}");
}

fn rfl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rfl"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_exit_codes() {
    let out = rfl(&["simulate", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));

    let out = rfl(&["snl-ideal", "--s", "4", "--vclk", "0.6", "--mode", "fast"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("efficiency 81%"));

    let out = rfl(&["cnot-table"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 5);

    let out = rfl(&["gate", "not", "--inputs", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0->1"));

    // a slow single fluxon is outside the IDSN margins
    let out = rfl(&["gate", "idsn", "--inputs", "0-", "--v0", "0.3"]);
    assert_eq!(out.status.code(), Some(1));

    let out = rfl(&["gate", "idsn", "--inputs", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("not.toml");
    std::fs::write(
        &scenario,
        "gate = \"one-bit\"\nprobes = [\"phiB\"]\n[inputs]\nS1 = \"fluxon v0=0.6 x0=-20\"\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = rfl(&[
        "simulate",
        scenario.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "summary.json",
        "snapshots.csv",
        "energy.csv",
        "probe_phiB.csv",
    ] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["verdict"]["classification"], "0->1");
}
