//! Full-circuit gate behaviour: logic tables, symmetries, reversibility and
//! the clock splitter.

use rfl_core::dynamics::{RunConfig, Simulator};
use rfl_core::gates::{
    build_idsn, build_one_bit, build_splitter, run_gate, Gate, GateScenario, InputKink,
    OneBitInterfaceParams, TwoBitInterfaceParams, PROBE_B,
};
use rfl_core::ljj::{chain_winding, LjjParams};
use rfl_core::UnitSystem;

fn idsn() -> Gate {
    build_idsn(&TwoBitInterfaceParams::idsn()).unwrap()
}

fn not_gate() -> Gate {
    build_one_bit(&OneBitInterfaceParams::not_equivalent()).unwrap()
}

fn idsn_run(pols: [i8; 2], v0: f64) -> rfl_core::gates::GateRun {
    run_gate(
        &idsn(),
        &GateScenario::pair(["S1", "S2"], pols, v0, 20.0, 0.0),
    )
    .unwrap()
}

#[test]
fn idsn_logic_table() {
    let rows: [([i8; 2], &str); 7] = [
        ([0, 0], "--->--"),
        ([1, 0], "0-->0-"),
        ([0, 1], "-0->-0"),
        ([-1, 0], "1-->1-"),
        ([0, -1], "-1->-1"),
        ([1, 1], "00->11"),
        ([-1, -1], "11->00"),
    ];
    for (pols, want) in rows {
        let r = idsn_run(pols, 0.6);
        assert_eq!(r.verdict.classification, want);
        assert!(r.verdict.pass, "{want}: {}", r.verdict.status);
        for o in &r.verdict.outputs {
            if let Some(q) = o.vf_over_v0 {
                assert!(q > 0.6, "{want} {}: v_f/v_0 = {q}", o.chain);
            }
        }
    }
}

#[test]
fn idsn_slow_single_fluxon_fails() {
    let r = idsn_run([1, 0], 0.3);
    assert!(!r.verdict.pass);
    assert_eq!(r.verdict.status, "fail: out of admissible range");
}

#[test]
fn idsn_pair_keeps_center_rail_at_rest() {
    let r = idsn_run([1, 1], 0.6);
    let b = r.output.probe(PROBE_B).unwrap();
    let worst = b.samples.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "phi_B reached {worst}");
}

#[test]
fn idsn_vertical_symmetry() {
    let a = idsn_run([1, 0], 0.6);
    let b = idsn_run([0, 1], 0.6);
    let qa = a.verdict.outputs[0].vf_over_v0.unwrap();
    let qb = b.verdict.outputs[1].vf_over_v0.unwrap();
    assert!((qa - qb).abs() < 1e-6, "{qa} vs {qb}");
}

#[test]
fn polarity_inversion_inverts_verdict() {
    for (gate, chains) in [(not_gate(), ["S1", ""]), (idsn(), ["S1", "S2"])] {
        let pols = if chains[1].is_empty() { [1, 0] } else { [1, 1] };
        let neg = [-pols[0], -pols[1]];
        let a = run_gate(&gate, &GateScenario::pair(chains, pols, 0.6, 20.0, 0.0)).unwrap();
        let b = run_gate(&gate, &GateScenario::pair(chains, neg, 0.6, 20.0, 0.0)).unwrap();
        let flip = |s: &str| -> String {
            s.chars()
                .map(|c| match c {
                    '0' => '1',
                    '1' => '0',
                    o => o,
                })
                .collect()
        };
        assert_eq!(flip(&a.verdict.classification), b.verdict.classification);
        for (x, y) in a.verdict.outputs.iter().zip(&b.verdict.outputs) {
            assert!((x.vf_over_v0.unwrap() - y.vf_over_v0.unwrap()).abs() < 1e-8);
        }
        let worst = a
            .output
            .final_state
            .phi
            .iter()
            .zip(&b.output.final_state.phi)
            .map(|(u, v)| (u + v).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8);
    }
}

/// Net fluxon count of each chain of the gate, in junction-phase winding.
fn windings(gate: &Gate, phi: &[f64]) -> Vec<(String, f64)> {
    gate.inputs
        .iter()
        .chain(&gate.outputs)
        .map(|c| (c.clone(), chain_winding(gate.graph.chain(c).unwrap(), phi)))
        .collect()
}

fn check_reversible(gate: &Gate, chains: [&str; 2], pols: [i8; 2]) {
    let sc = GateScenario::pair(chains, pols, 0.6, 20.0, 0.0);
    let fwd = run_gate(gate, &sc).unwrap();
    let mut back = fwd.output.final_state.clone();
    back.rate.iter_mut().for_each(|r| *r = -*r);
    back.t = 0.0;
    let sim = Simulator::new(&gate.graph).unwrap();
    let rev = sim
        .run(
            &back,
            &RunConfig::new(fwd.output.final_state.t).samples(None),
        )
        .unwrap();
    let before = windings(gate, &fwd.initial.phi);
    let after = windings(gate, &rev.final_state.phi);
    for ((name, w0), (_, w1)) in before.iter().zip(&after) {
        assert!(
            (w0 - w1).abs() < 0.05,
            "{name}: winding {w0} restored as {w1}"
        );
    }
    for (name, w) in &after {
        if gate.inputs.contains(name) {
            let want = chains.iter().position(|c| c == name).map_or(0, |k| pols[k]);
            assert!((w - want as f64).abs() < 0.05, "{name} ends at {w}");
        }
    }
}

#[test]
fn not_gate_is_reversible() {
    check_reversible(&not_gate(), ["S1", ""], [1, 0]);
}

#[test]
fn idsn_is_reversible() {
    check_reversible(&idsn(), ["S1", "S2"], [1, 0]);
    check_reversible(&idsn(), ["S1", "S2"], [1, 1]);
}

fn g_len(chain: &str) -> usize {
    idsn().graph.chain(chain).unwrap().len()
}

#[test]
fn fluxon_number_is_conserved() {
    for pols in [[1, 0], [0, -1], [1, 1], [-1, -1]] {
        let r = idsn_run(pols, 0.6);
        let n_in = pols.iter().filter(|p| **p != 0).count();
        let n_out = r.verdict.outputs.iter().filter(|o| o.symbol != '-').count();
        assert_eq!(n_in, n_out);
        // windings while the output fluxons sit mid-chain
        let o = r.verdict.outputs.iter().find(|o| o.symbol != '-').unwrap();
        let mid = 0.5 * (g_len(&o.chain) as f64);
        let obs = &o.observation;
        let c = UnitSystem::default().c();
        let t = obs.time.unwrap() - (obs.center.unwrap() - mid) / (obs.velocity.unwrap() * c);
        let snap = r
            .output
            .snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .unwrap();
        let g = idsn();
        let total = |phi: &[f64]| windings(&g, phi).iter().map(|(_, w)| w.abs()).sum::<f64>();
        let (w0, w1) = (total(&r.initial.phi), total(&snap.phi));
        assert!(
            (w0 - w1).abs() < 0.1,
            "{pols:?}: |charge| {w0} before, {w1} after"
        );
    }
    let r = run_gate(
        &not_gate(),
        &GateScenario::pair(["S1", ""], [1, 0], 0.6, 20.0, 0.0),
    )
    .unwrap();
    assert_eq!(r.verdict.classification, "0->1");
}

#[test]
fn splitter_halves_energy_at_parent_speed() {
    let parent = LjjParams::data(60, &UnitSystem::default());
    let gate = build_splitter(&parent, 60).unwrap();
    let sc = GateScenario::new(vec![InputKink {
        chain: "parent".into(),
        polarity: 1,
        v: 0.6,
        distance: 20.0,
    }]);
    let r = run_gate(&gate, &sc).unwrap();
    assert_eq!(r.verdict.classification, "0->00");
    for o in &r.verdict.outputs {
        let share = o.efficiency_direct.unwrap();
        assert!(
            (share - 0.5).abs() <= 0.05,
            "{}: energy share {share}",
            o.chain
        );
        let q = o.vf_over_v0.unwrap();
        assert!((q - 1.0).abs() <= 0.1, "{}: speed ratio {q}", o.chain);
    }
}

#[test]
fn null_input_gives_null_output() {
    let r = idsn_run([0, 0], 0.6);
    assert_eq!(r.verdict.classification, "--->--");
    assert!(r.verdict.outputs.iter().all(|o| !o.observation.present));
}
