//! Running a gate from moving input kinks to a per-output verdict.

use serde::{Deserialize, Serialize};

use super::{Gate, GateError};
use crate::circuit::Chain;
use crate::dynamics::{RunConfig, RunOutput, SimState, Simulator};
use crate::ljj::{
    chain_winding, detect_fluxon, fluxon_energy_ratio, place_kink, DetectOptions,
    FluxonObservation, KinkSpec, LjjParams,
};
use crate::units::UnitSystem;

/// Output velocity ratio below which a gate run counts as failed.
pub const VELOCITY_CRITERION: f64 = 0.6;

/// Allowance for the resonance at the interface; single-fluxon IDSN
/// scattering takes close to 30 time units.
const GATE_TIME: f64 = 40.0;

/// A kink launched on an input chain toward the interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputKink {
    pub chain: String,
    pub polarity: i8,
    /// Velocity in units of the chain's maximum speed.
    pub v: f64,
    /// Distance of the kink center from the interface end, in cells.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateScenario {
    pub inputs: Vec<InputKink>,
    /// Simulated time; derived from the input distance and speed when unset.
    pub duration: Option<f64>,
    pub snapshot_interval: f64,
    /// Pass criterion on v_f/v_0.
    pub criterion: f64,
}

impl GateScenario {
    pub fn new(inputs: Vec<InputKink>) -> Self {
        Self {
            inputs,
            duration: None,
            snapshot_interval: 0.5,
            criterion: VELOCITY_CRITERION,
        }
    }

    /// Kinks of the given polarities (0 = none) on `chains`, all at `distance`
    /// cells from the interface. The second kink trails by `dx` cells; a
    /// delay Δt maps to dx = v0·c·Δt.
    pub fn pair(chains: [&str; 2], polarities: [i8; 2], v0: f64, distance: f64, dx: f64) -> Self {
        let mut inputs = Vec::new();
        for (k, (&chain, &pol)) in chains.iter().zip(polarities.iter()).enumerate() {
            if pol != 0 {
                inputs.push(InputKink {
                    chain: chain.to_string(),
                    polarity: pol,
                    v: v0,
                    distance: distance + if k == 1 { dx } else { 0.0 },
                });
            }
        }
        Self::new(inputs)
    }

    pub fn v0(&self) -> Option<f64> {
        self.inputs
            .iter()
            .map(|k| k.v)
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }

    fn default_duration(&self, gate: &Gate) -> f64 {
        let c = UnitSystem::default().c();
        let (arrive, v0) = match self.v0() {
            Some(v0) => (
                self.inputs
                    .iter()
                    .map(|k| k.distance / (k.v * c))
                    .fold(0.0, f64::max),
                v0,
            ),
            None => (10.0, 0.6),
        };
        // room for a slow output (v_f at the pass threshold) to clear the
        // edge margin and be fitted over several plasma periods
        let margin = 2.0 * UnitSystem::default().lambda_j() + 15.0;
        let out = gate
            .outputs
            .iter()
            .filter_map(|o| gate.graph.chain(o))
            .map(|ch| margin / (self.criterion * v0 * LjjParams::from_chain(ch).c()))
            .fold(0.0, f64::max);
        arrive + GATE_TIME + out
    }
}

/// Verdict for one output chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputVerdict {
    pub chain: String,
    pub observation: FluxonObservation,
    /// '0' fluxon, '1' antifluxon, '-' none.
    pub symbol: char,
    pub vf_over_v0: Option<f64>,
    /// E_fl(v_f)/E_fl(v_0) from the relativistic energy formula.
    pub efficiency: Option<f64>,
    /// Windowed output energy over windowed input energy.
    pub efficiency_direct: Option<f64>,
    /// Time from the input reaching the interface to the output leaving it.
    pub timing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateVerdict {
    pub outputs: Vec<OutputVerdict>,
    /// Input symbols followed by output symbols, e.g. "00->11".
    pub classification: String,
    pub v0: Option<f64>,
    /// Total input energy, units of E_0.
    pub input_energy: f64,
    pub pass: bool,
    pub status: String,
}

impl GateVerdict {
    pub fn output(&self, chain: &str) -> Option<&OutputVerdict> {
        self.outputs.iter().find(|o| o.chain == chain)
    }

    pub fn output_symbols(&self) -> String {
        self.outputs.iter().map(|o| o.symbol).collect()
    }
}

pub struct GateRun {
    pub verdict: GateVerdict,
    pub output: RunOutput,
    pub initial: SimState,
}

/// Logic symbol of a polarity.
pub fn classify(polarity: Option<i8>) -> char {
    match polarity {
        Some(p) if p > 0 => '0',
        Some(_) => '1',
        None => '-',
    }
}

fn window_energy(chain: &Chain, s: &SimState, center: f64, unit: f64) -> f64 {
    let half = 5.0 * LjjParams::from_chain(chain).lambda_j();
    chain
        .cell_energies(&s.phi, &s.rate)
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64 - center).abs() <= half)
        .map(|(_, e)| e)
        .sum::<f64>()
        / unit
}

/// Initial state with all input kinks placed.
pub fn initial_state(gate: &Gate, sc: &GateScenario) -> Result<SimState, GateError> {
    let mut s = SimState::zero(&gate.graph);
    for k in &sc.inputs {
        let ch = gate.chain(&k.chain)?;
        let x0 = ch.len() as f64 - 1.0 - k.distance;
        place_kink(&mut s, ch, &KinkSpec::new(x0, k.v, k.polarity))?;
    }
    Ok(s)
}

pub fn run_gate(gate: &Gate, sc: &GateScenario) -> Result<GateRun, GateError> {
    let s0 = initial_state(gate, sc)?;
    let duration = sc.duration.unwrap_or_else(|| sc.default_duration(gate));
    let sim = Simulator::new(&gate.graph)?;
    let out = sim.run(
        &s0,
        &RunConfig::new(duration).snapshots(sc.snapshot_interval),
    )?;
    let verdict = verdict(gate, sc, &s0, &out)?;
    Ok(GateRun {
        verdict,
        output: out,
        initial: s0,
    })
}

fn verdict(
    gate: &Gate,
    sc: &GateScenario,
    s0: &SimState,
    out: &RunOutput,
) -> Result<GateVerdict, GateError> {
    let opt = DetectOptions::default();
    let mut input_energy = 0.0;
    let mut arrival: Option<f64> = None;
    for k in &sc.inputs {
        let ch = gate.chain(&k.chain)?;
        let x0 = ch.len() as f64 - 1.0 - k.distance;
        input_energy += window_energy(ch, s0, x0, opt.energy_unit);
        let t = k.distance / (k.v * LjjParams::from_chain(ch).c());
        arrival = Some(arrival.map_or(t, |a: f64| a.min(t)));
    }
    let v0 = sc.v0();
    let per_input = if sc.inputs.is_empty() {
        0.0
    } else {
        input_energy / sc.inputs.len() as f64
    };

    let mut outputs = Vec::new();
    let mut pass = true;
    let mut status = String::from("pass");
    for label in &gate.outputs {
        let ch = gate.chain(label)?;
        let mut obs = detect_fluxon(&out.snapshots, ch, &opt)?;
        if obs.ambiguous {
            return Err(GateError::Ambiguous(label.clone()));
        }
        if !obs.present {
            // a kink stuck near the interface never enters the fit window
            let w = chain_winding(ch, &out.final_state.phi);
            if w.abs() > 0.5 {
                obs.present = true;
                obs.polarity = Some(if w > 0.0 { 1 } else { -1 });
                obs.velocity = Some(0.0);
            }
        }
        let mut vf_over_v0 = None;
        let mut efficiency = None;
        let mut efficiency_direct = None;
        let mut timing = None;
        if let (true, Some(v0)) = (obs.present, v0) {
            let vf = obs.velocity.unwrap_or(0.0);
            vf_over_v0 = Some(vf / v0);
            if let (Ok(a), Ok(b)) = (fluxon_energy_ratio(vf), fluxon_energy_ratio(v0)) {
                efficiency = Some(a / b);
                if let (Some(e), true) = (obs.energy, per_input > 0.0) {
                    efficiency_direct = Some(e / per_input);
                }
            }
            if let (Some(center), Some(t_last), Some(arr)) = (obs.center, obs.time, arrival) {
                if vf > 1e-9 {
                    let t_exit = t_last - center / (vf * LjjParams::from_chain(ch).c());
                    timing = Some(t_exit - arr);
                }
            }
            if !(vf / v0 > sc.criterion) {
                pass = false;
                status = "fail: out of admissible range".into();
            }
        }
        outputs.push(OutputVerdict {
            chain: label.clone(),
            symbol: classify(if obs.present { obs.polarity } else { None }),
            observation: obs,
            vf_over_v0,
            efficiency,
            efficiency_direct,
            timing,
        });
    }
    // every input reflected or absorbed
    if !sc.inputs.is_empty() && outputs.iter().all(|o| o.symbol == '-') {
        pass = false;
        status = "fail: out of admissible range".into();
    }
    let mut inputs: String = String::new();
    for label in &gate.inputs {
        let pol = sc
            .inputs
            .iter()
            .find(|k| &k.chain == label)
            .map(|k| k.polarity);
        inputs.push(classify(pol));
    }
    let classification = format!(
        "{inputs}->{}",
        outputs.iter().map(|o| o.symbol).collect::<String>()
    );
    Ok(GateVerdict {
        outputs,
        classification,
        v0,
        input_energy,
        pass,
        status,
    })
}
