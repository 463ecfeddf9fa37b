//! Store-and-launch gate and its ideal energy budget.

use serde::{Deserialize, Serialize};

use super::run::{initial_state, GateScenario, InputKink};
use super::{check_chain, positive, Gate, GateError, GateKind};
use crate::circuit::{default_inductance_floor, CircuitBuilder, GROUND};
use crate::dynamics::{energy, RunConfig, SimState, Simulator};
use crate::ljj::{
    chain_winding, detect_fluxon, fluxon_energy, place_kink, velocity_for_ratio, DetectOptions,
    FluxonObservation, KinkSpec, LjjError, LjjParams,
};
use crate::units::UnitSystem;

pub const PROBE_IA: &str = "IA";
pub const PROBE_ID: &str = "ID";
pub const PROBE_IE: &str = "IE";

/// Where the Ĉ^x ∥ R̂^x bridges sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bridge {
    /// From the input corners a, d to the right midpoint mR.
    Input,
    /// From the output corners b, c to ground.
    Output,
    /// Across J1 and J4.
    Across,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnlParams {
    /// J1 and J4, terminating the inputs.
    pub jl_ic: f64,
    pub jl_cj: f64,
    pub jl_rshunt: f64,
    /// J2 and J3, terminating the outputs.
    pub jr_ic: f64,
    pub jr_cj: f64,
    /// Arm inductors L̂^A (top) and L̂^B (bottom).
    pub l_a: f64,
    pub l_b: f64,
    /// Clock coupling inductor L̂^y.
    pub l_y: f64,
    pub c_x: f64,
    pub r_x: f64,
    pub bridge: Bridge,
    pub c_y: f64,
    /// Clock chain scaling s.
    pub s: f64,
    pub clk_ic: f64,
    pub clk_cj: f64,
    pub input: LjjParams,
    pub output: LjjParams,
    /// Bulk of the clock chain before scaling by s.
    pub clock: LjjParams,
}

impl Default for SnlParams {
    fn default() -> Self {
        let u = UnitSystem::default();
        let floor = default_inductance_floor();
        Self {
            jl_ic: 2.6,
            jl_cj: 2.6,
            jl_rshunt: u.z() / 0.1,
            jr_ic: 1.2,
            jr_cj: 1.2,
            l_a: floor,
            l_b: floor,
            l_y: floor,
            c_x: 2.0,
            r_x: u.z() / 1.7,
            bridge: Bridge::Output,
            c_y: 5.0,
            s: 2.0,
            clk_ic: 1.0,
            clk_cj: 1.0,
            input: LjjParams::data(50, &u),
            output: LjjParams::data(80, &u),
            clock: LjjParams::data(120, &u),
        }
    }
}

impl SnlParams {
    pub fn clock_chain(&self) -> LjjParams {
        self.clock.scaled(self.s)
    }

    pub fn validate(&self) -> Result<(), GateError> {
        for (n, v) in [
            ("jl_ic", self.jl_ic),
            ("jl_cj", self.jl_cj),
            ("jl_rshunt", self.jl_rshunt),
            ("jr_ic", self.jr_ic),
            ("jr_cj", self.jr_cj),
            ("l_a", self.l_a),
            ("l_b", self.l_b),
            ("l_y", self.l_y),
            ("c_x", self.c_x),
            ("r_x", self.r_x),
            ("c_y", self.c_y),
            ("s", self.s),
            ("clk_ic", self.clk_ic),
            ("clk_cj", self.clk_cj),
        ] {
            positive(n, v)?;
        }
        if self.l_a != self.l_b {
            return Err(GateError::Parameters(
                "top-bottom symmetry requires l_a == l_b".into(),
            ));
        }
        check_chain("input", &self.input)?;
        check_chain("output", &self.output)?;
        check_chain("clock", &self.clock_chain())
    }
}

/// Storage loop a–b–c–d. Ground is the left midpoint mL, shared by the two
/// input chains, J1 (a) and J4 (d) and the clock chain; the right midpoint mR
/// carries J2 (b), J3 (c) and both output chains. With the default
/// [`Bridge::Output`] the bridges Ĉ^x ∥ R̂^x tie b and c to ground. The clock
/// chain ends in node e with the clock termination JJ and couples to mR
/// through L̂^y in series with Ĉ^y.
pub fn build_snl(p: &SnlParams) -> Result<Gate, GateError> {
    p.validate()?;
    let mut b = CircuitBuilder::new();
    let i1 = b.chain(
        "in1",
        "i1_",
        GROUND,
        p.input.cells,
        p.input.ic,
        p.input.cj,
        p.input.l,
        1,
    )?;
    let a = b.node("a");
    b.jj("J1", a, GROUND, p.jl_ic, p.jl_cj, Some(p.jl_rshunt))?;
    b.inductor("in1.end", i1[i1.len() - 1], a, p.input.l)?;

    let i2 = b.chain(
        "in2",
        "i2_",
        GROUND,
        p.input.cells,
        p.input.ic,
        p.input.cj,
        p.input.l,
        -1,
    )?;
    let d = b.node("d");
    b.jj("J4", GROUND, d, p.jl_ic, p.jl_cj, Some(p.jl_rshunt))?;
    b.inductor("in2.end", i2[i2.len() - 1], d, p.input.l)?;

    let mr = b.node("mR");
    let nb = b.node("b");
    b.jj("J2", nb, mr, p.jr_ic, p.jr_cj, None)?;
    let o1 = b.chain(
        "out1",
        "o1_",
        mr,
        p.output.cells,
        p.output.ic,
        p.output.cj,
        p.output.l,
        1,
    )?;
    b.inductor("out1.start", nb, o1[0], p.output.l)?;

    let nc = b.node("c");
    b.jj("J3", mr, nc, p.jr_ic, p.jr_cj, None)?;
    let o2 = b.chain(
        "out2",
        "o2_",
        mr,
        p.output.cells,
        p.output.ic,
        p.output.cj,
        p.output.l,
        -1,
    )?;
    b.inductor("out2.start", nc, o2[0], p.output.l)?;

    b.inductor("LA", a, nb, p.l_a)?;
    b.inductor("LB", nc, d, p.l_b)?;
    let (x1, x2) = match p.bridge {
        Bridge::Input => ((a, mr), (mr, d)),
        Bridge::Output => ((nb, GROUND), (GROUND, nc)),
        Bridge::Across => ((a, GROUND), (GROUND, d)),
    };
    b.capacitor("Cx1", x1.0, x1.1, p.c_x)?;
    b.resistor("Rx1", x1.0, x1.1, p.r_x)?;
    b.capacitor("Cx2", x2.0, x2.1, p.c_x)?;
    b.resistor("Rx2", x2.0, x2.1, p.r_x)?;

    let k = p.clock_chain();
    let kn = b.chain("clk", "k_", GROUND, k.cells, k.ic, k.cj, k.l, 1)?;
    let e = b.node("e");
    b.jj("Jclk", e, GROUND, p.clk_ic, p.clk_cj, None)?;
    b.inductor("clk.end", kn[kn.len() - 1], e, k.l)?;
    let y = b.node("y");
    b.inductor("Ly", e, y, p.l_y)?;
    b.capacitor("Cy", y, mr, p.c_y)?;

    b.probe_current(PROBE_IA, "LA")?;
    b.probe_current(PROBE_ID, "LB")?;
    b.probe_current(PROBE_IE, "Ly")?;
    Ok(Gate {
        kind: GateKind::Snl,
        graph: b.build()?,
        inputs: vec!["in1".into(), "in2".into(), "clk".into()],
        outputs: vec!["out1".into(), "out2".into()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SnlMode {
    /// Data fluxon arrives at this velocity and is stored at rest energy.
    Slow(f64),
    /// Input velocity equals the output velocity.
    Fast,
}

/// Energy budget of an SNL that stores the bit at rest energy, in units of
/// the data E_0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealSnl {
    pub e_clk: f64,
    pub e_out: f64,
    pub e_in: f64,
    pub v_out: f64,
    pub efficiency: f64,
}

pub fn ideal_snl_efficiency(s: f64, v_clk: f64, mode: SnlMode) -> Result<IdealSnl, LjjError> {
    let rest = 8.0;
    let e_clk = fluxon_energy(v_clk, s)?;
    let e_out = rest + e_clk;
    let v_out = velocity_for_ratio(e_out / rest);
    let e_in = match mode {
        SnlMode::Slow(v) => fluxon_energy(v, 1.0)?,
        SnlMode::Fast => e_out,
    };
    Ok(IdealSnl {
        e_clk,
        e_out,
        e_in,
        v_out,
        efficiency: e_out / (e_in + e_clk),
    })
}

/// Store-then-launch protocol: a data kink enters input 1 and settles in the
/// cell; at `t_clk` a clock kink is placed on the clock chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnlCycle {
    pub data_polarity: i8,
    pub v_in: f64,
    /// Start distance of the data kink from the cell, in cells.
    pub data_distance: f64,
    pub t_clk: f64,
    pub clock_polarity: i8,
    pub v_clk: f64,
    pub clock_distance: f64,
    /// Simulated time after the clock kink is placed.
    pub launch_time: f64,
    /// Storage is judged over this stretch before `t_clk`.
    pub quiet_window: f64,
}

impl Default for SnlCycle {
    fn default() -> Self {
        Self {
            data_polarity: 1,
            v_in: 0.4,
            data_distance: 15.0,
            // the cell rings for about 250 time units after capture
            t_clk: 300.0,
            clock_polarity: 1,
            v_clk: 0.6,
            clock_distance: 20.0,
            launch_time: 45.0,
            quiet_window: 50.0,
        }
    }
}

/// State of the cell just before the clock arrives. Energies in units of the
/// data E_0, currents in units of I_c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnlStorage {
    /// Fluxoid of the loop a–b–mR–c–d–mL in radians; 2π per stored fluxon.
    pub loop_winding: f64,
    /// Largest |Î^E| over the quiet window.
    pub ie_max: f64,
    pub ia: f64,
    pub id: f64,
    pub input_energy: f64,
    pub stored_energy: f64,
    pub kinetic_energy: f64,
    pub dissipated: f64,
    /// Net winding of every chain at `t_clk`.
    pub windings: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnlLaunch {
    /// The output chain carrying a kink at the end, if exactly one does.
    pub output: Option<String>,
    pub observation: Option<FluxonObservation>,
    pub clock_energy: f64,
    /// Windowed output kink energy over data plus clock energy.
    pub efficiency: Option<f64>,
    pub ia: f64,
    pub id: f64,
    pub windings: Vec<(String, f64)>,
}

impl SnlLaunch {
    pub fn winding(&self, chain: &str) -> Option<f64> {
        self.windings.iter().find(|(c, _)| c == chain).map(|w| w.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnlCycleResult {
    pub storage: SnlStorage,
    pub launch: SnlLaunch,
}

fn wrap(x: f64) -> f64 {
    let t = std::f64::consts::TAU;
    x - t * (x / t).round()
}

/// Junction phases reduced to (−π, π] plus the inductor drops around the
/// storage loop.
pub fn storage_loop_winding(gate: &Gate, phi: &[f64]) -> Result<f64, GateError> {
    let node = |n: &str| {
        gate.graph
            .node(n)
            .map(|k| phi[k])
            .ok_or_else(|| GateError::Parameters(format!("SNL node {n} missing")))
    };
    let (a, b, c, d, mr) = (node("a")?, node("b")?, node("c")?, node("d")?, node("mR")?);
    Ok(-(wrap(a) + (b - a) + wrap(mr - b) + wrap(c - mr) + (d - c) + wrap(-d)))
}

fn windings(gate: &Gate, phi: &[f64]) -> Vec<(String, f64)> {
    gate.graph
        .chains()
        .iter()
        .map(|c| (c.label.clone(), chain_winding(c, phi)))
        .collect()
}

fn probe_at(gate: &Gate, name: &str, s: &SimState) -> f64 {
    gate.graph
        .probes()
        .iter()
        .find(|p| p.name == name)
        .map_or(f64::NAN, |p| {
            crate::dynamics::probe_value(&gate.graph, &p.target, s)
        })
}

/// Run the store-then-launch protocol on an SNL gate.
pub fn run_snl_cycle(gate: &Gate, cycle: &SnlCycle) -> Result<SnlCycleResult, GateError> {
    if gate.kind != GateKind::Snl {
        return Err(GateError::Parameters(
            "store-and-launch needs an SNL gate".into(),
        ));
    }
    if !(cycle.t_clk > cycle.quiet_window && cycle.quiet_window >= 0.0 && cycle.launch_time > 0.0) {
        return Err(GateError::Parameters(
            "need t_clk > quiet_window >= 0 and launch_time > 0".into(),
        ));
    }
    let e0 = UnitSystem::default().e0();
    let sim = Simulator::new(&gate.graph)?;
    let data = GateScenario::new(vec![InputKink {
        chain: gate.inputs[0].clone(),
        polarity: cycle.data_polarity,
        v: cycle.v_in,
        distance: cycle.data_distance,
    }]);
    let s0 = initial_state(gate, &data)?;
    let stored = sim.run(&s0, &RunConfig::new(cycle.t_clk).samples(Some(0.1)))?;
    let ie_max = stored
        .probe(PROBE_IE)
        .map(|p| {
            p.samples
                .iter()
                .filter(|s| s.0 >= cycle.t_clk - cycle.quiet_window)
                .map(|s| s.1.abs())
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::NAN);
    let settled = stored.final_state;
    let ledger = energy(&gate.graph, &settled);
    let storage = SnlStorage {
        loop_winding: storage_loop_winding(gate, &settled.phi)?,
        ie_max,
        ia: probe_at(gate, PROBE_IA, &settled),
        id: probe_at(gate, PROBE_ID, &settled),
        input_energy: energy(&gate.graph, &s0).total / e0,
        stored_energy: (ledger.kinetic + ledger.inductive + ledger.josephson) / e0,
        kinetic_energy: ledger.kinetic / e0,
        dissipated: settled.dissipated / e0,
        windings: windings(gate, &settled.phi),
    };

    let mut s = settled.clone();
    let clk = gate.chain(&gate.inputs[2])?;
    let x0 = clk.len() as f64 - 1.0 - cycle.clock_distance;
    place_kink(
        &mut s,
        clk,
        &KinkSpec::new(x0, cycle.v_clk, cycle.clock_polarity),
    )?;
    let clock_energy = (energy(&gate.graph, &s).total - energy(&gate.graph, &settled).total) / e0;
    s.t = 0.0;
    let out = sim.run(
        &s,
        &RunConfig::new(cycle.launch_time)
            .snapshots(0.5)
            .samples(None),
    )?;
    let end = &out.final_state;
    let mut emitted = Vec::new();
    for label in &gate.outputs {
        let ch = gate.chain(label)?;
        if chain_winding(ch, &end.phi).abs() > 0.5 {
            emitted.push(label.clone());
        }
    }
    let (output, observation) = match emitted.as_slice() {
        [one] => {
            let obs = detect_fluxon(&out.snapshots, gate.chain(one)?, &DetectOptions::default())?;
            (Some(one.clone()), Some(obs))
        }
        _ => (None, None),
    };
    let efficiency = observation
        .as_ref()
        .and_then(|o| o.energy)
        .map(|e| e / (storage.input_energy + clock_energy));
    let launch = SnlLaunch {
        output,
        observation,
        clock_energy,
        efficiency,
        ia: probe_at(gate, PROBE_IA, end),
        id: probe_at(gate, PROBE_ID, end),
        windings: windings(gate, &end.phi),
    };
    Ok(SnlCycleResult { storage, launch })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_table() {
        // independent oracle: E = 8/sqrt(1-v^2) and the stored bit at 8
        let oracle = |s: f64, vc: f64, vin: Option<f64>| {
            let ec = 8.0 / s / (1.0 - vc * vc).sqrt();
            let eo = 8.0 + ec;
            let ei = vin.map_or(eo, |v| 8.0 / (1.0 - v * v).sqrt());
            ((1.0 - (8.0 / eo).powi(2)).sqrt(), eo / (ei + ec))
        };
        for s in [2.0, 4.0] {
            let f = ideal_snl_efficiency(s, 0.6, SnlMode::Fast).unwrap();
            let (v, e) = oracle(s, 0.6, None);
            assert!((f.v_out - v).abs() < 1e-12 && (f.efficiency - e).abs() < 1e-12);
            let sl = ideal_snl_efficiency(s, 0.6, SnlMode::Slow(0.4)).unwrap();
            let (_, e) = oracle(s, 0.6, Some(0.4));
            assert!((sl.efficiency - e).abs() < 1e-12);
        }
        let f = ideal_snl_efficiency(2.0, 0.6, SnlMode::Fast).unwrap();
        assert!((f.e_clk - 5.0).abs() < 1e-12);
    }

    #[test]
    fn superluminal_clock_rejected() {
        assert!(ideal_snl_efficiency(2.0, 1.0, SnlMode::Fast).is_err());
    }

    #[test]
    fn snl_builds_without_islands() {
        let g = build_snl(&SnlParams::default()).unwrap();
        assert!(g.graph.islands().unwrap().is_empty());
        assert_eq!(g.graph.chains().len(), 5);
    }
}
