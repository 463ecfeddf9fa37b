//! Gate circuits built from LJJ chains and small interface cells.

mod cnot;
mod run;
mod snl;

pub use cnot::{behavioral_cnot, cnot_table, Bit, CnotError, CnotRow, Line, PortSignal};
pub use run::{
    classify, initial_state, run_gate, GateRun, GateScenario, GateVerdict, InputKink,
    OutputVerdict, VELOCITY_CRITERION,
};
pub use snl::{
    build_snl, ideal_snl_efficiency, run_snl_cycle, storage_loop_winding, Bridge, IdealSnl,
    SnlCycle, SnlCycleResult, SnlLaunch, SnlMode, SnlParams, SnlStorage, PROBE_IA, PROBE_ID,
    PROBE_IE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{
    default_inductance_floor, CircuitBuilder, CircuitError, CircuitGraph, NodeId, GROUND,
};
use crate::dynamics::DynamicsError;
use crate::ljj::{LjjError, LjjParams};
use crate::units::UnitSystem;

#[derive(Debug, Error)]
pub enum GateError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Ljj(#[from] LjjError),
    #[error("invalid parameter {name}: {value}")]
    Invalid { name: String, value: f64 },
    #[error("gate has no chain {0}")]
    UnknownChain(String),
    #[error("ambiguous fluxon detection on {0}")]
    Ambiguous(String),
    #[error("{0}")]
    Parameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    OneBit,
    Idsn,
    IdsnSingleEquivalent,
    Snl,
    Splitter,
}

/// A gate circuit together with the labels of its input and output chains.
/// Inputs run toward the interface with increasing cell index, outputs away
/// from it.
#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    pub graph: CircuitGraph,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Gate {
    pub fn chain(&self, label: &str) -> Result<&crate::circuit::Chain, GateError> {
        self.graph
            .chain(label)
            .ok_or_else(|| GateError::UnknownChain(label.to_string()))
    }
}

fn positive(name: &str, v: f64) -> Result<(), GateError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GateError::Invalid {
            name: name.to_string(),
            value: v,
        })
    }
}

fn check_chain(name: &str, p: &LjjParams) -> Result<(), GateError> {
    positive(&format!("{name}.ic"), p.ic)?;
    positive(&format!("{name}.cj"), p.cj)?;
    positive(&format!("{name}.l"), p.l)?;
    p.validate()?;
    Ok(())
}

/// Interface of a 1-bit gate: one termination JJ on each side, a rail JJ
/// and a bridge inductor on the upper rail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneBitInterfaceParams {
    pub term_cj: f64,
    pub term_ic: f64,
    pub rail_cj: f64,
    pub rail_ic: f64,
    pub bridge_l: f64,
    pub left: LjjParams,
    pub right: LjjParams,
}

impl OneBitInterfaceParams {
    /// Upper half of the IDSN under two synchronized fluxons, which inverts
    /// the fluxon polarity.
    pub fn not_equivalent() -> Self {
        let u = UnitSystem::default();
        Self {
            term_cj: 5.8,
            term_ic: 1.5,
            rail_cj: 15.0,
            rail_ic: 1.5,
            bridge_l: default_inductance_floor(),
            left: LjjParams::data(50, &u),
            right: LjjParams::data(80, &u),
        }
    }

    pub fn validate(&self) -> Result<(), GateError> {
        positive("term_cj", self.term_cj)?;
        positive("term_ic", self.term_ic)?;
        positive("rail_cj", self.rail_cj)?;
        positive("rail_ic", self.rail_ic)?;
        positive("bridge_l", self.bridge_l)?;
        if self.bridge_l < default_inductance_floor() * (1.0 - 1e-12) {
            return Err(GateError::Invalid {
                name: "bridge_l (below inductance floor)".into(),
                value: self.bridge_l,
            });
        }
        check_chain("left", &self.left)?;
        check_chain("right", &self.right)
    }
}

/// Probe names installed by [`build_one_bit`].
pub const PROBE_RAIL: &str = "phiB";

pub fn build_one_bit(p: &OneBitInterfaceParams) -> Result<Gate, GateError> {
    p.validate()?;
    let mut b = CircuitBuilder::new();
    let left = b.chain(
        "S1",
        "s1_",
        GROUND,
        p.left.cells,
        p.left.ic,
        p.left.cj,
        p.left.l,
        1,
    )?;
    let tl = b.node("tl");
    b.jj("term_l", tl, GROUND, p.term_ic, p.term_cj, None)?;
    b.inductor("S1.end", left[left.len() - 1], tl, p.left.l)?;
    let r = b.node("rail");
    b.jj("rail", r, GROUND, p.rail_ic, p.rail_cj, None)?;
    let tr = b.node("tr");
    b.jj("term_r", tr, r, p.term_ic, p.term_cj, None)?;
    b.inductor("bridge", tl, tr, p.bridge_l)?;
    let right = b.chain(
        "S1p",
        "s1p_",
        r,
        p.right.cells,
        p.right.ic,
        p.right.cj,
        p.right.l,
        1,
    )?;
    b.inductor("S1p.start", tr, right[0], p.right.l)?;
    b.probe_node(PROBE_RAIL, r);
    b.probe_phase("term_l", "term_l")?;
    b.probe_phase("term_r", "term_r")?;
    Ok(Gate {
        kind: GateKind::OneBit,
        graph: b.build()?,
        inputs: vec!["S1".into()],
        outputs: vec!["S1p".into()],
    })
}

/// One rail of the 2-bit interface: a JJ followed by an inductor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rail {
    pub cj: f64,
    pub ic: f64,
    pub l: f64,
}

/// Interface of a 2-bit gate: three rails and four termination JJs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBitInterfaceParams {
    pub rail_a: Rail,
    pub rail_b: Rail,
    pub rail_c: Rail,
    /// Termination JJs of the upper chains (left and right equal), (cj, ic).
    pub term_upper: (f64, f64),
    pub term_lower: (f64, f64),
    pub s1: LjjParams,
    pub s2: LjjParams,
    pub s1p: LjjParams,
    pub s2p: LjjParams,
}

impl TwoBitInterfaceParams {
    /// The IDSN gate values; L̂^A and L̂^C sit at the inductance floor.
    pub fn idsn() -> Self {
        let u = UnitSystem::default();
        let floor = default_inductance_floor();
        let rail = Rail {
            cj: 15.0,
            ic: 1.5,
            l: floor,
        };
        let input = LjjParams::data(50, &u);
        let output = LjjParams::data(80, &u);
        Self {
            rail_a: rail,
            rail_b: Rail {
                cj: 16.7,
                ic: 6.9,
                l: 0.5 * u.cell_inductance(),
            },
            rail_c: rail,
            term_upper: (5.8, 1.5),
            term_lower: (5.8, 1.5),
            s1: input,
            s2: input,
            s1p: output,
            s2p: output,
        }
    }

    /// Upper and lower halves carry the same values.
    pub fn is_vertically_symmetric(&self) -> bool {
        self.rail_a == self.rail_c
            && self.term_upper == self.term_lower
            && self.s1 == self.s2
            && self.s1p == self.s2p
    }

    pub fn validate(&self) -> Result<(), GateError> {
        for (n, r) in [
            ("A", &self.rail_a),
            ("B", &self.rail_b),
            ("C", &self.rail_c),
        ] {
            positive(&format!("CJ{n}"), r.cj)?;
            positive(&format!("Ic{n}"), r.ic)?;
            positive(&format!("L{n}"), r.l)?;
        }
        for (n, t) in [("upper", self.term_upper), ("lower", self.term_lower)] {
            positive(&format!("term_{n}.cj"), t.0)?;
            positive(&format!("term_{n}.ic"), t.1)?;
        }
        check_chain("S1", &self.s1)?;
        check_chain("S2", &self.s2)?;
        check_chain("S1p", &self.s1p)?;
        check_chain("S2p", &self.s2p)
    }
}

pub const PROBE_A: &str = "phiA";
pub const PROBE_B: &str = "phiB";
pub const PROBE_C: &str = "phiC";

/// Lower termination JJs replaced by single junctions, used by the reduced
/// circuit of the single-fluxon case.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Spectator {
    cj: f64,
    ic: f64,
}

/// The middle rail on the left is ground; the right side floats on node M,
/// tied to the left only through the rail inductors.
pub fn build_idsn(p: &TwoBitInterfaceParams) -> Result<Gate, GateError> {
    idsn_graph(p, None)
}

/// IDSN with the lower chains and their termination JJs replaced by a
/// single junction (cj, ic) on each side.
pub fn build_idsn_single_equivalent(
    p: &TwoBitInterfaceParams,
    cj_alpha: f64,
    ic_alpha: f64,
) -> Result<Gate, GateError> {
    positive("cj_alpha", cj_alpha)?;
    positive("ic_alpha", ic_alpha)?;
    idsn_graph(
        p,
        Some(Spectator {
            cj: cj_alpha,
            ic: ic_alpha,
        }),
    )
}

fn idsn_graph(p: &TwoBitInterfaceParams, spectator: Option<Spectator>) -> Result<Gate, GateError> {
    p.validate()?;
    let mut b = CircuitBuilder::new();
    let (tu_c, tu_i) = p.term_upper;
    let (tl_c, tl_i) = p.term_lower;

    let s1 = b.chain("S1", "s1_", GROUND, p.s1.cells, p.s1.ic, p.s1.cj, p.s1.l, 1)?;
    let t1 = b.node("t1");
    b.jj("term1", t1, GROUND, tu_i, tu_c, None)?;
    b.inductor("S1.end", s1[s1.len() - 1], t1, p.s1.l)?;

    let t2 = b.node("t2");
    match spectator {
        None => {
            let s2 = b.chain(
                "S2", "s2_", GROUND, p.s2.cells, p.s2.ic, p.s2.cj, p.s2.l, -1,
            )?;
            b.jj("term2", GROUND, t2, tl_i, tl_c, None)?;
            b.inductor("S2.end", s2[s2.len() - 1], t2, p.s2.l)?;
        }
        Some(a) => {
            b.jj("alpha2", GROUND, t2, a.ic, a.cj, None)?;
        }
    }

    let m = b.node("M");
    let t1r = b.node("t1r");
    b.jj("term1r", t1r, m, tu_i, tu_c, None)?;
    let s1p = b.chain(
        "S1p",
        "s1p_",
        m,
        p.s1p.cells,
        p.s1p.ic,
        p.s1p.cj,
        p.s1p.l,
        1,
    )?;
    b.inductor("S1p.start", t1r, s1p[0], p.s1p.l)?;

    let t2r = b.node("t2r");
    match spectator {
        None => {
            b.jj("term2r", m, t2r, tl_i, tl_c, None)?;
            let s2p = b.chain(
                "S2p",
                "s2p_",
                m,
                p.s2p.cells,
                p.s2p.ic,
                p.s2p.cj,
                p.s2p.l,
                -1,
            )?;
            b.inductor("S2p.start", t2r, s2p[0], p.s2p.l)?;
        }
        Some(a) => {
            b.jj("alpha2r", m, t2r, a.ic, a.cj, None)?;
        }
    }

    let ma = b.node("mA");
    b.jj("railA", t1, ma, p.rail_a.ic, p.rail_a.cj, None)?;
    b.inductor("LA", ma, t1r, p.rail_a.l)?;
    let mb = b.node("mB");
    b.jj("railB", GROUND, mb, p.rail_b.ic, p.rail_b.cj, None)?;
    b.inductor("LB", mb, m, p.rail_b.l)?;
    let mc = b.node("mC");
    b.jj("railC", mc, t2, p.rail_c.ic, p.rail_c.cj, None)?;
    b.inductor("LC", t2r, mc, p.rail_c.l)?;

    b.probe_phase(PROBE_A, "railA")?;
    b.probe_phase(PROBE_B, "railB")?;
    b.probe_phase(PROBE_C, "railC")?;

    let (kind, inputs, outputs) = if spectator.is_some() {
        (
            GateKind::IdsnSingleEquivalent,
            vec!["S1".into()],
            vec!["S1p".into()],
        )
    } else {
        (
            GateKind::Idsn,
            vec!["S1".into(), "S2".into()],
            vec!["S1p".into(), "S2p".into()],
        )
    };
    Ok(Gate {
        kind,
        graph: b.build()?,
        inputs,
        outputs,
    })
}

/// Child chain parameters of a splitter: (C_J/2, I_c/2, 2L, a).
pub fn splitter_child(parent: &LjjParams) -> LjjParams {
    parent.scaled(2.0)
}

/// A parent chain ending in a T-node that feeds two child chains.
pub fn build_splitter(parent: &LjjParams, child_cells: usize) -> Result<Gate, GateError> {
    check_chain("parent", parent)?;
    let child = LjjParams {
        cells: child_cells,
        ..splitter_child(parent)
    };
    check_chain("child", &child)?;
    let mut b = CircuitBuilder::new();
    let pn = b.chain(
        "parent",
        "p_",
        GROUND,
        parent.cells,
        parent.ic,
        parent.cj,
        parent.l,
        1,
    )?;
    let t: NodeId = pn[pn.len() - 1];
    for k in 1..=2 {
        let label = format!("child{k}");
        let cn = b.chain(
            &label,
            &format!("c{k}_"),
            GROUND,
            child.cells,
            child.ic,
            child.cj,
            child.l,
            1,
        )?;
        b.inductor(&format!("{label}.start"), t, cn[0], child.l)?;
    }
    Ok(Gate {
        kind: GateKind::Splitter,
        graph: b.build()?,
        inputs: vec!["parent".into()],
        outputs: vec!["child1".into(), "child2".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::BranchKind;

    fn jj_count(g: &CircuitGraph) -> usize {
        g.branches()
            .iter()
            .filter(|b| matches!(b.kind, BranchKind::Jj { .. }))
            .count()
    }

    #[test]
    fn one_bit_element_count() {
        let p = OneBitInterfaceParams::not_equivalent();
        let g = build_one_bit(&p).unwrap();
        assert_eq!(jj_count(&g.graph), 3 + p.left.cells + p.right.cells);
        assert!(g.graph.probes().iter().any(|x| x.name == PROBE_RAIL));
    }

    #[test]
    fn one_bit_rejects_bad_values() {
        let mut p = OneBitInterfaceParams::not_equivalent();
        p.rail_ic = -1.0;
        assert!(build_one_bit(&p).is_err());
        let mut p = OneBitInterfaceParams::not_equivalent();
        p.bridge_l = 1e-6;
        assert!(build_one_bit(&p).is_err());
    }

    #[test]
    fn idsn_has_seven_interface_jjs() {
        let p = TwoBitInterfaceParams::idsn();
        let g = build_idsn(&p).unwrap();
        let chains: usize = g.graph.chains().iter().map(|c| c.len()).sum();
        assert_eq!(jj_count(&g.graph), 7 + chains);
        assert_eq!(g.graph.chains().len(), 4);
        assert!(p.is_vertically_symmetric());
        // right half floats on the rail inductors
        assert_eq!(g.graph.islands().unwrap().len(), 1);
    }

    #[test]
    fn splitter_children_are_scaled() {
        let u = UnitSystem::default();
        let parent = LjjParams::data(60, &u);
        let c = splitter_child(&parent);
        assert_eq!((c.cj, c.ic, c.l, c.a), (0.5, 0.5, 2.0 * parent.l, parent.a));
        assert!((c.lambda_j() - parent.lambda_j()).abs() < 1e-12);
        assert!((c.c() - parent.c()).abs() < 1e-12);
        let g = build_splitter(&parent, 60).unwrap();
        assert_eq!(g.graph.chains().len(), 3);
    }
}
