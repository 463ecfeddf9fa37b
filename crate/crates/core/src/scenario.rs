//! Scenario files: a gate, parameter overrides and input kinks.
//!
//! ```toml
//! gate = "idsn"
//! duration = 60.0
//! [params]
//! CJA_over_CJ = 15.0
//! [inputs]
//! S1 = "fluxon v0=0.6 x0=-20"
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge::{solve_mu, EdgeError};
use crate::gates::{
    build_idsn, build_idsn_single_equivalent, build_one_bit, build_snl, build_splitter, Bridge,
    Gate, GateError, GateScenario, InputKink, OneBitInterfaceParams, SnlParams,
    TwoBitInterfaceParams,
};
use crate::ljj::LjjParams;
use crate::units::UnitSystem;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("gate {gate} has no parameter {name:?}")]
    UnknownParameter { gate: String, name: String },
    #[error("input {chain}: {message}")]
    Input { chain: String, message: String },
    #[error(transparent)]
    Edge(#[from] EdgeError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

/// Parameters of one of the shipped gate circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateSpec {
    OneBit(OneBitInterfaceParams),
    Idsn(TwoBitInterfaceParams),
    /// IDSN with the lower chains replaced by effective junctions; `None`
    /// solves for them.
    IdsnSingleEquivalent {
        idsn: TwoBitInterfaceParams,
        alpha: Option<(f64, f64)>,
    },
    Snl(SnlParams),
    Splitter {
        parent: LjjParams,
        child_cells: usize,
    },
}

impl GateSpec {
    pub const NAMES: [&'static str; 5] = [
        "one-bit",
        "idsn",
        "idsn-single-equivalent",
        "snl",
        "splitter",
    ];

    /// Default parameters of a named gate at the given discreteness.
    pub fn named(name: &str, units: &UnitSystem) -> Result<Self, ScenarioError> {
        let rescale = |mut p: LjjParams| {
            p.l = units.cell_inductance() * p.l / UnitSystem::default().cell_inductance();
            p
        };
        Ok(match name {
            "one-bit" | "not" => {
                let mut p = OneBitInterfaceParams::not_equivalent();
                p.left = rescale(p.left);
                p.right = rescale(p.right);
                GateSpec::OneBit(p)
            }
            "idsn" | "idsn-single-equivalent" => {
                let mut p = TwoBitInterfaceParams::idsn();
                for c in [&mut p.s1, &mut p.s2, &mut p.s1p, &mut p.s2p] {
                    *c = rescale(*c);
                }
                p.rail_b.l = 0.5 * units.cell_inductance();
                if name == "idsn" {
                    GateSpec::Idsn(p)
                } else {
                    GateSpec::IdsnSingleEquivalent {
                        idsn: p,
                        alpha: None,
                    }
                }
            }
            "snl" => {
                let mut p = SnlParams::default();
                p.input = rescale(p.input);
                p.output = rescale(p.output);
                p.clock = rescale(p.clock);
                GateSpec::Snl(p)
            }
            "splitter" => GateSpec::Splitter {
                parent: LjjParams::data(60, units),
                child_cells: 60,
            },
            other => return Err(ScenarioError::UnknownGate(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateSpec::OneBit(_) => "one-bit",
            GateSpec::Idsn(_) => "idsn",
            GateSpec::IdsnSingleEquivalent { .. } => "idsn-single-equivalent",
            GateSpec::Snl(_) => "snl",
            GateSpec::Splitter { .. } => "splitter",
        }
    }

    fn slot(&mut self, name: &str) -> Option<Slot<'_>> {
        let z = UnitSystem::default().z();
        Some(match self {
            GateSpec::OneBit(p) => {
                let l = p.left.l;
                match name {
                    "Chat_over_CJ" => Slot::real(vec![&mut p.term_cj], Scale::Linear(1.0)),
                    "Ihat_over_Ic" => Slot::real(vec![&mut p.term_ic], Scale::Linear(1.0)),
                    "CJB_over_CJ" => Slot::real(vec![&mut p.rail_cj], Scale::Linear(1.0)),
                    "IcB_over_Ic" => Slot::real(vec![&mut p.rail_ic], Scale::Linear(1.0)),
                    "Lhat_over_L" => Slot::real(vec![&mut p.bridge_l], Scale::Linear(l)),
                    "N_in" => Slot::Cells(vec![&mut p.left.cells]),
                    "N_out" => Slot::Cells(vec![&mut p.right.cells]),
                    _ => return None,
                }
            }
            GateSpec::Idsn(p) | GateSpec::IdsnSingleEquivalent { idsn: p, .. } => {
                let l = p.s1.l;
                let one = Scale::Linear(1.0);
                match name {
                    "CJA_over_CJ" => Slot::real(vec![&mut p.rail_a.cj], one),
                    "IcA_over_Ic" => Slot::real(vec![&mut p.rail_a.ic], one),
                    "LA_over_L" => Slot::real(vec![&mut p.rail_a.l], Scale::Linear(l)),
                    "CJB_over_CJ" => Slot::real(vec![&mut p.rail_b.cj], one),
                    "IcB_over_Ic" => Slot::real(vec![&mut p.rail_b.ic], one),
                    "LB_over_L" => Slot::real(vec![&mut p.rail_b.l], Scale::Linear(l)),
                    "CJC_over_CJ" => Slot::real(vec![&mut p.rail_c.cj], one),
                    "IcC_over_Ic" => Slot::real(vec![&mut p.rail_c.ic], one),
                    "LC_over_L" => Slot::real(vec![&mut p.rail_c.l], Scale::Linear(l)),
                    "Chat_over_CJ" => {
                        Slot::real(vec![&mut p.term_upper.0, &mut p.term_lower.0], one)
                    }
                    "Ihat_over_Ic" => {
                        Slot::real(vec![&mut p.term_upper.1, &mut p.term_lower.1], one)
                    }
                    "Chat1_over_CJ" => Slot::real(vec![&mut p.term_upper.0], one),
                    "Ihat1_over_Ic" => Slot::real(vec![&mut p.term_upper.1], one),
                    "Chat2_over_CJ" => Slot::real(vec![&mut p.term_lower.0], one),
                    "Ihat2_over_Ic" => Slot::real(vec![&mut p.term_lower.1], one),
                    "N_in" => Slot::Cells(vec![&mut p.s1.cells, &mut p.s2.cells]),
                    "N_out" => Slot::Cells(vec![&mut p.s1p.cells, &mut p.s2p.cells]),
                    _ => return None,
                }
            }
            GateSpec::Snl(p) => {
                let l = p.input.l;
                let one = Scale::Linear(1.0);
                match name {
                    "IcL_over_Ic" => Slot::real(vec![&mut p.jl_ic], one),
                    "CJL_over_CJ" => Slot::real(vec![&mut p.jl_cj], one),
                    "Z_over_RL" => Slot::real(vec![&mut p.jl_rshunt], Scale::Inverse(z)),
                    "IcR_over_Ic" => Slot::real(vec![&mut p.jr_ic], one),
                    "CJR_over_CJ" => Slot::real(vec![&mut p.jr_cj], one),
                    "LA_over_L" => Slot::real(vec![&mut p.l_a, &mut p.l_b], Scale::Linear(l)),
                    "Ly_over_L" => Slot::real(vec![&mut p.l_y], Scale::Linear(l)),
                    "Cx_over_CJ" => Slot::real(vec![&mut p.c_x], one),
                    "Z_over_Rx" => Slot::real(vec![&mut p.r_x], Scale::Inverse(z)),
                    "Cy_over_CJ" => Slot::real(vec![&mut p.c_y], one),
                    "s" => Slot::real(vec![&mut p.s], one),
                    "Iclk_over_Ic" => Slot::real(vec![&mut p.clk_ic], one),
                    "Cclk_over_CJ" => Slot::real(vec![&mut p.clk_cj], one),
                    "N_in" => Slot::Cells(vec![&mut p.input.cells]),
                    "N_out" => Slot::Cells(vec![&mut p.output.cells]),
                    "N_clk" => Slot::Cells(vec![&mut p.clock.cells]),
                    _ => return None,
                }
            }
            GateSpec::Splitter {
                parent,
                child_cells,
            } => match name {
                "N_in" => Slot::Cells(vec![&mut parent.cells]),
                "N_out" => Slot::Cells(vec![child_cells]),
                _ => return None,
            },
        })
    }

    fn unknown(&self, name: &str) -> ScenarioError {
        ScenarioError::UnknownParameter {
            gate: self.name().to_string(),
            name: name.to_string(),
        }
    }

    /// Set a parameter by its ratio name, e.g. `CJA_over_CJ`. Inductances
    /// are in units of the cell inductance L, resistances as Z/R.
    pub fn set(&mut self, name: &str, v: f64) -> Result<(), ScenarioError> {
        if !v.is_finite() {
            return Err(ScenarioError::Input {
                chain: name.to_string(),
                message: format!("non-finite value {v}"),
            });
        }
        if let GateSpec::IdsnSingleEquivalent { alpha, .. } = self {
            if matches!(name, "CJalpha_over_CJ" | "Icalpha_over_Ic") {
                let a = alpha.get_or_insert((f64::NAN, f64::NAN));
                if name == "CJalpha_over_CJ" {
                    a.0 = v;
                } else {
                    a.1 = v;
                }
                return Ok(());
            }
        }
        if let (GateSpec::Snl(p), "bridge_output") = (&mut *self, name) {
            p.bridge = if v != 0.0 {
                Bridge::Output
            } else {
                Bridge::Input
            };
            return Ok(());
        }
        match self.slot(name) {
            Some(Slot::Real(fields, scale)) => {
                let x = match scale {
                    Scale::Linear(u) => v * u,
                    Scale::Inverse(u) => u / v,
                };
                for f in fields {
                    *f = x;
                }
                Ok(())
            }
            Some(Slot::Cells(fields)) => {
                for f in fields {
                    *f = v.round().max(0.0) as usize;
                }
                Ok(())
            }
            None => Err(self.unknown(name)),
        }
    }

    /// Current value of a ratio parameter, in the units taken by [`set`](Self::set).
    pub fn get(&self, name: &str) -> Result<f64, ScenarioError> {
        let mut copy = self.clone();
        let v = match copy.slot(name) {
            Some(Slot::Real(fields, scale)) => {
                let x = *fields[0];
                match scale {
                    Scale::Linear(u) => x / u,
                    Scale::Inverse(u) => u / x,
                }
            }
            Some(Slot::Cells(fields)) => *fields[0] as f64,
            None => return Err(self.unknown(name)),
        };
        Ok(v)
    }

    pub fn build(&self) -> Result<Gate, ScenarioError> {
        Ok(match self {
            GateSpec::OneBit(p) => build_one_bit(p)?,
            GateSpec::Idsn(p) => build_idsn(p)?,
            GateSpec::IdsnSingleEquivalent { idsn, alpha } => {
                let (c, i) = match alpha {
                    Some((c, i)) if c.is_finite() && i.is_finite() => (*c, *i),
                    _ => {
                        let s = solve_mu(idsn.term_lower, &idsn.s2p)?;
                        (s.effective.cj_alpha, s.effective.ic_alpha)
                    }
                };
                build_idsn_single_equivalent(idsn, c, i)?
            }
            GateSpec::Snl(p) => build_snl(p)?,
            GateSpec::Splitter {
                parent,
                child_cells,
            } => build_splitter(parent, *child_cells)?,
        })
    }
}

#[derive(Clone, Copy)]
enum Scale {
    Linear(f64),
    /// Stored as u/v, e.g. a resistance given as Z/R.
    Inverse(f64),
}

enum Slot<'a> {
    Real(Vec<&'a mut f64>, Scale),
    Cells(Vec<&'a mut usize>),
}

impl<'a> Slot<'a> {
    fn real(fields: Vec<&'a mut f64>, scale: Scale) -> Self {
        Slot::Real(fields, scale)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    gate: String,
    a_over_lambda: Option<f64>,
    duration: Option<f64>,
    snapshot_interval: Option<f64>,
    criterion: Option<f64>,
    seed: Option<u64>,
    #[serde(default)]
    probes: Vec<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default)]
    inputs: BTreeMap<String, String>,
}

/// A parsed scenario file.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub gate: GateSpec,
    pub units: UnitSystem,
    pub run: GateScenario,
    /// Probe names to write out; empty means all.
    pub probes: Vec<String>,
    pub seed: Option<u64>,
}

/// Parse `fluxon v0=0.6 x0=-20`; x0 is measured from the interface end,
/// negative upstream.
pub fn parse_input(chain: &str, text: &str) -> Result<InputKink, ScenarioError> {
    let err = |m: String| ScenarioError::Input {
        chain: chain.to_string(),
        message: m,
    };
    let mut words = text.split_whitespace();
    let polarity = match words.next() {
        Some("fluxon") | Some("0") => 1,
        Some("antifluxon") | Some("1") => -1,
        other => return Err(err(format!("expected fluxon or antifluxon, got {other:?}"))),
    };
    let mut v = None;
    let mut x0 = None;
    for w in words {
        let (k, val) = w
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got {w:?}")))?;
        let val: f64 = val
            .parse()
            .map_err(|_| err(format!("bad number {val:?}")))?;
        match k {
            "v0" | "v" => v = Some(val),
            "x0" => x0 = Some(val),
            _ => return Err(err(format!("unknown key {k:?}"))),
        }
    }
    let v = v.ok_or_else(|| err("missing v0".into()))?;
    if !(v > 0.0 && v < 1.0) {
        return Err(err(format!("v0={v} outside (0, 1)")));
    }
    let x0 = x0.unwrap_or(-20.0);
    if x0 > 0.0 {
        return Err(err(format!(
            "x0={x0} must be upstream of the interface (<= 0)"
        )));
    }
    Ok(InputKink {
        chain: chain.to_string(),
        polarity,
        v,
        distance: -x0,
    })
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text)?;
    let units = raw
        .a_over_lambda
        .map_or_else(UnitSystem::default, UnitSystem::new);
    let mut gate = GateSpec::named(&raw.gate, &units)?;
    for (k, v) in &raw.params {
        gate.set(k, *v)?;
    }
    let inputs = raw
        .inputs
        .iter()
        .map(|(c, t)| parse_input(c, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut run = GateScenario::new(inputs);
    run.duration = raw.duration;
    if let Some(s) = raw.snapshot_interval {
        run.snapshot_interval = s;
    }
    if let Some(c) = raw.criterion {
        run.criterion = c;
    }
    Ok(Scenario {
        gate,
        units,
        run,
        probes: raw.probes,
        seed: raw.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_idsn_scenario() {
        let s = parse_scenario(
            r#"
gate = "idsn"
duration = 40.0
[params]
CJA_over_CJ = 14.0
LB_over_L = 0.25
[inputs]
S1 = "fluxon v0=0.6 x0=-20"
S2 = "antifluxon v0=0.5 x0=-21"
"#,
        )
        .unwrap();
        let GateSpec::Idsn(p) = &s.gate else { panic!() };
        assert_eq!(p.rail_a.cj, 14.0);
        assert!((p.rail_b.l - 0.25 / 9.0).abs() < 1e-12);
        assert_eq!(s.run.inputs.len(), 2);
        assert_eq!(s.run.inputs[1].polarity, -1);
        assert_eq!(s.run.inputs[1].distance, 21.0);
        assert_eq!(s.run.duration, Some(40.0));
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(matches!(
            parse_scenario("gate = \"idsn\"\n[params]\nfoo = 1.0\n"),
            Err(ScenarioError::UnknownParameter { .. })
        ));
        assert!(matches!(
            parse_scenario("gate = \"xor\"\n"),
            Err(ScenarioError::UnknownGate(_))
        ));
        assert!(parse_scenario("gate = \"idsn\"\nbogus = 1\n").is_err());
        assert!(parse_input("S1", "fluxon v0=1.2").is_err());
        assert!(parse_input("S1", "kink v0=0.5").is_err());
        assert!(parse_input("S1", "fluxon v0=0.5 x0=5").is_err());
    }

    #[test]
    fn every_named_gate_builds() {
        let u = UnitSystem::default();
        for n in GateSpec::NAMES {
            let g = GateSpec::named(n, &u).unwrap().build().unwrap();
            assert!(!g.outputs.is_empty());
        }
    }
}
