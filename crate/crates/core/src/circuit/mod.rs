//! Node/branch representation of phase circuits.

mod netlist;

pub use netlist::{emit_netlist, parse_netlist};

use std::collections::{BTreeSet, HashMap, VecDeque};

use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::UnitSystem;

/// Node index. Index 0 is always ground.
pub type NodeId = usize;

pub const GROUND: NodeId = 0;
pub const GROUND_NAME: &str = "gnd";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("branch {label}: {what}")]
    InvalidValue { label: String, what: String },
    #[error("branch {0} connects a node to itself")]
    SelfLoop(String),
    #[error("duplicate branch label {0}")]
    DuplicateLabel(String),
    #[error("unknown branch {0}")]
    UnknownBranch(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("nodes not connected to ground: {0:?}")]
    Disconnected(Vec<String>),
    #[error("capacitively floating: {0:?}")]
    CapacitivelyFloating(Vec<String>),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BranchKind {
    Jj {
        ic: f64,
        cj: f64,
        rshunt: Option<f64>,
    },
    Inductor {
        l: f64,
    },
    Capacitor {
        c: f64,
    },
    Resistor {
        r: f64,
    },
}

impl BranchKind {
    /// Capacitance contributed to the mass matrix.
    pub fn capacitance(&self) -> f64 {
        match *self {
            BranchKind::Jj { cj, .. } => cj,
            BranchKind::Capacitor { c } => c,
            _ => 0.0,
        }
    }

    /// Conductance of the dissipative part, if any.
    pub fn conductance(&self) -> f64 {
        match *self {
            BranchKind::Jj {
                rshunt: Some(r), ..
            } => 1.0 / r,
            BranchKind::Resistor { r } => 1.0 / r,
            _ => 0.0,
        }
    }
}

/// A two-terminal element. The branch phase is φ(a) − φ(b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub kind: BranchKind,
    pub a: NodeId,
    pub b: NodeId,
    pub label: String,
}

/// Current through a branch from `a` to `b`, excluding the capacitive part.
pub fn branch_current(kind: &BranchKind, dphi: f64, drate: f64) -> f64 {
    match *kind {
        BranchKind::Jj { ic, rshunt, .. } => ic * dphi.sin() + rshunt.map_or(0.0, |r| drate / r),
        BranchKind::Inductor { l } => dphi / l,
        BranchKind::Capacitor { .. } => 0.0,
        BranchKind::Resistor { r } => drate / r,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProbeTarget {
    Node(NodeId),
    /// Branch phase difference.
    Phase(usize),
    /// Branch current (non-capacitive part).
    Current(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    pub target: ProbeTarget,
}

/// A uniform LJJ segment: junctions between each node and a reference node,
/// inductors between consecutive nodes. Nodes are stored in spatial order,
/// left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub label: String,
    pub nodes: Vec<NodeId>,
    pub reference: NodeId,
    /// +1 when each junction runs node → reference, −1 for reference → node.
    pub orient: i8,
    pub ic: f64,
    pub cj: f64,
    pub l: f64,
    /// Index of the first chain branch; the chain owns the next 2N−1 branches.
    pub first_branch: usize,
    /// Common prefix of the node names, followed by the cell index.
    pub prefix: String,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn branch_count(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Junction phases from full node phases (index = node id).
    pub fn junction_phases(&self, theta: &[f64]) -> Vec<f64> {
        let r = theta[self.reference];
        let s = self.orient as f64;
        self.nodes.iter().map(|&n| s * (theta[n] - r)).collect()
    }

    /// Energy stored in each cell, given full node phases and rates.
    /// Cell k holds its junction and half of each adjacent inductor.
    pub fn cell_energies(&self, theta: &[f64], rate: &[f64]) -> Vec<f64> {
        let p = self.junction_phases(theta);
        let rr = rate[self.reference];
        let n = p.len();
        let mut e = vec![0.0; n];
        for k in 0..n {
            let v = rate[self.nodes[k]] - rr;
            e[k] += 0.5 * self.cj * v * v + self.ic * (1.0 - p[k].cos());
        }
        for k in 0..n.saturating_sub(1) {
            let d = p[k + 1] - p[k];
            let u = 0.5 * d * d / self.l;
            e[k] += 0.5 * u;
            e[k + 1] += 0.5 * u;
        }
        e
    }
}

/// Immutable circuit graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitGraph {
    nodes: Vec<String>,
    branches: Vec<Branch>,
    probes: Vec<Probe>,
    chains: Vec<Chain>,
}

impl CircuitGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.nodes[n]
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|s| s == name)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, label: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.label == label)
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chain(&self, label: &str) -> Option<&Chain> {
        self.chains.iter().find(|c| c.label == label)
    }

    /// Net non-capacitive current leaving each node (index = node id).
    pub fn node_currents(&self, theta: &[f64], rate: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for b in &self.branches {
            let i = branch_current(&b.kind, theta[b.a] - theta[b.b], rate[b.a] - rate[b.b]);
            out[b.a] += i;
            out[b.b] -= i;
        }
    }

    /// Full nodal capacitance matrix over non-ground nodes (row i ↔ node i+1).
    /// Singular when the circuit contains inductively coupled islands.
    pub fn capacitance_matrix(&self) -> CscMatrix<f64> {
        let n = self.nodes.len() - 1;
        let mut coo = CooMatrix::new(n, n);
        for b in &self.branches {
            let c = b.kind.capacitance();
            if c == 0.0 {
                continue;
            }
            if b.a != GROUND {
                coo.push(b.a - 1, b.a - 1, c);
            }
            if b.b != GROUND {
                coo.push(b.b - 1, b.b - 1, c);
            }
            if b.a != GROUND && b.b != GROUND {
                coo.push(b.a - 1, b.b - 1, -c);
                coo.push(b.b - 1, b.a - 1, -c);
            }
        }
        CscMatrix::from(&coo)
    }

    /// Partition of nodes into capacitively connected components.
    pub fn islands(&self) -> Result<Vec<Island>, CircuitError> {
        find_islands(self)
    }
}

/// A set of nodes joined by capacitive branches but without a capacitive
/// path to ground. Its common-mode phase has no inertia and is fixed by the
/// current balance of the inductors crossing its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Island {
    pub nodes: Vec<NodeId>,
    pub reference: NodeId,
    /// Inductor branches with exactly one endpoint inside the island.
    pub boundary: Vec<usize>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn find_islands(g: &CircuitGraph) -> Result<Vec<Island>, CircuitError> {
    let n = g.nodes.len();
    let mut dsu = Dsu((0..n).collect());
    for b in &g.branches {
        if b.kind.capacitance() > 0.0 {
            dsu.union(b.a, b.b);
        }
    }
    let ground_root = dsu.find(GROUND);
    let mut groups: HashMap<usize, Vec<NodeId>> = HashMap::new();
    for v in 1..n {
        let r = dsu.find(v);
        if r != ground_root {
            groups.entry(r).or_default().push(v);
        }
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();
    let mut islands = Vec::new();
    for r in roots {
        let nodes = groups.remove(&r).unwrap_or_default();
        let inside: BTreeSet<NodeId> = nodes.iter().copied().collect();
        let mut boundary = Vec::new();
        let mut bad = BTreeSet::new();
        for (k, b) in g.branches.iter().enumerate() {
            if inside.contains(&b.a) == inside.contains(&b.b) {
                continue;
            }
            match b.kind {
                BranchKind::Inductor { .. } => boundary.push(k),
                _ => {
                    bad.insert(b.a);
                    bad.insert(b.b);
                }
            }
        }
        if boundary.is_empty() || !bad.is_empty() {
            let names = nodes.iter().map(|&v| g.nodes[v].clone()).collect();
            return Err(CircuitError::CapacitivelyFloating(names));
        }
        // The node with most capacitive branches makes a good reference:
        // removing it leaves the sparsest reduced mass matrix.
        let reference = *nodes
            .iter()
            .max_by_key(|&&v| {
                let deg = g
                    .branches
                    .iter()
                    .filter(|b| b.kind.capacitance() > 0.0 && (b.a == v || b.b == v))
                    .count();
                (deg, std::cmp::Reverse(v))
            })
            .expect("island has nodes");
        islands.push(Island {
            nodes,
            reference,
            boundary,
        });
    }
    Ok(islands)
}

/// Incremental construction of a [`CircuitGraph`].
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    nodes: Vec<String>,
    index: HashMap<String, NodeId>,
    branches: Vec<Branch>,
    labels: HashMap<String, usize>,
    probes: Vec<Probe>,
    chains: Vec<Chain>,
    min_inductance: f64,
}

impl Default for CircuitBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl CircuitBuilder {
    pub fn new() -> Self {
        let mut index = HashMap::new();
        index.insert(GROUND_NAME.to_string(), GROUND);
        Self {
            nodes: vec![GROUND_NAME.to_string()],
            index,
            branches: Vec::new(),
            labels: HashMap::new(),
            probes: Vec::new(),
            chains: Vec::new(),
            min_inductance: default_inductance_floor(),
        }
    }

    /// Smallest inductance accepted; smaller requests are clamped.
    pub fn inductance_floor(mut self, l: f64) -> Self {
        self.min_inductance = l;
        self
    }

    pub fn min_inductance(&self) -> f64 {
        self.min_inductance
    }

    /// Node id for `name`, created on first use.
    pub fn node(&mut self, name: &str) -> NodeId {
        if let Some(&n) = self.index.get(name) {
            return n;
        }
        let id = self.nodes.len();
        self.nodes.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains_key(label)
    }

    pub fn add(
        &mut self,
        label: &str,
        a: NodeId,
        b: NodeId,
        kind: BranchKind,
    ) -> Result<usize, CircuitError> {
        if self.labels.contains_key(label) {
            return Err(CircuitError::DuplicateLabel(label.to_string()));
        }
        if a == b {
            return Err(CircuitError::SelfLoop(label.to_string()));
        }
        let kind = self.check_kind(label, kind)?;
        let k = self.branches.len();
        self.branches.push(Branch {
            kind,
            a,
            b,
            label: label.to_string(),
        });
        self.labels.insert(label.to_string(), k);
        Ok(k)
    }

    fn check_kind(&self, label: &str, kind: BranchKind) -> Result<BranchKind, CircuitError> {
        let bad = |what: &str| {
            Err(CircuitError::InvalidValue {
                label: label.to_string(),
                what: what.to_string(),
            })
        };
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        match kind {
            BranchKind::Jj { ic, cj, rshunt } => {
                if !finite_pos(ic) {
                    return bad("ic must be positive");
                }
                if !(cj.is_finite() && cj >= 0.0) {
                    return bad("cj must be non-negative");
                }
                if let Some(r) = rshunt {
                    if !finite_pos(r) {
                        return bad("rshunt must be positive");
                    }
                }
                Ok(kind)
            }
            BranchKind::Inductor { l } => {
                if !finite_pos(l) {
                    return bad("l must be positive");
                }
                if l < self.min_inductance {
                    log::warn!(
                        "inductor {label}: l={l} below floor {}, clamped",
                        self.min_inductance
                    );
                    return Ok(BranchKind::Inductor {
                        l: self.min_inductance,
                    });
                }
                Ok(kind)
            }
            BranchKind::Capacitor { c } => {
                if !finite_pos(c) {
                    return bad("c must be positive");
                }
                Ok(kind)
            }
            BranchKind::Resistor { r } => {
                if !finite_pos(r) {
                    return bad("r must be positive");
                }
                Ok(kind)
            }
        }
    }

    pub fn jj(
        &mut self,
        label: &str,
        a: NodeId,
        b: NodeId,
        ic: f64,
        cj: f64,
        rshunt: Option<f64>,
    ) -> Result<usize, CircuitError> {
        self.add(label, a, b, BranchKind::Jj { ic, cj, rshunt })
    }

    pub fn inductor(
        &mut self,
        label: &str,
        a: NodeId,
        b: NodeId,
        l: f64,
    ) -> Result<usize, CircuitError> {
        self.add(label, a, b, BranchKind::Inductor { l })
    }

    pub fn capacitor(
        &mut self,
        label: &str,
        a: NodeId,
        b: NodeId,
        c: f64,
    ) -> Result<usize, CircuitError> {
        self.add(label, a, b, BranchKind::Capacitor { c })
    }

    pub fn resistor(
        &mut self,
        label: &str,
        a: NodeId,
        b: NodeId,
        r: f64,
    ) -> Result<usize, CircuitError> {
        self.add(label, a, b, BranchKind::Resistor { r })
    }

    /// Uniform chain of `n` cells with nodes `{prefix}0 .. {prefix}{n-1}`.
    #[allow(clippy::too_many_arguments)]
    pub fn chain(
        &mut self,
        label: &str,
        prefix: &str,
        reference: NodeId,
        n: usize,
        ic: f64,
        cj: f64,
        l: f64,
        orient: i8,
    ) -> Result<Vec<NodeId>, CircuitError> {
        self.chain_from(label, prefix, 0, reference, n, ic, cj, l, orient)
    }

    /// As [`chain`](Self::chain) with node indices starting at `start`.
    #[allow(clippy::too_many_arguments)]
    pub fn chain_from(
        &mut self,
        label: &str,
        prefix: &str,
        start: usize,
        reference: NodeId,
        n: usize,
        ic: f64,
        cj: f64,
        l: f64,
        orient: i8,
    ) -> Result<Vec<NodeId>, CircuitError> {
        if self.chains.iter().any(|c| c.label == label) {
            return Err(CircuitError::DuplicateLabel(label.to_string()));
        }
        if n < 2 {
            return Err(CircuitError::InvalidValue {
                label: label.to_string(),
                what: "chain needs at least two cells".into(),
            });
        }
        let first_branch = self.branches.len();
        let nodes: Vec<NodeId> = (start..start + n)
            .map(|k| self.node(&format!("{prefix}{k}")))
            .collect();
        for (k, &v) in nodes.iter().enumerate() {
            let (a, b) = if orient >= 0 {
                (v, reference)
            } else {
                (reference, v)
            };
            self.jj(&format!("{label}.j{k}"), a, b, ic, cj, None)?;
        }
        for k in 0..n - 1 {
            self.inductor(&format!("{label}.l{k}"), nodes[k], nodes[k + 1], l)?;
        }
        self.chains.push(Chain {
            label: label.to_string(),
            nodes: nodes.clone(),
            reference,
            orient: if orient >= 0 { 1 } else { -1 },
            ic,
            cj,
            l,
            first_branch,
            prefix: prefix.to_string(),
        });
        Ok(nodes)
    }

    pub fn probe_node(&mut self, name: &str, node: NodeId) {
        self.probes.push(Probe {
            name: name.to_string(),
            target: ProbeTarget::Node(node),
        });
    }

    pub fn probe_phase(&mut self, name: &str, branch: &str) -> Result<(), CircuitError> {
        let k = *self
            .labels
            .get(branch)
            .ok_or_else(|| CircuitError::UnknownBranch(branch.to_string()))?;
        self.probes.push(Probe {
            name: name.to_string(),
            target: ProbeTarget::Phase(k),
        });
        Ok(())
    }

    pub fn probe_current(&mut self, name: &str, branch: &str) -> Result<(), CircuitError> {
        let k = *self
            .labels
            .get(branch)
            .ok_or_else(|| CircuitError::UnknownBranch(branch.to_string()))?;
        self.probes.push(Probe {
            name: name.to_string(),
            target: ProbeTarget::Current(k),
        });
        Ok(())
    }

    pub fn build(self) -> Result<CircuitGraph, CircuitError> {
        let g = CircuitGraph {
            nodes: self.nodes,
            branches: self.branches,
            probes: self.probes,
            chains: self.chains,
        };
        check_connected(&g)?;
        find_islands(&g)?;
        Ok(g)
    }
}

/// Inductance floor 0.02·L at the default discreteness.
pub fn default_inductance_floor() -> f64 {
    0.02 * UnitSystem::default().cell_inductance()
}

fn check_connected(g: &CircuitGraph) -> Result<(), CircuitError> {
    let n = g.nodes.len();
    let mut adj = vec![Vec::new(); n];
    for b in &g.branches {
        adj[b.a].push(b.b);
        adj[b.b].push(b.a);
    }
    let mut seen = vec![false; n];
    seen[GROUND] = true;
    let mut queue = VecDeque::from([GROUND]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let lost: Vec<String> = (0..n)
        .filter(|&v| !seen[v])
        .map(|v| g.nodes[v].clone())
        .collect();
    if lost.is_empty() {
        Ok(())
    } else {
        Err(CircuitError::Disconnected(lost))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dense(m: &CscMatrix<f64>) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from(m)
    }

    #[test]
    fn single_junction_matrix() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        b.jj("j0", n1, GROUND, 1.0, 1.0, None).unwrap();
        let g = b.build().unwrap();
        let m = dense(&g.capacitance_matrix());
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m[(0, 0)], 1.0);
    }

    #[test]
    fn coupled_pair_matrix() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        let n2 = b.node("n2");
        b.jj("j1", n1, GROUND, 1.0, 1.0, None).unwrap();
        b.jj("j2", n2, GROUND, 1.0, 1.0, None).unwrap();
        b.capacitor("c", n1, n2, 2.0).unwrap();
        let m = dense(&b.build().unwrap().capacitance_matrix());
        assert_eq!(
            m,
            nalgebra::DMatrix::from_row_slice(2, 2, &[3.0, -2.0, -2.0, 3.0])
        );
    }

    #[test]
    fn chain_matrix_is_diagonal() {
        let mut b = CircuitBuilder::new();
        b.chain("s", "n", GROUND, 5, 1.0, 1.0, 1.0 / 9.0, 1)
            .unwrap();
        let m = dense(&b.build().unwrap().capacitance_matrix());
        assert_eq!(m, nalgebra::DMatrix::identity(5, 5));
    }

    #[test]
    fn branch_currents() {
        let jj = BranchKind::Jj {
            ic: 1.0,
            cj: 1.0,
            rshunt: None,
        };
        assert!((branch_current(&jj, PI / 2.0, 0.0) - 1.0).abs() < 1e-15);
        let l = BranchKind::Inductor { l: 1.0 / 9.0 };
        assert!((branch_current(&l, 2.0 * PI, 0.0) - 18.0 * PI).abs() < 1e-12);
        let r = BranchKind::Resistor { r: 10.0 };
        assert!((branch_current(&r, 0.0, 1.0) - 0.1).abs() < 1e-15);
        let shunted = BranchKind::Jj {
            ic: 2.0,
            cj: 1.0,
            rshunt: Some(4.0),
        };
        assert!((branch_current(&shunted, 0.0, 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        assert!(matches!(
            b.jj("j", n1, GROUND, -1.0, 1.0, None),
            Err(CircuitError::InvalidValue { .. })
        ));
        assert!(matches!(
            b.inductor("l", n1, n1, 1.0),
            Err(CircuitError::SelfLoop(_))
        ));
        b.capacitor("c", n1, GROUND, 1.0).unwrap();
        assert!(matches!(
            b.capacitor("c", n1, GROUND, 1.0),
            Err(CircuitError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn clamps_small_inductance() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        b.jj("j", n1, GROUND, 1.0, 1.0, None).unwrap();
        b.inductor("l", n1, GROUND, 1e-9).unwrap();
        let g = b.build().unwrap();
        match g.branches()[1].kind {
            BranchKind::Inductor { l } => assert!((l - default_inductance_floor()).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn disconnected_node() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        let n2 = b.node("n2");
        let n3 = b.node("n3");
        b.jj("j", n1, GROUND, 1.0, 1.0, None).unwrap();
        b.jj("k", n2, n3, 1.0, 1.0, None).unwrap();
        assert!(matches!(b.build(), Err(CircuitError::Disconnected(v)) if v.len() == 2));
    }

    #[test]
    fn floating_through_resistor_is_rejected() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        let n2 = b.node("n2");
        b.jj("j", n1, GROUND, 1.0, 1.0, None).unwrap();
        b.resistor("r", n1, n2, 1.0).unwrap();
        assert!(matches!(
            b.build(),
            Err(CircuitError::CapacitivelyFloating(_))
        ));
    }

    #[test]
    fn inductively_held_island_is_accepted() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        let m = b.node("m");
        let n2 = b.node("n2");
        b.jj("j1", n1, GROUND, 1.0, 1.0, None).unwrap();
        b.jj("j2", n2, m, 1.0, 1.0, None).unwrap();
        b.inductor("l", n1, n2, 0.1).unwrap();
        let g = b.build().unwrap();
        let isl = g.islands().unwrap();
        assert_eq!(isl.len(), 1);
        assert_eq!(isl[0].nodes.len(), 2);
        assert_eq!(isl[0].boundary, vec![2]);
    }

    #[test]
    fn cell_energy_of_flat_chain_is_zero() {
        let mut b = CircuitBuilder::new();
        b.chain("s", "n", GROUND, 6, 1.0, 1.0, 1.0 / 9.0, -1)
            .unwrap();
        let g = b.build().unwrap();
        let c = g.chain("s").unwrap();
        let z = vec![0.0; g.node_count()];
        assert!(c.cell_energies(&z, &z).iter().all(|&e| e == 0.0));
        let mut th = z.clone();
        th[c.nodes[2]] = 0.3;
        // reversed orientation flips the junction phase sign
        assert!((c.junction_phases(&th)[2] + 0.3).abs() < 1e-15);
    }
}
