//! Time integration of M·θ̈ = −I(θ, θ̇) with an energy ledger.
//!
//! Islands (node groups without a capacitive path to ground) are handled in
//! reduced coordinates: one reference node per island is eliminated and its
//! phase follows from the current balance of the boundary inductors. Every
//! other node keeps its own degree of freedom, so island-internal phases are
//! integrated relative to the island reference.

mod output;

pub use output::{write_energy_csv, write_probe_csv, write_snapshot_csv};

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{branch_current, CircuitError, CircuitGraph, ProbeTarget, GROUND};

pub const DEFAULT_DT: f64 = 0.01;
/// Largest accepted ω_max·dt before the step is halved.
pub const STIFFNESS_LIMIT: f64 = 0.2;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("state diverged at t={t}")]
    Diverged { t: f64, last: Box<SimState> },
    #[error("state vector has {got} entries, circuit has {want} nodes")]
    Shape { got: usize, want: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Phases and phase rates indexed by node id; entry 0 (ground) stays 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub phi: Vec<f64>,
    pub rate: Vec<f64>,
    pub dissipated: f64,
}

impl SimState {
    pub fn zero(g: &CircuitGraph) -> Self {
        let n = g.node_count();
        Self {
            t: 0.0,
            phi: vec![0.0; n],
            rate: vec![0.0; n],
            dissipated: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.dissipated.is_finite()
            && self.phi.iter().chain(&self.rate).all(|x| x.is_finite())
    }

    /// Negated phases and rates.
    pub fn negated(&self) -> Self {
        Self {
            t: self.t,
            phi: self.phi.iter().map(|x| -x).collect(),
            rate: self.rate.iter().map(|x| -x).collect(),
            dissipated: self.dissipated,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub kinetic: f64,
    pub inductive: f64,
    pub josephson: f64,
    pub dissipated: f64,
    pub total: f64,
}

impl EnergyLedger {
    pub fn scaled(&self, unit: f64) -> Self {
        Self {
            kinetic: self.kinetic / unit,
            inductive: self.inductive / unit,
            josephson: self.josephson / unit,
            dissipated: self.dissipated / unit,
            total: self.total / unit,
        }
    }
}

/// Energy components of a state, in E_J.
pub fn energy(g: &CircuitGraph, s: &SimState) -> EnergyLedger {
    let mut e = EnergyLedger {
        dissipated: s.dissipated,
        ..Default::default()
    };
    for b in g.branches() {
        let d = s.phi[b.a] - s.phi[b.b];
        let v = s.rate[b.a] - s.rate[b.b];
        e.kinetic += 0.5 * b.kind.capacitance() * v * v;
        match b.kind {
            crate::circuit::BranchKind::Jj { ic, .. } => e.josephson += ic * (1.0 - d.cos()),
            crate::circuit::BranchKind::Inductor { l } => e.inductive += 0.5 * d * d / l,
            _ => {}
        }
    }
    e.total = e.kinetic + e.inductive + e.josephson;
    e
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub name: String,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub phi: Vec<f64>,
    pub rate: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Coord {
    Ground,
    Free(usize),
    Member { island: usize, q: usize },
    Reference(usize),
}

struct BoundaryTerm {
    island: usize,
    inner: usize,
    outer: usize,
    g: f64,
}

/// Precomputed integrator for one circuit.
pub struct Simulator {
    graph: CircuitGraph,
    coords: Vec<Coord>,
    dof: usize,
    /// Position of each coordinate in the factorization ordering.
    perm: Vec<usize>,
    chol: CscCholesky<f64>,
    reduced_mass: CscMatrix<f64>,
    island_refs: Vec<usize>,
    boundary: Vec<BoundaryTerm>,
    slave_inv: DMatrix<f64>,
    dissipative: Vec<usize>,
    dt: f64,
    omega_max: f64,
}

struct Work {
    theta: Vec<f64>,
    thetad: Vec<f64>,
    current: Vec<f64>,
    rhs: DVector<f64>,
    k: [Vec<f64>; 4],
    y: Vec<f64>,
    ytmp: Vec<f64>,
}

impl Simulator {
    /// Prepare a simulator with the default step, halved while the stiffest
    /// linear mode violates the stiffness limit.
    pub fn new(graph: &CircuitGraph) -> Result<Self, DynamicsError> {
        Self::with_dt(graph, DEFAULT_DT)
    }

    pub fn with_dt(graph: &CircuitGraph, dt0: f64) -> Result<Self, DynamicsError> {
        if !(dt0.is_finite() && dt0 > 0.0) {
            return Err(DynamicsError::Invalid(format!(
                "time step must be positive, got {dt0}"
            )));
        }
        let islands = graph.islands()?;
        let n = graph.node_count();
        let mut coords = vec![Coord::Ground; n];
        let mut island_refs = Vec::new();
        for (k, isl) in islands.iter().enumerate() {
            coords[isl.reference] = Coord::Reference(k);
            island_refs.push(isl.reference);
        }
        let mut dof = 0;
        for v in 1..n {
            if matches!(coords[v], Coord::Reference(_)) {
                continue;
            }
            let island = islands.iter().position(|i| i.nodes.contains(&v));
            coords[v] = match island {
                Some(k) => Coord::Member { island: k, q: dof },
                None => Coord::Free(dof),
            };
            dof += 1;
        }
        let q_of = |v: usize| match coords[v] {
            Coord::Free(q) | Coord::Member { q, .. } => Some(q),
            _ => None,
        };

        // reduced mass: island references behave like ground
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        let mut degree = vec![0usize; dof];
        for b in graph.branches() {
            let c = b.kind.capacitance();
            if c == 0.0 {
                continue;
            }
            let (qa, qb) = (q_of(b.a), q_of(b.b));
            if let Some(i) = qa {
                entries.push((i, i, c));
            }
            if let Some(j) = qb {
                entries.push((j, j, c));
            }
            if let (Some(i), Some(j)) = (qa, qb) {
                entries.push((i, j, -c));
                entries.push((j, i, -c));
                degree[i] += 1;
                degree[j] += 1;
            }
        }
        // low-degree coordinates first keeps star-shaped couplings fill-free
        let mut order: Vec<usize> = (0..dof).collect();
        order.sort_by_key(|&i| (degree[i], i));
        let mut perm = vec![0; dof];
        for (pos, &i) in order.iter().enumerate() {
            perm[i] = pos;
        }
        let mut coo = CooMatrix::new(dof, dof);
        let mut plain = CooMatrix::new(dof, dof);
        for &(i, j, c) in &entries {
            coo.push(perm[i], perm[j], c);
            plain.push(i, j, c);
        }
        let mass = CscMatrix::from(&coo);
        let chol = CscCholesky::factor(&mass).map_err(|_| DynamicsError::NotPositiveDefinite)?;

        let mut boundary = Vec::new();
        for (k, isl) in islands.iter().enumerate() {
            for &bi in &isl.boundary {
                let b = &graph.branches()[bi];
                let l = match b.kind {
                    crate::circuit::BranchKind::Inductor { l } => l,
                    _ => unreachable!("island boundary holds inductors only"),
                };
                let (inner, outer) = if isl.nodes.contains(&b.a) {
                    (b.a, b.b)
                } else {
                    (b.b, b.a)
                };
                boundary.push(BoundaryTerm {
                    island: k,
                    inner,
                    outer,
                    g: 1.0 / l,
                });
            }
        }
        let kk = islands.len();
        let mut a = DMatrix::zeros(kk, kk);
        for t in &boundary {
            a[(t.island, t.island)] += t.g;
            if let Coord::Member { island, .. } | Coord::Reference(island) = coords[t.outer] {
                a[(t.island, island)] -= t.g;
            }
        }
        let slave_inv = if kk == 0 {
            a
        } else {
            a.try_inverse().ok_or_else(|| {
                let names = islands
                    .iter()
                    .flat_map(|i| i.nodes.iter().map(|&v| graph.node_name(v).to_string()))
                    .collect();
                DynamicsError::Circuit(CircuitError::CapacitivelyFloating(names))
            })?
        };
        let dissipative = graph
            .branches()
            .iter()
            .enumerate()
            .filter(|(_, b)| b.kind.conductance() > 0.0)
            .map(|(k, _)| k)
            .collect();

        let mut sim = Self {
            graph: graph.clone(),
            coords,
            dof,
            perm,
            chol,
            reduced_mass: CscMatrix::from(&plain),
            island_refs,
            boundary,
            slave_inv,
            dissipative,
            dt: dt0,
            omega_max: 0.0,
        };
        sim.omega_max = sim.estimate_omega_max();
        while sim.omega_max * sim.dt > STIFFNESS_LIMIT {
            sim.dt *= 0.5;
        }
        Ok(sim)
    }

    pub fn graph(&self) -> &CircuitGraph {
        &self.graph
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Highest linear-mode frequency around the zero-phase state.
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.dof
    }

    /// Mass matrix over the reduced coordinates.
    pub fn reduced_mass(&self) -> &CscMatrix<f64> {
        &self.reduced_mass
    }

    fn work(&self) -> Work {
        let n = self.graph.node_count();
        let m = 2 * self.dof + 1;
        Work {
            theta: vec![0.0; n],
            thetad: vec![0.0; n],
            current: vec![0.0; n],
            rhs: DVector::zeros(self.dof),
            k: [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]],
            y: vec![0.0; m],
            ytmp: vec![0.0; m],
        }
    }

    fn q_index(&self, v: usize) -> Option<usize> {
        match self.coords[v] {
            Coord::Free(q) | Coord::Member { q, .. } => Some(q),
            _ => None,
        }
    }

    /// Full node vector from reduced coordinates.
    fn expand(&self, q: &[f64], out: &mut [f64]) {
        out[GROUND] = 0.0;
        for (v, c) in self.coords.iter().enumerate() {
            out[v] = match *c {
                Coord::Free(i) | Coord::Member { q: i, .. } => q[i],
                _ => 0.0,
            };
        }
        if self.island_refs.is_empty() {
            return;
        }
        let kk = self.island_refs.len();
        let mut rhs = DVector::zeros(kk);
        for t in &self.boundary {
            // out[] currently holds island-relative values with references at 0
            rhs[t.island] += t.g * (out[t.outer] - out[t.inner]);
        }
        let base = &self.slave_inv * rhs;
        for (v, c) in self.coords.iter().enumerate() {
            match *c {
                Coord::Member { island, .. } | Coord::Reference(island) => out[v] += base[island],
                _ => {}
            }
        }
    }

    /// Reduced coordinates from a full node vector.
    fn reduce(&self, full: &[f64], q: &mut [f64]) {
        for (v, c) in self.coords.iter().enumerate() {
            match *c {
                Coord::Free(i) => q[i] = full[v],
                Coord::Member { island, q: i } => q[i] = full[v] - full[self.island_refs[island]],
                _ => {}
            }
        }
    }

    /// Right-hand side of the first-order system y = (q, q̇, dissipated).
    fn derivative(&self, y: &[f64], dy: &mut [f64], w: &mut Work) -> f64 {
        let m = self.dof;
        let (q, qd) = (&y[..m], &y[m..2 * m]);
        self.expand(q, &mut w.theta);
        self.expand(qd, &mut w.thetad);
        self.graph
            .node_currents(&w.theta, &w.thetad, &mut w.current);
        for v in 1..self.coords.len() {
            if let Some(i) = self.q_index(v) {
                w.rhs[self.perm[i]] = -w.current[v];
            }
        }
        self.chol.solve_mut(&mut w.rhs);
        dy[..m].copy_from_slice(qd);
        for i in 0..m {
            dy[m + i] = w.rhs[self.perm[i]];
        }
        let mut p = 0.0;
        for &k in &self.dissipative {
            let b = &self.graph.branches()[k];
            let v = w.thetad[b.a] - w.thetad[b.b];
            p += b.kind.conductance() * v * v;
        }
        dy[2 * m] = p;
        p
    }

    fn estimate_omega_max(&self) -> f64 {
        if self.dof == 0 {
            return 0.0;
        }
        let n = self.graph.node_count();
        let mut theta = vec![0.0; n];
        let mut cur = vec![0.0; n];
        let mut x: Vec<f64> = (0..self.dof)
            .map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0)
            .collect();
        let mut rhs = DVector::zeros(self.dof);
        let mut lambda = 0.0;
        for _ in 0..300 {
            self.expand(&x, &mut theta);
            // linearized restoring currents around θ = 0
            cur.iter_mut().for_each(|c| *c = 0.0);
            for b in self.graph.branches() {
                let d = theta[b.a] - theta[b.b];
                let i = match b.kind {
                    crate::circuit::BranchKind::Jj { ic, .. } => ic * d,
                    crate::circuit::BranchKind::Inductor { l } => d / l,
                    _ => 0.0,
                };
                cur[b.a] += i;
                cur[b.b] -= i;
            }
            for v in 1..n {
                if let Some(i) = self.q_index(v) {
                    rhs[self.perm[i]] = cur[v];
                }
            }
            self.chol.solve_mut(&mut rhs);
            let mut y: Vec<f64> = (0..self.dof).map(|i| rhs[self.perm[i]]).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || xn == 0.0 {
                return 0.0;
            }
            lambda = norm / xn;
            y.iter_mut().for_each(|v| *v /= norm);
            x = y;
        }
        lambda.sqrt()
    }

    fn load(&self, s: &SimState, w: &mut Work) -> Result<(), DynamicsError> {
        let n = self.graph.node_count();
        if s.phi.len() != n || s.rate.len() != n {
            return Err(DynamicsError::Shape {
                got: s.phi.len().min(s.rate.len()),
                want: n,
            });
        }
        let m = self.dof;
        let (q, rest) = w.y.split_at_mut(m);
        self.reduce(&s.phi, q);
        self.reduce(&s.rate, &mut rest[..m]);
        rest[m] = s.dissipated;
        Ok(())
    }

    fn store(&self, t: f64, w: &mut Work) -> SimState {
        let n = self.graph.node_count();
        let m = self.dof;
        let mut phi = vec![0.0; n];
        let mut rate = vec![0.0; n];
        self.expand(&w.y[..m], &mut phi);
        self.expand(&w.y[m..2 * m], &mut rate);
        SimState {
            t,
            phi,
            rate,
            dissipated: w.y[2 * m],
        }
    }

    fn rk4(&self, dt: f64, w: &mut Work) {
        let len = w.y.len();
        let mut k = std::mem::take(&mut w.k);
        let mut tmp = std::mem::take(&mut w.ytmp);
        let y = w.y.clone();
        self.derivative(&y, &mut k[0], w);
        for i in 0..len {
            tmp[i] = y[i] + 0.5 * dt * k[0][i];
        }
        self.derivative(&tmp, &mut k[1], w);
        for i in 0..len {
            tmp[i] = y[i] + 0.5 * dt * k[1][i];
        }
        self.derivative(&tmp, &mut k[2], w);
        for i in 0..len {
            tmp[i] = y[i] + dt * k[2][i];
        }
        self.derivative(&tmp, &mut k[3], w);
        for i in 0..len {
            w.y[i] = y[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        w.k = k;
        w.ytmp = tmp;
    }

    /// One fourth-order step of length `dt`.
    pub fn step(&self, s: &SimState, dt: f64) -> Result<SimState, DynamicsError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(DynamicsError::Invalid(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let mut w = self.work();
        self.load(s, &mut w)?;
        self.rk4(dt, &mut w);
        let next = self.store(s.t + dt, &mut w);
        if !next.is_finite() {
            return Err(DynamicsError::Diverged {
                t: s.t,
                last: Box::new(s.clone()),
            });
        }
        Ok(next)
    }

    /// Integrate for `duration`, recording probes, energies and snapshots.
    pub fn run(&self, s0: &SimState, cfg: &RunConfig) -> Result<RunOutput, DynamicsError> {
        if !(cfg.duration.is_finite() && cfg.duration >= 0.0) {
            return Err(DynamicsError::Invalid(format!(
                "duration must be non-negative, got {}",
                cfg.duration
            )));
        }
        let mut out = RunOutput {
            final_state: s0.clone(),
            energy: Vec::new(),
            probes: self
                .graph
                .probes()
                .iter()
                .map(|p| ProbeRecord {
                    name: p.name.clone(),
                    samples: Vec::new(),
                })
                .collect(),
            snapshots: Vec::new(),
            dt: self.dt,
        };
        let steps = (cfg.duration / self.dt).ceil() as usize;
        let every =
            |interval: Option<f64>| interval.map(|x| ((x / self.dt).round() as usize).max(1));
        let sample_every = every(cfg.sample_interval);
        let snap_every = every(cfg.snapshot_interval);
        self.record(s0, &mut out, sample_every.is_some(), snap_every.is_some());
        if steps == 0 {
            return Ok(out);
        }
        let dt = cfg.duration / steps as f64;
        let mut w = self.work();
        self.load(s0, &mut w)?;
        let mut last = s0.clone();
        for k in 1..=steps {
            self.rk4(dt, &mut w);
            let t = s0.t + dt * k as f64;
            let due_sample = sample_every.is_some_and(|e| k % e == 0 || k == steps);
            let due_snap = snap_every.is_some_and(|e| k % e == 0);
            if !w.y.iter().all(|x| x.is_finite()) {
                return Err(DynamicsError::Diverged {
                    t: last.t,
                    last: Box::new(last),
                });
            }
            if due_sample || due_snap || k == steps || k % 256 == 0 {
                last = self.store(t, &mut w);
                self.record(&last, &mut out, due_sample, due_snap);
            }
        }
        out.final_state = last;
        Ok(out)
    }

    fn record(&self, s: &SimState, out: &mut RunOutput, sample: bool, snap: bool) {
        if sample {
            out.energy.push((s.t, energy(&self.graph, s)));
            for (p, rec) in self.graph.probes().iter().zip(out.probes.iter_mut()) {
                rec.samples
                    .push((s.t, probe_value(&self.graph, &p.target, s)));
            }
        }
        if snap {
            out.snapshots.push(Snapshot {
                t: s.t,
                phi: s.phi.clone(),
                rate: s.rate.clone(),
            });
        }
    }
}

/// Value of a probe target in state `s`.
pub fn probe_value(g: &CircuitGraph, target: &ProbeTarget, s: &SimState) -> f64 {
    match *target {
        ProbeTarget::Node(n) => s.phi[n],
        ProbeTarget::Phase(k) => {
            let b = &g.branches()[k];
            s.phi[b.a] - s.phi[b.b]
        }
        ProbeTarget::Current(k) => {
            let b = &g.branches()[k];
            branch_current(&b.kind, s.phi[b.a] - s.phi[b.b], s.rate[b.a] - s.rate[b.b])
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub duration: f64,
    /// Probe and energy sampling interval; `None` disables sampling.
    pub sample_interval: Option<f64>,
    pub snapshot_interval: Option<f64>,
}

impl RunConfig {
    pub fn new(duration: f64) -> Self {
        Self {
            duration,
            sample_interval: Some(0.1),
            snapshot_interval: None,
        }
    }

    pub fn snapshots(mut self, interval: f64) -> Self {
        self.snapshot_interval = Some(interval);
        self
    }

    pub fn samples(mut self, interval: Option<f64>) -> Self {
        self.sample_interval = interval;
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutput {
    pub final_state: SimState,
    pub energy: Vec<(f64, EnergyLedger)>,
    pub probes: Vec<ProbeRecord>,
    pub snapshots: Vec<Snapshot>,
    pub dt: f64,
}

impl RunOutput {
    pub fn probe(&self, name: &str) -> Option<&ProbeRecord> {
        self.probes.iter().find(|p| p.name == name)
    }
}

/// Convenience wrapper: prepare a simulator and run.
pub fn run(g: &CircuitGraph, s0: &SimState, cfg: &RunConfig) -> Result<RunOutput, DynamicsError> {
    Simulator::new(g)?.run(s0, cfg)
}

/// Convenience wrapper: prepare a simulator and take one step.
pub fn step(g: &CircuitGraph, s: &SimState, dt: f64) -> Result<SimState, DynamicsError> {
    Simulator::with_dt(g, dt)?.step(s, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use std::f64::consts::PI;

    fn pendulum(rshunt: Option<f64>) -> CircuitGraph {
        let mut b = CircuitBuilder::new();
        let n = b.node("n1");
        b.jj("j", n, GROUND, 1.0, 1.0, rshunt).unwrap();
        b.probe_node("phi", n);
        b.build().unwrap()
    }

    #[test]
    fn small_oscillation_period() {
        let g = pendulum(None);
        let sim = Simulator::new(&g).unwrap();
        let mut s = SimState::zero(&g);
        s.phi[1] = 0.1;
        let out = sim
            .run(&s, &RunConfig::new(20.0).samples(Some(0.01)))
            .unwrap();
        let p = &out.probe("phi").unwrap().samples;
        // upward zero crossings
        let mut cross = Vec::new();
        for w in p.windows(2) {
            if w[0].1 < 0.0 && w[1].1 >= 0.0 {
                let f = w[0].1 / (w[0].1 - w[1].1);
                cross.push(w[0].0 + f * (w[1].0 - w[0].0));
            }
        }
        let period = (cross[cross.len() - 1] - cross[0]) / (cross.len() - 1) as f64;
        // amplitude 0.1 lengthens the period by about θ²/16
        assert!((period / (2.0 * PI) - 1.0).abs() < 0.005, "{period}");
    }

    #[test]
    fn damped_ledger_closes() {
        let g = pendulum(Some(5.0));
        let sim = Simulator::new(&g).unwrap();
        let mut s = SimState::zero(&g);
        s.phi[1] = 0.1;
        let e0 = energy(&g, &s).total;
        let out = sim
            .run(&s, &RunConfig::new(4.0 * PI).samples(Some(0.1)))
            .unwrap();
        for (_, e) in &out.energy {
            assert!(((e.total + e.dissipated) - e0).abs() / e0 < 1e-8);
        }
        let last = out.energy.last().unwrap().1;
        assert!(last.dissipated > 0.1 * e0);
    }

    #[test]
    fn zero_duration_is_identity() {
        let g = pendulum(None);
        let mut s = SimState::zero(&g);
        s.phi[1] = 0.3;
        s.rate[1] = -0.2;
        let out = run(&g, &s, &RunConfig::new(0.0)).unwrap();
        assert_eq!(out.final_state, s);
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let g = pendulum(Some(1.0));
        let e = energy(&g, &SimState::zero(&g));
        assert_eq!(e, EnergyLedger::default());
    }

    #[test]
    fn island_reference_follows_inductors() {
        // island {n2, m} hangs on n1 through a stiff inductor
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        let n2 = b.node("n2");
        let m = b.node("m");
        b.jj("j1", n1, GROUND, 1.0, 1.0, None).unwrap();
        b.jj("j2", n2, m, 1.0, 1.0, None).unwrap();
        b.inductor("l", n1, n2, 0.01).unwrap();
        let g = b.build().unwrap();
        let sim = Simulator::new(&g).unwrap();
        assert_eq!(sim.degrees_of_freedom(), 2);
        let mut s = SimState::zero(&g);
        s.phi[n1] = 0.2;
        let out = sim.run(&s, &RunConfig::new(3.0)).unwrap();
        let f = &out.final_state;
        // inductor current balance of the island
        assert!((f.phi[n1] - f.phi[n2]).abs() < 1e-12);
        assert!(f.is_finite());
    }

    #[test]
    fn step_halving_for_stiff_cells() {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1");
        let n2 = b.node("n2");
        b.jj("j1", n1, GROUND, 1.0, 0.1, None).unwrap();
        b.jj("j2", n2, GROUND, 1.0, 0.1, None).unwrap();
        b.inductor("l", n1, n2, 0.01).unwrap();
        let sim = Simulator::new(&b.build().unwrap()).unwrap();
        assert!(sim.omega_max() * sim.dt() <= STIFFNESS_LIMIT);
        assert!(sim.dt() < DEFAULT_DT);
        // ω² of the antisymmetric mode: (ic + 2/l)/c
        let w = ((1.0 + 2.0 / 0.01) / 0.1f64).sqrt();
        assert!((sim.omega_max() - w).abs() / w < 1e-3);
    }
}
