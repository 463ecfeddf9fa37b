//! LJJ chains, moving-kink initial conditions and fluxon measurement.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Chain, CircuitBuilder, CircuitError, CircuitGraph, GROUND};
use crate::dynamics::{SimState, Snapshot};
use crate::units::UnitSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LjjError {
    #[error("velocity {0} is not below the maximum speed")]
    Superluminal(f64),
    #[error("polarity must be +1 or -1, got {0}")]
    Polarity(i8),
    #[error("kink at x0={x0} with width {width} does not fit in {cells} cells")]
    DoesNotFit { x0: f64, width: f64, cells: usize },
    #[error("chain of {cells} cells is shorter than {min} cells")]
    TooShort { cells: usize, min: f64 },
    #[error("unknown chain {0}")]
    UnknownChain(String),
    #[error("need at least 8 snapshots spanning 2 plasma periods, got {count} over {span}")]
    TooFewSnapshots { count: usize, span: f64 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Parameters of a uniform chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LjjParams {
    pub cells: usize,
    pub ic: f64,
    pub cj: f64,
    pub l: f64,
    pub a: f64,
}

impl LjjParams {
    /// Bulk data chain at the given discreteness.
    pub fn data(cells: usize, units: &UnitSystem) -> Self {
        Self {
            cells,
            ic: 1.0,
            cj: 1.0,
            l: units.cell_inductance(),
            a: 1.0,
        }
    }

    /// Chain scaled by s: (C_J/s, I_c/s, s·L, a).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            ic: self.ic / s,
            cj: self.cj / s,
            l: self.l * s,
            ..*self
        }
    }

    /// Penetration depth in cells.
    pub fn lambda_j(&self) -> f64 {
        1.0 / (self.l * self.ic).sqrt()
    }

    pub fn omega_j(&self) -> f64 {
        (self.ic / self.cj).sqrt()
    }

    /// Maximum speed in cells per unit time.
    pub fn c(&self) -> f64 {
        self.lambda_j() * self.omega_j()
    }

    /// Energy unit λ_J·I_c of this chain, in E_J.
    pub fn e0(&self) -> f64 {
        self.lambda_j() * self.ic
    }

    pub fn validate(&self) -> Result<(), LjjError> {
        let min = 4.0 * self.lambda_j();
        if (self.cells as f64) < min {
            return Err(LjjError::TooShort {
                cells: self.cells,
                min,
            });
        }
        Ok(())
    }

    pub fn from_chain(c: &Chain) -> Self {
        Self {
            cells: c.len(),
            ic: c.ic,
            cj: c.cj,
            l: c.l,
            a: 1.0,
        }
    }
}

/// A moving kink: polarity +1 is a fluxon (phase falling by 2π from left to
/// right, bit 0), −1 an antifluxon (bit 1). `background` is the phase to the
/// right of the kink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkSpec {
    pub x0: f64,
    /// Velocity in units of the chain's maximum speed.
    pub v: f64,
    pub polarity: i8,
    pub background: f64,
}

impl KinkSpec {
    pub fn new(x0: f64, v: f64, polarity: i8) -> Self {
        Self {
            x0,
            v,
            polarity,
            background: 0.0,
        }
    }
}

/// Fluxon energy relative to its rest energy, (1 − v²)^(−1/2).
pub fn fluxon_energy_ratio(v: f64) -> Result<f64, LjjError> {
    if !(v.abs() < 1.0) {
        return Err(LjjError::Superluminal(v));
    }
    Ok(1.0 / (1.0 - v * v).sqrt())
}

/// Fluxon energy in units of the data-chain E_0 for a chain scaled by s.
pub fn fluxon_energy(v: f64, s: f64) -> Result<f64, LjjError> {
    Ok(8.0 / s * fluxon_energy_ratio(v)?)
}

/// Velocity (units of c) of a fluxon with the given energy in units of its
/// rest energy.
pub fn velocity_for_ratio(ratio: f64) -> f64 {
    if ratio <= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (ratio * ratio)).sqrt()
    }
}

/// Junction phases and rates of a travelling kink on an isolated chain.
pub fn init_kink(p: &LjjParams, k: &KinkSpec) -> Result<(Vec<f64>, Vec<f64>), LjjError> {
    if k.polarity != 1 && k.polarity != -1 {
        return Err(LjjError::Polarity(k.polarity));
    }
    let gamma = fluxon_energy_ratio(k.v)?;
    let w = p.lambda_j() / gamma;
    let span = 4.0 * w;
    let last = p.cells as f64 - 1.0;
    if k.x0 - span < 0.0 || k.x0 + span > last {
        return Err(LjjError::DoesNotFit {
            x0: k.x0,
            width: w,
            cells: p.cells,
        });
    }
    Ok(kink_profile(p, k, 0..p.cells, 0.0))
}

/// Kink phases at cell positions `x - offset`, without the fit check.
/// Used when a chain is embedded in a larger circuit and the kink tail may
/// overlap the far end slightly.
pub fn kink_profile(
    p: &LjjParams,
    k: &KinkSpec,
    cells: impl Iterator<Item = usize>,
    offset: f64,
) -> (Vec<f64>, Vec<f64>) {
    let pol = k.polarity as f64;
    let gamma = 1.0 / (1.0 - k.v * k.v).sqrt();
    let w = p.lambda_j() / gamma;
    let vc = k.v * p.c();
    let shift = if k.polarity < 0 { -2.0 * PI } else { 0.0 };
    let mut phi = Vec::new();
    let mut rate = Vec::new();
    for n in cells {
        let u = -pol * (n as f64 - offset - k.x0) / w;
        phi.push(k.background + 4.0 * u.exp().atan() + shift);
        rate.push(2.0 * pol * vc / (w * u.cosh()));
    }
    (phi, rate)
}

/// Write a kink into the chain's nodes of a full state.
pub fn place_kink(state: &mut SimState, chain: &Chain, k: &KinkSpec) -> Result<(), LjjError> {
    let p = LjjParams::from_chain(chain);
    let (phi, rate) = init_kink(&p, k)?;
    let s = chain.orient as f64;
    let r = chain.reference;
    for (i, &n) in chain.nodes.iter().enumerate() {
        state.phi[n] = state.phi[r] + s * phi[i];
        state.rate[n] = state.rate[r] + s * rate[i];
    }
    Ok(())
}

/// Standalone chain with junctions to ground, nodes `n0..`.
pub fn chain_graph(p: &LjjParams) -> Result<CircuitGraph, LjjError> {
    let mut b = CircuitBuilder::new();
    b.chain("ljj", "n", GROUND, p.cells, p.ic, p.cj, p.l, 1)?;
    Ok(b.build()?)
}

/// Net winding of a chain in units of 2π (left end minus right end).
pub fn chain_winding(chain: &Chain, phi: &[f64]) -> f64 {
    let p = chain.junction_phases(phi);
    (p[0] - p[p.len() - 1]) / (2.0 * PI)
}

/// Fitted fluxon in one chain over a time window.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FluxonObservation {
    pub present: bool,
    pub polarity: Option<i8>,
    /// Center at the last fitted snapshot, in cells.
    pub center: Option<f64>,
    /// Time of that snapshot.
    pub time: Option<f64>,
    /// Velocity in units of the chain's maximum speed.
    pub velocity: Option<f64>,
    /// RMS amplitude of the instantaneous velocity around the fit.
    pub velocity_err: Option<f64>,
    /// Energy inside center ± 5λ_J, in units of the data E_0.
    pub energy: Option<f64>,
    /// Chain energy outside the window, in units of the data E_0.
    pub residual: Option<f64>,
    /// Two kink-like crossings closer than 3λ_J were found.
    pub ambiguous: bool,
}

/// Detection options.
#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    /// Ignore centers within this many λ_J of either chain end.
    pub edge_margin: f64,
    /// Energy unit for reported energies, in E_J.
    pub energy_unit: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            edge_margin: 2.0,
            energy_unit: UnitSystem::default().e0(),
        }
    }
}

#[derive(Clone)]
struct Frame {
    t: f64,
    polarity: i8,
    center: f64,
    ambiguous: bool,
}

/// Polarity, center and an ambiguity flag for the kink in a phase profile.
fn locate(p: &[f64], lambda: f64) -> Option<(i8, f64, bool)> {
    let n = p.len();
    let winding = p[0] - p[n - 1];
    if winding.abs() < PI {
        return None;
    }
    let polarity = if winding > 0.0 { 1 } else { -1 };
    let level = 0.5 * (p[0] + p[n - 1]);
    let mut crossings = Vec::new();
    for k in 0..n - 1 {
        let (a, b) = (p[k] - level, p[k + 1] - level);
        if (a >= 0.0) != (b >= 0.0) {
            crossings.push(k as f64 + a / (a - b));
        }
    }
    if crossings.is_empty() {
        return None;
    }
    let spread = crossings[crossings.len() - 1] - crossings[0];
    let center = crossings.iter().sum::<f64>() / crossings.len() as f64;
    // a second kink shows up as extra winding or as crossings spread apart
    let ambiguous =
        winding.abs() > 3.0 * PI || (crossings.len() > 1 && spread > 0.5 && spread < 3.0 * lambda);
    Some((polarity, center, ambiguous))
}

/// Measure the fluxon in `chain` from snapshots of the full circuit.
pub fn detect_fluxon(
    snaps: &[Snapshot],
    chain: &Chain,
    opt: &DetectOptions,
) -> Result<FluxonObservation, LjjError> {
    let span = match (snaps.first(), snaps.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    };
    if snaps.len() < 8 || span < 2.0 * UnitSystem::default().plasma_period() - 1e-9 {
        return Err(LjjError::TooFewSnapshots {
            count: snaps.len(),
            span,
        });
    }
    let params = LjjParams::from_chain(chain);
    let lambda = params.lambda_j();
    let n = chain.len() as f64;
    let lo = opt.edge_margin * lambda;
    let hi = n - 1.0 - opt.edge_margin * lambda;
    let mut frames = Vec::new();
    for (i, s) in snaps.iter().enumerate() {
        let p = chain.junction_phases(&s.phi);
        if let Some((polarity, center, ambiguous)) = locate(&p, lambda) {
            if center >= lo && center <= hi {
                frames.push((
                    i,
                    Frame {
                        t: s.t,
                        polarity,
                        center,
                        ambiguous,
                    },
                ));
            }
        }
    }
    if frames.is_empty() {
        return Ok(FluxonObservation::default());
    }
    // first contiguous run in the window; later runs are usually reflections off the far end
    let pol = frames[0].1.polarity;
    let mut end = 1;
    while end < frames.len()
        && frames[end].0 == frames[end - 1].0 + 1
        && frames[end].1.polarity == pol
    {
        end += 1;
    }
    let fr: Vec<Frame> = frames[..end].iter().map(|(_, f)| f.clone()).collect();
    let fr = &fr[..];
    let ambiguous = fr.iter().any(|f| f.ambiguous);
    let (velocity, velocity_err) = fit_velocity(fr);
    let c = params.c();
    let last = &fr[fr.len() - 1];
    let snap = snaps
        .iter()
        .find(|s| s.t == last.t)
        .expect("frame time comes from a snapshot");
    let cells = chain.cell_energies(&snap.phi, &snap.rate);
    let half = 5.0 * lambda;
    let mut inside = 0.0;
    let mut total = 0.0;
    for (k, e) in cells.iter().enumerate() {
        total += e;
        if (k as f64 - last.center).abs() <= half {
            inside += e;
        }
    }
    Ok(FluxonObservation {
        present: true,
        polarity: Some(pol),
        center: Some(last.center),
        time: Some(last.t),
        velocity: velocity.map(|v| v / c),
        velocity_err: velocity_err.map(|v| v / c),
        energy: Some(inside / opt.energy_unit),
        residual: Some((total - inside) / opt.energy_unit),
        ambiguous,
    })
}

fn fit_velocity(fr: &[Frame]) -> (Option<f64>, Option<f64>) {
    if fr.len() < 2 {
        return (None, None);
    }
    let n = fr.len() as f64;
    let mt = fr.iter().map(|f| f.t).sum::<f64>() / n;
    let mx = fr.iter().map(|f| f.center).sum::<f64>() / n;
    let stt: f64 = fr.iter().map(|f| (f.t - mt).powi(2)).sum();
    let stx: f64 = fr.iter().map(|f| (f.t - mt) * (f.center - mx)).sum();
    if stt == 0.0 {
        return (None, None);
    }
    let v = stx / stt;
    let inst: Vec<f64> = fr
        .windows(2)
        .map(|w| (w[1].center - w[0].center) / (w[1].t - w[0].t))
        .collect();
    let rms = (inst.iter().map(|u| (u - v).powi(2)).sum::<f64>() / inst.len() as f64).sqrt();
    (Some(v), Some(rms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_ratio_values() {
        assert_eq!(fluxon_energy_ratio(0.0).unwrap(), 1.0);
        assert!((fluxon_energy_ratio(0.51).unwrap() - 1.1626).abs() < 5e-4);
        assert!((fluxon_energy(0.6, 2.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(fluxon_energy_ratio(1.0).is_err());
        assert!((velocity_for_ratio(1.25) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn static_kink_midpoint_and_winding() {
        let p = LjjParams::data(60, &UnitSystem::default());
        let (phi, rate) = init_kink(&p, &KinkSpec::new(30.0, 0.0, 1)).unwrap();
        assert!((phi[30] - PI).abs() < 1e-12);
        assert!(rate.iter().all(|&r| r == 0.0));
        assert!((phi[0] - phi[59] - 2.0 * PI).abs() < 1e-3);
        let (anti, _) = init_kink(&p, &KinkSpec::new(30.0, 0.0, -1)).unwrap();
        assert!((anti[0] - anti[59] + 2.0 * PI).abs() < 1e-3);
        assert!(anti[59].abs() < 1e-3);
    }

    #[test]
    fn kink_must_fit() {
        let p = LjjParams::data(60, &UnitSystem::default());
        assert!(matches!(
            init_kink(&p, &KinkSpec::new(5.0, 0.0, 1)),
            Err(LjjError::DoesNotFit { .. })
        ));
        assert!(init_kink(&p, &KinkSpec::new(30.0, 1.2, 1)).is_err());
        assert!(matches!(
            init_kink(&p, &KinkSpec::new(30.0, 0.2, 0)),
            Err(LjjError::Polarity(0))
        ));
    }

    #[test]
    fn scaled_chain_keeps_length_and_speed() {
        let p = LjjParams::data(60, &UnitSystem::default());
        let q = p.scaled(2.0);
        assert!((q.lambda_j() - p.lambda_j()).abs() < 1e-12);
        assert!((q.c() - p.c()).abs() < 1e-12);
        assert!((q.e0() - p.e0() / 2.0).abs() < 1e-12);
        assert!(LjjParams::data(10, &UnitSystem::default())
            .validate()
            .is_err());
    }

    #[test]
    fn flat_field_is_absent() {
        let p = LjjParams::data(40, &UnitSystem::default());
        let g = chain_graph(&p).unwrap();
        let snaps: Vec<Snapshot> = (0..10)
            .map(|k| Snapshot {
                t: 2.0 * k as f64,
                phi: vec![0.0; g.node_count()],
                rate: vec![0.0; g.node_count()],
            })
            .collect();
        let o = detect_fluxon(&snaps, g.chain("ljj").unwrap(), &DetectOptions::default()).unwrap();
        assert!(!o.present);
        assert!(detect_fluxon(
            &snaps[..3],
            g.chain("ljj").unwrap(),
            &DetectOptions::default()
        )
        .is_err());
    }
}
