//! One-axis margin sweeps and a coarse search over 1-bit interface presets.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::{
    build_one_bit, run_gate, GateScenario, OneBitInterfaceParams, VELOCITY_CRITERION,
};
use crate::scenario::{parse_scenario, GateSpec, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("sweep spec: {0}")]
    Spec(String),
    #[error("sweep spec syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    /// A gate parameter by ratio name.
    Param(String),
    V0,
    /// Offset of the second input kink in cells.
    Dx,
}

impl Axis {
    pub fn parse(s: &str) -> Self {
        match s {
            "v0" => Axis::V0,
            "dx" | "Dx" => Axis::Dx,
            other => Axis::Param(other.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Axis::Param(p) => p,
            Axis::V0 => "v0",
            Axis::Dx => "dx",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    Values(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

pub const DEFAULT_POINTS: usize = 15;

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { min, max, count } => {
                if *count == 1 {
                    return vec![*min];
                }
                (0..*count)
                    .map(|k| min + (max - min) * k as f64 / (*count - 1) as f64)
                    .collect()
            }
        }
    }

    fn validate(&self) -> Result<(), SweepError> {
        if let Grid::Range { count: 0, .. } = self {
            return Err(SweepError::Spec("grid count must be positive".into()));
        }
        let v = self.values();
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(SweepError::Spec(
                "grid values must be finite and non-empty".into(),
            ));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SweepError::Spec(
                "grid values must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub gate: GateSpec,
    pub v0: f64,
    /// Start distance of the leading input kink from the interface, in cells.
    pub distance: f64,
    pub axis: Axis,
    /// Default: 15 points over ±50% of nominal, [-2, 2] cells for dx and
    /// [0.3, 0.9] for v0.
    pub grid: Option<Grid>,
    pub criterion: f64,
    pub jobs: usize,
    /// For 1-bit gates: whether the output polarity should be inverted.
    pub invert: bool,
}

impl SweepSpec {
    pub fn new(gate: GateSpec, axis: Axis) -> Self {
        Self {
            gate,
            v0: 0.6,
            distance: 20.0,
            axis,
            grid: None,
            criterion: VELOCITY_CRITERION,
            jobs: 1,
            invert: true,
        }
    }

    pub fn from_scenario(s: &Scenario, axis: Axis) -> Self {
        let mut spec = Self::new(s.gate.clone(), axis);
        if let Some(v) = s.run.v0() {
            spec.v0 = v;
        }
        if let Some(k) = s.run.inputs.first() {
            spec.distance = k.distance;
        }
        spec.criterion = s.run.criterion;
        spec
    }

    pub fn nominal(&self) -> Result<f64, SweepError> {
        Ok(match &self.axis {
            Axis::Param(p) => self.gate.get(p)?,
            Axis::V0 => self.v0,
            Axis::Dx => 0.0,
        })
    }

    pub fn grid_values(&self) -> Result<Vec<f64>, SweepError> {
        let grid = match &self.grid {
            Some(g) => g.clone(),
            None => {
                let n = self.nominal()?;
                let (min, max) = match self.axis {
                    Axis::Param(_) => (0.5 * n, 1.5 * n),
                    Axis::V0 => (0.3, 0.9),
                    Axis::Dx => (-2.0, 2.0),
                };
                Grid::Range {
                    min,
                    max,
                    count: DEFAULT_POINTS,
                }
            }
        };
        grid.validate()?;
        Ok(grid.values())
    }

    fn two_input(&self) -> bool {
        matches!(
            self.gate,
            GateSpec::Idsn(_) | GateSpec::IdsnSingleEquivalent { .. }
        )
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !matches!(self.gate, GateSpec::OneBit(_)) && !self.two_input() {
            return Err(SweepError::Spec(format!(
                "cannot sweep a {} gate",
                self.gate.name()
            )));
        }
        if !(self.v0 > 0.0 && self.v0 < 1.0) || !(self.distance > 0.0) {
            return Err(SweepError::Spec(
                "v0 must lie in (0, 1) and distance be positive".into(),
            ));
        }
        if self.jobs == 0 {
            return Err(SweepError::Spec("jobs must be at least 1".into()));
        }
        if self.axis == Axis::Dx && !self.two_input() {
            return Err(SweepError::Spec("dx needs a two-input gate".into()));
        }
        self.grid_values()?;
        Ok(())
    }
}

/// Outcome of one gate run at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub classification: String,
    pub expected: String,
    /// v_f/v_0 per output chain, `None` where no fluxon left.
    pub vf_over_v0: Vec<Option<f64>>,
    pub errbar: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Single-fluxon runs: fluxon on S1 alone, then on S2 alone (two-input
    /// gates). Skipped on the dx axis.
    pub single: Vec<SeriesPoint>,
    /// Fluxons on S1 and S2 together.
    pub pair: Option<SeriesPoint>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub axis: Axis,
    pub nominal: f64,
    pub nominal_index: usize,
    pub points: Vec<SweepPoint>,
    /// Contiguous pass window around the nominal grid point.
    pub window: Option<(f64, f64)>,
}

impl MarginReport {
    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.window
            .is_some_and(|(a, b)| a <= lo + 1e-12 && b >= hi - 1e-12)
    }

    /// v_f/v_0 of the single run on S1 and on S2 at each grid point.
    pub fn single_series(&self) -> Vec<(f64, Option<f64>, Option<f64>)> {
        self.points
            .iter()
            .map(|p| {
                let get = |k: usize| {
                    p.single
                        .get(k)
                        .and_then(|s| s.vf_over_v0.get(k).copied().flatten())
                };
                (p.value, get(0), get(1))
            })
            .collect()
    }
}

fn expected(gate: &GateSpec, pols: [i8; 2], invert: bool) -> String {
    let sym = |p: i8| match p {
        1 => '0',
        -1 => '1',
        _ => '-',
    };
    if let GateSpec::OneBit(_) = gate {
        let out = if invert { -pols[0] } else { pols[0] };
        return format!("{}->{}", sym(pols[0]), sym(out));
    }
    let both = pols[0] != 0 && pols[1] != 0;
    let outs = if both { [-pols[0], -pols[1]] } else { pols };
    format!(
        "{}{}->{}{}",
        sym(pols[0]),
        sym(pols[1]),
        sym(outs[0]),
        sym(outs[1])
    )
}

fn run_series(gate: &GateSpec, sc: &GateScenario, expect: String) -> SeriesPoint {
    let fail = |e: String| SeriesPoint {
        classification: String::new(),
        expected: expect.clone(),
        vf_over_v0: Vec::new(),
        errbar: None,
        pass: false,
        error: Some(e),
    };
    let g = match gate.build() {
        Ok(g) => g,
        Err(e) => return fail(e.to_string()),
    };
    let run = match run_gate(&g, sc) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let v = run.verdict;
    let v0 = v.v0.unwrap_or(f64::NAN);
    let errbar = v
        .outputs
        .iter()
        .filter_map(|o| o.observation.velocity_err)
        .map(|e| e / v0)
        .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    SeriesPoint {
        pass: v.pass && v.classification == expect,
        classification: v.classification,
        expected: expect,
        vf_over_v0: v.outputs.iter().map(|o| o.vf_over_v0).collect(),
        errbar,
        error: None,
    }
}

fn sweep_point(spec: &SweepSpec, value: f64) -> SweepPoint {
    let mut gate = spec.gate.clone();
    let (mut v0, mut dx) = (spec.v0, 0.0);
    let mut setup_error = None;
    match &spec.axis {
        Axis::Param(p) => {
            if let Err(e) = gate.set(p, value) {
                setup_error = Some(e.to_string());
            }
        }
        Axis::V0 => v0 = value,
        Axis::Dx => dx = value,
    }
    let chains = if spec.two_input() {
        ["S1", "S2"]
    } else {
        ["S1", ""]
    };
    let scenario = |pols: [i8; 2]| {
        // a leading second kink would otherwise start closer than `distance`
        let base = spec.distance + (-dx).max(0.0);
        let mut sc = GateScenario::pair(chains, pols, v0, base, dx);
        sc.criterion = spec.criterion;
        sc
    };
    let run = |pols: [i8; 2]| {
        let expect = expected(&gate, pols, spec.invert);
        match &setup_error {
            Some(e) => SeriesPoint {
                classification: String::new(),
                expected: expect,
                vf_over_v0: Vec::new(),
                errbar: None,
                pass: false,
                error: Some(e.clone()),
            },
            None => run_series(&gate, &scenario(pols), expect),
        }
    };
    let mut single = Vec::new();
    if spec.axis != Axis::Dx {
        single.push(run([1, 0]));
        if spec.two_input() {
            single.push(run([0, 1]));
        }
    }
    let pair = spec.two_input().then(|| run([1, 1]));
    let pass = single.iter().chain(pair.iter()).all(|s| s.pass);
    for s in single.iter().chain(pair.iter()) {
        if let Some(e) = &s.error {
            warn!("{} = {value}: {e}", spec.axis.name());
        }
    }
    SweepPoint {
        value,
        single,
        pair,
        pass,
    }
}

/// Run every grid point; results do not depend on `jobs`.
pub fn run_sweep(spec: &SweepSpec) -> Result<MarginReport, SweepError> {
    spec.validate()?;
    let values = spec.grid_values()?;
    let nominal = spec.nominal()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()?;
    let points: Vec<SweepPoint> =
        pool.install(|| values.par_iter().map(|&v| sweep_point(spec, v)).collect());
    let nominal_index = values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - nominal).abs().total_cmp(&(b.1 - nominal).abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let window = points[nominal_index].pass.then(|| {
        let mut lo = nominal_index;
        while lo > 0 && points[lo - 1].pass {
            lo -= 1;
        }
        let mut hi = nominal_index;
        while hi + 1 < points.len() && points[hi + 1].pass {
            hi += 1;
        }
        (values[lo], values[hi])
    });
    info!(
        "sweep {}: {} points, window {:?}",
        spec.axis.name(),
        points.len(),
        window
    );
    Ok(MarginReport {
        axis: spec.axis.clone(),
        nominal,
        nominal_index,
        points,
        window,
    })
}

#[derive(Serialize)]
struct CsvRow {
    axis_value: f64,
    #[serde(rename = "vf_over_v0_S1p")]
    s1p: Option<f64>,
    #[serde(rename = "vf_over_v0_S2p")]
    s2p: Option<f64>,
    errbar: Option<f64>,
    pass: bool,
}

/// Write `<stem>_single.csv` and `<stem>_two.csv`; returns the paths written.
pub fn write_margin_csv(
    report: &MarginReport,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>, SweepError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SweepError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let max = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let mut written = Vec::new();
    let single: Vec<CsvRow> = report
        .points
        .iter()
        .filter(|p| !p.single.is_empty())
        .map(|p| {
            let s1 = &p.single[0];
            let s2 = p.single.get(1);
            CsvRow {
                axis_value: p.value,
                s1p: s1.vf_over_v0.first().copied().flatten(),
                s2p: s2.and_then(|s| s.vf_over_v0.get(1).copied().flatten()),
                errbar: max(s1.errbar, s2.and_then(|s| s.errbar)),
                pass: p.single.iter().all(|s| s.pass),
            }
        })
        .collect();
    let two: Vec<CsvRow> = report
        .points
        .iter()
        .filter_map(|p| p.pair.as_ref().map(|s| (p.value, s)))
        .map(|(value, s)| CsvRow {
            axis_value: value,
            s1p: s.vf_over_v0.first().copied().flatten(),
            s2p: s.vf_over_v0.get(1).copied().flatten(),
            errbar: s.errbar,
            pass: s.pass,
        })
        .collect();
    for (suffix, rows) in [("single", single), ("two", two)] {
        if rows.is_empty() {
            continue;
        }
        let path = dir.join(format!("{stem}_{suffix}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    values: Option<Vec<f64>>,
    min: Option<f64>,
    max: Option<f64>,
    count: Option<usize>,
    criterion: Option<f64>,
    jobs: Option<usize>,
    invert: Option<bool>,
}

/// A scenario file with an extra `[sweep]` table.
pub fn parse_sweep(text: &str) -> Result<SweepSpec, SweepError> {
    let mut table: toml::Table = toml::from_str(text)?;
    let raw: RawSweep = table
        .remove("sweep")
        .ok_or_else(|| SweepError::Spec("missing [sweep] table".into()))?
        .try_into()?;
    let scenario =
        parse_scenario(&toml::to_string(&table).map_err(|e| SweepError::Spec(e.to_string()))?)?;
    let mut spec = SweepSpec::from_scenario(&scenario, Axis::parse(&raw.axis));
    spec.grid = match (raw.values, raw.min, raw.max) {
        (Some(v), None, None) => Some(Grid::Values(v)),
        (None, Some(min), Some(max)) => Some(Grid::Range {
            min,
            max,
            count: raw.count.unwrap_or(DEFAULT_POINTS),
        }),
        (None, None, None) => None,
        _ => {
            return Err(SweepError::Spec(
                "give either values or both min and max".into(),
            ))
        }
    };
    if let Some(c) = raw.criterion {
        spec.criterion = c;
    }
    if let Some(j) = raw.jobs {
        spec.jobs = j;
    }
    if let Some(i) = raw.invert {
        spec.invert = i;
    }
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Invert,
    Preserve,
}

/// Search box over (Ĉ_J, Î_c, C_J^B, I_c^B) in units of C_J and I_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub objective: Objective,
    pub bounds: SearchBounds,
    /// Maximum number of gate runs.
    pub budget: usize,
    /// Evaluated first when given.
    pub seed: Option<[f64; 4]>,
    pub base: OneBitInterfaceParams,
    pub v0: f64,
    pub distance: f64,
    pub jobs: usize,
}

impl SearchConfig {
    pub fn new(objective: Objective, bounds: SearchBounds, budget: usize) -> Self {
        Self {
            objective,
            bounds,
            budget,
            seed: None,
            base: OneBitInterfaceParams::not_equivalent(),
            v0: 0.6,
            distance: 20.0,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: [f64; 4],
    pub classification: String,
    pub vf_over_v0: Option<f64>,
    /// Output present with the polarity the objective asks for.
    pub feasible: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Feasible points, best v_f/v_0 first.
    pub ranked: Vec<Evaluation>,
    /// Every evaluation in order.
    pub evaluations: Vec<Evaluation>,
}

fn evaluate(cfg: &SearchConfig, x: [f64; 4]) -> Evaluation {
    let mut p = cfg.base.clone();
    p.term_cj = x[0];
    p.term_ic = x[1];
    p.rail_cj = x[2];
    p.rail_ic = x[3];
    let want = match cfg.objective {
        Objective::Invert => "0->1",
        Objective::Preserve => "0->0",
    };
    let sc = GateScenario::pair(["S1", ""], [1, 0], cfg.v0, cfg.distance, 0.0);
    let out = build_one_bit(&p).and_then(|g| run_gate(&g, &sc));
    let e = match out {
        Ok(r) => Evaluation {
            params: x,
            feasible: r.verdict.classification == want,
            vf_over_v0: r.verdict.outputs.first().and_then(|o| o.vf_over_v0),
            classification: r.verdict.classification,
            error: None,
        },
        Err(err) => Evaluation {
            params: x,
            classification: String::new(),
            vf_over_v0: None,
            feasible: false,
            error: Some(err.to_string()),
        },
    };
    info!(
        "search {:?} at {:?}: {} vf/v0={:?}{}",
        cfg.objective,
        x,
        e.classification,
        e.vf_over_v0,
        e.error
            .as_deref()
            .map(|m| format!(" error: {m}"))
            .unwrap_or_default()
    );
    e
}

fn score(e: &Evaluation) -> f64 {
    if e.feasible {
        e.vf_over_v0.unwrap_or(0.0)
    } else {
        f64::NEG_INFINITY
    }
}

/// Coarse grid over the bounds, then a compass search around the best
/// feasible point, maximizing v_f/v_0 at the configured v0.
pub fn search_one_bit(cfg: &SearchConfig) -> Result<SearchResult, SweepError> {
    let b = &cfg.bounds;
    for k in 0..4 {
        if !(b.lo[k].is_finite() && b.hi[k].is_finite() && b.lo[k] > 0.0 && b.hi[k] >= b.lo[k]) {
            return Err(SweepError::Spec(format!(
                "bad search bounds in dimension {k}"
            )));
        }
    }
    if cfg.jobs == 0 {
        return Err(SweepError::Spec("jobs must be at least 1".into()));
    }
    let mut evals: Vec<Evaluation> = Vec::new();
    if cfg.budget == 0 {
        info!("search {:?}: zero budget, no evaluations", cfg.objective);
        return Ok(SearchResult {
            ranked: Vec::new(),
            evaluations: evals,
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()?;
    let batch = |xs: Vec<[f64; 4]>, evals: &mut Vec<Evaluation>| {
        let room = cfg.budget - evals.len();
        let xs: Vec<_> = xs.into_iter().take(room).collect();
        let out: Vec<Evaluation> =
            pool.install(|| xs.par_iter().map(|&x| evaluate(cfg, x)).collect());
        evals.extend(out);
    };
    let clamp = |mut x: [f64; 4]| {
        for k in 0..4 {
            x[k] = x[k].clamp(b.lo[k], b.hi[k]);
        }
        x
    };
    if let Some(s) = cfg.seed {
        batch(vec![clamp(s)], &mut evals);
    }

    // coarse grid using about half the budget
    let coarse = (cfg.budget - evals.len()) / 2;
    let n = (coarse as f64).powf(0.25).floor() as usize;
    let axis = |k: usize| -> Vec<f64> {
        if n < 2 {
            vec![0.5 * (b.lo[k] + b.hi[k])]
        } else {
            (0..n)
                .map(|i| b.lo[k] + (b.hi[k] - b.lo[k]) * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let mut grid = Vec::new();
    for &x0 in &axis(0) {
        for &x1 in &axis(1) {
            for &x2 in &axis(2) {
                for &x3 in &axis(3) {
                    grid.push([x0, x1, x2, x3]);
                }
            }
        }
    }
    batch(grid, &mut evals);

    // compass refinement
    let cells = n.max(2) as f64;
    let mut step: [f64; 4] = std::array::from_fn(|k| (b.hi[k] - b.lo[k]) / (2.0 * cells));
    let best_of = |evals: &[Evaluation]| {
        evals
            .iter()
            .filter(|e| e.feasible)
            .max_by(|a, c| score(a).total_cmp(&score(c)))
            .cloned()
    };
    while evals.len() < cfg.budget {
        let Some(best) = best_of(&evals) else {
            break;
        };
        if (0..4).all(|k| step[k] <= 1e-3 * (b.hi[k] - b.lo[k]).max(1e-12)) {
            break;
        }
        let mut trial = Vec::new();
        for k in 0..4 {
            for sgn in [-1.0, 1.0] {
                let mut x = best.params;
                x[k] += sgn * step[k];
                let x = clamp(x);
                if x != best.params && !evals.iter().any(|e| e.params == x) {
                    trial.push(x);
                }
            }
        }
        let before = score(&best);
        batch(trial, &mut evals);
        let after = best_of(&evals).map_or(f64::NEG_INFINITY, |e| score(&e));
        if after <= before {
            for s in &mut step {
                *s *= 0.5;
            }
        }
    }

    let mut ranked: Vec<Evaluation> = evals.iter().filter(|e| e.feasible).cloned().collect();
    ranked.sort_by(|a, c| score(c).total_cmp(&score(a)));
    if ranked.is_empty() {
        warn!(
            "search {:?}: no feasible point in {} evaluations",
            cfg.objective,
            evals.len()
        );
    }
    Ok(SearchResult {
        ranked,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitSystem;

    #[test]
    fn default_grids() {
        let u = UnitSystem::default();
        let idsn = GateSpec::named("idsn", &u).unwrap();
        let s = SweepSpec::new(idsn.clone(), Axis::V0);
        let v = s.grid_values().unwrap();
        assert_eq!(v.len(), 15);
        assert!((v[0] - 0.3).abs() < 1e-12 && (v[14] - 0.9).abs() < 1e-12);
        assert!((v[7] - 0.6).abs() < 1e-12);
        let s = SweepSpec::new(idsn.clone(), Axis::Param("CJB_over_CJ".into()));
        let v = s.grid_values().unwrap();
        assert!((v[7] - 16.7).abs() < 1e-9 && (v[0] - 8.35).abs() < 1e-9);
        let s = SweepSpec::new(idsn, Axis::Dx);
        assert_eq!(s.grid_values().unwrap()[0], -2.0);
    }

    #[test]
    fn rejects_bad_specs() {
        let u = UnitSystem::default();
        let idsn = GateSpec::named("idsn", &u).unwrap();
        let mut s = SweepSpec::new(idsn.clone(), Axis::V0);
        s.grid = Some(Grid::Values(vec![0.5, 0.4]));
        assert!(s.validate().is_err());
        s.grid = Some(Grid::Values(vec![0.5, f64::NAN]));
        assert!(s.validate().is_err());
        let s = SweepSpec::new(idsn, Axis::Param("nope".into()));
        assert!(s.validate().is_err());
        let s = SweepSpec::new(GateSpec::named("one-bit", &u).unwrap(), Axis::Dx);
        assert!(s.validate().is_err());
        let s = SweepSpec::new(GateSpec::named("snl", &u).unwrap(), Axis::V0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn expected_classifications() {
        let u = UnitSystem::default();
        let idsn = GateSpec::named("idsn", &u).unwrap();
        assert_eq!(expected(&idsn, [1, 0], true), "0-->0-");
        assert_eq!(expected(&idsn, [0, 1], true), "-0->-0");
        assert_eq!(expected(&idsn, [1, 1], true), "00->11");
        let nb = GateSpec::named("one-bit", &u).unwrap();
        assert_eq!(expected(&nb, [1, 0], true), "0->1");
        assert_eq!(expected(&nb, [1, 0], false), "0->0");
    }

    #[test]
    fn parses_sweep_file() {
        let s = parse_sweep(
            "gate = \"idsn\"\n[inputs]\nS1 = \"fluxon v0=0.5 x0=-18\"\n[sweep]\naxis = \"LB_over_L\"\nmin = 0.2\nmax = 0.8\ncount = 4\njobs = 2\n",
        )
        .unwrap();
        assert_eq!(s.axis, Axis::Param("LB_over_L".into()));
        assert_eq!(s.v0, 0.5);
        assert_eq!(s.distance, 18.0);
        assert_eq!(s.jobs, 2);
        assert_eq!(s.grid_values().unwrap().len(), 4);
        assert!(parse_sweep("gate = \"idsn\"\n").is_err());
        assert!(parse_sweep("gate = \"idsn\"\n[sweep]\naxis = \"v0\"\nmin = 0.3\n").is_err());
    }

    #[test]
    fn zero_budget_search_is_empty() {
        let b = SearchBounds {
            lo: [1.0; 4],
            hi: [20.0; 4],
        };
        let r = search_one_bit(&SearchConfig::new(Objective::Invert, b, 0)).unwrap();
        assert!(r.ranked.is_empty() && r.evaluations.is_empty());
    }
}
