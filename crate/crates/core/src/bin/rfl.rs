use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rfl_core::dynamics::{write_energy_csv, write_probe_csv, write_snapshot_csv};
use rfl_core::edge::{solve_mu, tabulate};
use rfl_core::gates::{
    cnot_table, ideal_snl_efficiency, run_gate, run_snl_cycle, GateRun, GateScenario, InputKink,
    SnlCycle, SnlMode,
};
use rfl_core::ljj::LjjParams;
use rfl_core::scenario::{parse_scenario, GateSpec};
use rfl_core::sweep::{parse_sweep, run_sweep, write_margin_csv};
use rfl_core::UnitSystem;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "RFL_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "rfl",
    version,
    about = "Simulate reversible fluxon logic gates built from discrete LJJs"
)]
struct Cli {
    /// Recorded in summaries; the dynamics are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write summary, snapshots, probes and energies.
    Simulate {
        scenario: PathBuf,
        #[arg(long, env = OUT_ENV, default_value = "rfl-out")]
        out: PathBuf,
    },
    /// Run a one-axis margin sweep.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, env = OUT_ENV, default_value = "rfl-out")]
        out: PathBuf,
    },
    /// Run a named gate preset.
    Gate {
        /// one-bit (alias not), idsn, idsn-single-equivalent, splitter or snl.
        name: String,
        /// One symbol per input chain: 0 fluxon, 1 antifluxon, - none.
        #[arg(long)]
        inputs: String,
        #[arg(long, default_value_t = 0.6)]
        v0: f64,
        /// Start distance from the interface in cells.
        #[arg(long, default_value_t = 20.0)]
        distance: f64,
        /// Extra distance of the second input, in cells.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        dx: f64,
    },
    /// Edge-state reduction: μ grid and the self-consistent solution.
    EdgeModel {
        #[arg(long, required = true)]
        idsn_preset: bool,
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Ideal energy budget of the store-and-launch gate.
    SnlIdeal {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 0.6)]
        vclk: f64,
        #[arg(long, value_enum, default_value_t = Mode::Fast)]
        mode: Mode,
        /// Data input velocity in slow mode.
        #[arg(long, default_value_t = 0.4)]
        vin: f64,
    },
    /// Store a data kink in the default SNL cell, then clock it out.
    SnlCycle {
        /// 0 stores a fluxon, 1 an antifluxon.
        #[arg(long, default_value = "0")]
        bit: String,
        #[arg(long, default_value_t = 0.6)]
        vclk: f64,
    },
    /// Behavioural CNOT truth table.
    CnotTable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Slow,
    Fast,
}

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<File> {
    std::fs::create_dir_all(dir)?;
    Ok(File::create(dir.join(name))?)
}

fn verdict_json(run: &GateRun) -> serde_json::Value {
    serde_json::to_value(&run.verdict).expect("verdict serializes")
}

fn run(cli: Cli) -> Result<bool> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Simulate { scenario, out } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| format!("{}: {e}", scenario.display()))?;
            let sc = parse_scenario(&text)?;
            let gate = sc.gate.build()?;
            let run = run_gate(&gate, &sc.run)?;
            write_snapshot_csv(
                create(&out, "snapshots.csv")?,
                &gate.graph,
                &run.output.snapshots,
            )?;
            write_energy_csv(create(&out, "energy.csv")?, &run.output.energy)?;
            for p in &run.output.probes {
                if sc.probes.is_empty() || sc.probes.contains(&p.name) {
                    write_probe_csv(create(&out, &format!("probe_{}.csv", p.name))?, p)?;
                }
            }
            let summary = json!({
                "scenario": scenario.display().to_string(),
                "gate": sc.gate.name(),
                "seed": seed.or(sc.seed),
                "dt": run.output.dt,
                "verdict": verdict_json(&run),
            });
            serde_json::to_writer_pretty(create(&out, "summary.json")?, &summary)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(run.verdict.pass)
        }
        Cmd::Sweep { spec, jobs, out } => {
            let text =
                std::fs::read_to_string(&spec).map_err(|e| format!("{}: {e}", spec.display()))?;
            let mut s = parse_sweep(&text)?;
            if let Some(j) = jobs {
                s.jobs = j;
            }
            let report = run_sweep(&s)?;
            let stem = spec.file_stem().and_then(|x| x.to_str()).unwrap_or("sweep");
            let files = write_margin_csv(&report, &out, stem)?;
            let summary = json!({
                "spec": spec.display().to_string(),
                "axis": report.axis.name(),
                "nominal": report.nominal,
                "window": report.window,
                "criterion": s.criterion,
                "jobs": s.jobs,
                "seed": seed,
                "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "points": report.points,
            });
            serde_json::to_writer_pretty(create(&out, &format!("{stem}_summary.json"))?, &summary)?;
            println!(
                "{} window around {}: {:?}",
                report.axis.name(),
                report.nominal,
                report.window
            );
            Ok(report.window.is_some())
        }
        Cmd::Gate {
            name,
            inputs,
            v0,
            distance,
            dx,
        } => {
            let spec = GateSpec::named(&name, &UnitSystem::default())?;
            let gate = spec.build()?;
            let symbols: Vec<char> = inputs.chars().collect();
            if symbols.len() != gate.inputs.len() {
                return Err(format!(
                    "{name} has {} inputs ({}), got {:?}",
                    gate.inputs.len(),
                    gate.inputs.join(", "),
                    inputs
                )
                .into());
            }
            let mut kinks = Vec::new();
            for (k, (chain, sym)) in gate.inputs.iter().zip(symbols).enumerate() {
                let polarity = match sym {
                    '0' => 1,
                    '1' => -1,
                    '-' => continue,
                    other => return Err(format!("input symbol {other:?} is not 0, 1 or -").into()),
                };
                kinks.push(InputKink {
                    chain: chain.clone(),
                    polarity,
                    v: v0,
                    distance: distance + if k == 1 { dx } else { 0.0 },
                });
            }
            let run = run_gate(&gate, &GateScenario::new(kinks))?;
            let summary = json!({ "gate": name, "seed": seed, "verdict": verdict_json(&run) });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(run.verdict.pass)
        }
        Cmd::EdgeModel {
            idsn_preset: _,
            points,
        } => {
            let GateSpec::Idsn(p) = GateSpec::named("idsn", &UnitSystem::default())? else {
                unreachable!("idsn preset");
            };
            let chain: LjjParams = p.s2p;
            let sol = solve_mu(p.term_lower, &chain)?;
            println!("mu_lambda,omega_alpha,omega_bulk");
            for c in tabulate(p.term_lower, &chain, points) {
                println!("{},{},{}", c.mu, c.omega_alpha, c.omega_bulk);
            }
            eprintln!(
                "solution: mu*lambda_J = {:.4}, omega/omega_J = {:.4}, C_alpha/C_J = {:.3}, I_alpha/I_c = {:.3}",
                sol.mu,
                sol.omega_alpha / chain.omega_j(),
                sol.effective.cj_alpha,
                sol.effective.ic_alpha
            );
            Ok(true)
        }
        Cmd::SnlIdeal { s, vclk, mode, vin } => {
            let m = match mode {
                Mode::Fast => SnlMode::Fast,
                Mode::Slow => SnlMode::Slow(vin),
            };
            let r = ideal_snl_efficiency(s, vclk, m)?;
            println!(
                "s = {s}, v_clk = {vclk}c: E_clk = {:.3} E0, E_out = {:.3} E0, E_in = {:.3} E0, v_out = {:.2}c, efficiency {:.0}%",
                r.e_clk,
                r.e_out,
                r.e_in,
                r.v_out,
                100.0 * r.efficiency
            );
            Ok(true)
        }
        Cmd::SnlCycle { bit, vclk } => {
            let data_polarity = match bit.as_str() {
                "0" => 1,
                "1" => -1,
                other => return Err(format!("bit {other:?} is not 0 or 1").into()),
            };
            let gate = GateSpec::named("snl", &UnitSystem::default())?.build()?;
            let cycle = SnlCycle {
                data_polarity,
                v_clk: vclk,
                ..SnlCycle::default()
            };
            let r = run_snl_cycle(&gate, &cycle)?;
            let summary = json!({ "seed": seed, "cycle": cycle, "result": r });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            let want = if data_polarity > 0 { "out1" } else { "out2" };
            Ok(r.launch.output.as_deref() == Some(want))
        }
        Cmd::CnotTable => {
            println!("A B | C port (bit, polarity, line) | D port (bit, polarity, line)");
            for row in cnot_table() {
                let sig = |s: &rfl_core::gates::PortSignal| {
                    format!(
                        "{} ({}, {:+}, {:?})",
                        s.port,
                        s.bit.value(),
                        s.polarity,
                        s.line
                    )
                };
                println!(
                    "{} {} | {} | {}",
                    row.a.value(),
                    row.b.value(),
                    sig(&row.c),
                    sig(&row.d)
                );
            }
            Ok(true)
        }
    }
}
