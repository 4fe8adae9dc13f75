use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgAction, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use qrsnet::config::{validate, ConfigDocument};
use qrsnet::planner::{self, AllocationProblem, Grid, PlannerError, Scenario};
use qrsnet::{engine, montecarlo, wiring, QrsCode, SCHEMA_VERSION};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qrsnet", about = "Loss tolerance of multiplexed QRS codes over aggregated channels")]
struct Cli {
    /// Write a JSON record of the command, parameters and outputs.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    SixPhoton,
    FifteenPhoton,
}

#[derive(Subcommand)]
enum Command {
    /// Exact success probability of a configuration file.
    Success {
        config: PathBuf,
        /// Also run a Monte Carlo estimate with this many samples.
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve p1 over a grid of p2 values.
    Sweep {
        /// Code length for the single and two-channel scenarios.
        #[arg(long)]
        d: Option<u32>,
        /// Defaults to the single-logical-qudit code for `d`.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 1)]
        q: u32,
        /// Qudits in the p1 channel; the rest travel at p2.
        #[arg(long)]
        n: Option<u32>,
        /// All qudits in one channel.
        #[arg(long, action = ArgAction::SetTrue)]
        single: bool,
        #[arg(long, value_enum)]
        layout: Option<Layout>,
        /// Configuration file whose two channels carry p1 and p2.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "ch1")]
        p1_channel: String,
        #[arg(long, default_value = "ch2")]
        p2_channel: String,
        #[arg(long, default_value = "0.3:1.0:0.002")]
        grid: String,
        #[arg(long, default_value_t = planner::DEFAULT_TARGET)]
        target: f64,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary destination.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Best code and per-channel split for an allocation problem file.
    Allocate {
        problem: PathBuf,
        #[arg(long)]
        target: Option<f64>,
    },
    /// Run the encoder verification suite and print a JSON report.
    VerifyCircuits {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search fifteen-photon wirings for the closed-form polynomial.
    SearchWiring {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    input: Option<String>,
    parameters: serde_json::Value,
    outputs: Vec<String>,
}

enum Failure {
    Invalid(String),
    EmptyCurve,
    NoAllocation,
    Circuit,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::EmptyCurve => 3,
            Failure::NoAllocation => 4,
            Failure::Circuit => 5,
        }
    }
}

/// 15 significant digits.
fn sig15(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let decimals = (14 - v.abs().log10().floor() as i32).clamp(0, 40) as usize;
    format!("{v:.decimals$}")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<qrsnet::MultiplexConfiguration, Failure> {
    let text = read(path)?;
    let doc = ConfigDocument::from_json(&text)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    validate(&doc).map_err(|r| Failure::Invalid(format!("{}: {r}", path.display())))
}

fn code_from(d: u32, k: Option<u32>) -> Result<QrsCode, Failure> {
    let code = match k {
        Some(k) => QrsCode::new(d, k),
        None => QrsCode::single_logical(d),
    };
    code.map_err(|e| Failure::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Result<RunManifest, Failure> {
    match cli.command {
        Command::Success { config, mc, seed } => {
            let cfg = load_config(&config)?;
            let exact = engine::success_probability(&cfg).map_err(|e| Failure::Other(e.into()))?;
            println!("exact {}", sig15(exact.value()));
            if let Some(samples) = mc {
                if samples == 0 {
                    return Err(Failure::Invalid("--mc needs at least one sample".into()));
                }
                let est = montecarlo::estimate(&cfg, samples, seed);
                println!(
                    "mc {} std_error {} samples {} seed {}",
                    sig15(est.mean),
                    sig15(est.std_error),
                    est.samples,
                    est.seed
                );
            }
            Ok(RunManifest {
                command: "success",
                input: Some(config.display().to_string()),
                parameters: serde_json::json!({"samples": mc, "seed": seed}),
                outputs: vec![],
            })
        }
        Command::Sweep {
            d,
            k,
            q,
            n,
            single,
            layout,
            config,
            p1_channel,
            p2_channel,
            grid,
            target,
            out,
            summary,
        } => {
            let grid_spec: Grid = grid.parse().map_err(|e: PlannerError| Failure::Invalid(e.to_string()))?;
            let scenario = match (layout, &config, d) {
                (Some(Layout::SixPhoton), None, None) => Scenario::SixPhoton,
                (Some(Layout::FifteenPhoton), None, None) => Scenario::FifteenPhoton,
                (None, Some(path), None) => {
                    let cfg = load_config(path)?;
                    Scenario::configuration(cfg, &p1_channel, &p2_channel)
                        .map_err(|e| Failure::Invalid(e.to_string()))?
                }
                (None, None, Some(d)) => {
                    let code = code_from(d, k)?;
                    match (single, n) {
                        (true, None) => Scenario::Single { code, q },
                        (false, Some(n)) => Scenario::TwoChannel { code, q, n },
                        _ => return Err(Failure::Invalid("give exactly one of --single or --n".into())),
                    }
                }
                _ => {
                    return Err(Failure::Invalid(
                        "choose one scenario: --d (with --n or --single), --layout, or --config".into(),
                    ))
                }
            };
            let curve = match planner::sweep_curve(&scenario, &grid_spec.points(), target) {
                Ok(c) => c,
                Err(PlannerError::EmptyCurve) => return Err(Failure::EmptyCurve),
                Err(e) => return Err(Failure::Invalid(e.to_string())),
            };
            let mut csv = curve.to_csv();
            csv.insert_str(0, &format!("# residual bound: {:e}\n", planner::RESIDUAL_TOLERANCE));
            write_or_print(out.as_deref(), &csv)?;
            let mut outputs: Vec<String> = out.iter().map(|p| p.display().to_string()).collect();
            if let Some(path) = &summary {
                let text = serde_json::to_string_pretty(&curve.summary()).map_err(anyhow::Error::from)?;
                fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
                outputs.push(path.display().to_string());
            }
            Ok(RunManifest {
                command: "sweep",
                input: config.map(|p| p.display().to_string()),
                parameters: serde_json::json!({
                    "scenario": curve.scenario, "target": target, "grid": grid,
                }),
                outputs,
            })
        }
        Command::Allocate { problem, target } => {
            let text = read(&problem)?;
            let mut prob: AllocationProblem = serde_json::from_str(&text)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", problem.display())))?;
            if let Some(t) = target {
                prob.target = t;
            }
            let singles = planner::single_channel_solutions(&prob).map_err(|e| Failure::Invalid(e.to_string()))?;
            let best = match planner::allocate(&prob) {
                Ok(r) => r,
                Err(PlannerError::NoAllocation) => {
                    println!("{}", serde_json::json!({"allocation": null, "single_channel": singles}));
                    return Err(Failure::NoAllocation);
                }
                Err(e) => return Err(Failure::Invalid(e.to_string())),
            };
            let report = serde_json::json!({
                "target": prob.target,
                "objective": prob.objective,
                "allocation": best,
                "channels": prob.channels.iter().map(|c| &c.id).collect::<Vec<_>>(),
                "single_channel": singles,
            });
            println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
            Ok(RunManifest {
                command: "allocate",
                input: Some(problem.display().to_string()),
                parameters: serde_json::json!({"target": prob.target}),
                outputs: vec![],
            })
        }
        Command::VerifyCircuits { seed, out } => {
            let report = qrsnet::circuit::verify::verify_circuits(seed).map_err(|e| Failure::Other(e.into()))?;
            let text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n";
            write_or_print(out.as_deref(), &text)?;
            if !report.passed() {
                for c in report.failures() {
                    eprintln!("FAILED {} ({:?} {:e})", c.name, c.metric, c.value);
                }
                return Err(Failure::Circuit);
            }
            Ok(RunManifest {
                command: "verify-circuits",
                input: None,
                parameters: serde_json::json!({"seed": seed}),
                outputs: out.iter().map(|p| p.display().to_string()).collect(),
            })
        }
        Command::SearchWiring { seed } => {
            let search = wiring::search_fifteen_photon_wiring(seed);
            let describe = |c: &wiring::WiringCandidate| {
                serde_json::json!({
                    "shape": c.shape,
                    "max_deviation": c.max_deviation,
                    "coefficient_mismatches": c.coefficient_mismatches,
                })
            };
            let report = serde_json::json!({
                "shapes_examined": search.shapes_examined,
                "found": search.matched.is_some(),
                "matched": search.matched.as_ref().map(describe),
                "closest": describe(&search.closest),
            });
            println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
            if let Err(nf) = search.outcome() {
                eprintln!("{nf}");
            }
            Ok(RunManifest {
                command: "search-wiring",
                input: None,
                parameters: serde_json::json!({"seed": seed}),
                outputs: vec![],
            })
        }
    }
}

fn main() -> ExitCode {
    let version = format!("{} (config schema {SCHEMA_VERSION})", env!("CARGO_PKG_VERSION"));
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let manifest_path = cli.manifest.clone();
    match run(cli) {
        Ok(manifest) => {
            if let Some(path) = manifest_path {
                let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
                if let Err(e) = fs::write(&path, text + "\n") {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            match &failure {
                Failure::Invalid(msg) => eprintln!("error: {msg}"),
                Failure::EmptyCurve => eprintln!("error: every grid point is infeasible"),
                Failure::NoAllocation => eprintln!("error: no allocation reaches the target"),
                Failure::Circuit => eprintln!("error: circuit verification failed"),
                Failure::Other(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
