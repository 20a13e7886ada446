use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oavc::engine::{RunOptions, RunStatus, Simulation};
use oavc::output::{self, RunManifest};
use oavc::scenario::Scenario;
use oavc::Execution;

#[derive(Parser)]
#[command(
    name = "oavc",
    version,
    about = "Obstacle-aware coverage control simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trajectories, metrics, cells and fits.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the step budget.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Snapshot cells every N reference windows (0: first and last only).
        #[arg(long, default_value_t = 1)]
        snapshot_every: usize,
        /// Spread per-agent work across threads. Output is identical either way.
        #[arg(long)]
        parallel: bool,
    },
    /// Check a scenario file and print the resolved parameters.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Summarize how far the team ended from the target density.
    Report {
        /// Output directory of a previous run.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenario,
            out,
            seed,
            max_steps,
            snapshot_every,
            parallel,
        } => run(&scenario, &out, seed, max_steps, snapshot_every, parallel),
        Command::Validate { scenario } => match Scenario::from_file(&scenario) {
            Ok(s) => {
                print!("{}", s.to_config_string());
                println!("# steps per window = {}", s.steps_per_window());
                println!(
                    "# last refit at t = {:?}",
                    s.timing.updates as f64 * s.timing.delta_tau
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Report { out } => {
            let path = out.join(output::METRICS);
            let report = std::fs::read_to_string(&path)
                .map_err(|e| oavc::Error::InvalidInput(format!("{}: {e}", path.display())))
                .and_then(|text| output::distance_report(&text));
            match report {
                Ok(r) => {
                    println!("initial l2_final = {:.6e}", r.initial);
                    println!("final   l2_final = {:.6e}", r.last);
                    println!("ratio            = {:.4}", r.ratio);
                    println!("{}", if r.pass { "PASS" } else { "FAIL" });
                    if r.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn run(
    scenario_path: &Path,
    out: &Path,
    seed: Option<u64>,
    max_steps: Option<usize>,
    snapshot_every: usize,
    parallel: bool,
) -> ExitCode {
    if let Err(e) = output::prepare_dir(out) {
        return fail(e);
    }
    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario_path.display().to_string(),
        seed: seed.unwrap_or(0),
        parallel,
        status: "error".into(),
        steps: 0,
        final_time: 0.0,
        files: Vec::new(),
        started_at: output::unix_now(),
        finished_at: 0.0,
        error: None,
    };
    let result = Scenario::from_file(scenario_path).and_then(|mut s| {
        if let Some(seed) = seed {
            s.seed = seed;
        }
        manifest.seed = s.seed;
        let exec = if parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        let opts = RunOptions {
            exec,
            snapshot_every,
            max_steps,
            density_metrics: true,
        };
        let sim_out = Simulation::new(&s, exec)?.run(&opts)?;
        let files = output::write_outputs(out, &sim_out)?;
        Ok((sim_out, files))
    });
    let code = match result {
        Ok((sim_out, files)) => {
            manifest.status = sim_out.status.as_str().into();
            manifest.steps = sim_out.steps;
            manifest.final_time = sim_out.final_time;
            manifest.files = files;
            match sim_out.status {
                RunStatus::Converged => ExitCode::SUCCESS,
                RunStatus::StepLimit => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            manifest.error = Some(e.to_string());
            ExitCode::from(1)
        }
    };
    manifest.finished_at = output::unix_now();
    if let Err(e) = output::write_manifest(out, &manifest) {
        return fail(e);
    }
    code
}
