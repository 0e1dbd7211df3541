use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fj_perception::scenario::{
    combined_exit_code, load_scenario, oracle_report, run_scenario, scenario_files,
    scenario_report, Overrides, Scenario, TrajectorySummary, EXIT_ERROR,
};
use fj_perception::simkit::run_batch;

#[derive(Parser)]
#[command(name = "fjp", version, about = "Social-power perception scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Convergence tolerance (sup-norm step)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Iteration cap
    #[arg(long, global = true)]
    max_iter: Option<usize>,

    /// Seed for multistarts, random initial states and invariance samples
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true, env = "FJP_OUT_DIR", default_value = "fjp-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trajectories plus a report
    Run { config: PathBuf },
    /// Run every *.cfg scenario in a directory in parallel
    Batch {
        dir: PathBuf,
        /// Worker threads (0 = one per core)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print condition, equilibrium and invariance reports
    Report { config: PathBuf },
    /// Direct social-power solve for the scenario's gamma
    Oracle { config: PathBuf },
}

fn load(path: &Path, o: Overrides) -> Result<Scenario, fj_perception::Error> {
    let mut scn = load_scenario(path)?;
    scn.apply(o);
    Ok(scn)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = Overrides { tol: cli.tol, max_iter: cli.max_iter, seed: cli.seed };
    let code = match cli.command {
        Command::Run { config } => match load(&config, o).and_then(|s| run_scenario(&s, &cli.out)) {
            Ok(outcome) => {
                for s in &outcome.summaries {
                    println!("{s}");
                }
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
                outcome.exit_code
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Batch { dir, jobs } => match scenario_files(&dir) {
            Ok(files) => {
                let mut scenarios = Vec::new();
                let mut failed = false;
                for f in &files {
                    match load(f, o) {
                        Ok(s) => scenarios.push(s),
                        Err(e) => {
                            eprintln!("error: {e}");
                            failed = true;
                        }
                    }
                }
                let summaries: Vec<TrajectorySummary> = run_batch(&scenarios, jobs);
                let text: String = summaries.iter().map(|s| format!("{s}\n")).collect();
                print!("{text}");
                let written = std::fs::create_dir_all(&cli.out)
                    .and_then(|_| std::fs::write(cli.out.join("batch_summary.txt"), &text));
                if let Err(e) = written {
                    eprintln!("error: {}: {e}", cli.out.display());
                    failed = true;
                }
                if failed { EXIT_ERROR } else { combined_exit_code(&summaries) }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Report { config } => match load(&config, o).and_then(|s| scenario_report(&s)) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Oracle { config } => match load(&config, o).and_then(|s| oracle_report(&s)) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
