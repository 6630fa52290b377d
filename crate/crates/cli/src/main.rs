use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sno::{RankMode, SnoConfig};
use sno_cli::compare::{cmd_compare, summary_text, DEFAULT_SIGNIFICANCE};
use sno_cli::config_file::apply_overrides;
use sno_cli::experiment::{cmd_run, ExperimentSpec, DEFAULT_TRIALS};
use sno_cli::plotdata::cmd_snapshot_plotdata;
use sno_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "sno", version, about = "Space net optimizer experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials for each problem and dimension and write results.
    Run {
        /// Test functions, comma separated (ackley, bent_cigar, griewank,
        /// rastrigin, rosenbrock, sphere).
        #[arg(long, value_delimiter = ',', required = true)]
        problem: Vec<String>,
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dim: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Seed of trial 0; trial i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation budget. Defaults to 200000 at d=10, 1000000 at d=20
        /// and 10000*d otherwise.
        #[arg(long)]
        fes_max: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Evaluation counts at which to dump the net, comma separated.
        #[arg(long, value_delimiter = ',')]
        snapshots: Vec<u64>,
        /// File of `key = value` optimizer settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Name recorded in the results files.
        #[arg(long, default_value = "SNO")]
        algorithm: String,
        /// Worker threads for trials (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Rank and Wilcoxon-compare result directories; the first directory
    /// is tested against each of the others.
    Compare {
        #[arg(required = true, num_args = 2..)]
        dirs: Vec<PathBuf>,
        /// Ranking mode; both are reported when omitted.
        #[arg(long)]
        mode: Option<RankMode>,
        /// Significance level.
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
        alpha: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print a net snapshot as whitespace separated columns.
    SnapshotPlotdata { path: PathBuf },
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            problem,
            dim,
            trials,
            seed,
            fes_max,
            out,
            snapshots,
            config,
            algorithm,
            jobs,
        } => {
            let base = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                    apply_overrides(&SnoConfig::default(), &text)?
                }
                None => SnoConfig::default(),
            };
            if jobs == Some(0) {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            let spec = ExperimentSpec {
                trials,
                seed_base: seed,
                fes_max,
                config: base,
                snapshots,
                algorithm,
                jobs,
                ..ExperimentSpec::new(problem, dim, out)
            };
            let files = cmd_run(&spec)?;
            eprintln!("wrote {} files to {}", files.len(), spec.out.display());
        }
        Command::Compare { dirs, mode, alpha, out } => {
            let report = cmd_compare(&dirs, &out, mode, alpha)?;
            print!("{}", summary_text(&report));
        }
        Command::SnapshotPlotdata { path } => {
            let data = cmd_snapshot_plotdata(&path)?;
            if let Some(w) = &data.warning {
                eprintln!("warning: {w}");
            }
            print!("{}", data.text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
