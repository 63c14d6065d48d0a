use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gainflock::dynamics::Tolerances;
use gainflock_cli::commands::{
    cmd_check_balance, cmd_classify_sequence, cmd_lift, cmd_simulate, SimulateConfig, EXIT_ERROR,
};

const EXIT_HELP: &str = "\
Exit codes:
  check-balance      0 balanced, 1 unbalanced, 2 error
  lift               0 done, 2 error
  classify-sequence  0 balanced, 1 unbalanced, 3 mixed, 4 not jointly strongly connected, 2 error
  simulate           0 all trials consensus, 1 all trials zero, 3 otherwise, 2 error

Every flag can also be set through an environment variable with the
GAINFLOCK_ prefix (e.g. GAINFLOCK_SEED for --seed).";

/// Gain-graph balance analysis and modulus-consensus simulation.
#[derive(Parser)]
#[command(name = "gainflock", version, after_long_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide structural m-balance of a gain graph file
    CheckBalance {
        /// Graph file: header `n m`, then `tail head exponent` lines
        graph: PathBuf,
    },
    /// Export the lifted mn-system: exact matrix CSV, components, report
    Lift {
        graph: PathBuf,
        /// Output directory for lifted_matrix.csv, gain_matrix.csv,
        /// components.txt and report.txt
        #[arg(long, env = "GAINFLOCK_OUT", default_value = "gainflock-out")]
        out: PathBuf,
    },
    /// Classify the windows of a periodic sequence file
    ClassifySequence {
        /// Sequence file: header `n m period`, graph blocks split by `---`
        sequence: PathBuf,
        /// Window offset q
        #[arg(long = "q", env = "GAINFLOCK_Q", default_value_t = 0)]
        offset: usize,
        /// Window length p
        #[arg(long = "p", env = "GAINFLOCK_P", default_value_t = 1)]
        length: usize,
    },
    /// Simulate random-state trials and export traces plus a summary
    Simulate {
        sequence: PathBuf,
        /// Window offset q used to classify the sequence
        #[arg(long = "q", env = "GAINFLOCK_Q", default_value_t = 0)]
        offset: usize,
        /// Window length p; also sets the default step count (1000·p)
        #[arg(long = "p", env = "GAINFLOCK_P", default_value_t = 1)]
        length: usize,
        /// Number of update steps per trial
        #[arg(long = "T", env = "GAINFLOCK_T")]
        steps: Option<usize>,
        /// Independent trials with fresh random initial states
        #[arg(long, env = "GAINFLOCK_TRIALS", default_value_t = 10)]
        trials: usize,
        /// Master seed; per-trial RNG streams derive from it (random if unset)
        #[arg(long, env = "GAINFLOCK_SEED")]
        seed: Option<u64>,
        /// Final max modulus below this counts as convergence to zero
        #[arg(long = "zero-tol", env = "GAINFLOCK_ZERO_TOL", default_value_t = 1e-9)]
        zero_tol: f64,
        /// De-rotated disagreement below this counts as consensus
        #[arg(long = "cons-tol", env = "GAINFLOCK_CONS_TOL", default_value_t = 1e-9)]
        cons_tol: f64,
        /// Minimum separation between occupied cluster values
        #[arg(long = "sep-tol", env = "GAINFLOCK_SEP_TOL", default_value_t = 1e-6)]
        sep_tol: f64,
        /// Output directory for trace_NNN.csv and summary.json
        #[arg(long, env = "GAINFLOCK_OUT", default_value = "gainflock-out")]
        out: PathBuf,
        /// Worker threads for trials (default: available parallelism)
        #[arg(long, env = "GAINFLOCK_WORKERS")]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CheckBalance { graph } => cmd_check_balance(&graph),
        Command::Lift { graph, out } => cmd_lift(&graph, &out),
        Command::ClassifySequence {
            sequence,
            offset,
            length,
        } => cmd_classify_sequence(&sequence, offset, length),
        Command::Simulate {
            sequence,
            offset,
            length,
            steps,
            trials,
            seed,
            zero_tol,
            cons_tol,
            sep_tol,
            out,
            workers,
        } => cmd_simulate(&SimulateConfig {
            input: sequence,
            offset,
            length,
            steps,
            trials,
            seed,
            tolerances: Tolerances {
                zero: zero_tol,
                consensus: cons_tol,
                separation: sep_tol,
            },
            out_dir: out,
            workers,
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
