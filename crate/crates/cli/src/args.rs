use clap::{Parser, Subcommand, ValueEnum};

use noisyor::reliability::DEFAULT_MAX_STATES;
use noisyor::DEFAULT_BUDGET;

#[derive(Debug, Parser)]
#[command(
    name = "noisyor",
    version,
    about = "Noisy-or Bayesian networks: compile, query, reliability, diagnosis"
)]
pub struct Cli {
    /// Maximum joint input states per gate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,

    /// Absolute tolerance for verification checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replace noisy gates by explicit tables and print the document.
    Compile {
        file: String,
        /// Compile only this node.
        #[arg(long)]
        node: Option<String>,
    },
    /// Posterior marginals of the network.
    Query {
        file: String,
        #[arg(long, short, value_parser = parse_assignment)]
        evidence: Vec<(String, String)>,
        /// Variables to report; all when omitted.
        #[arg(long, short)]
        target: Vec<String>,
    },
    /// Two-terminal reliability of the `graph` section.
    Reliability {
        file: String,
        #[arg(long, value_enum, default_value_t = Mode::Connect)]
        mode: Mode,
        /// Override the source; repeat for a source set.
        #[arg(long)]
        source: Vec<String>,
        /// Override the target.
        #[arg(long)]
        target: Option<String>,
        /// Cap on states per path-count variable.
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Posteriors over wires and device-failure variables of the `circuit`
    /// section.
    Diagnose {
        file: String,
        #[arg(long, short, value_parser = parse_assignment)]
        evidence: Vec<(String, String)>,
        #[arg(long, short)]
        target: Vec<String>,
    },
    /// Cross-check the optimized paths against brute-force oracles.
    Verify {
        file: Option<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Connect,
    Paths,
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((var, state)) if !var.trim().is_empty() && !state.trim().is_empty() => {
            Ok((var.trim().to_string(), state.trim().to_string()))
        }
        _ => Err(format!("expected VAR=state, got `{s}`")),
    }
}
