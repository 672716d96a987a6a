//! Command-line front end for the `noisyor` library.

pub mod args;
pub mod commands;
pub mod document;
pub mod error;
pub mod verify;

use noisyor::CompileOptions;

pub use args::{Cli, Command, Mode};
pub use document::NetworkDocument;
pub use error::CliError;

/// Text for standard output and whether the command succeeded.
pub struct Outcome {
    pub stdout: String,
    pub success: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, success: true }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.tolerance.is_nan() || cli.tolerance < 0.0 {
        return Err(CliError::Usage("--tolerance must be nonnegative".into()));
    }
    let options = CompileOptions {
        budget: cli.budget,
        ..Default::default()
    };
    match &cli.command {
        Command::Compile { file, node } => commands::compile(file, node.as_deref(), &options).map(Outcome::ok),
        Command::Query { file, evidence, target } => commands::query(file, evidence, target, &options).map(Outcome::ok),
        Command::Diagnose { file, evidence, target } => {
            commands::diagnose_circuit(file, evidence, target, &options).map(Outcome::ok)
        }
        Command::Reliability {
            file,
            mode,
            source,
            target,
            max_states,
        } => {
            let req = commands::ReliabilityRequest {
                mode: *mode,
                sources: source,
                target: target.as_deref(),
                max_states: *max_states,
            };
            commands::reliability(file, &req, &options).map(Outcome::ok)
        }
        Command::Verify { file, trials, seed } => {
            let opts = verify::VerifyOptions {
                trials: *trials,
                seed: *seed,
                tolerance: cli.tolerance,
                compile: options,
            };
            let report = verify::run(file.as_deref(), &opts)?;
            Ok(Outcome {
                stdout: report.render(),
                success: report.passed(),
            })
        }
    }
}
