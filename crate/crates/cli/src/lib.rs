//! Batch runner behind the `qnetsim` binary: configuration, scenario
//! dispatch, Monte Carlo aggregation and report output.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;

use rand::Rng;

pub use config::{parse_args, parse_config_text, Command, Format, Invocation, ScenarioConfig, ScenarioKind};
pub use report::{emit_report, Aggregate, Field, Record, TrialReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(#[from] qnetsim::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(qnetsim::Error::Domain(_) | qnetsim::Error::Lookup { .. }) => 2,
            _ => 1,
        }
    }
}

/// Runs the configured scenario; a missing seed is drawn from entropy and
/// recorded in the report.
pub fn run_scenario(config: &ScenarioConfig) -> Result<TrialReport, CliError> {
    let plan = scenarios::Plan::from_config(config)?;
    let (seed, source) = match config.seed {
        Some(s) => (s, report::SeedSource::Config),
        None => (rand::rng().random(), report::SeedSource::Entropy),
    };
    let records = scenarios::run_trials(&plan, config.trials, seed)?;
    if let Some(path) = config.params.get("transcript").filter(|p| !p.is_empty()) {
        scenarios::write_transcript(&plan, seed, std::path::Path::new(path))?;
    }
    Ok(TrialReport::new(config, seed, source, records))
}

/// Whole command line to exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let result = (|| -> Result<i32, CliError> {
        let inv = match parse_args(args)? {
            Command::Help => {
                print!("{}", config::usage());
                return Ok(0);
            }
            Command::Run(inv) => inv,
        };
        let report = run_scenario(&inv.config)?;
        match &inv.out {
            Some(path) => {
                emit_report(&report, inv.format, path)?;
                eprintln!("{} trials of {} (seed {}) written to {}", report.trials, report.scenario, report.seed, path.display());
            }
            None => print!("{}", report.render(inv.format)?),
        }
        if report.aborted_trials > 0 {
            eprintln!("{} of {} trials aborted", report.aborted_trials, report.trials);
            return Ok(1);
        }
        Ok(0)
    })();
    result.unwrap_or_else(|e| {
        eprintln!("qnetsim: {e}");
        if matches!(e, CliError::Usage(_)) {
            eprintln!("run with --help for the list of scenarios and keys");
        }
        e.exit_code()
    })
}
