use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nbval::lab::{self, error_json, Lab, ReportDoc, Scenario, Suite, DEFAULT_TRIALS};
use nbval::Error;

/// Normal basis experiments in elementary abelian p-extensions of local fields.
#[derive(Parser)]
#[command(name = "nbval", version, about)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest working precision tried before reporting inconclusive
    /// [default: scenario, then $NBVAL_PRECISION_CAP, then 1024].
    #[arg(long)]
    precision_cap: Option<i64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Validate the scenario and describe the field.
    Build {
        #[command(flatten)]
        common: Common,
    },
    /// Ramification filtration and structural identities.
    Ramify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normal basis tests on random elements of one valuation.
    Nbtest {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        valuation: i64,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Certified trace-zero non-generator of a given valuation.
    Rhov {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        valuation: i64,
    },
    /// Run a property suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// One of lemma2, lemma3, hasse-arf, theorem1, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Build { .. } => "build",
            Verb::Ramify { .. } => "ramify",
            Verb::Nbtest { .. } => "nbtest",
            Verb::Rhov { .. } => "rhov",
            Verb::Verify { .. } => "verify",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Verb::Build { common }
            | Verb::Ramify { common, .. }
            | Verb::Nbtest { common, .. }
            | Verb::Rhov { common, .. }
            | Verb::Verify { common, .. } => common,
        }
    }
}

fn run(verb: &Verb) -> Result<ReportDoc, Error> {
    let common = verb.common();
    let scenario = Scenario::load(&common.scenario)?;
    if common.precision_cap.is_some_and(|c| c < 1) {
        return Err(Error::InvalidInput("--precision-cap must be positive".into()));
    }
    let seed_or = |s: Option<u64>| s.or(scenario.run.seed).unwrap_or(0);
    let trials_or = |t: Option<u64>| t.or(scenario.run.trials).unwrap_or(DEFAULT_TRIALS);
    let suite = match verb {
        Verb::Verify { suite, .. } => Some(suite.parse::<Suite>()?),
        _ => None,
    };
    let lab = Lab::new(scenario.clone(), common.precision_cap)?;
    match verb {
        Verb::Build { .. } => Ok(lab::cmd_build(&lab)),
        Verb::Ramify { seed, .. } => Ok(lab::cmd_ramify(&lab, seed_or(*seed))),
        Verb::Nbtest { valuation, trials, seed, .. } => {
            Ok(lab::cmd_nbtest(&lab, *valuation, trials_or(*trials), seed_or(*seed)))
        }
        Verb::Rhov { valuation, .. } => lab::cmd_rhov(&lab, *valuation),
        Verb::Verify { trials, seed, .. } => {
            lab::cmd_verify(&lab, suite.expect("parsed above"), trials_or(*trials), seed_or(*seed))
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.verb.common().out.as_ref();
    let (text, code) = match run(&cli.verb) {
        Ok(report) => (report.to_json(), report.exit_code()),
        Err(e) => {
            eprintln!("nbval {}: {e}", cli.verb.name());
            (error_json(cli.verb.name(), &e), e.exit_code())
        }
    };
    if let Err(e) = emit(&text, out) {
        eprintln!("nbval: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}
