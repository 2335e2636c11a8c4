use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use efikit::harness::{self, Command, ExperimentConfig, Report, Suite};
use efikit::Error;

/// Desk-scale EFI, extractor and Kolmogorov-complexity experiments.
///
/// Exit status: 0 when every check passes, 1 on a failed check or runtime
/// error, 2 on a configuration error.
#[derive(Parser)]
#[command(name = "efikit", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the verification suites.
    Verify {
        /// metrics, design, extractor, pipeline, kolmogorov or all.
        #[arg(long)]
        suite: Option<Suite>,
        /// Use the reduced corpus sizes.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Chain the entropic EFI, pseudo-mixed state and single-copy PRS stages.
    Pipeline(Common),
    /// Complexity table, gap classification and the GapH decider.
    Kolmo(Common),
    /// Plain and smooth entropies of one state.
    Entropy(Common),
    /// Decoupling error of the Clifford extractor on one state.
    Extract(Common),
    /// Second-moment error of the Clifford group.
    Clifford(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides the file.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Directory for report.json and the CSV tables; overrides the file.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(rep: &Report) {
    for c in rep.failures() {
        eprintln!(
            "FAIL {} [{}] value={} bound={} margin={} {}",
            c.name, c.anchor, c.value, c.bound, c.margin, c.detail
        );
    }
    for n in &rep.notes {
        eprintln!("note: {n}");
    }
    let failed = rep.failures().count();
    println!(
        "{}: {} checks, {} failed, {:.2} s",
        rep.command,
        rep.checks.len(),
        failed,
        rep.wall_clock_seconds
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, suite, quick) = match cli.command {
        Sub::Verify {
            suite,
            quick,
            common,
        } => (Command::Verify, common, suite, quick),
        Sub::Pipeline(c) => (Command::Pipeline, c, None, false),
        Sub::Kolmo(c) => (Command::Kolmo, c, None, false),
        Sub::Entropy(c) => (Command::Entropy, c, None, false),
        Sub::Extract(c) => (Command::Extract, c, None, false),
        Sub::Clifford(c) => (Command::Clifford, c, None, false),
    };
    let mut cfg = match load(&common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = suite {
        cfg.verify.suite = s;
    }
    if quick {
        cfg.verify = harness::VerifySection {
            suite: cfg.verify.suite,
            ..harness::VerifySection::quick()
        };
    }
    let rep = match harness::run(command, &cfg) {
        Ok(rep) => rep,
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    summarize(&rep);
    if let Some(dir) = &cfg.output.dir {
        match rep.write_to(dir) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    if rep.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
