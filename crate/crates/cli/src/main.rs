//! `polylab` binary: ten scenario subcommands over one config format.
//!
//! Exit codes: 0 success, 2 invalid config or usage, 3 budget exceeded,
//! 4 internal invariant violation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polylab::config::validate_config;
use polylab::run::{plan, run_experiment, RunError, RunOptions};

#[derive(Parser)]
#[command(
    name = "polylab",
    version,
    about = "Exact-arithmetic experiments: image growth, structure detection, \
             incidence counting, and group-action certificates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment config file (flat `key = value` text, one scenario).
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded in the report; overrides the config's params.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel counting (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Validate the config and print the execution plan without computing.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Image sizes of a family or multivariate polynomial across scales.
    Measure(Common),
    /// Additive/multiplicative class partition and eps-structure verdict.
    Classify(Common),
    /// Complete functional decompositions of a univariate polynomial.
    Decompose(Common),
    /// Incidence count of a surface against three rational sets.
    Incidence(Common),
    /// Generators: progressions, structured families, span instances.
    Construct(Common),
    /// Iterated-sumset coarse dimensions of a span instance.
    Span(Common),
    /// Tower-family image sizes with big-integer cross-check.
    Tower(Common),
    /// Approximate-subgroup extraction and certificate verification.
    Bsg(Common),
    /// Stabilizer statistics of tuples under a group action.
    Stab(Common),
    /// The bound calculators evaluated at the configured parameters.
    Bounds(Common),
}

impl Cmd {
    fn split(self) -> (&'static str, Common) {
        match self {
            Cmd::Measure(c) => ("measure", c),
            Cmd::Classify(c) => ("classify", c),
            Cmd::Decompose(c) => ("decompose", c),
            Cmd::Incidence(c) => ("incidence", c),
            Cmd::Construct(c) => ("construct", c),
            Cmd::Span(c) => ("span", c),
            Cmd::Tower(c) => ("tower", c),
            Cmd::Bsg(c) => ("bsg", c),
            Cmd::Stab(c) => ("stab", c),
            Cmd::Bounds(c) => ("bounds", c),
        }
    }
}

/// Writes to stdout, swallowing broken-pipe errors so that piping the output
/// into `head` or a closed pager exits cleanly instead of panicking.
fn out_line(line: &str) {
    let _ = writeln!(io::stdout(), "{line}");
}

fn out_text(text: &str) {
    let _ = write!(io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = cli.cmd.split();
    match execute(kind, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn execute(kind: &'static str, common: &Common) -> Result<(), u8> {
    let text = fs::read_to_string(&common.config).map_err(|_| {
        eprintln!("error: file not found: {}", common.config.display());
        2u8
    })?;
    let base_dir: &Path = common.config.parent().unwrap_or_else(|| Path::new("."));

    let cfg = validate_config(&text, base_dir).map_err(|errors| {
        for e in &errors {
            eprintln!("error: {e}");
        }
        2u8
    })?;

    if cfg.kind != kind {
        eprintln!(
            "error: config declares scenario `{}` but the subcommand is `{kind}`",
            cfg.kind
        );
        return Err(2);
    }

    if let Some(t) = common.threads {
        if t > 0 {
            // Build the global pool once; a second call (impossible from the
            // CLI, which runs a single experiment) would be ignored.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global();
        }
    }

    if common.dry_run {
        for line in plan(&cfg) {
            out_line(line.as_str());
        }
        return Ok(());
    }

    let opts = RunOptions { seed: common.seed };
    let outcome = run_experiment(&cfg, &opts).map_err(|e| {
        eprintln!("error: {e}");
        match e {
            RunError::Budget(_) => 3u8,
            RunError::Internal(_) => 4u8,
        }
    })?;

    let csv = outcome.report.to_csv();
    match &common.out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| {
                eprintln!("error: cannot write {}: {e}", path.display());
                4u8
            })?;
            for line in &outcome.summary {
                out_line(line);
            }
            out_line(&format!("csv: {}", path.display()));
        }
        None => {
            out_text(&csv);
            for line in &outcome.summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}
