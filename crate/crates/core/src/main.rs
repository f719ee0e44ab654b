use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mmpi::cli::{run, Command, ExperimentConfig};

/// Runs discrete Poincaré-inequality experiments described by a TOML file.
#[derive(Parser, Debug)]
#[command(name = "mmpi", version, about)]
struct Args {
    /// Experiment configuration (TOML). Without it the run is empty.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json, records.tsv and plots/.
    #[arg(long, default_value = "mmpi-out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated subset of commands; replaces the configured list.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<String>>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("mmpi: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> mmpi::Result<bool> {
    let (mut cfg, base) = match &args.config {
        Some(p) => (
            ExperimentConfig::load(p)?,
            p.parent().map(|d| d.to_path_buf()).unwrap_or_default(),
        ),
        None => (ExperimentConfig::default(), PathBuf::from(".")),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(only) = &args.only {
        cfg.commands = only.iter().map(|s| s.parse::<Command>()).collect::<mmpi::Result<_>>()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| mmpi::Error::Config(format!("thread pool: {e}")))?;
    let out = pool.install(|| run(&cfg, &base));
    out.write(&args.out)?;
    let failed = out.report.records.iter().filter(|r| !r.passed).count();
    eprintln!(
        "mmpi: {} records, {failed} failed; report in {}",
        out.report.records.len(),
        args.out.join("report.json").display()
    );
    Ok(failed == 0)
}
