use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dynreg::experiment::{self, ExperimentConfig, OutputSink, RunOptions, COMPARE_HEADER};

/// Dynamic-regret benchmark harness.
#[derive(Debug, Parser)]
#[command(name = "dynreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (algorithm, seed) pair of a TOML config and write CSV records.
    Run {
        config: PathBuf,
        /// Also check the regret certificates and write `certificates.csv`.
        #[arg(long)]
        check_bounds: bool,
        /// Run only this seed instead of the configured list.
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads for independent runs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Tabulate one or more `summary.csv` files (or run directories).
    Compare {
        #[arg(required = true)]
        records: Vec<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the default step-size grids for the given constants.
    Pools {
        #[arg(value_name = "G")]
        gradient_bound: f64,
        #[arg(value_name = "D")]
        diameter: f64,
        #[arg(value_name = "L")]
        smoothness: f64,
        #[arg(value_name = "T")]
        horizon: usize,
        /// Dimension used by the bandit grids.
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> dynreg::Result<()> {
    match cli.command {
        Command::Run { config, check_bounds, seed_override, out_dir, jobs } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = experiment::run(cfg, &RunOptions { check_bounds, seed_override, out_dir, jobs })?;
            for r in &out.records {
                for w in &r.warnings {
                    eprintln!("warning: {} seed {}: {w}", r.algorithm, r.seed);
                }
                println!(
                    "{:<24} seed {:<6} final loss {:<14.6} dynamic regret {:<14.6} {:.3}s",
                    r.algorithm,
                    r.seed,
                    r.report.final_loss(),
                    r.report.final_regret(),
                    r.report.wall_clock_seconds
                );
            }
            let mut failed = 0;
            for c in &out.certificates {
                let status = if c.holds() { "ok" } else { failed += 1; "VIOLATED" };
                println!("{status:<8} {} ({}, {}) slack {:.3e}", c.name, c.algorithm, c.parameter, c.slack());
            }
            println!("wrote {} files to {}", out.files.len(), out.out_dir.display());
            if failed > 0 {
                return Err(dynreg::Error::Unsupported(format!("{failed} certificate(s) violated")));
            }
            Ok(())
        }
        Command::Compare { records, csv } => {
            let cmp = experiment::compare(&records)?;
            print!("{}", cmp.to_text());
            if let Some(path) = csv {
                let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("compare.csv");
                let mut sink = OutputSink::create(dir)?;
                sink.write_csv(name, &COMPARE_HEADER, &cmp.csv_rows())?;
                sink.commit();
            }
            Ok(())
        }
        Command::Pools { gradient_bound, diameter, smoothness, horizon, dim } => {
            let pools = experiment::default_pools(gradient_bound, diameter, smoothness, horizon, dim)?;
            print!("{}", experiment::format_pools(&pools));
            Ok(())
        }
    }
}
