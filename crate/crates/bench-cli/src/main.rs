use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bench_cli::{
    load, mpx_report, run_experiment, run_sweep, verify_file, write_csv, CliError, ExperimentConfig, GraphSpec,
    MetricsRow, SweepConfig,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bench-cli", about = "Run and measure the distributed MST simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration; prints CSV rows unless an output file is set.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cut fraction and cluster diameters of the exponential-shift partition.
    MpxStats {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability for `erdos_renyi`.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Run a multi-size sweep and fit the scaling exponents.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the computed tree on a graph file with Kruskal.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit_rows(rows: &[MetricsRow], csv: Option<&PathBuf>) -> Result<(), CliError> {
    match csv {
        Some(path) => write_csv(path, rows),
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Run(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Run(e.to_string()))
        }
    }
}

fn failed(rows: &[MetricsRow]) -> ExitCode {
    let bad: Vec<u64> = rows.iter().filter(|r| !r.mst_ok).map(|r| r.seed).collect();
    if bad.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("MST mismatch for seeds {bad:?}");
        ExitCode::from(1)
    }
}

fn json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serialisable")
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Run { config } => {
            let cfg: ExperimentConfig = load(&config)?;
            let rows = run_experiment(&cfg)?;
            emit_rows(&rows, cfg.output.csv.as_ref())?;
            Ok(failed(&rows))
        }
        Command::MpxStats {
            kind,
            n,
            beta,
            trials,
            seed,
            p,
        } => {
            let mut spec = GraphSpec::from_name(&kind)?;
            if let Some(p) = p {
                match &mut spec {
                    GraphSpec::ErdosRenyi { p: slot } => *slot = Some(p),
                    _ => return Err(CliError::Config("--p only applies to erdos_renyi".into())),
                }
            }
            let report = mpx_report(&spec, n, beta, trials, seed)?;
            println!("{}", json(&report));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, out } => {
            let cfg: SweepConfig = load(&config)?;
            let (rows, summary) = run_sweep(&cfg)?;
            emit_rows(&rows, out.as_ref().or(cfg.output.csv.as_ref()))?;
            let text = json(&summary);
            if let Some(path) = &cfg.output.summary {
                std::fs::write(path, &text).map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
            }
            if out.is_some() || cfg.output.csv.is_some() {
                println!("{text}");
            } else {
                eprintln!("{text}");
            }
            Ok(if summary.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { graph, seed } => {
            let v = verify_file(&graph, seed)?;
            let mut out = std::io::stdout().lock();
            if v.ok() {
                let _ = out.write_all(v.dump.as_bytes());
                Ok(ExitCode::SUCCESS)
            } else {
                for e in &v.missing {
                    let _ = writeln!(out, "- {} {} {}", e.u, e.v, e.w);
                }
                for e in &v.extra {
                    let _ = writeln!(out, "+ {} {} {}", e.u, e.v, e.w);
                }
                Ok(ExitCode::from(1))
            }
        }
    }
}
