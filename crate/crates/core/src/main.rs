use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use percolab::giant::{read_size_counts, FixedPointReport};
use percolab::harness::{run_experiment, write_csv, ExperimentConfig, HarnessError};
use percolab::ode::{find_tc, CriticalConstants};
use percolab::{run_process, InitialGraphSpec, ProcessKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "percolab",
    version,
    about = "Random graph processes and their limit theory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Bohman–Frieze limit and print the critical constants.
    Ode {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run one process and print its trace as CSV.
    Simulate {
        #[arg(long)]
        process: ProcessKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial graph as `size:count,...`.
        #[arg(long, default_value = "")]
        initial: InitialGraphSpec,
        /// Comma-separated record times; defaults to `t`.
        #[arg(long, value_delimiter = ',')]
        record: Vec<f64>,
        /// Resample loops instead of offering them to the rule.
        #[arg(long)]
        no_loops: bool,
    },
    /// Giant-fraction fixed point and bounds for a size histogram.
    FixedPoint {
        /// CSV with header `size,count`.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Run an experiment described by a TOML file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Exit with status 4 if any acceptance check fails.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Other(String),
    ChecksFailed,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::ChecksFailed => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e.exit_code() {
            2 => Failure::Usage(e.to_string()),
            3 => Failure::Numerical(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn io_err(e: io::Error) -> Failure {
    Failure::Other(e.to_string())
}

fn cmd_ode(tol: f64) -> Result<(), Failure> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Failure::Usage(format!("--tol {tol} out of range")));
    }
    let c = find_tc(tol).map_err(|e| Failure::Numerical(e.to_string()))?;
    let mut out = io::stdout().lock();
    write!(
        out,
        "{}\n{}\n{}\n",
        c.to_key_value(),
        CriticalConstants::csv_header(),
        c.to_csv_row()
    )
    .map_err(io_err)
}

fn cmd_simulate(cfg: RunConfig) -> Result<(), Failure> {
    let trace = run_process(&cfg).map_err(HarnessError::from)?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for rec in trace {
        w.serialize(rec)
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    w.flush().map_err(io_err)
}

fn cmd_fixed_point(dist: PathBuf, t: f64) -> Result<(), Failure> {
    let file =
        fs::File::open(&dist).map_err(|e| Failure::Usage(format!("{}: {e}", dist.display())))?;
    let d = read_size_counts(file).map_err(|e| Failure::Usage(e.to_string()))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Failure::Usage(format!("--t {t} must be positive")));
    }
    let report =
        FixedPointReport::compute(&d, t, 1e-12).map_err(|e| Failure::Numerical(e.to_string()))?;
    let fields = report.fields();
    let mut out = io::stdout().lock();
    for (k, v) in &fields {
        writeln!(out, "{k}={v}").map_err(io_err)?;
    }
    let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
    let vals: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
    writeln!(out, "\n{}\n{}", keys.join(","), vals.join(",")).map_err(io_err)
}

fn cmd_experiment(config: PathBuf, check: bool) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(&config)?;
    let output = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => output.write(&cfg, path)?,
        None => write_csv(&output.rows, io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    for c in &output.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(err, "{tag} {}: {}", c.name, c.detail);
    }
    if check && !output.all_passed() {
        return Err(Failure::ChecksFailed);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Ode { tol } => cmd_ode(tol),
        Command::Simulate {
            process,
            n,
            t,
            seed,
            initial,
            record,
            no_loops,
        } => {
            let record = if record.is_empty() { vec![t] } else { record };
            let cfg = RunConfig::new(process, n, t, record, seed)
                .with_initial(initial)
                .with_loops(!no_loops);
            cfg.validate()
                .map_err(|e| Failure::Usage(e.to_string()))
                .and_then(|_| cmd_simulate(cfg))
        }
        Command::FixedPoint { dist, t } => cmd_fixed_point(dist, t),
        Command::Experiment { config, check } => cmd_experiment(config, check),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Numerical(m) | Failure::Other(m) => {
                    eprintln!("error: {m}")
                }
                Failure::ChecksFailed => eprintln!("error: acceptance checks failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
