use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockage::cli::{self, CliError, Overrides, SweepSpec, SweepVariable};
use blockage::exact::QuadratureConfig;

#[derive(Parser)]
#[command(
    name = "blockage",
    version,
    about = "Partial blockage and outage of directional links"
)]
struct Opts {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long)]
    scenario: PathBuf,
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Collected fraction, shadow integral and h_b per method
    Hb {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: exact, theorem-1, theorem-2, monte-carlo
        #[arg(long, default_value = "exact,theorem-1,theorem-2")]
        method: String,
    },
    /// Sweep one variable and write a CSV file
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "exact,theorem-1,theorem-2")]
        method: String,
        /// r, alpha_b, snr_db or r_th
        #[arg(long = "var")]
        variable: String,
        /// First value (lengths accept m, cm, mm suffixes)
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        stop: String,
        #[arg(long, default_value_t = 121)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Upper support bound for outage sweeps
        #[arg(long)]
        a2: Option<String>,
    },
    /// Error table of the Gaussian approximation against published values
    Validate {
        /// Allowed NMSE deviation, in decades
        #[arg(long, default_value_t = 1.0)]
        tolerance: f64,
        #[arg(long)]
        abs_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form outage probability under a uniform shadow offset
    Outage {
        #[command(flatten)]
        common: Common,
        /// Also estimate by Monte Carlo and compare
        #[arg(long)]
        mc: bool,
        /// Upper support bound (length with unit)
        #[arg(long)]
        a2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        #[arg(long)]
        r_th: Option<f64>,
    },
    /// Support of the shadow-offset distribution with provenance
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a2: Option<String>,
    },
}

fn parse_a2(a2: Option<&str>) -> Result<Option<f64>, CliError> {
    a2.map(|t| cli::units::parse_length(t).map_err(CliError::Usage))
        .transpose()
}

fn load(common: &Common, extra: Overrides) -> Result<cli::Experiment, CliError> {
    let mut e = cli::load_experiment(&common.scenario)?;
    Overrides {
        abs_tol: common.abs_tol,
        rel_tol: common.rel_tol,
        samples: common.samples,
        seed: common.seed,
        ..extra
    }
    .apply(&mut e)?;
    Ok(e)
}

/// Runs a command; the flag is false when a validation check failed.
fn run(cmd: Command) -> Result<(String, bool), CliError> {
    match cmd {
        Command::Hb { common, method } => {
            let e = load(&common, Overrides::default())?;
            let methods = cli::parse_methods(&method)?;
            Ok((cli::cmd_hb(&e, &methods, common.json)?, true))
        }
        Command::Sweep {
            common,
            method,
            variable,
            start,
            stop,
            steps,
            out,
            a2,
        } => {
            let e = load(
                &common,
                Overrides {
                    a2: parse_a2(a2.as_deref())?,
                    ..Default::default()
                },
            )?;
            let variable: SweepVariable = variable.parse()?;
            let spec = SweepSpec {
                variable,
                start: variable.parse_value(&start)?,
                stop: variable.parse_value(&stop)?,
                steps,
                methods: cli::parse_methods(&method)?,
            };
            Ok((cli::cmd_sweep(&e, &spec, &out)?, true))
        }
        Command::Validate {
            tolerance,
            abs_tol,
            rel_tol,
            json,
        } => {
            let mut q = QuadratureConfig::default();
            q.abs_tol = abs_tol.unwrap_or(q.abs_tol);
            q.rel_tol = rel_tol.unwrap_or(q.rel_tol);
            cli::cmd_validate(tolerance, &q, json)
        }
        Command::Outage {
            common,
            mc,
            a2,
            snr_db,
            r_th,
        } => {
            let e = load(
                &common,
                Overrides {
                    a2: parse_a2(a2.as_deref())?,
                    snr_db,
                    r_th,
                    ..Default::default()
                },
            )?;
            cli::cmd_outage(&e, mc, common.json)
        }
        Command::Bounds { common, a2 } => {
            let e = load(
                &common,
                Overrides {
                    a2: parse_a2(a2.as_deref())?,
                    ..Default::default()
                },
            )?;
            Ok((cli::cmd_bounds(&e, common.json)?, true))
        }
    }
}

fn main() -> ExitCode {
    let opts = Opts::parse();
    match run(opts.command) {
        Ok((out, passed)) => {
            print!("{out}");
            let _ = std::io::stdout().flush();
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(CliError::ValidationFailed(String::new()).exit_code() as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
