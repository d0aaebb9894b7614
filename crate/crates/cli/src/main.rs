use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rydberg_cavity::commands::{self, OracleOptions};
use rydberg_cavity::{load, CliError, ConfigError};
use rydberg_cavity_core::{Observable, ScanParameter, ScanSpec};

/// Photon statistics of a cavity filled with a Rydberg-EIT medium.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Parameter file (`key = value` lines, `#` comments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set omega_cf=5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every observable at one parameter point.
    Point,
    /// Sweep one parameter and write the requested observables as CSV.
    Scan(ScanArgs),
    /// Write the delayed correlation g2(tau) as CSV.
    Tau {
        /// Largest delay [1/gamma_e]; defaults to 50/min(gamma_c, gamma_e).
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Cavity detuning maximizing the linear photon number.
    Optimum,
    /// Compare against the truncated master-equation solution.
    OracleCheck {
        /// Number states kept for the cavity, bright and Rydberg modes.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [4, 4, 4])]
        dims: Vec<usize>,
        /// Largest total excitation number kept.
        #[arg(long, default_value_t = 3)]
        cap: usize,
        /// Also test moment factorization with 1 to 3 explicit atoms.
        #[arg(long)]
        ladder_atoms: Option<usize>,
        /// Rydberg pair shift used by the explicit-atom check.
        #[arg(long, default_value_t = 0.0)]
        pair_shift: f64,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// One of delta_c, theta_c, omega_cf, delta_e, delta_r, alpha, c6.
    /// theta_c is measured from the linear-cavity optimum.
    #[arg(long)]
    param: String,
    #[arg(long, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, default_value_t = 101)]
    n: usize,
    /// Comma-separated: g2_t_0, g2_r_0, i_trans, i_refl, pair_refl, kappa_r, kappa_i.
    #[arg(long, value_delimiter = ',', default_value = "g2_t_0")]
    obs: Vec<String>,
}

fn scan_spec(a: &ScanArgs) -> Result<ScanSpec, ConfigError> {
    let parameter: ScanParameter = a
        .param
        .parse()
        .map_err(|_| ConfigError::Usage(format!("unknown scan parameter `{}`", a.param)))?;
    let observables = a
        .obs
        .iter()
        .map(|s| s.trim().parse::<Observable>().map_err(|_| ConfigError::Usage(format!("unknown observable `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScanSpec { parameter, start: a.start, stop: a.stop, n_points: a.n, observables })
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let c = load(cli.config.as_deref(), &cli.overrides)?;
    match &cli.command {
        Command::Point => commands::point(&c, out),
        Command::Scan(a) => commands::scan(&c, &scan_spec(a)?, out),
        Command::Tau { tau_max, n } => {
            let tau_max = tau_max.unwrap_or_else(|| commands::default_tau_max(&c));
            commands::tau(&c, tau_max, *n, out)
        }
        Command::Optimum => commands::optimum(&c, out).map(|_| ()),
        Command::OracleCheck { dims, cap, ladder_atoms, pair_shift } => {
            let o = OracleOptions {
                dims: [dims[0], dims[1], dims[2]],
                cap: *cap,
                ladder_atoms: *ladder_atoms,
                pair_shift: *pair_shift,
            };
            commands::oracle_check(&c, &o, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.out {
        Some(path) => File::create(path).map_err(CliError::from).and_then(|f| {
            let mut w = BufWriter::new(f);
            run(&cli, &mut w)?;
            w.flush().map_err(CliError::from)
        }),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            run(&cli, &mut w).and_then(|()| w.flush().map_err(CliError::from))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
