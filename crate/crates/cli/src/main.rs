#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;
mod parse;

use parse::{RealList, SignList};

/// Constructs and verifies solutions of -u'' = lambda u - a |u|^(p-1) u on
/// [0, L] with u(0) = u(L) = 0, and writes them as CSV/JSON data.
#[derive(Debug, Parser)]
#[command(name = "sublin", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Reals accept `5/4`, `pi`, `8pi`, `pi/2`; lists are comma separated and
/// take `lo:hi:n` ranges.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Spectral parameter lambda.
    #[arg(long, global = true, value_parser = parse::real, default_value = "1")]
    pub lambda: f64,
    /// Weight a of the sublinear term.
    #[arg(long, global = true, value_parser = parse::real, default_value = "1")]
    pub a: f64,
    /// Exponent p in (0, 1).
    #[arg(long, global = true, value_parser = parse::real, default_value = "1/2")]
    pub p: f64,
    /// Interval length L.
    #[arg(long = "L", global = true, value_parser = parse::real, default_value = "pi")]
    pub length: f64,
    /// Grid nodes per profile (per block for `chaos`).
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Integration tolerance for trajectories and the extinction-time quadrature.
    #[arg(long, global = true, value_parser = parse::real, default_value = "1e-11")]
    pub tol: f64,
    /// Output directory.
    #[arg(
        long,
        global = true,
        env = "SUBLIN_OUT_DIR",
        default_value = "sublin-out"
    )]
    pub out_dir: PathBuf,
    /// Seed for randomized windows and property checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homoclinic bumps on [0, 2 T_H] for every (lambda, a) pair.
    Homoclinic {
        /// Values of a (default: --a).
        #[arg(long, value_parser = parse::real_list)]
        a_list: Option<RealList>,
        /// Values of lambda (default: --lambda).
        #[arg(long, value_parser = parse::real_list)]
        lambda_grid: Option<RealList>,
    },
    /// Classical and degenerate branches, thresholds and bump slacks over a lambda grid.
    Bifurcation {
        /// Lambda values (default: 64 points log-spaced in (sigma_1, Sigma_1), 192 from Sigma_1 to 1.25 Sigma_jmax).
        #[arg(long, value_parser = parse::real_list)]
        lambda_grid: Option<RealList>,
        #[arg(long, default_value_t = 4)]
        j_max: u32,
        /// Sup-norms above this are flagged as blow-up.
        #[arg(long, value_parser = parse::real, default_value = "1e6")]
        cap: f64,
    },
    /// The time map T(c) and the bifurcation map Psi(xi).
    Timemap {
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// Largest amplitude as a multiple of u_H.
        #[arg(long, value_parser = parse::real, default_value = "1e3")]
        c_max: f64,
    },
    /// The classical positive solution at --lambda.
    Classical,
    /// A multibump degenerate solution at --lambda.
    Multibump {
        #[arg(long, value_parser = parse::real_list)]
        centers: RealList,
        /// Bump signs; gives a signed multibump solution.
        #[arg(long, value_parser = parse::sign_list)]
        signs: Option<SignList>,
    },
    /// A coded solution at lambda = Sigma_1 (--lambda is ignored).
    Chaos {
        /// Symbol window, e.g. 1,0,-1.
        #[arg(long, value_parser = parse::sign_list, conflicts_with = "random", required_unless_present = "random")]
        symbols: Option<SignList>,
        /// Draw a window of this length from --seed instead.
        #[arg(long)]
        random: Option<usize>,
        /// Index of the first block.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        offset: i64,
    },
    /// Branches of the regularized problem, one CSV per eps.
    Regularized {
        #[arg(long, value_parser = parse::real_list, default_value = "1e-2")]
        eps_list: RealList,
        /// Lambda values (default: interior points of (sigma_1, lambda_1(eps))).
        #[arg(long, value_parser = parse::real_list)]
        lambda_grid: Option<RealList>,
        #[arg(long, default_value_t = 16)]
        points: usize,
    },
    /// A phase-plane trajectory as (t, u, v, E) samples.
    Orbit {
        /// Initial u (default: 3/2 u_H).
        #[arg(long, value_parser = parse::real, allow_hyphen_values = true)]
        u0: Option<f64>,
        #[arg(long, value_parser = parse::real, default_value = "0", allow_hyphen_values = true)]
        v0: f64,
        /// Integration length (default: L).
        #[arg(long, value_parser = parse::real)]
        x_max: Option<f64>,
        /// Stop at the first zero of u.
        #[arg(long)]
        stop_at_zero: bool,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
    /// Randomized checks of the shift conjugacy and the time-map inversion.
    Check {
        #[arg(long, default_value_t = 64)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.common, &cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sublin: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
