//! `weylbench`: verification suites and sweeps over weyl_core.
//!
//! Every subcommand prints one JSON report on stdout. Exit status is 0 when
//! all checks pass, 1 when a check fails or the computation stops with an
//! error, and 2 on a usage error.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use weyl_core::spectra_io::load_config;
use weyl_core::zeta_toolkit::ZetaEngine;
use weyl_core::Error;

use commands::TraceArgs;

#[derive(Parser)]
#[command(name = "weylbench", version, about = "Partial-trace and Weyl-law verification suites")]
struct Cli {
    /// Also write a CSV table to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Completed zeta and scattering identities.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Truncated Eisenstein norms.
    #[command(subcommand)]
    Ms2(Ms2Cmd),
    /// Selberg transform tables.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Partial-trace lower bound.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// SL2 eigenvalue counting.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// SL3 Eisenstein terms and Plancherel density.
    #[command(subcommand)]
    Sl3(Sl3Cmd),
    /// Count SL3 parameters in a region and classify the dataset.
    Count {
        #[arg(long)]
        dataset: PathBuf,
        /// RegionSpec as inline JSON or a path to a JSON file.
        #[arg(long)]
        region: String,
        /// Volume for the equidistribution ratio; defaults to the manifest's.
        #[arg(long)]
        volume: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ZetaCmd {
    /// Functional equations, R(s)R(−s) = 1 and |φ| = 1 on fixed grids.
    Check,
}

#[derive(Subcommand)]
enum Ms2Cmd {
    /// Closed form of ∫_F |Λ^C E_{1/2+it}|² against quadrature.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum TransformCmd {
    /// Mellin against direct quadrature, and the window property of ĝ_T.
    Roundtrip {
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum TraceCmd {
    /// Both sides of the partial-trace inequality.
    Report {
        #[arg(long = "T")]
        t: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        sigma: Option<f64>,
        /// SL2 dataset; a synthetic spectrum when omitted.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum WeylCmd {
    /// N(T)/(T/12) on a grid of T up to --tmax.
    Sweep {
        /// SL2 dataset; a synthetic spectrum when omitted.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0.8)]
        lo: f64,
        #[arg(long, default_value_t = 1.2)]
        hi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Sl3Cmd {
    /// Diagonal closed form against the extrapolated term sum.
    #[command(allow_negative_numbers = true)]
    Diagonal {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        /// Defaults to −t1 − t2.
        #[arg(long)]
        t3: Option<f64>,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Eleven-term degenerate residue norm at height t.
    #[command(allow_negative_numbers = true)]
    Residue {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        c: f64,
    },
    /// Ball integral of β: calibration at T, check at 2T, doubling law.
    Beta {
        #[arg(long = "T")]
        t: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Zeta(_) => "zeta check",
            Command::Ms2(_) => "ms2 verify",
            Command::Transform(_) => "transform roundtrip",
            Command::Trace(_) => "trace report",
            Command::Weyl(_) => "weyl sweep",
            Command::Sl3(Sl3Cmd::Diagonal { .. }) => "sl3 diagonal",
            Command::Sl3(Sl3Cmd::Residue { .. }) => "sl3 residue",
            Command::Sl3(Sl3Cmd::Beta { .. }) => "sl3 beta",
            Command::Count { .. } => "count",
        }
    }
}

fn run(cli: &Cli) -> weyl_core::Result<report::Report> {
    let cfg = load_config()?;
    let engine = ZetaEngine::new(cfg.zeta.clone());
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Zeta(ZetaCmd::Check) => commands::zeta_check(&engine, out),
        Command::Ms2(Ms2Cmd::Verify { t, c, tol }) => commands::ms2_verify(&engine, &cfg, *t, *c, *tol, out),
        Command::Transform(TransformCmd::Roundtrip { sigma, t, tol }) => {
            commands::transform_roundtrip(sigma.unwrap_or(cfg.sigma), *t, *tol, out)
        }
        Command::Trace(TraceCmd::Report { t, c, sigma, dataset, seed }) => {
            let args =
                TraceArgs { t_half: *t, c_height: *c, sigma: sigma.unwrap_or(cfg.sigma), dataset: dataset.as_ref(), seed: *seed };
            commands::trace_report(&engine, args, out)
        }
        Command::Weyl(WeylCmd::Sweep { dataset, tmax, steps, lo, hi, seed }) => {
            commands::weyl_sweep(dataset.as_ref(), *tmax, *steps, (*lo, *hi), *seed, out)
        }
        Command::Sl3(Sl3Cmd::Diagonal { t1, t2, t3, c, tol }) => {
            commands::sl3_diagonal(&engine, [*t1, *t2, t3.unwrap_or(-t1 - t2)], *c, *tol, out)
        }
        Command::Sl3(Sl3Cmd::Residue { t, c }) => commands::sl3_residue(&engine, *t, *c, out),
        Command::Sl3(Sl3Cmd::Beta { t }) => commands::sl3_beta(*t, out),
        Command::Count { dataset, region, volume } => commands::count(&cfg, dataset, region, *volume, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed().as_secs_f64();
    let name = cli.command.name();
    let (json, code) = match result {
        Ok(r) => {
            let code = if r.passed() { 0 } else { 1 };
            (r.to_json(elapsed), code)
        }
        Err(e) => {
            let code = if matches!(e, Error::InvalidArgument(_)) { 2 } else { 1 };
            (report::error_json(name, &e, elapsed), code)
        }
    };
    // a closed pipe on stdout is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&json).expect("report serializes"));
    ExitCode::from(code)
}
