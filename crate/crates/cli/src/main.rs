//! `clex` — cluster-expansion convergence bounds and verification suites.
//!
//! Reports are JSON envelopes `{tool_version, seed, resolved_config,
//! report}` on stdout (or `--out`), with every float at 17 significant
//! digits; `kstar` and `graphs count` print bare scalars, `curves` writes
//! CSV.  Identical configuration and seed produce byte-identical output
//! regardless of `--threads`.
//!
//! Exit codes: 0 success, 2 argument error, 3 verification failure.

mod emit;
mod potential;
mod verify;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use clex_core::{bounds, cluster, graphs, mayer, potentials::PairPotential};
use emit::DEFAULT_SEED;

#[derive(Parser)]
#[command(
    name = "clex",
    version,
    about = "Cluster-expansion convergence bounds and checks"
)]
struct Cli {
    /// Thread count for parallel sections (default: all cores).  Does not
    /// affect results, only wall time.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the primary output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Seed for Monte Carlo subcommands; echoed in every JSON report.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Guaranteed convergence radius rho* for given thermodynamic constants.
    Radius(RadiusArgs),
    /// The universal normalisation constant K* (bare scalar on stdout).
    Kstar {
        /// Bisection tolerance on K*.
        #[arg(long)]
        tol: f64,
    },
    /// CSV sweep of (u, F(u), a*(u), g(a*(u))) over a geometric grid.
    Curves(CurvesArgs),
    /// Labelled-graph counting utilities.
    Graphs {
        #[command(subcommand)]
        cmd: GraphsCmd,
    },
    /// Monte Carlo estimate of an irreducible Mayer coefficient beta_m.
    Mayer(MayerArgs),
    /// Truncated free-energy series with Monte Carlo coefficients.
    FreeEnergy(FreeEnergyArgs),
    /// Brute-force polymer identities for a potential on the torus.
    VerifyPolymer(VerifyPolymerArgs),
    /// Potential-free combinatorial identity suite.
    VerifyIdentities,
}

#[derive(Subcommand)]
enum GraphsCmd {
    /// Count labelled graphs of one class (bare integer on stdout).
    Count {
        /// Vertex count, 1..=8.
        #[arg(long)]
        n: usize,
        /// Graph class to count.
        #[arg(long)]
        class: GraphClass,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphClass {
    Connected,
    Biconnected,
}

#[derive(Args)]
struct RadiusArgs {
    /// Inverse temperature beta > 0.
    #[arg(long)]
    beta: f64,
    /// Stability constant B >= 0.
    #[arg(long)]
    stab: f64,
    /// Temperedness integral C(beta) > 0.
    #[arg(long)]
    cbeta: f64,
    /// Normalisation constant: a number >= 1, or `auto` to optimise.
    #[arg(long = "K", value_parser = parse_k_choice)]
    k: KChoice,
    /// Search cap for `--K auto`.
    #[arg(long, default_value_t = 4.0)]
    kmax: f64,
}

#[derive(Clone, Copy)]
enum KChoice {
    Auto,
    Value(f64),
}

fn parse_k_choice(s: &str) -> Result<KChoice, String> {
    if s == "auto" {
        return Ok(KChoice::Auto);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("expected `auto` or a number, got `{s}`"))?;
    if !v.is_finite() || v < 1.0 {
        return Err(format!("K must be >= 1 and finite, got `{s}`"));
    }
    Ok(KChoice::Value(v))
}

#[derive(Args)]
struct CurvesArgs {
    /// Lower end of the u grid (u > 0).
    #[arg(long)]
    u_min: f64,
    /// Upper end of the u grid.
    #[arg(long)]
    u_max: f64,
    /// Number of geometric grid points (>= 2).
    #[arg(long)]
    points: usize,
}

#[derive(Args)]
struct MayerArgs {
    /// Potential spec, e.g. `hardrod:sigma=1` or `squarewell:sigma=1,eps=0.5,width=0.7,d=2`.
    #[arg(long, value_parser = potential::parse)]
    potential: PairPotential,
    /// Inverse temperature beta > 0.
    #[arg(long)]
    beta: f64,
    /// Coefficient order, 1..=4.
    #[arg(long)]
    m: usize,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: u64,
    /// Periodic box side; when set, estimate the finite-volume coefficient.
    #[arg(long = "box")]
    box_side: Option<f64>,
}

#[derive(Args)]
struct FreeEnergyArgs {
    #[arg(long, value_parser = potential::parse)]
    potential: PairPotential,
    #[arg(long)]
    beta: f64,
    /// Density rho > 0 (for hard rods: rho sigma < 1).
    #[arg(long)]
    rho: f64,
    /// Series truncation order M, 1..=4.
    #[arg(long)]
    order: usize,
    /// Samples per coefficient.
    #[arg(long)]
    samples: u64,
}

#[derive(Args)]
struct VerifyPolymerArgs {
    #[arg(long, value_parser = potential::parse)]
    potential: PairPotential,
    #[arg(long)]
    beta: f64,
    /// Torus side L > 0.
    #[arg(long = "L")]
    box_side: f64,
    /// Normalisation constant K >= 1.
    #[arg(long = "K")]
    k: f64,
    /// Number of sites, 1..=4.
    #[arg(long = "N")]
    n_sites: usize,
    /// Cluster-log truncation order, 1..=6.
    #[arg(long)]
    nmax: usize,
    /// Grid points per coordinate (power of two).
    #[arg(long)]
    grid: usize,
}

/// A failed run: message for stderr plus the exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

macro_rules! from_error {
    ($ty:ty) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::usage(e.to_string())
            }
        }
    };
}
from_error!(clex_core::cluster::ClusterError);
from_error!(clex_core::mayer::MayerError);
from_error!(clex_core::graphs::GraphError);
from_error!(clex_core::potentials::PotentialError);
from_error!(std::io::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(threads) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: --threads: {e}");
                    return ExitCode::from(2);
                }
            };
            pool.install(|| run(&cli))
        }
        None => run(&cli),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Send the primary payload to `--out` or stdout.
fn deliver(out: &Option<PathBuf>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, payload)?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn check(cond: bool, msg: &str) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::usage(msg))
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.cmd {
        Cmd::Radius(args) => radius(cli, args),
        Cmd::Kstar { tol } => {
            check(
                *tol > 0.0 && tol.is_finite(),
                "--tol must be positive and finite",
            )?;
            let k = bounds::find_k_star(*tol);
            deliver(&cli.out, &format!("{k:.4}\n"))?;
            Ok(0)
        }
        Cmd::Curves(args) => curves(cli, args),
        Cmd::Graphs {
            cmd: GraphsCmd::Count { n, class },
        } => {
            let count = match class {
                GraphClass::Connected => graphs::count_connected(*n)?,
                GraphClass::Biconnected => graphs::count_biconnected(*n)?,
            };
            deliver(&cli.out, &format!("{count}\n"))?;
            Ok(0)
        }
        Cmd::Mayer(args) => mayer_cmd(cli, args),
        Cmd::FreeEnergy(args) => free_energy(cli, args),
        Cmd::VerifyPolymer(args) => verify_polymer(cli, args),
        Cmd::VerifyIdentities => {
            #[derive(Serialize)]
            struct Config {
                command: &'static str,
            }
            let report = verify::identity_suite();
            let pass = report.all_pass;
            let env = emit::envelope(
                cli.seed,
                Config {
                    command: "verify-identities",
                },
                report,
            );
            deliver(&cli.out, &(emit::to_json(&env) + "\n"))?;
            Ok(if pass { 0 } else { 3 })
        }
    }
}

fn radius(cli: &Cli, args: &RadiusArgs) -> Result<u8, Failure> {
    check(
        args.beta > 0.0 && args.beta.is_finite(),
        "--beta must be positive and finite",
    )?;
    check(
        args.stab >= 0.0 && args.stab.is_finite(),
        "--stab must be >= 0 and finite",
    )?;
    check(
        args.cbeta > 0.0 && args.cbeta.is_finite(),
        "--cbeta must be positive and finite",
    )?;
    check(
        args.kmax >= 1.0 && args.kmax.is_finite(),
        "--kmax must be >= 1 and finite",
    )?;

    #[derive(Serialize)]
    struct Config {
        command: &'static str,
        beta: f64,
        stab: f64,
        c_beta: f64,
        k_requested: String,
        #[serde(rename = "K")]
        k: f64,
        k_max: f64,
    }

    let (k, requested) = match args.k {
        KChoice::Auto => (
            bounds::optimize_k(args.beta, args.stab, args.kmax),
            "auto".to_owned(),
        ),
        KChoice::Value(v) => (v, v.to_string()),
    };
    let report = bounds::bounds_report(args.beta, args.stab, args.cbeta, k);
    let env = emit::envelope(
        cli.seed,
        Config {
            command: "radius",
            beta: args.beta,
            stab: args.stab,
            c_beta: args.cbeta,
            k_requested: requested,
            k,
            k_max: args.kmax,
        },
        report,
    );
    deliver(&cli.out, &(emit::to_json(&env) + "\n"))?;
    Ok(0)
}

fn curves(cli: &Cli, args: &CurvesArgs) -> Result<u8, Failure> {
    check(
        args.u_min > 0.0 && args.u_max > args.u_min && args.u_max.is_finite(),
        "curves require 0 < --u-min < --u-max",
    )?;
    check(args.points >= 2, "--points must be >= 2")?;

    let rows = bounds::emit_curves(args.u_min, args.u_max, args.points);
    let mut csv = String::from("u,F,a_star,g_a_star\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            emit::g17(r.u),
            emit::g17(r.f),
            emit::g17(r.a_star),
            emit::g17(r.g_a_star)
        );
    }

    match &cli.out {
        None => {
            print!("{csv}");
        }
        Some(path) => {
            // CSV goes to the file; a JSON summary (with the resolved
            // config echo) goes to stdout.
            fs::write(path, &csv)?;
            #[derive(Serialize)]
            struct Config {
                command: &'static str,
                u_min: f64,
                u_max: f64,
                points: usize,
                out: String,
            }
            #[derive(Serialize)]
            struct Summary {
                rows: usize,
            }
            let env = emit::envelope(
                cli.seed,
                Config {
                    command: "curves",
                    u_min: args.u_min,
                    u_max: args.u_max,
                    points: args.points,
                    out: path.display().to_string(),
                },
                Summary { rows: rows.len() },
            );
            println!("{}", emit::to_json(&env));
        }
    }
    Ok(0)
}

fn mayer_cmd(cli: &Cli, args: &MayerArgs) -> Result<u8, Failure> {
    #[derive(Serialize)]
    struct Config {
        command: &'static str,
        potential: potential::PotentialConfig,
        beta: f64,
        m: usize,
        samples: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        box_side: Option<f64>,
    }
    #[derive(Serialize)]
    struct BoxReport {
        #[serde(flatten)]
        estimate: mayer::MayerEstimate,
        box_side: f64,
        box_warning: bool,
    }

    let config = Config {
        command: "mayer",
        potential: potential::describe(&args.potential),
        beta: args.beta,
        m: args.m,
        samples: args.samples,
        box_side: args.box_side,
    };
    let payload = match args.box_side {
        Some(l) => {
            let fv = mayer::w_star_finite_volume(
                &args.potential,
                args.beta,
                args.m,
                l,
                args.samples,
                cli.seed,
            )?;
            let report = BoxReport {
                estimate: fv.estimate,
                box_side: fv.box_side,
                box_warning: fv.box_warning,
            };
            emit::to_json(&emit::envelope(cli.seed, config, report))
        }
        None => {
            let report = mayer::beta_m_monte_carlo(
                &args.potential,
                args.beta,
                args.m,
                args.samples,
                cli.seed,
            )?;
            emit::to_json(&emit::envelope(cli.seed, config, report))
        }
    };
    deliver(&cli.out, &(payload + "\n"))?;
    Ok(0)
}

fn free_energy(cli: &Cli, args: &FreeEnergyArgs) -> Result<u8, Failure> {
    check(
        args.rho > 0.0 && args.rho.is_finite(),
        "--rho must be positive and finite",
    )?;
    check(
        (1..=mayer::MAX_ORDER).contains(&args.order),
        "--order must be in 1..=4 (Monte Carlo coefficients)",
    )?;
    if let PairPotential::HardRod { sigma } = args.potential {
        check(
            args.rho * sigma < 1.0,
            "--rho must stay below close packing 1/sigma",
        )?;
    }

    #[derive(Serialize)]
    struct Config {
        command: &'static str,
        potential: potential::PotentialConfig,
        beta: f64,
        rho: f64,
        order: usize,
        samples: u64,
    }
    #[derive(Serialize)]
    struct Report {
        #[serde(flatten)]
        series: mayer::FreeEnergySeries,
        #[serde(skip_serializing_if = "Option::is_none")]
        oracle: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        abs_diff: Option<f64>,
    }

    let mut coefficients = Vec::with_capacity(args.order);
    for m in 1..=args.order {
        let est = mayer::beta_m_monte_carlo(&args.potential, args.beta, m, args.samples, cli.seed)?;
        coefficients.push(est.mean);
    }
    let series = mayer::free_energy_series(args.beta, args.rho, &coefficients);
    let oracle = match args.potential {
        PairPotential::HardRod { sigma } => {
            Some(mayer::tonks_free_energy(args.beta, args.rho, sigma))
        }
        _ => None,
    };
    let abs_diff = oracle.map(|o| (series.f_series - o).abs());
    let report = Report {
        series,
        oracle,
        abs_diff,
    };
    let config = Config {
        command: "free-energy",
        potential: potential::describe(&args.potential),
        beta: args.beta,
        rho: args.rho,
        order: args.order,
        samples: args.samples,
    };
    deliver(
        &cli.out,
        &(emit::to_json(&emit::envelope(cli.seed, config, report)) + "\n"),
    )?;
    Ok(0)
}

fn verify_polymer(cli: &Cli, args: &VerifyPolymerArgs) -> Result<u8, Failure> {
    check(
        args.k >= 1.0 && args.k.is_finite(),
        "--K must be >= 1 and finite",
    )?;
    check(
        (1..=cluster::MAX_QUADRATURE_SITES).contains(&args.n_sites),
        "--N must be in 1..=4 (quadrature activities)",
    )?;
    check(
        (1..=cluster::MAX_CLUSTER_ORDER).contains(&args.nmax),
        "--nmax must be in 1..=6",
    )?;

    #[derive(Serialize)]
    struct Config {
        command: &'static str,
        potential: potential::PotentialConfig,
        beta: f64,
        #[serde(rename = "L")]
        box_side: f64,
        #[serde(rename = "K")]
        k: f64,
        #[serde(rename = "N")]
        n_sites: usize,
        nmax: usize,
        grid: usize,
    }

    let report = verify::polymer_suite(
        &args.potential,
        args.beta,
        args.box_side,
        args.k,
        args.n_sites,
        args.nmax,
        args.grid,
    )?;
    let pass = report.all_pass;
    let config = Config {
        command: "verify-polymer",
        potential: potential::describe(&args.potential),
        beta: args.beta,
        box_side: args.box_side,
        k: args.k,
        n_sites: args.n_sites,
        nmax: args.nmax,
        grid: args.grid,
    };
    deliver(
        &cli.out,
        &(emit::to_json(&emit::envelope(cli.seed, config, report)) + "\n"),
    )?;
    Ok(if pass { 0 } else { 3 })
}
