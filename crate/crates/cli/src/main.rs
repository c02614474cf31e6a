mod config;
mod error;
mod report;
mod tasks;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::{Common, Task};
use error::CliError;
use report::{Checks, Output, Report};
use tasks::Context;

/// Runs frame and Hamiltonian experiments from JSON configs.
///
/// Each run writes `<task>.json` (version, config echo, results, and every
/// checked invariant with its tolerance) and, where noted, `<task>.csv`
/// into the output directory.
///
/// Exit status: 0 when all invariants hold, 1 when one fails (the invariant
/// is named on stderr), 2 for configuration errors, 3 for I/O errors.
#[derive(Parser)]
#[command(name = "pframe", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `out` in the config. Defaults to the
    /// working directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// RNG seed; overrides `seed` in the config. Defaults to 0.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parseval defect, rank, excess and frame bounds of a frame.
    ///
    /// Config: {"frame": FRAME, "expect_parseval": true}. FRAME is a path
    /// to a frame file, an inline {"dim", "vectors", "labels"} object, or
    /// {"random": {"len", "dim"}}.
    #[command(after_help = "CSV columns: index, label, norm")]
    FrameVerify(RunArgs),

    /// Naimark dilation of a Parseval frame.
    ///
    /// Config: {"frame": FRAME}. Writes the complementary frame to
    /// naimark-complement.json.
    Naimark(RunArgs),

    /// Dense spectrum, point-spectrum certificates and optional Riesz split.
    ///
    /// Config: {"frame": FRAME, "E": [..], "cluster_gap": 1e-9,
    /// "certify": true, "quasi_eigen": false, "riesz_split": [J0 indices]}.
    #[command(after_help = "CSV columns: mu, multiplicity, residual (one row per eigenvalue cluster)")]
    Spectrum(RunArgs),

    /// Closed-form spectra of block frames.
    ///
    /// Config: {"n": n, "E": [E_1, .., E_{n+1}]} or {"blocks": [{"n", "E"}, ..]}
    /// with weights strictly increasing across blocks.
    #[command(after_help = "CSV columns: block (0-based index), lambda, type (secular | top), residual")]
    CcSpectrum(RunArgs),

    /// Truncated ladder commutators and vertical operator identities.
    ///
    /// Config: {"n_max": 100, "exact_max": 100}. Sizes up to exact_max are
    /// also checked in exact arithmetic.
    #[command(
        after_help = "CSV columns: n, commutator_exact (empty beyond exact_max), commutator_f64, vv_defect, vtv_rank"
    )]
    CcLadders(RunArgs),

    /// Weighted Hermite families on a uniform grid.
    ///
    /// Config: {"m": {"kind": "constant" | "gaussian_bump" | "tabulated", ..},
    /// "alpha_cells": k, "grid": {"L", "P"}, "N": order, "two_grid": false,
    /// "hamiltonian": {"e_phi": [..], "e_tilde": [..]}}.
    #[command(after_help = "CSV columns: n, a_phi, b_phi, a_tilde, b_tilde, tol_disc (relative ladder residuals)")]
    PseudoBoson(RunArgs),

    /// Biorthogonal Riesz families and their Parseval union built from X.
    ///
    /// Config: {"x": [[..], ..]} given by rows, or {"random": {"dim", "norm"}}
    /// (contractive with ||X|| = norm when norm < 1, expansive with smallest
    /// singular value norm when norm > 1). Writes prop15-union.json.
    #[command(name = "prop15")]
    Prop15(RunArgs),
}

type Runner<C> = fn(&C, &mut Context, &mut Checks) -> Result<Output, CliError>;

fn execute<C>(task: Task, args: &RunArgs, run: Runner<C>) -> Result<(), CliError>
where
    C: DeserializeOwned + Serialize + Common,
{
    let text =
        fs::read_to_string(&args.config).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let cfg: C = config::parse(&args.config, &text, task)?;
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let seed = args.seed.or(cfg.seed()).unwrap_or(0);
    let out = match (&args.out, cfg.out()) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => base.join(dir),
        (None, None) => PathBuf::from("."),
    };

    let mut ctx = Context {
        base,
        rng: StdRng::seed_from_u64(seed),
    };
    let mut checks = Checks::default();
    let output = run(&cfg, &mut ctx, &mut checks)?;
    let failure = checks.first_failure().cloned();
    let report = Report {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        task: task.as_str(),
        seed,
        config: serde_json::to_value(&cfg).expect("config serializes"),
        results: output.results.clone(),
        invariants: checks.into_vec(),
        pass: failure.is_none(),
    };
    let written = report::write(&out, &report, &output)?;

    if let Some(f) = failure {
        return Err(CliError::Invariant(format!(
            "{}: {:e} > {:e}",
            f.name, f.value, f.tolerance
        )));
    }
    if !args.quiet {
        println!("{task}: {} invariants hold", report.invariants.len());
        println!("  {}", written.report.display());
        for p in &written.files {
            println!("  {}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::FrameVerify(a) => execute(Task::FrameVerify, a, tasks::frame_verify),
        Command::Naimark(a) => execute(Task::Naimark, a, tasks::naimark),
        Command::Spectrum(a) => execute(Task::Spectrum, a, tasks::spectrum),
        Command::CcSpectrum(a) => execute(Task::CcSpectrum, a, tasks::cc_spectrum),
        Command::CcLadders(a) => execute(Task::CcLadders, a, tasks::cc_ladders),
        Command::PseudoBoson(a) => execute(Task::PseudoBoson, a, tasks::pseudo_boson),
        Command::Prop15(a) => execute(Task::Prop15, a, tasks::prop15),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pframe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
