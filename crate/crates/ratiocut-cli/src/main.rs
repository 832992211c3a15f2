//! Command-line driver: recovery sweeps, polytope verification, certificate
//! checks and the continuum threshold.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when a verification
//! command ran but its checks failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ratiocut::certificate;
use ratiocut::continuum;
use ratiocut::core::{squared_distance_matrix, Partition, PointSet};
use ratiocut::polytope;
use ratiocut::sweep::{emit_csv, emit_svg, run_sweep, SweepConfig};

#[derive(Parser)]
#[command(name = "ratiocut", version, about = "Ratio-cut clustering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a recovery/tightness sweep from a JSON config.
    Sweep(SweepArgs),
    /// Exact polytope checks.
    Polytope {
        #[command(subcommand)]
        command: PolytopeCommand,
    },
    /// Dual-certificate checks for a two-cluster instance.
    Certificate {
        #[command(subcommand)]
        command: CertificateCommand,
    },
    /// Continuum-limit computations.
    Continuum {
        #[command(subcommand)]
        command: ContinuumCommand,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config (JSON, schema of `SweepConfig`).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for result.csv and result.svg.
    #[arg(long)]
    out: PathBuf,
    /// Override the cutting-plane round budget.
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Override the separation violation tolerance.
    #[arg(long)]
    viol_tol: Option<f64>,
}

#[derive(Subcommand)]
enum PolytopeCommand {
    /// Check inequality validity, vertexhood of every clustering vector and
    /// the hull/relaxation equality law for the given size.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum CertificateCommand {
    /// Build and verify the optimality certificate for labeled points.
    Check {
        /// Points CSV (header x0..x{m-1}).
        #[arg(long)]
        points: PathBuf,
        /// Labels CSV (header `label`, values 0/1).
        #[arg(long)]
        labels: PathBuf,
        /// Optional path to dump the certificate JSON.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ContinuumCommand {
    /// Locate the one-dimensional recovery threshold and report the planar
    /// inequality around it.
    Threshold,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Polytope {
            command: PolytopeCommand::Verify { n, k },
        } => polytope_verify(n, k),
        Command::Certificate {
            command:
                CertificateCommand::Check {
                    points,
                    labels,
                    dump,
                },
        } => certificate_check(&points, &labels, dump.as_deref()),
        Command::Continuum {
            command: ContinuumCommand::Threshold,
        } => continuum_threshold(),
    }
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut config: SweepConfig = serde_json::from_str(&text).context("parsing sweep config")?;
    if args.max_rounds.is_some() {
        config.lp_max_rounds = args.max_rounds;
    }
    if args.viol_tol.is_some() {
        config.lp_viol_tol = args.viol_tol;
    }

    let result = run_sweep(&config)?;
    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("result.csv");
    let svg_path = args.out.join("result.svg");
    emit_csv(&result, fs::File::create(&csv_path)?)?;
    emit_svg(&result, fs::File::create(&svg_path)?)?;

    println!("config hash: {:016x}", result.config_hash);
    println!("delta method trials successes tight mean_s");
    for row in &result.rows {
        println!(
            "{:<6} {:<7} {:>6} {:>9} {:>5} {:>8.3}",
            row.delta, row.method, row.trials, row.successes, row.tight, row.mean_seconds
        );
    }
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(true)
}

fn polytope_verify(n: usize, k: usize) -> Result<bool> {
    let mut ok = true;

    let system = polytope::rmet_inequalities(n, k, k, false)?;
    let mut invalid = 0usize;
    for c in &system.constraints {
        if !polytope::check_validity(c, n, k, false)? {
            invalid += 1;
        }
    }
    println!(
        "validity: {}/{} inequalities valid",
        system.constraints.len() - invalid,
        system.constraints.len()
    );
    ok &= invalid == 0;

    let vectors = polytope::enumerate_ratio_cut_vectors(n, k, false)?;
    let mut non_vertices = 0usize;
    for x in &vectors {
        if !polytope::is_vertex_of_rmet(x, n, k)? {
            non_vertices += 1;
        }
    }
    println!(
        "vertexhood: {}/{} clustering vectors are relaxation vertices",
        vectors.len() - non_vertices,
        vectors.len()
    );
    ok &= non_vertices == 0;

    if n <= 5 {
        let equal = polytope::verify_rcut_equals_rmet(n, k)?;
        let expected = n <= 4;
        println!(
            "hull equality: relaxation {} the hull (expected {})",
            if equal { "equals" } else { "exceeds" },
            if expected { "equality" } else { "strict inclusion" }
        );
        ok &= equal == expected;
    } else {
        println!("hull equality: skipped (vertex enumeration is limited to n <= 5)");
    }

    println!("polytope verify (n={n}, K={k}): {}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn certificate_check(points: &Path, labels: &Path, dump: Option<&Path>) -> Result<bool> {
    let points = PointSet::from_csv(fs::File::open(points)?)?;
    let planted = Partition::from_csv(fs::File::open(labels)?, 2)?;
    let d = squared_distance_matrix(&points);

    let margin = certificate::check_easyc(&d, &planted)?;
    println!("optimality margin: {margin:.6e}");
    if margin < 0.0 {
        println!("condition violated; no certificate exists by this construction");
        return Ok(false);
    }
    let cert = certificate::build_certificate(&d, &planted)?;
    if let Some(path) = dump {
        fs::write(path, cert.to_json()?)?;
        println!("certificate written to {}", path.display());
    }
    let report = certificate::verify_certificate(&cert, &d, &planted, certificate::VERIFY_TOL)?;
    println!(
        "residuals: pair {:.3e}, point {:.3e}, min multiplier {:.3e}, duality gap {:.3e}",
        report.max_pair_residual, report.max_point_residual, report.min_lambda, report.duality_gap
    );
    println!("certificate: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}

fn continuum_threshold() -> Result<bool> {
    let threshold = continuum::one_d_threshold();
    let target = 1.0 + 3.0_f64.sqrt();
    println!("one-dimensional threshold: {threshold:.6} (1 + sqrt(3) = {target:.6})");
    let mut ok = (threshold - target).abs() <= 1e-2;

    for delta in [2.65, 2.80] {
        let cond = continuum::geometric_condition(delta, continuum::GEOMETRIC_GRID)?;
        println!(
            "planar inequality at delta = {delta}: max {:.6} vs {:.6} -> {}",
            cond.max_value,
            delta * delta / 2.0,
            if cond.holds { "holds" } else { "fails" }
        );
        ok &= cond.holds == (delta > target);
    }

    for m in [3usize, 4, 5] {
        let a = continuum::argmin_split(m, 2.0, 0.01)?;
        println!("argmin of the split cost, m = {m}: {a:+.4}");
        ok &= a.abs() <= 1e-2;
    }

    println!("continuum threshold: {}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}
