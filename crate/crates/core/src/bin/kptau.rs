//! Command-line frontend: period computation, Schur expansion tables,
//! theta / wp evaluation, and the identity verification suites.
//!
//! Exit codes are stable: 0 success, 1 i/o, 2 validation, 3 divisor
//! point, 4 identity failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use kptau::curve::CurveModel;
use kptau::identities::{genus2_suite, trigonal_suite, IdentityReport};
use kptau::linalg::min_eig_sym_real;
use kptau::partitions::frobenius_of;
use kptau::periods::{hyperelliptic_periods_with_stability, PeriodData, QuadratureOptions};
use kptau::tau::{
    affine_from_tau, plucker_giambelli, reconstruction_residual, schur_expansion_table, Gauge,
    TauModel,
};
use kptau::thetasigma::{theta, theta_deriv, wp_values_default, ThetaContext};
use kptau::Error;

#[derive(Parser)]
#[command(name = "kptau", version, about = "KP tau functions attached to algebraic curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute period matrices of a real-branch-point hyperelliptic curve
    Periods(PeriodsArgs),
    /// Schur expansion table and affine window of the tau function
    Expand(ExpandArgs),
    /// Run identity suites and write a report
    Verify(VerifyArgs),
    /// Evaluate the Riemann theta function (optionally a derivative)
    Theta(ThetaArgs),
    /// Evaluate zeta and Kleinian wp tensors at a point
    Wp(WpArgs),
}

#[derive(Args)]
struct PeriodsArgs {
    curve: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// initial Gauss-Chebyshev node count
    #[arg(long, default_value_t = 32)]
    nodes: usize,
    /// skip invariant validation of the result
    #[arg(long)]
    no_validate: bool,
}

#[derive(Args)]
struct ExpandArgs {
    curve: PathBuf,
    periods: PathBuf,
    /// sigma-gauge argument: comma-separated re,im pairs (2g reals)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    max_weight: u32,
    #[arg(long, value_enum, default_value_t = GaugeArg::Sigma)]
    gauge: GaugeArg,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    no_validate: bool,
}

#[derive(Args)]
struct VerifyArgs {
    curve: PathBuf,
    /// period file; optional for hyperelliptic curves with real branch
    /// points (computed on the fly); without it the trigonal suite
    /// reports "not run"
    periods: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    periods: PathBuf,
    /// argument z: comma-separated re,im pairs (2g reals)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z: Vec<f64>,
    /// partial derivative multi-index, one entry per coordinate
    #[arg(long, value_delimiter = ',')]
    deriv: Option<Vec<usize>>,
}

#[derive(Args)]
struct WpArgs {
    periods: PathBuf,
    curve: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    max_order: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum GaugeArg {
    Sigma,
    Theta,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Genus2,
    Trigonal,
    All,
}

fn parse_complex_vector(raw: &[f64], g: usize, what: &str) -> Result<Vec<Complex64>, Error> {
    if raw.len() != 2 * g {
        return Err(Error::validation(format!(
            "{what} needs {} reals (re,im per coordinate), got {}",
            2 * g,
            raw.len()
        )));
    }
    Ok(raw.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Json(_) => 1,
        Error::DivisorPoint => 3,
        _ => 2,
    }
}

#[derive(Serialize)]
struct ExpandEntry {
    partition: Vec<u32>,
    frobenius: String,
    value: [f64; 2],
}

#[derive(Serialize)]
struct ExpandOutput {
    gauge: String,
    max_weight: u32,
    giambelli_residual: f64,
    reconstruction_residual: f64,
    entries: Vec<ExpandEntry>,
    affine_window: usize,
    affine: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct KleinOut {
    v: Vec<[f64; 2]>,
    sigma: [f64; 2],
    zeta: Vec<[f64; 2]>,
    wp2: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wp3: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wp4: Option<Vec<Vec<Vec<Vec<[f64; 2]>>>>>,
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn run() -> Result<u8, Error> {
    // KPTAU_THREADS caps internal parallelism; every computation here is
    // deterministic and single-threaded, so the cap is honoured trivially,
    // but nonsense values still fail fast.
    if let Ok(t) = std::env::var("KPTAU_THREADS") {
        let n: usize = t
            .parse()
            .map_err(|_| Error::validation("KPTAU_THREADS must be a positive integer"))?;
        if n == 0 {
            return Err(Error::validation("KPTAU_THREADS must be at least 1"));
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Periods(args) => {
            let curve = CurveModel::load(&args.curve)?;
            let CurveModel::Hyperelliptic(h) = &curve else {
                return Err(Error::unsupported(
                    "periods not computable internally for this curve family; supply a period file",
                ));
            };
            let opts = QuadratureOptions { initial_nodes: args.nodes, ..Default::default() };
            let (pd, stability) = hyperelliptic_periods_with_stability(h, &opts)?;
            if !args.no_validate {
                pd.validate(1e-8)?;
            }
            let t = pd.t_norm()?;
            let im_t: Vec<Vec<Complex64>> = t
                .iter()
                .map(|r| r.iter().map(|c| Complex64::new(c.im, 0.0)).collect())
                .collect();
            pd.save(&args.output)?;
            println!("legendre residual: {:.3e}", pd.legendre_residual());
            println!("Im(T) min eigenvalue: {:.6}", min_eig_sym_real(&im_t));
            println!("node-doubling stability: {:.3e}", stability);
            println!("wrote {}", args.output.display());
            Ok(0)
        }
        Command::Expand(args) => {
            if args.max_weight > 10 {
                return Err(Error::validation("max weight is capped at 10"));
            }
            let curve = CurveModel::load(&args.curve)?;
            let pd = PeriodData::load(&args.periods, !args.no_validate)?;
            let v = parse_complex_vector(&args.v, pd.g, "--v")?;
            let gauge = match args.gauge {
                GaugeArg::Sigma => Gauge::Sigma,
                GaugeArg::Theta => Gauge::Theta,
            };
            let model = TauModel::new(curve, pd, v, args.max_weight, gauge)?;
            let tau = model.build();
            let table = schur_expansion_table(&tau, args.max_weight)?;
            let recon = reconstruction_residual(&tau, &table)?;
            let window = ((args.max_weight.saturating_sub(1)) / 2) as usize;
            let aff = affine_from_tau(&tau, window)?;
            let mut giambelli_residual = 0.0f64;
            for (lambda, direct) in &table.entries {
                let fc = frobenius_of(lambda);
                if fc.arms.iter().chain(&fc.legs).any(|&x| x as usize > window) {
                    continue;
                }
                let gia = plucker_giambelli(&aff, lambda)?;
                giambelli_residual =
                    giambelli_residual.max((gia - direct).norm() / direct.norm().max(1.0));
            }
            let out = ExpandOutput {
                gauge: match args.gauge {
                    GaugeArg::Sigma => "sigma".into(),
                    GaugeArg::Theta => "theta".into(),
                },
                max_weight: args.max_weight,
                giambelli_residual,
                reconstruction_residual: recon,
                entries: table
                    .entries
                    .iter()
                    .map(|(p, v)| ExpandEntry {
                        partition: p.parts().to_vec(),
                        frobenius: frobenius_of(p).to_string(),
                        value: c2(*v),
                    })
                    .collect(),
                affine_window: window,
                affine: aff.a.iter().map(|r| r.iter().map(|&z| c2(z)).collect()).collect(),
            };
            std::fs::write(&args.output, serde_json::to_string_pretty(&out)?)?;
            println!("giambelli residual: {giambelli_residual:.3e}");
            println!("reconstruction residual: {recon:.3e}");
            println!("wrote {}", args.output.display());
            Ok(0)
        }
        Command::Verify(args) => {
            let curve = CurveModel::load(&args.curve)?;
            if args.tol <= 0.0 {
                return Err(Error::validation("tolerance must be positive"));
            }
            let pd = match &args.periods {
                Some(p) => Some(PeriodData::load(p, true)?),
                None => None,
            };
            let mut reports: Vec<IdentityReport> = Vec::new();
            let want_genus2 = matches!(args.suite, SuiteArg::Genus2 | SuiteArg::All);
            let want_trigonal = matches!(args.suite, SuiteArg::Trigonal | SuiteArg::All);
            if let CurveModel::Hyperelliptic(h) = &curve {
                if want_genus2 && h.genus() == 2 {
                    let pd = match pd.clone() {
                        Some(pd) => pd,
                        None => kptau::periods::hyperelliptic_periods(h)?,
                    };
                    reports.extend(genus2_suite(h, &pd, args.samples, args.tol, args.seed)?);
                }
            }
            if want_trigonal {
                let trig_pd = match &curve {
                    CurveModel::CyclicTrigonal(_) => pd.as_ref(),
                    _ => None,
                };
                reports.extend(trigonal_suite(&curve, trig_pd, args.samples, args.tol, args.seed)?);
            }
            let mut failed = false;
            for r in &reports {
                let status = if r.status == "not_run" {
                    "not run".to_string()
                } else if r.pass {
                    format!("pass  (residual {:.3e})", r.residual)
                } else {
                    failed = true;
                    format!("FAIL  (residual {:.3e}, scale {:.3e})", r.residual, r.scale)
                };
                println!("{:42} {}", r.name, status);
            }
            if let Some(out) = &args.output {
                std::fs::write(out, serde_json::to_string_pretty(&reports)?)?;
                println!("wrote {}", out.display());
            }
            Ok(if failed { 4 } else { 0 })
        }
        Command::Theta(args) => {
            let pd = PeriodData::load(&args.periods, true)?;
            let z = parse_complex_vector(&args.z, pd.g, "--z")?;
            let order = args.deriv.as_ref().map(|d| d.iter().sum()).unwrap_or(0);
            let ctx = ThetaContext::for_periods(&pd, 1e-14, order)?;
            let value = match &args.deriv {
                None => theta(&z, &ctx),
                Some(alpha) => {
                    if alpha.len() != pd.g {
                        return Err(Error::validation(format!("--deriv needs {} entries", pd.g)));
                    }
                    theta_deriv(&z, &ctx, alpha)
                }
            };
            println!("{} {:+}i", value.re, value.im);
            Ok(0)
        }
        Command::Wp(args) => {
            let pd = PeriodData::load(&args.periods, true)?;
            let curve = CurveModel::load(&args.curve)?;
            if curve.genus() != pd.g {
                return Err(Error::validation("curve and period data disagree on genus"));
            }
            if !(2..=4).contains(&args.max_order) {
                return Err(Error::validation("--max-order must be 2..=4"));
            }
            let v = parse_complex_vector(&args.v, pd.g, "--v")?;
            let kp = wp_values_default(&v, &pd, args.max_order)?;
            let g = pd.g;
            let out = KleinOut {
                v: v.iter().map(|&z| c2(z)).collect(),
                sigma: c2(kp.sigma),
                zeta: kp.zeta.iter().map(|&z| c2(z)).collect(),
                wp2: (0..g).map(|i| (0..g).map(|j| c2(kp.wp2(i, j))).collect()).collect(),
                wp3: (args.max_order >= 3).then(|| {
                    (0..g)
                        .map(|i| {
                            (0..g)
                                .map(|j| (0..g).map(|k| c2(kp.wp3(i, j, k))).collect())
                                .collect()
                        })
                        .collect()
                }),
                wp4: (args.max_order >= 4).then(|| {
                    (0..g)
                        .map(|i| {
                            (0..g)
                                .map(|j| {
                                    (0..g)
                                        .map(|k| (0..g).map(|l| c2(kp.wp4(i, j, k, l))).collect())
                                        .collect()
                                })
                                .collect()
                        })
                        .collect()
                }),
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
