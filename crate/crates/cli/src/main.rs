//! Command-line surface for the sketching library.
//!
//! One subcommand per capability: building and applying sketches, Monte
//! Carlo verification of the projection guarantee, quadratic-form tail
//! experiments with exact small-instance enumeration, moment machinery,
//! closed-form dimension formulas, the streaming covariance factorizer, and
//! sphere coverings. Configuration is flags-only and every output is a
//! deterministic function of the flags, including under `--threads`.
//!
//! Exit codes: 0 success, 1 runtime error, 2 argument error, 3 a
//! verification subcommand found a bound violation.

// NaN must fail range validations, hence the negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jlsketch::bounds::{required_dim, sparse_jl_params, DimTarget};
use jlsketch::factorize::FactorizerState;
use jlsketch::formats;
use jlsketch::linalg::Matrix;
use jlsketch::samplers::{bernstein_margin, beta_central_moment, BetaParams, DistributionSpec};
use jlsketch::seed::Seed;
use jlsketch::sketch::{build_sketch, SketchKind, SketchSpec};
use jlsketch::verify::{
    eta_moment_exact, hw_empirical_tail, hw_exact_enumeration, jl_failure_rate,
    random_symmetric_zero_diag, ExperimentReport, XSource,
};

/// Default constants for the sparse construction's dimension formulas,
/// calibrated so the default run meets its failure budget (the analysis
/// fixes only the scalings).
const DEFAULT_SPARSE_CM: f64 = 8.0;
const DEFAULT_SPARSE_CS: f64 = 2.0;

#[derive(Parser)]
#[command(
    name = "jlsketch",
    version,
    about = "Random-projection sketches, explicit tail bounds, and Monte Carlo verification"
)]
struct Cli {
    /// Worker threads for parallel subcommands; 0 uses all cores. Outputs
    /// are byte-identical for every thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Gaussian,
    BinaryCoin,
    Spherical,
    SparseJl,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Spherical,
    ScaledCube,
    Gaussian,
    SHot,
    Rademacher,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKindArg {
    UnitNorm,
    Gaussian,
    FactorCompact,
    FactorFinite,
}

#[derive(Clone, Copy, ValueEnum)]
enum XSourceArg {
    Basis,
    RandomUnit,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct ReportOut {
    /// Append the report to this CSV file instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for printed reports.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sketch and save it in the JLM1 binary format.
    Gen {
        #[arg(long, value_enum)]
        construction: ConstructionArg,
        /// Target (projected) dimension.
        #[arg(long)]
        m: usize,
        /// Source dimension (number of columns).
        #[arg(long)]
        n: usize,
        /// Nonzeros per column (sparse-jl only; default ceil(m/2)).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Project vectors from a CSV file through a saved sketch.
    Apply {
        /// Sketch or matrix file (JLM1).
        #[arg(long)]
        sketch: PathBuf,
        /// Input vectors, one comma-separated row per line.
        #[arg(long)]
        input: PathBuf,
        /// Output CSV (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the projection failure rate P(distortion > eps) over fresh
    /// sketches; exits 3 when the confidence interval exceeds delta.
    JlVerify {
        #[arg(long, value_enum)]
        construction: ConstructionArg,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Source dimension.
        #[arg(long)]
        n: usize,
        /// Target dimension; defaults to the closed-form requirement for the
        /// construction at (eps, delta).
        #[arg(long)]
        m: Option<usize>,
        /// Sparse nonzeros per column; defaults to ceil(eps * m).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, value_enum, default_value_t = XSourceArg::RandomUnit)]
        x: XSourceArg,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Sample the quadratic form S = Σ_{i≠j} a_ij <X_i, X_j> and compare its
    /// empirical tail against the closed-form bound on a threshold grid;
    /// exits 3 if the interval's lower edge ever exceeds the bound.
    HwTail {
        #[arg(long, value_enum)]
        dist: DistArg,
        /// Vector dimension.
        #[arg(long)]
        m: usize,
        /// Number of vectors (matrix side; ignored when --matrix is given).
        #[arg(long)]
        n: usize,
        /// Coefficient matrix file (JLM1 dense); defaults to a random
        /// symmetric zero-diagonal matrix from --matrix-seed.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        matrix_seed: u64,
        /// Largest grid threshold; defaults to ten proxy standard
        /// deviations of S.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 20)]
        t_points: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Exactly enumerate the quadratic-form distribution at desk scale and
    /// compare with the bound (n <= 4 vectors, dimension m <= 2).
    HwExact {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        matrix_seed: u64,
        #[arg(long, default_value_t = 20)]
        t_points: usize,
    },
    /// Central moments of a Beta law by the two-term recurrence.
    BetaMoments {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
    },
    /// Exact moments of the overlap of two independent s-hot supports.
    EtaMoments {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        p: u32,
    },
    /// Empirical Bernstein moment condition check for a column law; exits 3
    /// on a violated moment bound.
    BernsteinCheck {
        #[arg(long, value_enum)]
        dist: DistArg,
        #[arg(long)]
        m: usize,
        /// Sparsity (s-hot only).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// The constant C in the moment bound.
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed-form required dimension for a guarantee at (eps, delta).
    Bounds {
        #[arg(long, value_enum)]
        kind: BoundKindArg,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Feature dimension (factor-compact only).
        #[arg(long)]
        d: Option<usize>,
        /// Query-set cardinality (factor-finite only).
        #[arg(long)]
        card: Option<usize>,
    },
    /// Sparse construction parameters (m, s) from the scaling formulas.
    SparseParams {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c_m: f64,
        #[arg(long, default_value_t = 1.0)]
        c_s: f64,
    },
    /// Stream feature rows into the covariance factorizer, optionally
    /// checkpointing, resuming, and checking quadratic-form ratios on a
    /// query set (exit 3 when the check fails).
    Factorize {
        /// Feature rows, one comma-separated x_t per line.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Feature dimension (required unless --resume is given).
        #[arg(long)]
        d: Option<usize>,
        /// Sketch width M.
        #[arg(long)]
        m_width: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Prior covariance file (JLM1 dense SPD); defaults to the identity.
        #[arg(long)]
        prior: Option<PathBuf>,
        /// Resume from a snapshot written by --checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Write a snapshot of the final state.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Query vectors to check (CSV); requires --eps.
        #[arg(long)]
        check_set: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Build a certified epsilon-covering of the unit sphere (d = 2 or 3).
    Net {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        /// Save the net points as a dense JLM1 matrix (one point per row).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore failure: the global pool can only be set once (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> jlsketch::Result<u8> {
    match command {
        Command::Gen {
            construction,
            m,
            n,
            s,
            seed,
            out,
        } => {
            let spec = sketch_spec(construction, m, n, s, None, Seed(seed))?;
            let sketch = build_sketch(&spec)?;
            formats::write_sketch_file(&out, &sketch)?;
            println!(
                "wrote {} sketch {}x{} (seed {}) to {}",
                spec.kind.name(),
                m,
                n,
                seed,
                out.display()
            );
            Ok(0)
        }
        Command::Apply { sketch, input, out } => {
            let storage = formats::read_matrix_file(&sketch)?.into_storage();
            let vectors = formats::read_vectors_csv(&input)?;
            let mut projected = Vec::with_capacity(vectors.len());
            for v in &vectors {
                projected.push(storage.apply(v)?);
            }
            match out {
                Some(path) => formats::write_vectors_csv(&path, &projected)?,
                None => {
                    for p in &projected {
                        let line = p
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",");
                        println!("{line}");
                    }
                }
            }
            Ok(0)
        }
        Command::JlVerify {
            construction,
            eps,
            delta,
            n,
            m,
            s,
            x,
            trials,
            seed,
            report,
        } => {
            validate_eps_delta(eps, delta)?;
            let mut s = s;
            let m = match m {
                Some(m) => m,
                None => {
                    if matches!(construction, ConstructionArg::SparseJl) && s.is_none() {
                        let (dm, ds) =
                            sparse_jl_params(eps, delta, DEFAULT_SPARSE_CM, DEFAULT_SPARSE_CS)?;
                        s = Some(ds);
                        dm
                    } else {
                        default_m(construction, eps, delta)?
                    }
                }
            };
            let spec = sketch_spec(construction, m, n, s, Some(eps), Seed(seed))?;
            let source = match x {
                XSourceArg::Basis => XSource::Basis1,
                XSourceArg::RandomUnit => XSource::RandomUnit,
            };
            let mut result = jl_failure_rate(&spec, eps, trials, Seed(seed), &source)?;
            result.meta.subcommand = "jl-verify".into();
            result.meta.run_id = run_id("jl-verify", seed);
            result.meta.delta = Some(delta);
            result.bound = Some(delta);
            emit_report(&result, &report)?;
            Ok(if result.ci_high > delta { 3 } else { 0 })
        }
        Command::HwTail {
            dist,
            m,
            n,
            matrix,
            matrix_seed,
            t_max,
            t_points,
            trials,
            seed,
            report,
        } => {
            let dist = dist_spec(dist, m, None)?;
            let a = load_or_random_matrix(matrix.as_deref(), n, matrix_seed)?;
            if t_points < 1 {
                return Err(jlsketch::Error::OutOfRange("t-points must be >= 1".into()));
            }
            let t_max = match t_max {
                Some(t) => t,
                None => {
                    let k = dist.sub_gaussian_k().unwrap_or(1.0);
                    let mut off = a.clone();
                    for i in 0..off.rows() {
                        off[(i, i)] = 0.0;
                    }
                    10.0 * off.frobenius_norm() * k * k * (m as f64).sqrt()
                }
            };
            if !(t_max > 0.0) {
                return Err(jlsketch::Error::OutOfRange(
                    "t-max must be positive (zero coefficient matrix?)".into(),
                ));
            }
            let grid: Vec<f64> = (1..=t_points)
                .map(|i| t_max * i as f64 / t_points as f64)
                .collect();
            let mut result = hw_empirical_tail(&dist, &a, &grid, trials, Seed(seed))?;
            result.meta.subcommand = "hw-tail".into();
            result.meta.run_id = run_id("hw-tail", seed);
            emit_report(&result, &report)?;
            let violated = result.curve.iter().any(|p| p.ci_low > p.bound);
            Ok(if violated { 3 } else { 0 })
        }
        Command::HwExact {
            m,
            n,
            matrix,
            matrix_seed,
            t_points,
        } => {
            let a = load_or_random_matrix(matrix.as_deref(), n, matrix_seed)?;
            let exact = hw_exact_enumeration(&a, m)?;
            let k = 1.0 / (m as f64).sqrt();
            let mut off = a.clone();
            for i in 0..off.rows() {
                off[(i, i)] = 0.0;
            }
            let frob = off.frobenius_norm();
            let spec_norm = off.spectral_norm(1e-10)?;
            let t_max = exact.max_abs_value() * 1.1 + 1e-12;
            println!("t,exact_tail,bound");
            let mut violated = false;
            for i in 1..=t_points.max(1) {
                let t = t_max * i as f64 / t_points.max(1) as f64;
                let tail = exact.abs_tail(t);
                let bound = jlsketch::bounds::hw_tail_bound(&jlsketch::bounds::HWInput {
                    t,
                    k,
                    m,
                    frob,
                    spec: spec_norm,
                })?;
                if tail > bound + 1e-12 {
                    violated = true;
                }
                println!("{t},{tail},{bound}");
            }
            Ok(if violated { 3 } else { 0 })
        }
        Command::BetaMoments { alpha, beta, k_max } => {
            let params = BetaParams::new(alpha, beta)?;
            println!("k,central_moment");
            for k in 0..=k_max {
                println!("{k},{}", beta_central_moment(&params, k));
            }
            Ok(0)
        }
        Command::EtaMoments { m, s, p } => {
            let report = eta_moment_exact(m, s, p)?;
            println!("moment,reference,ratio");
            println!("{},{},{}", report.moment, report.reference, report.ratio);
            Ok(0)
        }
        Command::BernsteinCheck {
            dist,
            m,
            s,
            k_max,
            trials,
            c,
            seed,
        } => {
            let dist = dist_spec(dist, m, s)?;
            let result = bernstein_margin(&dist, k_max, trials, Seed(seed), c)?;
            println!("k,empirical,ci_low,ci_high,bound,violation");
            for row in &result.rows {
                println!(
                    "{},{},{},{},{},{}",
                    row.k, row.empirical, row.ci_low, row.ci_high, row.bound, row.violation
                );
            }
            Ok(if result.has_violation() { 3 } else { 0 })
        }
        Command::Bounds {
            kind,
            eps,
            delta,
            d,
            card,
        } => {
            let target = match kind {
                BoundKindArg::UnitNorm => DimTarget::UnitNorm,
                BoundKindArg::Gaussian => DimTarget::Gaussian,
                BoundKindArg::FactorCompact => DimTarget::FactorCompact {
                    d: d.ok_or_else(|| {
                        jlsketch::Error::OutOfRange("factor-compact needs --d".into())
                    })?,
                },
                BoundKindArg::FactorFinite => DimTarget::FactorFinite {
                    card: card.ok_or_else(|| {
                        jlsketch::Error::OutOfRange("factor-finite needs --card".into())
                    })?,
                },
            };
            println!("{}", required_dim(target, eps, delta)?);
            Ok(0)
        }
        Command::SparseParams {
            eps,
            delta,
            c_m,
            c_s,
        } => {
            let (m, s) = sparse_jl_params(eps, delta, c_m, c_s)?;
            println!("{m} {s}");
            Ok(0)
        }
        Command::Factorize {
            input,
            d,
            m_width,
            sigma,
            seed,
            prior,
            resume,
            checkpoint,
            check_set,
            eps,
        } => {
            let mut state = match resume {
                Some(path) => formats::read_snapshot(&path)?,
                None => {
                    let d = d.ok_or_else(|| {
                        jlsketch::Error::OutOfRange("--d is required without --resume".into())
                    })?;
                    let m_width = m_width.ok_or_else(|| {
                        jlsketch::Error::OutOfRange("--m-width is required without --resume".into())
                    })?;
                    let prior = match prior {
                        Some(path) => match formats::read_matrix_file(&path)? {
                            formats::MatrixPayload::Dense(mat) => mat,
                            formats::MatrixPayload::Sparse { .. } => {
                                return Err(jlsketch::Error::OutOfRange(
                                    "prior must be a dense JLM1 matrix".into(),
                                ))
                            }
                        },
                        None => Matrix::identity(d),
                    };
                    FactorizerState::init(&prior, sigma, m_width, Seed(seed))?
                }
            };
            if let Some(path) = input {
                for x in formats::read_vectors_csv(&path)? {
                    state.observe(&x)?;
                }
            }
            if let Some(path) = &checkpoint {
                formats::write_snapshot(path, &state)?;
            }
            println!(
                "d={} M={} t={} sigma={} seed={}",
                state.dim(),
                state.width(),
                state.count(),
                state.sigma(),
                state.seed().0
            );
            if let Some(path) = check_set {
                let eps = eps.ok_or_else(|| {
                    jlsketch::Error::OutOfRange("--check-set requires --eps".into())
                })?;
                let queries = formats::read_vectors_csv(&path)?;
                let result = state.check_set(&queries, eps)?;
                println!(
                    "check_set pass={} eps={} worst_low={}@{} worst_high={}@{}",
                    result.pass,
                    result.eps,
                    result.worst_low.1,
                    result.worst_low.0,
                    result.worst_high.1,
                    result.worst_high.0
                );
                return Ok(if result.pass { 0 } else { 3 });
            }
            Ok(0)
        }
        Command::Net { d, eps, out } => {
            let net = jlsketch::net::epsilon_net(d, eps)?;
            println!(
                "points={} certified_radius={} budget={} within_budget={}",
                net.points.len(),
                net.certified_radius,
                net.budget,
                net.within_budget
            );
            if let Some(path) = out {
                let mut mat = Matrix::zeros(net.points.len(), d);
                for (i, p) in net.points.iter().enumerate() {
                    for j in 0..d {
                        mat[(i, j)] = p[j];
                    }
                }
                formats::write_matrix_file(&path, &mat)?;
            }
            Ok(0)
        }
    }
}

fn run_id(subcommand: &str, seed: u64) -> String {
    format!("{subcommand}-{seed:016x}")
}

fn validate_eps_delta(eps: f64, delta: f64) -> jlsketch::Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(jlsketch::Error::OutOfRange(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(jlsketch::Error::OutOfRange(format!(
            "delta must be in (0,1/2), got {delta}"
        )));
    }
    Ok(())
}

fn default_m(construction: ConstructionArg, eps: f64, delta: f64) -> jlsketch::Result<usize> {
    match construction {
        ConstructionArg::Spherical | ConstructionArg::BinaryCoin => {
            required_dim(DimTarget::UnitNorm, eps, delta)
        }
        ConstructionArg::Gaussian => required_dim(DimTarget::Gaussian, eps, delta),
        ConstructionArg::SparseJl => {
            Ok(sparse_jl_params(eps, delta, DEFAULT_SPARSE_CM, DEFAULT_SPARSE_CS)?.0)
        }
    }
}

fn sketch_spec(
    construction: ConstructionArg,
    m: usize,
    n: usize,
    s: Option<usize>,
    eps: Option<f64>,
    seed: Seed,
) -> jlsketch::Result<SketchSpec> {
    let kind = match construction {
        ConstructionArg::Gaussian => SketchKind::Gaussian,
        ConstructionArg::BinaryCoin => SketchKind::BinaryCoin,
        ConstructionArg::Spherical => SketchKind::Spherical,
        ConstructionArg::SparseJl => {
            let s = s.unwrap_or_else(|| {
                // Default to the proof's s ~ eps * m coupling, or half the
                // rows when no eps is in play.
                let s = match eps {
                    Some(e) => (e * m as f64).ceil() as usize,
                    None => m.div_ceil(2),
                };
                s.clamp(1, m.max(1))
            });
            SketchKind::SparseJl { s }
        }
    };
    let spec = SketchSpec { kind, m, n, seed };
    spec.validate()?;
    Ok(spec)
}

fn dist_spec(dist: DistArg, m: usize, s: Option<usize>) -> jlsketch::Result<DistributionSpec> {
    let spec = match dist {
        DistArg::Spherical => DistributionSpec::Spherical { m },
        DistArg::ScaledCube => DistributionSpec::ScaledCube { m },
        DistArg::Gaussian => DistributionSpec::IsotropicGaussian { m },
        DistArg::SHot => DistributionSpec::SHot {
            m,
            s: s.ok_or_else(|| jlsketch::Error::OutOfRange("s-hot needs --s".into()))?,
        },
        DistArg::Rademacher => DistributionSpec::Rademacher { m },
    };
    spec.validate()?;
    Ok(spec)
}

fn load_or_random_matrix(
    path: Option<&std::path::Path>,
    n: usize,
    matrix_seed: u64,
) -> jlsketch::Result<Matrix> {
    match path {
        Some(p) => match formats::read_matrix_file(p)? {
            formats::MatrixPayload::Dense(mat) => Ok(mat),
            formats::MatrixPayload::Sparse { .. } => Err(jlsketch::Error::OutOfRange(
                "coefficient matrix must be dense".into(),
            )),
        },
        None => {
            if n < 1 {
                return Err(jlsketch::Error::OutOfRange("n must be >= 1".into()));
            }
            Ok(random_symmetric_zero_diag(n, Seed(matrix_seed)))
        }
    }
}

fn emit_report(report: &ExperimentReport, out: &ReportOut) -> jlsketch::Result<()> {
    if let Some(path) = &out.out {
        formats::write_report_csv(path, report)?;
        return Ok(());
    }
    match out.format {
        FormatArg::Csv => {
            println!("{}", formats::REPORT_HEADER);
            for row in formats::report_csv_rows(report) {
                println!("{row}");
            }
        }
        FormatArg::Json => {
            println!("{}", report_json(report));
        }
    }
    Ok(())
}

fn report_json(report: &ExperimentReport) -> serde_json::Value {
    let meta = &report.meta;
    serde_json::json!({
        "run_id": meta.run_id,
        "subcommand": meta.subcommand,
        "construction": meta.construction,
        "m": meta.m,
        "n": meta.n,
        "s": meta.s,
        "M": meta.m_width,
        "d": meta.d,
        "T": meta.t_count,
        "eps": meta.eps,
        "delta": meta.delta,
        "trials": meta.trials,
        "seed": meta.seed,
        "failures": report.failures,
        "rate": report.rate,
        "ci_low": report.ci_low,
        "ci_high": report.ci_high,
        "bound": report.bound,
        "curve": report.curve.iter().map(|p| serde_json::json!({
            "t": p.t,
            "failures": p.failures,
            "tail": p.tail,
            "ci_low": p.ci_low,
            "ci_high": p.ci_high,
            "bound": p.bound,
        })).collect::<Vec<_>>(),
    })
}
