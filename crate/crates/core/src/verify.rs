//! Monte Carlo estimation of failure rates and tails, plus exact
//! small-instance enumeration.
//!
//! Trials are embarrassingly parallel: trial `i` derives all of its
//! randomness from `derive_seed(root, i)` and results are aggregated in
//! trial order, so reports are bit-identical for identical seeds no matter
//! how many worker threads run them. Confidence intervals are exact
//! Clopper-Pearson at 99% unless stated otherwise.

use rayon::prelude::*;

use crate::linalg::{Matrix, Vector};
use crate::samplers::{sample_gaussian_column, DistributionSpec, GaussianStream};
use crate::seed::{derive_seed, Seed};
use crate::sketch::{sketch_column, SketchColumn, SketchKind, SketchSpec};
use crate::{bounds, Error, Result};

/// Default confidence level for report intervals.
pub const REPORT_CONFIDENCE: f64 = 0.99;

/// Maps `f` over `0..n` in parallel, returning results in index order
/// regardless of scheduling. `chunk` trades scheduling overhead against
/// balance.
pub(crate) fn ordered_parallel_map<T, F>(n: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    assert!(chunk >= 1);
    let chunks = n.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = ((c + 1) * chunk).min(n);
            (lo..hi).map(&f).collect::<Vec<T>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Configuration echo carried by every report (empty fields stay `None`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportMeta {
    pub run_id: String,
    pub subcommand: String,
    pub construction: String,
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub s: Option<u64>,
    /// Sketch width of the factorization application (the CSV "M" column).
    pub m_width: Option<u64>,
    pub d: Option<u64>,
    /// Observation count of the factorization application (the "T" column).
    pub t_count: Option<u64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// One point of an empirical tail curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TailPoint {
    pub t: f64,
    pub failures: u64,
    /// Empirical P(|S| >= t).
    pub tail: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Closed-form bound at this t.
    pub bound: f64,
}

/// Result of a Monte Carlo experiment: failure counts with an exact
/// confidence interval, optionally with a per-threshold tail curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Summary-row bound where one applies (e.g. the target delta).
    pub bound: Option<f64>,
    pub curve: Vec<TailPoint>,
}

impl ExperimentReport {
    fn from_counts(meta: ReportMeta, failures: u64, trials: u64) -> Result<Self> {
        let (ci_low, ci_high) = binomial_ci(failures, trials, REPORT_CONFIDENCE)?;
        Ok(ExperimentReport {
            meta,
            failures,
            rate: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            bound: None,
            curve: Vec::new(),
        })
    }
}

/// Where the projected vector comes from in a failure-rate experiment.
#[derive(Debug, Clone)]
pub enum XSource {
    /// The first standard basis vector; only column 0 of each sketch is
    /// generated, which is distribution-exact because columns are
    /// independent.
    Basis1,
    /// One dense unit vector drawn from `derive_seed(seed, u64::MAX)` and
    /// held fixed across trials (the guarantee quantifies over the sketch
    /// for a fixed vector).
    RandomUnit,
    /// A caller-provided set; a trial fails if any vector in the set
    /// exceeds the distortion budget.
    Provided(Vec<Vector>),
}

impl XSource {
    pub fn name(&self) -> &'static str {
        match self {
            XSource::Basis1 => "basis",
            XSource::RandomUnit => "random-unit",
            XSource::Provided(_) => "provided",
        }
    }
}

/// Estimates P(distortion > eps) over fresh sketches, one per trial.
pub fn jl_failure_rate(
    spec: &SketchSpec,
    eps: f64,
    trials: u64,
    seed: Seed,
    source: &XSource,
) -> Result<ExperimentReport> {
    spec.validate()?;
    if trials < 100 {
        return Err(Error::OutOfRange(format!(
            "failure-rate estimation needs >= 100 trials, got {trials}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::OutOfRange(format!("eps must be > 0, got {eps}")));
    }
    let fixed_x = match source {
        XSource::Basis1 => None,
        XSource::RandomUnit => Some(vec![random_unit_vector(
            spec.n,
            derive_seed(seed, u64::MAX),
        )]),
        XSource::Provided(xs) => {
            if xs.is_empty() {
                return Err(Error::OutOfRange("provided vector set is empty".into()));
            }
            for (i, x) in xs.iter().enumerate() {
                if x.dim() != spec.n {
                    return Err(Error::DimensionMismatch(format!(
                        "provided vector {i} has dim {} but n={}",
                        x.dim(),
                        spec.n
                    )));
                }
                if x.norm_sq() == 0.0 {
                    return Err(Error::OutOfRange(format!("provided vector {i} is zero")));
                }
            }
            Some(xs.clone())
        }
    };

    let fails = ordered_parallel_map(trials, 16, |i| {
        let trial_spec = SketchSpec {
            seed: derive_seed(seed, i),
            ..*spec
        };
        match &fixed_x {
            None => {
                // Basis fast path: distortion at e_1 is |‖column 0‖² - 1|.
                let col = sketch_column(&trial_spec, 0).expect("validated spec");
                let norm_sq = match col {
                    SketchColumn::Dense(c) => c.iter().map(|v| v * v).sum::<f64>(),
                    SketchColumn::Sparse(c) => c.iter().map(|&(_, v)| v * v).sum::<f64>(),
                };
                (norm_sq - 1.0).abs() > eps
            }
            Some(xs) => {
                let sk = crate::sketch::build_sketch(&trial_spec).expect("validated spec");
                xs.iter()
                    .any(|x| sk.distortion(x).expect("nonzero x") > eps)
            }
        }
    });
    let failures = fails.iter().filter(|&&f| f).count() as u64;

    let mut meta = ReportMeta {
        construction: spec.kind.name().to_string(),
        m: Some(spec.m as u64),
        n: Some(spec.n as u64),
        eps: Some(eps),
        trials,
        seed: seed.0,
        ..Default::default()
    };
    if let SketchKind::SparseJl { s } = spec.kind {
        meta.s = Some(s as u64);
    }
    ExperimentReport::from_counts(meta, failures, trials)
}

/// Unit vector with i.i.d. Gaussian direction.
pub fn random_unit_vector(n: usize, seed: Seed) -> Vector {
    let g = sample_gaussian_column(n, seed);
    let norm = g.norm();
    if norm < 1e-150 {
        // Same measure-zero guard as the spherical sampler.
        return random_unit_vector(n, derive_seed(seed, 1));
    }
    g.scaled(1.0 / norm)
}

/// Samples S = Σ_{i≠j} a_ij <X_i, X_j> and reports the empirical tail
/// P(|S| >= t) with confidence intervals and the closed-form bound at every
/// point of `t_grid`. The diagonal of `a` is ignored (and zeroed before the
/// bound functionals are computed). The summary row reports the smallest
/// grid threshold.
pub fn hw_empirical_tail(
    dist: &DistributionSpec,
    a: &Matrix,
    t_grid: &[f64],
    trials: u64,
    seed: Seed,
) -> Result<ExperimentReport> {
    dist.validate()?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange(
            "t grid must be non-empty and strictly increasing".into(),
        ));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::OutOfRange("t grid must be non-negative".into()));
    }
    if trials < 100 {
        return Err(Error::OutOfRange(format!(
            "tail estimation needs >= 100 trials, got {trials}"
        )));
    }
    let k = dist.sub_gaussian_k().ok_or_else(|| {
        Error::OutOfRange(format!(
            "{} is not mean zero; the quadratic-form tail needs mean-zero vectors",
            dist.name()
        ))
    })?;
    let n = a.rows();
    let m = dist.dim();

    let mut a_off = a.clone();
    for i in 0..n {
        a_off[(i, i)] = 0.0;
    }
    let frob = a_off.frobenius_norm();
    let spec_norm = a_off.spectral_norm(1e-10)?;

    let per_trial_counts = ordered_parallel_map(trials, 8, |i| {
        let trial_seed = derive_seed(seed, i);
        let xs: Vec<Vector> = (0..n)
            .map(|col| dist.sample(derive_seed(trial_seed, col as u64)))
            .collect();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j && a_off[(i, j)] != 0.0 {
                    s += a_off[(i, j)] * xs[i].dot(&xs[j]);
                }
            }
        }
        let abs_s = s.abs();
        t_grid
            .iter()
            .map(|&t| u64::from(abs_s >= t))
            .collect::<Vec<u64>>()
    });
    let mut counts = vec![0u64; t_grid.len()];
    for row in &per_trial_counts {
        for (acc, c) in counts.iter_mut().zip(row) {
            *acc += c;
        }
    }

    let mut curve = Vec::with_capacity(t_grid.len());
    for (idx, &t) in t_grid.iter().enumerate() {
        let failures = counts[idx];
        let (ci_low, ci_high) = binomial_ci(failures, trials, REPORT_CONFIDENCE)?;
        let bound = bounds::hw_tail_bound(&bounds::HWInput {
            t,
            k,
            m,
            frob,
            spec: spec_norm,
        })?;
        curve.push(TailPoint {
            t,
            failures,
            tail: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            bound,
        });
    }

    let meta = ReportMeta {
        construction: dist.name().to_string(),
        m: Some(m as u64),
        n: Some(n as u64),
        trials,
        seed: seed.0,
        ..Default::default()
    };
    let mut report = ExperimentReport::from_counts(meta, counts[0], trials)?;
    report.bound = Some(curve[0].bound);
    report.curve = curve;
    Ok(report)
}

/// Exact distribution of S = Σ_{i≠j} a_ij <X_i, X_j> when every X_i is
/// uniform on {±1/√m}^m, by full enumeration of all (2^m)^n sign patterns.
#[derive(Debug, Clone)]
pub struct ExactTail {
    /// Distinct values of S with multiplicities, sorted ascending.
    pub support: Vec<(f64, u64)>,
    pub total: u64,
}

impl ExactTail {
    /// Exact P(|S| >= t).
    pub fn abs_tail(&self, t: f64) -> f64 {
        let hits: u64 = self
            .support
            .iter()
            .filter(|&&(v, _)| v.abs() >= t)
            .map(|&(_, c)| c)
            .sum();
        hits as f64 / self.total as f64
    }

    pub fn max_abs_value(&self) -> f64 {
        self.support
            .iter()
            .fold(0.0f64, |acc, &(v, _)| acc.max(v.abs()))
    }

    /// Exact E[S^p] (used for symmetry checks).
    pub fn moment(&self, p: u32) -> f64 {
        self.support
            .iter()
            .map(|&(v, c)| v.powi(p as i32) * c as f64)
            .sum::<f64>()
            / self.total as f64
    }
}

/// Enumeration cap: (2^m)^n outcomes must stay at or below this.
pub const ENUMERATION_CAP: u64 = 65_536;

/// Enumerates the exact quadratic-form distribution at desk scale
/// (n <= 4 vectors of dimension m <= 2 with ±1/√m entries).
pub fn hw_exact_enumeration(a: &Matrix, m: usize) -> Result<ExactTail> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n > 4 || !(1..=2).contains(&m) {
        return Err(Error::CapExceeded(format!(
            "exact enumeration supports n <= 4, 1 <= m <= 2; got n={n}, m={m}"
        )));
    }
    let bits = n * m;
    let outcomes: u64 = 1u64 << bits;
    if outcomes > ENUMERATION_CAP {
        return Err(Error::CapExceeded(format!(
            "2^{bits} outcomes exceed cap {ENUMERATION_CAP}"
        )));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut values = Vec::with_capacity(outcomes as usize);
    let mut entries = vec![0.0f64; n * m];
    for mask in 0..outcomes {
        for (b, e) in entries.iter_mut().enumerate() {
            *e = if (mask >> b) & 1 == 1 { scale } else { -scale };
        }
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let aij = a[(i, j)];
                if aij == 0.0 {
                    continue;
                }
                let mut dot = 0.0;
                for kk in 0..m {
                    dot += entries[i * m + kk] * entries[j * m + kk];
                }
                s += aij * dot;
            }
        }
        values.push(s);
    }
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut support: Vec<(f64, u64)> = Vec::new();
    for v in values {
        match support.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => support.push((v, 1)),
        }
    }
    Ok(ExactTail {
        support,
        total: outcomes,
    })
}

/// Exact p-th moment of the support overlap of two independent uniform
/// s-hot vectors, with the ratio to the reference envelope
/// (sqrt(s²/m) sqrt(p) + p)^p recorded for constant calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaMomentReport {
    pub m: usize,
    pub s: usize,
    pub p: u32,
    pub moment: f64,
    pub reference: f64,
    pub ratio: f64,
}

/// Enumerates all pairs of s-hot supports (C(m, s)² of them) and averages
/// the p-th power of the overlap.
pub fn eta_moment_exact(m: usize, s: usize, p: u32) -> Result<EtaMomentReport> {
    if m > 10 || s > m || s < 1 {
        return Err(Error::CapExceeded(format!(
            "eta moment enumeration needs s <= m <= 10, got m={m}, s={s}"
        )));
    }
    if p > 8 {
        return Err(Error::CapExceeded(format!("p <= 8 supported, got {p}")));
    }
    let supports = combinations(m, s);
    let count = supports.len() as f64;
    let mut acc = 0.0f64;
    for si in &supports {
        for sj in &supports {
            let overlap = si.iter().filter(|x| sj.contains(x)).count() as f64;
            acc += overlap.powi(p as i32);
        }
    }
    let moment = acc / (count * count);
    let reference =
        ((s as f64 * s as f64 / m as f64).sqrt() * (p as f64).sqrt() + p as f64).powi(p as i32);
    Ok(EtaMomentReport {
        m,
        s,
        p,
        moment,
        reference,
        ratio: moment / reference,
    })
}

fn combinations(m: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(s);
    fn recurse(
        start: usize,
        m: usize,
        s: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == s {
            out.push(current.clone());
            return;
        }
        let needed = s - current.len();
        for i in start..=(m - needed) {
            current.push(i);
            recurse(i + 1, m, s, current, out);
            current.pop();
        }
    }
    recurse(0, m, s, &mut current, &mut out);
    out
}

/// Exact two-sided Clopper-Pearson interval, by bisection on the exact
/// binomial tails (each side gets (1 - confidence)/2).
pub fn binomial_ci(failures: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if failures > trials || trials == 0 {
        return Err(Error::OutOfRange(format!(
            "need failures <= trials and trials > 0, got {failures}/{trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::OutOfRange(format!(
            "confidence must be in (0,1), got {confidence}"
        )));
    }
    let half_alpha = (1.0 - confidence) / 2.0;
    let low = if failures == 0 {
        0.0
    } else {
        // P(X >= failures; p) grows in p; find where it crosses alpha/2.
        bisect(
            |p| 1.0 - binom_cdf(failures - 1, trials, p) - half_alpha,
            false,
        )
    };
    let high = if failures == trials {
        1.0
    } else {
        // P(X <= failures; p) falls in p; find where it crosses alpha/2.
        bisect(|p| binom_cdf(failures, trials, p) - half_alpha, true)
    };
    Ok((low, high))
}

/// Root of a monotone function on [0, 1]; `decreasing` states its direction.
fn bisect<F: Fn(f64) -> f64>(f: F, decreasing: bool) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        let go_right = if decreasing { v > 0.0 } else { v < 0.0 };
        if go_right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// P(X <= k) for X ~ Binomial(n, p), summing the shorter tail in log space.
fn binom_cdf(k: u64, n: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    if k >= n {
        return 1.0;
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    if k < n - k {
        // Sum i = 0..=k upward from ln C(n,0) q^n.
        let mut ln_term = n as f64 * ln_q;
        let mut lse = LogSumExp::new();
        lse.add(ln_term);
        for i in 0..k {
            ln_term += ((n - i) as f64 / (i + 1) as f64).ln() + ln_p - ln_q;
            lse.add(ln_term);
        }
        lse.value().exp().clamp(0.0, 1.0)
    } else {
        // 1 - P(X >= k+1), summing i = n down to k+1 from ln C(n,n) p^n.
        let mut ln_term = n as f64 * ln_p;
        let mut lse = LogSumExp::new();
        lse.add(ln_term);
        let mut i = n;
        while i > k + 1 {
            ln_term += (i as f64 / (n - i + 1) as f64).ln() + ln_q - ln_p;
            lse.add(ln_term);
            i -= 1;
        }
        (1.0 - lse.value().exp()).clamp(0.0, 1.0)
    }
}

/// Streaming log-sum-exp accumulator.
struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn add(&mut self, ln_x: f64) {
        if ln_x <= self.max {
            self.sum += (ln_x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - ln_x).exp() + 1.0;
            self.max = ln_x;
        }
    }

    fn value(&self) -> f64 {
        if self.max.is_infinite() {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Symmetric matrix with N(0,1) off-diagonal entries and zero diagonal,
/// generated from a seed (test instances and CLI default matrices).
pub fn random_symmetric_zero_diag(n: usize, seed: Seed) -> Matrix {
    let mut gauss = GaussianStream::new(seed);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = gauss.sample();
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Symmetric matrix with N(0,1) entries (diagonal included).
pub fn random_symmetric(n: usize, seed: Seed) -> Matrix {
    let mut a = random_symmetric_zero_diag(n, seed);
    let mut gauss = GaussianStream::new(derive_seed(seed, 1));
    for i in 0..n {
        a[(i, i)] = gauss.sample();
    }
    a
}
