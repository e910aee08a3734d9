//! Closed-form tail bounds and required-dimension formulas.
//!
//! These are the explicit-constant bounds that drive the projection
//! guarantees: the high-dimensional Hanson-Wright inequality for quadratic
//! forms of independent sub-Gaussian vectors, its generalization to
//! entrywise-scaled vectors, upper tails for squared norms, and the
//! dimension formulas obtained by inverting them. All logarithms are
//! natural. Probabilities are clipped at 1. The quadratic-form bounds use
//! the 8√2 denominator from the optimization step of the moment-generating
//! argument, which is the conservative (provably dominating) choice.

use crate::linalg::{Matrix, Vector};
use crate::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Inputs to [`hw_tail_bound`]: threshold, sub-Gaussian constant, vector
/// dimension, and the two matrix functionals of the coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HWInput {
    /// Tail threshold t >= 0.
    pub t: f64,
    /// Largest sub-Gaussian constant among the vectors.
    pub k: f64,
    /// Dimension of each random vector.
    pub m: usize,
    /// Frobenius norm of the coefficient matrix.
    pub frob: f64,
    /// Spectral norm of the coefficient matrix.
    pub spec: f64,
}

impl HWInput {
    pub fn validate(&self) -> Result<()> {
        if self.t < 0.0 || !self.t.is_finite() {
            return Err(Error::OutOfRange(format!("t must be >= 0, got {}", self.t)));
        }
        if !(self.k > 0.0) {
            return Err(Error::OutOfRange(format!("K must be > 0, got {}", self.k)));
        }
        if self.m < 1 {
            return Err(Error::OutOfRange("m must be >= 1".into()));
        }
        if !(self.frob >= self.spec && self.spec >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "need frob >= spec >= 0, got frob={}, spec={}",
                self.frob, self.spec
            )));
        }
        Ok(())
    }
}

/// Tail bound for |Σ_{i≠j} a_ij <X_i, X_j>| with independent mean-zero
/// K-sub-Gaussian vectors in dimension m:
///
///   min(1, 2 exp(-min{ t² / (64 m K⁴ ‖A‖_F²), t / (8√2 K² ‖A‖₂) })).
///
/// Monotone non-increasing in t.
pub fn hw_tail_bound(input: &HWInput) -> Result<f64> {
    input.validate()?;
    if input.t == 0.0 {
        return Ok(1.0);
    }
    let k2 = input.k * input.k;
    let quad = input.t * input.t / (64.0 * input.m as f64 * k2 * k2 * input.frob * input.frob);
    let lin = input.t / (8.0 * SQRT_2 * k2 * input.spec);
    Ok(clip_probability(2.0 * (-quad.min(lin)).exp()))
}

/// Inputs to [`hw_gen_tail_bound`]: per-coordinate slice functionals of the
/// scaled coefficient matrices A^b_k(i,j) = a_ij b_ik b_jk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenHWInput {
    pub t: f64,
    pub k: f64,
    /// Σ_k ‖A^b_k‖_F².
    pub slice_frob_sq_sum: f64,
    /// max_k ‖A^b_k‖₂.
    pub slice_spec_max: f64,
}

impl GenHWInput {
    pub fn validate(&self) -> Result<()> {
        if self.t < 0.0 || !self.t.is_finite() {
            return Err(Error::OutOfRange(format!("t must be >= 0, got {}", self.t)));
        }
        if !(self.k > 0.0) {
            return Err(Error::OutOfRange(format!("K must be > 0, got {}", self.k)));
        }
        if self.slice_frob_sq_sum < 0.0 || self.slice_spec_max < 0.0 {
            return Err(Error::OutOfRange("slice functionals must be >= 0".into()));
        }
        Ok(())
    }
}

/// Tail bound for |Σ_{i≠j} a_ij <b_i ⊙ X_i, b_j ⊙ X_j>|:
///
///   min(1, 2 exp(-min{ t² / (64 K⁴ Σ_k ‖A^b_k‖_F²), t / (8√2 K² max_k ‖A^b_k‖₂) })).
///
/// With all-ones scaling vectors this reduces to [`hw_tail_bound`].
pub fn hw_gen_tail_bound(input: &GenHWInput) -> Result<f64> {
    input.validate()?;
    if input.t == 0.0 {
        return Ok(1.0);
    }
    let k2 = input.k * input.k;
    let quad = input.t * input.t / (64.0 * k2 * k2 * input.slice_frob_sq_sum);
    let lin = input.t / (8.0 * SQRT_2 * k2 * input.slice_spec_max);
    Ok(clip_probability(2.0 * (-quad.min(lin)).exp()))
}

fn clip_probability(p: f64) -> f64 {
    if p.is_nan() {
        0.0 // only reachable via exp(-inf) arithmetic on zero functionals
    } else {
        p.min(1.0)
    }
}

/// The two slice functionals consumed by [`hw_gen_tail_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceFunctionals {
    pub frob_sq_sum: f64,
    pub spec_max: f64,
}

/// Forms every slice A^b_k(i,j) = a_ij b_ik b_jk for k = 1..m and returns
/// Σ_k ‖A^b_k‖_F² and max_k ‖A^b_k‖₂.
pub fn build_slice_functionals(a: &Matrix, b: &[Vector]) -> Result<SliceFunctionals> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "need one scaling vector per row: {} vectors for n={n}",
            b.len()
        )));
    }
    let m = b.first().map(|v| v.dim()).unwrap_or(0);
    if m == 0 || b.iter().any(|v| v.dim() != m) {
        return Err(Error::DimensionMismatch(
            "scaling vectors must share a positive dimension".into(),
        ));
    }
    let mut frob_sq_sum = 0.0;
    let mut spec_max = 0.0f64;
    for k in 0..m {
        let mut slice = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                slice[(i, j)] = a[(i, j)] * b[i][k] * b[j][k];
            }
        }
        frob_sq_sum += slice.frobenius_norm().powi(2);
        spec_max = spec_max.max(slice.spectral_norm(1e-10)?);
    }
    Ok(SliceFunctionals {
        frob_sq_sum,
        spec_max,
    })
}

/// Slice functionals for the rank-one matrix A = scale * x xᵀ, for which
/// each slice is scale * (x ⊙ bᵏ)(x ⊙ bᵏ)ᵀ and both norms collapse to
/// |scale| * ‖x ⊙ bᵏ‖².
pub fn rank_one_slice_functionals(
    x: &Vector,
    scale: f64,
    b: &[Vector],
) -> Result<SliceFunctionals> {
    let n = x.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "need one scaling vector per entry: {} vectors for n={n}",
            b.len()
        )));
    }
    let m = b.first().map(|v| v.dim()).unwrap_or(0);
    if m == 0 || b.iter().any(|v| v.dim() != m) {
        return Err(Error::DimensionMismatch(
            "scaling vectors must share a positive dimension".into(),
        ));
    }
    let mut frob_sq_sum = 0.0;
    let mut spec_max = 0.0f64;
    for k in 0..m {
        let masked_norm_sq: f64 = (0..n).map(|i| x[i] * x[i] * b[i][k] * b[i][k]).sum();
        let norm = scale.abs() * masked_norm_sq;
        frob_sq_sum += norm * norm;
        spec_max = spec_max.max(norm);
    }
    Ok(SliceFunctionals {
        frob_sq_sum,
        spec_max,
    })
}

/// Upper tail of the squared norm of an n-dimensional sigma-sub-Gaussian
/// vector: P(‖X‖² - n σ² >= u) <= exp(-(1/8) min{u²/(n σ⁴), u/σ²}).
pub fn squared_norm_tail_bound(u: f64, n: usize, sigma: f64) -> Result<f64> {
    if !(u > 0.0) || !(sigma > 0.0) || n < 1 {
        return Err(Error::OutOfRange(format!(
            "need u > 0, sigma > 0, n >= 1; got u={u}, sigma={sigma}, n={n}"
        )));
    }
    let s2 = sigma * sigma;
    let quad = u * u / (n as f64 * s2 * s2);
    let lin = u / s2;
    Ok((-0.125 * quad.min(lin)).exp())
}

/// Upper tail of the diagonal term Σ_i x_i² (‖z_i‖² - 1) for Gaussian
/// columns z_i ~ N(0, I_m/m) and a unit vector x:
///
///   exp(-m min{ t² / (8 Σ_i x_i⁴), t / (8 max_i x_i²) }).
///
/// The caller normalizes x; t is relative to ‖x‖².
pub fn gaussian_diag_tail_bound(t: f64, x: &Vector, m: usize) -> Result<f64> {
    if !(t > 0.0) || m < 1 {
        return Err(Error::OutOfRange(format!(
            "need t > 0 and m >= 1; got t={t}, m={m}"
        )));
    }
    if (x.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfRange(format!(
            "x must be unit norm (got ‖x‖ = {})",
            x.norm()
        )));
    }
    let fourth: f64 = x.iter().map(|v| v.powi(4)).sum();
    let max_sq = x.iter().fold(0.0f64, |acc, v| acc.max(v * v));
    let quad = t * t / (8.0 * fourth);
    let lin = t / (8.0 * max_sq);
    Ok((-(m as f64) * quad.min(lin)).exp())
}

/// Which guarantee a required dimension is being computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimTarget {
    /// Unit-norm constructions (spherical, binary-coin):
    /// m >= 64 ε⁻² ln(2/δ).
    UnitNorm,
    /// Gaussian construction: m >= 8 (1 + 2√2)² ε⁻² ln(4/δ).
    Gaussian,
    /// Factorization over the unit sphere in dimension d:
    /// M >= 64 ε⁻² (d ln 9 + ln(2/δ)).
    FactorCompact { d: usize },
    /// Factorization over a finite set of given cardinality:
    /// M >= 64 ε⁻² ln(2 card / δ).
    FactorFinite { card: usize },
}

/// Smallest integer dimension satisfying the cited closed form (natural
/// logarithms, ceiling). Monotone non-increasing in both eps and delta.
pub fn required_dim(target: DimTarget, eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange(format!(
            "delta must be in (0, 1/2), got {delta}"
        )));
    }
    let inv_eps_sq = 1.0 / (eps * eps);
    let value = match target {
        DimTarget::UnitNorm => 64.0 * inv_eps_sq * (2.0 / delta).ln(),
        DimTarget::Gaussian => {
            let c = 1.0 + 2.0 * SQRT_2;
            8.0 * c * c * inv_eps_sq * (4.0 / delta).ln()
        }
        DimTarget::FactorCompact { d } => {
            if d < 1 {
                return Err(Error::OutOfRange("d must be >= 1".into()));
            }
            64.0 * inv_eps_sq * (d as f64 * 9f64.ln() + (2.0 / delta).ln())
        }
        DimTarget::FactorFinite { card } => {
            if card < 1 {
                return Err(Error::OutOfRange("cardinality must be >= 1".into()));
            }
            64.0 * inv_eps_sq * (2.0 * card as f64 / delta).ln()
        }
    };
    Ok(value.ceil() as usize)
}

/// Sparse construction parameters m = ⌈c_m ε⁻² ln(1/δ)⌉ and
/// s = min(m, ⌈c_s ε⁻¹ ln(1/δ)⌉). The absolute constants are exposed
/// because the analysis pins only the scalings.
pub fn sparse_jl_params(eps: f64, delta: f64, c_m: f64, c_s: f64) -> Result<(usize, usize)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange(format!(
            "delta must be in (0, 1/2), got {delta}"
        )));
    }
    if !(c_m > 0.0 && c_s > 0.0) {
        return Err(Error::OutOfRange("constants must be positive".into()));
    }
    let log_term = (1.0 / delta).ln();
    let m = (c_m * log_term / (eps * eps)).ceil() as usize;
    let s = ((c_s * log_term / eps).ceil() as usize).min(m).max(1);
    Ok((m, s))
}
