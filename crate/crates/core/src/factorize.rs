//! Streaming covariance factorization.
//!
//! Maintains, for a linear-Gaussian model with prior covariance Σ₀ and noise
//! scale σ, the posterior precision P = Σ₀⁻¹ + (1/σ²) Σ_t x_t x_tᵀ and the
//! accumulator B = Σ₀^{-1/2} Z₀ + (1/σ) Σ_t x_t z_tᵀ, from which the factor
//! A = P⁻¹ B satisfies E[A Aᵀ] = Σ = P⁻¹ when the random rows are unit
//! vectors. Rank-one precision updates are exact and O(d²); Σ and A are
//! derived on demand by Cholesky solves rather than maintained directly,
//! which avoids inverse-update drift over long streams.
//!
//! Row t of the random matrix is spherical with seed
//! `derive_seed(root, d + t)` (rows 0..d seed Z₀), so a state can be
//! checkpointed as (P, B, t, seed) and resumed bit-exactly.

use crate::linalg::{CholeskyFactor, Matrix, Vector};
use crate::samplers::sample_spherical;
use crate::seed::{derive_seed, Seed};
use crate::{Error, Result};

/// Condition-estimate cap beyond which solves are refused.
pub const CONDITION_CAP: f64 = 1e12;

/// Dimension cap for the direct whitened-operator check.
pub const COMPACT_CHECK_DIM_CAP: usize = 40;

const IDENTITY_RTOL: f64 = 1e-8;

/// Streaming state: posterior precision, factor accumulator, and the
/// observation history needed for the direct-formula identity checks.
#[derive(Debug, Clone)]
pub struct FactorizerState {
    pub(crate) d: usize,
    pub(crate) m_width: usize,
    pub(crate) sigma: f64,
    pub(crate) precision: Matrix,
    pub(crate) accumulator: Matrix,
    pub(crate) sqrt_inv_prior: Matrix,
    pub(crate) observations: Vec<Vector>,
    z0_rows: Vec<Vector>,
    z_history: Vec<Vector>,
    pub(crate) count: u64,
    pub(crate) root: Seed,
}

/// Outcome of a finite-set quadratic-form check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSetReport {
    pub pass: bool,
    pub eps: f64,
    /// (index, value) of the smallest ratio.
    pub worst_low: (usize, f64),
    /// (index, value) of the largest ratio.
    pub worst_high: (usize, f64),
}

/// Outcome of the whitened-operator check over the whole unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactCheckReport {
    pub pass: bool,
    pub eps: f64,
    /// ‖Σ^{-1/2} A Aᵀ Σ^{-1/2} - I‖₂: the worst ratio deviation over all
    /// directions.
    pub worst_deviation: f64,
}

impl FactorizerState {
    /// Initializes from an SPD prior: P = Σ₀⁻¹, B = Σ₀^{-1/2} Z₀ with Z₀'s
    /// d rows spherical in dimension `m_width` (row j seeded
    /// `derive_seed(seed, j)`), using the symmetric square root.
    pub fn init(prior: &Matrix, sigma: f64, m_width: usize, seed: Seed) -> Result<Self> {
        if !prior.is_square() {
            return Err(Error::NotSquare {
                rows: prior.rows(),
                cols: prior.cols(),
            });
        }
        if !(sigma > 0.0) {
            return Err(Error::OutOfRange(format!("sigma must be > 0, got {sigma}")));
        }
        if m_width < 1 {
            return Err(Error::OutOfRange("sketch width M must be >= 1".into()));
        }
        let d = prior.rows();
        let chol = prior.cholesky()?;
        let precision = symmetrized(&chol.inverse());
        let sqrt_inv_prior = prior.symmetric_inv_sqrt()?;
        let z0_rows: Vec<Vector> = (0..d)
            .map(|j| sample_spherical(m_width, derive_seed(seed, j as u64)))
            .collect();
        let mut accumulator = Matrix::zeros(d, m_width);
        for i in 0..d {
            for j in 0..d {
                let w = sqrt_inv_prior[(i, j)];
                if w == 0.0 {
                    continue;
                }
                for k in 0..m_width {
                    accumulator[(i, k)] += w * z0_rows[j][k];
                }
            }
        }
        Ok(FactorizerState {
            d,
            m_width,
            sigma,
            precision,
            accumulator,
            sqrt_inv_prior,
            observations: Vec::new(),
            z0_rows,
            z_history: Vec::new(),
            count: 0,
            root: seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.m_width
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn seed(&self) -> Seed {
        self.root
    }

    pub fn observations(&self) -> &[Vector] {
        &self.observations
    }

    /// Reconstructs a state from checkpointed fields, regenerating the
    /// random rows from the stored seed.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_snapshot_parts(
        d: usize,
        m_width: usize,
        sigma: f64,
        root: Seed,
        count: u64,
        precision: Matrix,
        accumulator: Matrix,
        sqrt_inv_prior: Matrix,
        observations: Vec<Vector>,
    ) -> Result<Self> {
        if precision.rows() != d
            || precision.cols() != d
            || accumulator.rows() != d
            || accumulator.cols() != m_width
            || sqrt_inv_prior.rows() != d
            || sqrt_inv_prior.cols() != d
            || observations.len() != count as usize
            || observations.iter().any(|x| x.dim() != d)
        {
            return Err(Error::DimensionMismatch(
                "snapshot fields are inconsistent".into(),
            ));
        }
        if !(sigma > 0.0) {
            return Err(Error::OutOfRange("snapshot sigma must be > 0".into()));
        }
        let z0_rows = (0..d)
            .map(|j| sample_spherical(m_width, derive_seed(root, j as u64)))
            .collect();
        let z_history = (0..count)
            .map(|t| sample_spherical(m_width, derive_seed(root, d as u64 + t)))
            .collect();
        Ok(FactorizerState {
            d,
            m_width,
            sigma,
            precision,
            accumulator,
            sqrt_inv_prior,
            observations,
            z0_rows,
            z_history,
            count,
            root,
        })
    }

    /// Absorbs one feature vector: P += (1/σ²) x xᵀ and B += (1/σ) x z_tᵀ
    /// with a fresh spherical row z_t.
    pub fn observe(&mut self, x: &Vector) -> Result<()> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "observation dim {} vs state dim {}",
                x.dim(),
                self.d
            )));
        }
        let z = sample_spherical(
            self.m_width,
            derive_seed(self.root, self.d as u64 + self.count),
        );
        self.precision
            .rank_one_update(x, 1.0 / (self.sigma * self.sigma));
        let inv_sigma = 1.0 / self.sigma;
        for i in 0..self.d {
            let xi = inv_sigma * x[i];
            if xi == 0.0 {
                continue;
            }
            for k in 0..self.m_width {
                self.accumulator[(i, k)] += xi * z[k];
            }
        }
        self.observations.push(x.clone());
        self.z_history.push(z);
        self.count += 1;
        Ok(())
    }

    fn checked_cholesky(&self) -> Result<CholeskyFactor> {
        let chol = self.precision.cholesky()?;
        let estimate = chol.condition_estimate();
        if estimate > CONDITION_CAP {
            return Err(Error::IllConditioned { estimate });
        }
        Ok(chol)
    }

    /// The factor A = P⁻¹ B (never forms P⁻¹ explicitly).
    pub fn factor(&self) -> Result<Matrix> {
        Ok(self.checked_cholesky()?.solve_matrix(&self.accumulator))
    }

    /// Posterior covariance Σ = P⁻¹, symmetrized.
    pub fn posterior_cov(&self) -> Result<Matrix> {
        let cov = self.checked_cholesky()?.inverse();
        let asym = cov.max_asymmetry();
        if asym > 1e-10 * cov.max_abs_entry().max(1.0) {
            return Err(Error::NotSymmetric { max_asym: asym });
        }
        Ok(symmetrized(&cov))
    }

    /// The quadratic-form ratio (xᵀ A Aᵀ x) / (xᵀ Σ x), with both sides
    /// cross-checked against their stacked-history identities
    /// xᵀAAᵀx = ‖Zᵀ X Σ x‖² and xᵀΣx = ‖X Σ x‖².
    pub fn quadratic_ratio(&self, x: &Vector) -> Result<f64> {
        let chol = self.checked_cholesky()?;
        let factor = chol.solve_matrix(&self.accumulator);
        self.ratio_with(&chol, &factor, x)
    }

    fn ratio_with(&self, chol: &CholeskyFactor, factor: &Matrix, x: &Vector) -> Result<f64> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "query dim {} vs state dim {}",
                x.dim(),
                self.d
            )));
        }
        let sigma_x = chol.solve(x);
        let den = x.dot(&sigma_x);
        let scale = x.norm_sq();
        if !(den > 1e-14 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::OutOfRange(format!(
                "degenerate quadratic form xᵀΣx = {den:e}"
            )));
        }

        // Numerator through the maintained factor.
        let mut num = 0.0;
        for k in 0..self.m_width {
            let mut coord = 0.0;
            for i in 0..self.d {
                coord += factor[(i, k)] * x[i];
            }
            num += coord * coord;
        }

        // Identity route from the stored history: Zᵀ X Σ x stacks the prior
        // rows with the per-observation rows.
        let prior_part = self.sqrt_inv_prior.matvec(&sigma_x);
        let mut w = vec![0.0f64; self.m_width];
        for j in 0..self.d {
            let c = prior_part[j];
            if c == 0.0 {
                continue;
            }
            for (acc, z) in w.iter_mut().zip(self.z0_rows[j].iter()) {
                *acc += c * z;
            }
        }
        let mut stacked_den = prior_part.norm_sq();
        for (x_t, z_t) in self.observations.iter().zip(&self.z_history) {
            let c = x_t.dot(&sigma_x) / self.sigma;
            stacked_den += c * c;
            if c == 0.0 {
                continue;
            }
            for (acc, z) in w.iter_mut().zip(z_t.iter()) {
                *acc += c * z;
            }
        }
        let stacked_num: f64 = w.iter().map(|v| v * v).sum();

        check_identity("x'AA'x vs ‖Z'XΣx‖²", num, stacked_num)?;
        check_identity("x'Σx vs ‖XΣx‖²", den, stacked_den)?;
        Ok(num / den)
    }

    /// Evaluates the ratio on every vector of `xs`; passes when all ratios
    /// lie in [1 - eps, 1 + eps].
    pub fn check_set(&self, xs: &[Vector], eps: f64) -> Result<CheckSetReport> {
        if xs.is_empty() {
            return Err(Error::OutOfRange("check set is empty".into()));
        }
        if !(eps > 0.0) {
            return Err(Error::OutOfRange(format!("eps must be > 0, got {eps}")));
        }
        let chol = self.checked_cholesky()?;
        let factor = chol.solve_matrix(&self.accumulator);
        let mut worst_low = (0usize, f64::INFINITY);
        let mut worst_high = (0usize, f64::NEG_INFINITY);
        for (i, x) in xs.iter().enumerate() {
            let ratio = self.ratio_with(&chol, &factor, x)?;
            if ratio < worst_low.1 {
                worst_low = (i, ratio);
            }
            if ratio > worst_high.1 {
                worst_high = (i, ratio);
            }
        }
        Ok(CheckSetReport {
            pass: worst_low.1 >= 1.0 - eps && worst_high.1 <= 1.0 + eps,
            eps,
            worst_low,
            worst_high,
        })
    }

    /// Checks the ratio over the entire unit sphere by whitening:
    /// sup_x |xᵀAAᵀx / xᵀΣx - 1| = ‖P^{1/2} A Aᵀ P^{1/2} - I‖₂.
    /// Direct evaluation is capped at d <= 40; larger problems should use
    /// finite query sets.
    pub fn check_compact(&self, eps: f64) -> Result<CompactCheckReport> {
        if self.d > COMPACT_CHECK_DIM_CAP {
            return Err(Error::CapExceeded(format!(
                "whitened spectral check supports d <= {COMPACT_CHECK_DIM_CAP}, got {}",
                self.d
            )));
        }
        if !(eps > 0.0) {
            return Err(Error::OutOfRange(format!("eps must be > 0, got {eps}")));
        }
        let factor = self.factor()?;
        let gram = factor.matmul(&factor.transpose());
        let half = self.precision.symmetric_sqrt()?;
        let whitened = half.matmul(&gram).matmul(&half);
        let deviation = symmetrized(&whitened)
            .sub(&Matrix::identity(self.d))
            .spectral_norm_symmetric(1e-10)?;
        Ok(CompactCheckReport {
            pass: deviation <= eps,
            eps,
            worst_deviation: deviation,
        })
    }
}

fn symmetrized(a: &Matrix) -> Matrix {
    a.add(&a.transpose()).scaled(0.5)
}

fn check_identity(context: &'static str, lhs: f64, rhs: f64) -> Result<()> {
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    if (lhs - rhs).abs() > IDENTITY_RTOL * scale {
        return Err(Error::IdentityCheck { context, lhs, rhs });
    }
    Ok(())
}
