//! The four projection constructions and their application.
//!
//! Column `j` of a sketch is generated entirely from
//! `derive_seed(spec.seed, j)`, so columns are independent, any column can be
//! produced in isolation, and parallel generation is deterministic no matter
//! the schedule. Within a column, the entry stream and the sparse support
//! use disjoint role seeds (`derive_seed(column_seed, 0)` and
//! `derive_seed(column_seed, 1)`), which makes the sparse construction with
//! s = m coincide entrywise with the binary-coin one.

use rayon::prelude::*;

use crate::linalg::{Matrix, Vector};
use crate::samplers::{
    cube_sign_at, s_hot_support, sample_gaussian_column, sample_scaled_cube, sample_spherical,
    ColumnSampler,
};
use crate::seed::{derive_seed, Seed};
use crate::{Error, Result};

/// Default cap on `m * n` for materializing a sketch densely.
pub const DEFAULT_MATERIALIZE_CAP: usize = 100_000_000;

/// Which construction generates the columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SketchKind {
    /// Columns drawn from N(0, I_m / m).
    Gaussian,
    /// Columns of independent fair signs scaled by 1/sqrt(m).
    BinaryCoin,
    /// Columns uniform on the unit sphere.
    Spherical,
    /// Columns with exactly `s` nonzeros of magnitude 1/sqrt(s) and fair
    /// signs, support uniform over s-subsets.
    SparseJl { s: usize },
}

impl SketchKind {
    pub fn name(&self) -> &'static str {
        match self {
            SketchKind::Gaussian => "gaussian",
            SketchKind::BinaryCoin => "binary-coin",
            SketchKind::Spherical => "spherical",
            SketchKind::SparseJl { .. } => "sparse-jl",
        }
    }
}

/// Recipe for an m x n projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchSpec {
    pub kind: SketchKind,
    pub m: usize,
    pub n: usize,
    pub seed: Seed,
}

impl SketchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.n < 1 {
            return Err(Error::OutOfRange(format!(
                "sketch dims must be positive, got m={}, n={}",
                self.m, self.n
            )));
        }
        if let SketchKind::SparseJl { s } = self.kind {
            if s < 1 || s > self.m {
                return Err(Error::OutOfRange(format!(
                    "sparse sketch needs 1 <= s <= m, got s={s}, m={}",
                    self.m
                )));
            }
        }
        Ok(())
    }
}

/// One generated column.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchColumn {
    Dense(Vec<f64>),
    /// (row index, value) pairs sorted by row index.
    Sparse(Vec<(u32, f64)>),
}

/// Generates column `j` of the sketch described by `spec` without building
/// the rest (used by the basis-vector fast path in verification).
pub fn sketch_column(spec: &SketchSpec, j: usize) -> Result<SketchColumn> {
    spec.validate()?;
    if j >= spec.n {
        return Err(Error::OutOfRange(format!(
            "column {j} out of range for n={}",
            spec.n
        )));
    }
    let column_seed = derive_seed(spec.seed, j as u64);
    let entry_seed = derive_seed(column_seed, 0);
    Ok(match spec.kind {
        SketchKind::Gaussian => {
            SketchColumn::Dense(sample_gaussian_column(spec.m, entry_seed).into_vec())
        }
        SketchKind::BinaryCoin => {
            SketchColumn::Dense(sample_scaled_cube(spec.m, entry_seed).into_vec())
        }
        SketchKind::Spherical => {
            SketchColumn::Dense(sample_spherical(spec.m, entry_seed).into_vec())
        }
        SketchKind::SparseJl { s } => {
            let support_seed = derive_seed(column_seed, 1);
            let support = s_hot_support(spec.m, s, support_seed)?;
            let magnitude = 1.0 / (s as f64).sqrt();
            SketchColumn::Sparse(
                support
                    .into_iter()
                    .map(|r| (r, magnitude * cube_sign_at(entry_seed, r as u64)))
                    .collect(),
            )
        }
    })
}

/// Realized columns of a sketch.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchStorage {
    Dense {
        m: usize,
        columns: Vec<Vec<f64>>,
    },
    Sparse {
        m: usize,
        columns: Vec<Vec<(u32, f64)>>,
    },
}

impl SketchStorage {
    pub fn m(&self) -> usize {
        match self {
            SketchStorage::Dense { m, .. } | SketchStorage::Sparse { m, .. } => *m,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SketchStorage::Dense { columns, .. } => columns.len(),
            SketchStorage::Sparse { columns, .. } => columns.len(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, SketchStorage::Sparse { .. })
    }

    /// Projects `x`: dense columns by accumulation, sparse columns touching
    /// only their `s` stored entries, so the cost is O(s * nnz(x)).
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "apply: vector dim {} vs sketch n {}",
                x.dim(),
                self.n()
            )));
        }
        let mut out = vec![0.0f64; self.m()];
        match self {
            SketchStorage::Dense { columns, .. } => {
                for (j, col) in columns.iter().enumerate() {
                    let xj = x[j];
                    if xj == 0.0 {
                        continue;
                    }
                    for (o, c) in out.iter_mut().zip(col) {
                        *o += xj * c;
                    }
                }
            }
            SketchStorage::Sparse { columns, .. } => {
                for (j, col) in columns.iter().enumerate() {
                    let xj = x[j];
                    if xj == 0.0 {
                        continue;
                    }
                    for &(r, v) in col {
                        out[r as usize] += xj * v;
                    }
                }
            }
        }
        Ok(Vector::new(out))
    }
}

/// A built sketch: the recipe plus its realized columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Sketch {
    pub spec: SketchSpec,
    pub storage: SketchStorage,
}

/// Builds the sketch described by `spec`, generating columns in parallel.
pub fn build_sketch(spec: &SketchSpec) -> Result<Sketch> {
    spec.validate()?;
    let storage = match spec.kind {
        SketchKind::SparseJl { .. } => {
            let columns = (0..spec.n)
                .into_par_iter()
                .map(|j| match sketch_column(spec, j) {
                    Ok(SketchColumn::Sparse(c)) => Ok(c),
                    Ok(_) => unreachable!("sparse spec yields sparse columns"),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            SketchStorage::Sparse { m: spec.m, columns }
        }
        _ => {
            let columns = (0..spec.n)
                .into_par_iter()
                .map(|j| match sketch_column(spec, j) {
                    Ok(SketchColumn::Dense(c)) => Ok(c),
                    Ok(_) => unreachable!("dense spec yields dense columns"),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            SketchStorage::Dense { m: spec.m, columns }
        }
    };
    Ok(Sketch {
        spec: *spec,
        storage,
    })
}

/// Builds dense columns from any registered column sampler, using the same
/// per-column seed layout as the named constructions.
pub fn build_columns(sampler: &dyn ColumnSampler, n: usize, root: Seed) -> SketchStorage {
    let columns = (0..n)
        .into_par_iter()
        .map(|j| {
            let column_seed = derive_seed(root, j as u64);
            sampler
                .sample_column(derive_seed(column_seed, 0))
                .into_vec()
        })
        .collect();
    SketchStorage::Dense {
        m: sampler.dim(),
        columns,
    }
}

impl Sketch {
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.storage.apply(x)
    }

    /// Dense m x n matrix equal to the sketch's action on the standard basis.
    pub fn materialize(&self) -> Result<Matrix> {
        self.materialize_with_cap(DEFAULT_MATERIALIZE_CAP)
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<Matrix> {
        let (m, n) = (self.storage.m(), self.storage.n());
        if m.saturating_mul(n) > cap {
            return Err(Error::CapExceeded(format!(
                "materialize: {m} x {n} exceeds cap {cap}"
            )));
        }
        let mut out = Matrix::zeros(m, n);
        match &self.storage {
            SketchStorage::Dense { columns, .. } => {
                for (j, col) in columns.iter().enumerate() {
                    for (r, &v) in col.iter().enumerate() {
                        out[(r, j)] = v;
                    }
                }
            }
            SketchStorage::Sparse { columns, .. } => {
                for (j, col) in columns.iter().enumerate() {
                    for &(r, v) in col {
                        out[(r as usize, j)] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Relative squared-norm error |‖Πx‖² - ‖x‖²| / ‖x‖². A trial "fails at
    /// eps" exactly when this exceeds eps.
    pub fn distortion(&self, x: &Vector) -> Result<f64> {
        let norm_sq = x.norm_sq();
        if norm_sq == 0.0 {
            return Err(Error::OutOfRange(
                "distortion of the zero vector is undefined".into(),
            ));
        }
        let projected = self.apply(x)?.norm_sq();
        Ok((projected - norm_sq).abs() / norm_sq)
    }
}
