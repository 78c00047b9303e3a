//! Gaussian copula over categorical columns.
//!
//! Each column's categories partition `[0, 1]` into intervals whose widths are
//! the empirical frequencies, laid out in schema category order (for nominal
//! columns that order carries no meaning, a known limitation of the model).
//! Fitting maps each value to `Φ⁻¹` of its interval midpoint and takes the
//! Pearson correlation of those latent points. Sampling draws `z = L·g`, maps
//! each coordinate through `Φ` and picks the category whose interval holds it.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FORMAT_VERSION;
use crate::par::{self, Execution};
use crate::rng::record_stream;
use crate::schema::CategoricalSchema;
use crate::special::{inverse_normal_cdf, normal_cdf};
use crate::table::DataTable;

/// Negative eigenvalues are raised to this floor during PSD repair.
pub const EIGEN_FLOOR: f64 = 1e-10;
/// Cholesky pivots at or below this are treated as exact zeros (rank deficiency).
const PIVOT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnCdf {
    /// Upper boundary of each category's interval; the last is 1.
    pub boundaries: Vec<f64>,
    /// `Φ⁻¹` of each interval midpoint.
    pub latent: Vec<f64>,
}

impl ColumnCdf {
    /// Unobserved categories get empty intervals and are never sampled.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        let observed = counts.iter().filter(|&&c| c > 0).count();
        if observed < 2 {
            return Err(Error::input(format!(
                "copula needs at least 2 observed categories per column, found {observed}"
            )));
        }
        let mut boundaries = Vec::with_capacity(counts.len());
        let mut latent = Vec::with_capacity(counts.len());
        let mut cum = 0u64;
        for &c in counts {
            let lower = cum as f64 / total as f64;
            cum += c;
            let upper = cum as f64 / total as f64;
            boundaries.push(upper);
            latent.push(inverse_normal_cdf(0.5 * (lower + upper)).clamp(-40.0, 40.0));
        }
        // guard against rounding in the final division
        *boundaries.last_mut().expect("non-empty") = 1.0;
        Ok(ColumnCdf { boundaries, latent })
    }

    /// Category whose interval `[lower, upper)` contains `u`.
    pub fn category_for(&self, u: f64) -> usize {
        let idx = self.boundaries.partition_point(|&b| b <= u);
        if idx < self.boundaries.len() {
            idx
        } else {
            // u == 1: last non-empty interval
            let mut i = self.boundaries.len() - 1;
            while i > 0 && self.boundaries[i - 1] >= 1.0 {
                i -= 1;
            }
            i
        }
    }

    fn validate(&self, cardinality: usize) -> Result<()> {
        if self.boundaries.len() != cardinality || self.latent.len() != cardinality {
            return Err(Error::input("copula CDF length differs from the column cardinality"));
        }
        let mut prev = 0.0;
        for &b in &self.boundaries {
            if !(b >= prev && b <= 1.0) {
                return Err(Error::input("copula CDF boundaries must be non-decreasing within [0, 1]"));
            }
            prev = b;
        }
        if prev != 1.0 {
            return Err(Error::input("copula CDF must end at 1"));
        }
        Ok(())
    }
}

/// Symmetric, unit-diagonal, positive semi-definite correlation matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            values[i * dim + i] = 1.0;
        }
        CorrelationMatrix { dim, values }
    }

    /// Validates shape, symmetry and range, then applies [`nearest_psd`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(nearest_psd(CorrelationMatrix::validated(rows)?))
    }

    fn validated(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::input("correlation matrix must be square"));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        for i in 0..dim {
            for j in 0..dim {
                let v = values[i * dim + j];
                if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                    return Err(Error::input(format!("correlation entry ({i},{j}) = {v} outside [-1, 1]")));
                }
                if (v - values[j * dim + i]).abs() > 1e-12 {
                    return Err(Error::input("correlation matrix is not symmetric"));
                }
            }
        }
        Ok(CorrelationMatrix { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// Clips negative eigenvalues to [`EIGEN_FLOOR`], rebuilds the matrix and
/// rescales it back to a unit diagonal. Matrices that are already PSD are
/// only symmetrized and clamped.
pub fn nearest_psd(m: CorrelationMatrix) -> CorrelationMatrix {
    let dim = m.dim;
    let mut values = m.values;
    for i in 0..dim {
        for j in 0..i {
            let v = (0.5 * (values[i * dim + j] + values[j * dim + i])).clamp(-1.0, 1.0);
            values[i * dim + j] = v;
            values[j * dim + i] = v;
        }
        values[i * dim + i] = 1.0;
    }
    let mat = DMatrix::from_row_slice(dim, dim, &values);
    let eig = SymmetricEigen::new(mat);
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return CorrelationMatrix { dim, values };
    }
    let clipped = eig.eigenvalues.map(|l| if l < 0.0 { EIGEN_FLOOR } else { l });
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let diag: Vec<f64> = (0..dim).map(|i| rebuilt[(i, i)].sqrt()).collect();
    for i in 0..dim {
        for j in 0..dim {
            values[i * dim + j] = if i == j {
                1.0
            } else {
                (0.5 * (rebuilt[(i, j)] + rebuilt[(j, i)]) / (diag[i] * diag[j])).clamp(-1.0, 1.0)
            };
        }
    }
    CorrelationMatrix { dim, values }
}

/// Lower-triangular factor `L` with `L·Lᵀ = m`, row-major. Pivots within
/// tolerance of zero produce zero columns, so rank-deficient PSD matrices
/// (perfectly correlated columns) factor exactly.
pub fn cholesky(m: &CorrelationMatrix) -> Result<Vec<f64>> {
    let n = m.dim;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d < -PIVOT_TOLERANCE {
            return Err(Error::numeric(format!("correlation matrix is not positive semi-definite (pivot {d:e})")));
        }
        if d <= PIVOT_TOLERANCE {
            continue;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Ok(l)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CopulaModel {
    schema: Arc<CategoricalSchema>,
    cdfs: Vec<ColumnCdf>,
    correlation: CorrelationMatrix,
    factor: Vec<f64>,
}

impl CopulaModel {
    pub fn new(schema: Arc<CategoricalSchema>, cdfs: Vec<ColumnCdf>, correlation: CorrelationMatrix) -> Result<Self> {
        if cdfs.len() != schema.len() || correlation.dim() != schema.len() {
            return Err(Error::input("copula dimensions differ from the schema"));
        }
        for (i, c) in cdfs.iter().enumerate() {
            c.validate(schema.cardinality(i))?;
        }
        let factor = cholesky(&correlation)?;
        Ok(CopulaModel { schema, cdfs, correlation, factor })
    }

    pub fn schema(&self) -> &CategoricalSchema {
        &self.schema
    }

    pub fn cdfs(&self) -> &[ColumnCdf] {
        &self.cdfs
    }

    pub fn correlation(&self) -> &CorrelationMatrix {
        &self.correlation
    }

    /// Latent point of every value in a record.
    pub fn to_latent(&self, record: &[usize]) -> Vec<f64> {
        record.iter().zip(&self.cdfs).map(|(&v, c)| c.latent[v]).collect()
    }

    /// Categories for a latent vector (through `Φ` and the interval lookup).
    pub fn from_latent(&self, z: &[f64]) -> Vec<usize> {
        z.iter().zip(&self.cdfs).map(|(&x, c)| c.category_for(normal_cdf(x))).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CopulaDoc {
            format_version: FORMAT_VERSION,
            model: COPULA_TAG.to_string(),
            schema: (*self.schema).clone(),
            cdfs: self.cdfs.clone(),
            correlation: self.correlation.to_rows(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: CopulaDoc = serde_json::from_str(s)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::input(format!("unsupported format_version {}", doc.format_version)));
        }
        if doc.model != COPULA_TAG {
            return Err(Error::input(format!("expected a `{COPULA_TAG}` model, got `{}`", doc.model)));
        }
        // Stored matrices were repaired at fit time; reloading must not perturb them.
        let corr = CorrelationMatrix::validated(doc.correlation)?;
        CopulaModel::new(Arc::new(doc.schema), doc.cdfs, corr)
    }
}

pub(crate) const COPULA_TAG: &str = "gaussian_copula";

#[derive(Serialize, Deserialize)]
struct CopulaDoc {
    format_version: u32,
    model: String,
    schema: CategoricalSchema,
    cdfs: Vec<ColumnCdf>,
    correlation: Vec<Vec<f64>>,
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub fn fit_copula(data: &DataTable) -> Result<CopulaModel> {
    if data.is_empty() {
        return Err(Error::input("cannot fit a copula on an empty table"));
    }
    let schema = data.schema();
    let cdfs = (0..schema.len())
        .map(|c| {
            ColumnCdf::from_counts(&data.column_counts(c))
                .map_err(|e| Error::input(format!("column `{}`: {e}", schema.variable(c).name)))
        })
        .collect::<Result<Vec<_>>>()?;
    let latent: Vec<Vec<f64>> =
        (0..schema.len()).map(|c| data.column(c).map(|v| cdfs[c].latent[v]).collect()).collect();
    let dim = schema.len();
    let mut rows = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        rows[i][i] = 1.0;
        for j in 0..i {
            let r = pearson(&latent[i], &latent[j]);
            rows[i][j] = r;
            rows[j][i] = r;
        }
    }
    let corr = CorrelationMatrix::from_rows(rows)?;
    CopulaModel::new(data.schema_arc().clone(), cdfs, corr)
}

pub fn sample_copula(model: &CopulaModel, n_rows: usize, seed: u64) -> Result<DataTable> {
    sample_copula_with(model, n_rows, seed, Execution::default())
}

/// Record `r` draws its `d` standard normals from stream `r` of `seed`, in column order.
pub fn sample_copula_with(model: &CopulaModel, n_rows: usize, seed: u64, exec: Execution) -> Result<DataTable> {
    if n_rows == 0 {
        return Err(Error::input("n_rows must be at least 1"));
    }
    let d = model.cdfs.len();
    let l = &model.factor;
    let values = par::fill_rows(n_rows, d, exec, |r, record: &mut [usize]| {
        let mut rng = record_stream(seed, r as u64);
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for i in 0..d {
            let z: f64 = (0..=i).map(|k| l[i * d + k] * g[k]).sum();
            record[i] = model.cdfs[i].category_for(normal_cdf(z));
        }
    });
    Ok(DataTable::from_flat_unchecked(model.schema.clone(), values))
}
