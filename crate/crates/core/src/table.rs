//! Dense table of category indices.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::schema::CategoricalSchema;

/// Records stored row-major as category indices aligned with the schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataTable {
    schema: Arc<CategoricalSchema>,
    values: Vec<usize>,
    n_rows: usize,
}

impl DataTable {
    pub fn new(schema: Arc<CategoricalSchema>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let width = schema.len();
        let n_rows = rows.len();
        let mut values = Vec::with_capacity(n_rows * width);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::input(format!(
                    "record {i} has {} values, schema has {width} variables",
                    row.len()
                )));
            }
            values.extend(row);
        }
        DataTable::from_flat(schema, values)
    }

    /// Builds a table from row-major values; `values.len()` must be a multiple of the width.
    pub fn from_flat(schema: Arc<CategoricalSchema>, values: Vec<usize>) -> Result<Self> {
        let width = schema.len();
        if width == 0 {
            return Err(Error::input("schema has no variables"));
        }
        if !values.len().is_multiple_of(width) {
            return Err(Error::input("flat value count is not a multiple of the schema width"));
        }
        let cards = schema.cardinalities();
        for (k, &v) in values.iter().enumerate() {
            let col = k % width;
            if v >= cards[col] {
                return Err(Error::input(format!(
                    "record {} value {v} out of range for `{}` (cardinality {})",
                    k / width,
                    schema.variable(col).name,
                    cards[col]
                )));
            }
        }
        let n_rows = values.len() / width;
        Ok(DataTable { schema, values, n_rows })
    }

    pub(crate) fn from_flat_unchecked(schema: Arc<CategoricalSchema>, values: Vec<usize>) -> Self {
        debug_assert_eq!(values.len() % schema.len(), 0);
        let n_rows = values.len() / schema.len();
        DataTable { schema, values, n_rows }
    }

    pub fn schema(&self) -> &CategoricalSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<CategoricalSchema> {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let w = self.n_cols();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.values.chunks_exact(self.n_cols())
    }

    pub fn value(&self, row: usize, col: usize) -> usize {
        self.values[row * self.n_cols() + col]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().skip(col).step_by(self.n_cols()).copied()
    }

    pub fn as_flat(&self) -> &[usize] {
        &self.values
    }

    /// Per-category counts of one column.
    pub fn column_counts(&self, col: usize) -> Vec<u64> {
        let mut counts = vec![0u64; self.schema.cardinality(col)];
        for v in self.column(col) {
            counts[v] += 1;
        }
        counts
    }

    /// Joint counts of two columns, laid out `a`-major: `counts[va * card(b) + vb]`.
    pub fn pair_counts(&self, a: usize, b: usize) -> Vec<u64> {
        let cb = self.schema.cardinality(b);
        let mut counts = vec![0u64; self.schema.cardinality(a) * cb];
        for row in self.rows() {
            counts[row[a] * cb + row[b]] += 1;
        }
        counts
    }

    /// Returns a copy whose column `col` is permuted by `perm` (row `i` takes row `perm[i]`'s value).
    pub fn with_permuted_column(&self, col: usize, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_rows {
            return Err(Error::input("permutation length differs from row count"));
        }
        let mut values = self.values.clone();
        let w = self.n_cols();
        for (i, &src) in perm.iter().enumerate() {
            values[i * w + col] = self.values[src * w + col];
        }
        Ok(DataTable::from_flat_unchecked(self.schema.clone(), values))
    }
}
