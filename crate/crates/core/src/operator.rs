use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BasisKind;
use crate::modular_arith::PrimeContext;

/// Exact integer matrix of a linear map `Q[cols] -> Q[rows]` between free
/// modules on two canonical bases. Stored column-major and sparse; column
/// `j` is the image of the `j`-th source basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorMatrix {
    rows: BasisKind,
    cols: BasisKind,
    ell: u64,
    epsilon: u64,
    n_rows: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl OperatorMatrix {
    pub fn zeros(rows: BasisKind, cols: BasisKind, ctx: &PrimeContext) -> Self {
        Self {
            rows,
            cols,
            ell: ctx.ell(),
            epsilon: ctx.epsilon(),
            n_rows: rows.size(ctx.ell()),
            columns: vec![Vec::new(); cols.size(ctx.ell())],
        }
    }

    /// Builds from per-column `(row, value)` lists; duplicates are summed and
    /// zeros dropped.
    pub fn from_columns(
        rows: BasisKind,
        cols: BasisKind,
        ctx: &PrimeContext,
        columns: Vec<Vec<(usize, i64)>>,
    ) -> Result<Self> {
        let mut m = Self::zeros(rows, cols, ctx);
        if columns.len() != m.columns.len() {
            return Err(Error::BasisMismatch(format!(
                "{} columns supplied for basis {cols} of size {}",
                columns.len(),
                m.columns.len()
            )));
        }
        for (j, col) in columns.into_iter().enumerate() {
            let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
            for (i, v) in col {
                if i >= m.n_rows {
                    return Err(Error::BasisMismatch(format!("row {i} out of range for {rows}")));
                }
                *merged.entry(i).or_default() += v;
            }
            m.columns[j] = merged.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        Ok(m)
    }

    pub fn row_basis(&self) -> BasisKind {
        self.rows
    }

    pub fn col_basis(&self) -> BasisKind {
        self.cols
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn epsilon(&self) -> u64 {
        self.epsilon
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.columns.len())
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map(|k| self.columns[j][k].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Nonzero entries as `(row, col, value)`, sorted by row then column.
    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        let mut t: Vec<_> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
            .collect();
        t.sort_unstable();
        t
    }

    pub fn column_sums(&self) -> Vec<i64> {
        self.columns.iter().map(|c| c.iter().map(|&(_, v)| v).sum()).collect()
    }

    pub fn row_sums(&self) -> Vec<i64> {
        let mut sums = vec![0; self.n_rows];
        for col in &self.columns {
            for &(i, v) in col {
                sums[i] += v;
            }
        }
        sums
    }

    pub fn max_entry(&self) -> i64 {
        self.columns.iter().flatten().map(|&(_, v)| v).max().unwrap_or(0)
    }

    /// `self + coef * other`.
    pub fn add_scaled(&self, other: &Self, coef: i64) -> Result<Self> {
        if (self.rows, self.cols, self.ell) != (other.rows, other.cols, other.ell) {
            return Err(Error::BasisMismatch("operands live on different bases".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&(i, v)| (i, coef * v))).collect())
            .collect();
        Self::from_columns(self.rows, self.cols, &self.context(), columns)
    }

    /// Keeps the listed source columns, relabelled onto `cols`.
    pub(crate) fn select_columns(&self, cols: BasisKind, keep: &[usize]) -> Self {
        Self {
            rows: self.rows,
            cols,
            ell: self.ell,
            epsilon: self.epsilon,
            n_rows: self.n_rows,
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.n_cols()]; self.n_rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }

    /// Writes the header `# basis_rows=.. basis_cols=.. ell=.. epsilon=..`
    /// followed by one `row,col,value` line per nonzero entry.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# basis_rows={} basis_cols={} ell={} epsilon={}", self.rows, self.cols, self.ell, self.epsilon)?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i},{j},{v}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    fn context(&self) -> PrimeContext {
        PrimeContext::with_choices(self.ell, Some(self.epsilon), None).expect("matrix built from a valid context")
    }
}
