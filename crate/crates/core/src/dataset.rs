//! Dense numeric design matrix shared by the forest and boosting learners.

use crate::error::{Error, Result};

/// Column-major matrix of `f64` with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    n_rows: usize,
    data: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, data: Vec<Vec<f64>>) -> Result<Self> {
        if columns.len() != data.len() {
            return Err(Error::InvalidArgument(format!(
                "{} column names for {} columns",
                columns.len(),
                data.len()
            )));
        }
        let n_rows = data.first().map_or(0, Vec::len);
        if data.iter().any(|c| c.len() != n_rows) {
            return Err(Error::InvalidArgument("ragged columns".into()));
        }
        Ok(Dataset {
            columns,
            n_rows,
            data,
        })
    }

    pub fn from_rows(columns: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidArgument("row width does not match columns".into()));
        }
        let data = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Dataset::new(columns, data)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.index_of(name).map(|j| self.column(j))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col][row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data.iter().map(|c| c[i]).collect()
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if !self.columns.is_empty() && values.len() != self.n_rows {
            return Err(Error::InvalidArgument("column length mismatch".into()));
        }
        if self.columns.is_empty() {
            self.n_rows = values.len();
        }
        self.columns.push(name.into());
        self.data.push(values);
        Ok(())
    }

    pub fn select(&self, cols: &[usize]) -> Dataset {
        Dataset {
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
            n_rows: self.n_rows,
            data: cols.iter().map(|&j| self.data[j].clone()).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            n_rows: rows.len(),
            data: self
                .data
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
        }
    }

    /// Reorders a row given by name into this dataset's column order.
    pub fn align_row(&self, names: &[String], values: &[f64]) -> Result<Vec<f64>> {
        self.columns
            .iter()
            .map(|c| {
                names
                    .iter()
                    .position(|n| n == c)
                    .map(|i| values[i])
                    .ok_or_else(|| Error::MissingColumn(c.clone()))
            })
            .collect()
    }
}
