//! Gradient boosting for regression with squared-error loss.
//!
//! Each iteration fits a depth-bounded regression tree to the current
//! residuals on a row subsample (drawn without replacement from RNG stream
//! `t`) and adds it with shrinkage `learning_rate`.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::tree::{Presorted, Tree, TreeParams};

pub const GBM_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbmConfig {
    pub n_iters: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GbmConfig {
    fn default() -> Self {
        GbmConfig {
            n_iters: 300,
            learning_rate: 0.05,
            max_depth: 3,
            min_leaf: 3,
            subsample: 0.8,
            seed: 0,
        }
    }
}

impl GbmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Config("learning_rate must lie in (0, 1]".into()));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::Config("subsample must lie in (0, 1]".into()));
        }
        if self.min_leaf < 1 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub version: u32,
    pub config: GbmConfig,
    pub columns: Vec<String>,
    pub base: f64,
    pub trees: Vec<Tree>,
    /// Mean squared training error after the base and after each tree.
    pub train_loss: Vec<f64>,
}

fn mse(y: &[f64], f: &[f64]) -> f64 {
    y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

pub fn train_gbm(ds: &Dataset, target: &[f64], config: &GbmConfig) -> Result<GbmModel> {
    config.validate()?;
    let n = ds.n_rows();
    if n == 0 {
        return Err(Error::Empty("empty training set".into()));
    }
    if n < 2 || target.len() != n {
        return Err(Error::InvalidArgument(format!(
            "boosting needs at least 2 rows with one target each (rows {n}, targets {})",
            target.len()
        )));
    }
    let base = target.iter().sum::<f64>() / n as f64;
    let mut f = vec![base; n];
    let mut train_loss = vec![mse(target, &f)];
    let params = TreeParams {
        mtry: None,
        min_leaf: config.min_leaf,
        max_depth: Some(config.max_depth),
    };
    let k = ((config.subsample * n as f64).round() as usize).clamp(1, n);
    let full = k == n;
    let pre = Presorted::new(ds);
    let mut trees = Vec::with_capacity(config.n_iters);
    let mut resid = vec![0.0; n];
    for t in 0..config.n_iters {
        for i in 0..n {
            resid[i] = target[i] - f[i];
        }
        let mut rng = stream_rng(config.seed, t as u64);
        let rows: Vec<usize> = if full {
            (0..n).collect()
        } else {
            let mut r = sample(&mut rng, n, k).into_vec();
            r.sort_unstable();
            r
        };
        let tree = Tree::fit_presorted(ds, &pre, &resid, &rows, &params, &mut rng);
        if full && tree.is_leaf_only() {
            // No split improves the fit; every later tree would be the same.
            break;
        }
        let next: Vec<f64> = (0..n)
            .map(|i| f[i] + config.learning_rate * tree.predict_ds(ds, i))
            .collect();
        let loss = mse(target, &next);
        if full && loss > *train_loss.last().unwrap() {
            break;
        }
        f = next;
        train_loss.push(loss);
        trees.push(tree);
    }
    Ok(GbmModel {
        version: GBM_FORMAT_VERSION,
        config: *config,
        columns: ds.columns().to_vec(),
        base,
        trees,
        train_loss,
    })
}

impl GbmModel {
    /// Prediction for a row given as parallel name/value lists.
    pub fn predict(&self, names: &[String], values: &[f64]) -> Result<f64> {
        let row: Vec<f64> = self
            .columns
            .iter()
            .map(|c| {
                names
                    .iter()
                    .position(|n| n == c)
                    .map(|i| values[i])
                    .ok_or_else(|| Error::MissingColumn(c.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(self.predict_row(&row))
    }

    /// Prediction for a row in training column order.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base + self.config.learning_rate * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn predict_ds(&self, ds: &Dataset, i: usize) -> f64 {
        self.base + self.config.learning_rate * self.trees.iter().map(|t| t.predict_ds(ds, i)).sum::<f64>()
    }

    /// Per-tree raw leaf values for a row, before shrinkage.
    pub fn contributions(&self, row: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict_row(row)).collect()
    }

    /// Prediction after 0, 1, ..., n trees.
    pub fn staged_predict(&self, row: &[f64]) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![self.base];
        for c in self.contributions(row) {
            acc += c;
            out.push(self.base + self.config.learning_rate * acc);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<GbmModel> {
        let m: GbmModel = serde_json::from_str(s)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        if m.version != GBM_FORMAT_VERSION {
            return Err(Error::parse("gbm", format!("unsupported version {}", m.version)));
        }
        Ok(m)
    }
}

/// Root mean squared error and R² = 1 - SSE/SST. With a constant truth, R²
/// is 1 for a perfect fit and negative infinity otherwise.
pub fn rmse_r2(y_true: &[f64], y_pred: &[f64]) -> Result<(f64, f64)> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} true vs {} predicted",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::Empty("no values to score".into()));
    }
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let sse: f64 = y_true.iter().zip(y_pred).map(|(a, b)| (a - b) * (a - b)).sum();
    let sst: f64 = y_true.iter().map(|a| (a - mean) * (a - mean)).sum();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    Ok(((sse / n).sqrt(), r2))
}
