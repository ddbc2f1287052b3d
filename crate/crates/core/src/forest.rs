//! Random forest classifier with out-of-bag error and permutation importance.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::tree::{Presorted, Tree, TreeParams};

pub const FOREST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Columns tried per split; defaults to floor(sqrt(p)).
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 500,
            mtry: None,
            min_leaf: 5,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn mtry_for(&self, p: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| ((p as f64).sqrt().floor() as usize).max(1))
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::Config("n_trees must be at least 1".into()));
        }
        let m = self.mtry_for(p);
        if m < 1 || m > p {
            return Err(Error::Config(format!("mtry {m} outside [1, {p}]")));
        }
        if self.min_leaf < 1 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub version: u32,
    pub config: ForestConfig,
    pub columns: Vec<String>,
    pub trees: Vec<Tree>,
    /// Per tree, the sorted training rows never drawn into its bootstrap.
    pub oob: Vec<Vec<usize>>,
    pub n_train_rows: usize,
}

/// Trains `n_trees` Gini trees on bootstrap samples. Tree `t` draws from RNG
/// stream `t` of the configured seed, so the result does not depend on the
/// number of worker threads.
pub fn train_forest(ds: &Dataset, target: &[bool], config: &ForestConfig) -> Result<Forest> {
    let n = ds.n_rows();
    if n < 2 || target.len() != n {
        return Err(Error::InvalidArgument(format!(
            "forest needs at least 2 rows with one target each (rows {n}, targets {})",
            target.len()
        )));
    }
    if target.iter().all(|&t| t) || target.iter().all(|&t| !t) {
        return Err(Error::DegenerateTarget);
    }
    config.validate(ds.n_cols())?;
    let y: Vec<f64> = target.iter().map(|&t| t as u8 as f64).collect();
    let params = TreeParams {
        mtry: Some(config.mtry_for(ds.n_cols())),
        min_leaf: config.min_leaf,
        max_depth: config.max_depth,
    };
    let pre = Presorted::new(ds);
    let grown: Vec<(Tree, Vec<usize>)> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(config.seed, t as u64);
            let mut in_bag = vec![false; n];
            let rows: Vec<usize> = (0..n)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    in_bag[i] = true;
                    i
                })
                .collect();
            let oob: Vec<usize> = (0..n).filter(|&i| !in_bag[i]).collect();
            (Tree::fit_presorted(ds, &pre, &y, &rows, &params, &mut rng), oob)
        })
        .collect();
    let (trees, oob) = grown.into_iter().unzip();
    Ok(Forest {
        version: FOREST_FORMAT_VERSION,
        config: *config,
        columns: ds.columns().to_vec(),
        trees,
        oob,
        n_train_rows: n,
    })
}

/// Positive-class vote of a tree's leaf fraction.
fn vote(p: f64) -> bool {
    p >= 0.5
}

impl Forest {
    /// Mean leaf positive fraction over all trees for a named row.
    pub fn predict_proba(&self, names: &[String], values: &[f64]) -> Result<f64> {
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
        Ok(self.predict_proba_row(&row))
    }

    /// Same as [`Forest::predict_proba`] for a row already in training column order.
    pub fn predict_proba_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict_proba_ds(&self, ds: &Dataset, i: usize) -> f64 {
        self.trees.iter().map(|t| t.predict_ds(ds, i)).sum::<f64>() / self.trees.len() as f64
    }

    /// Accuracy of the out-of-bag ensemble: each row is classified by the mean
    /// probability of the trees that did not see it. Rows that were in every
    /// bootstrap are skipped.
    pub fn oob_accuracy(&self, ds: &Dataset, target: &[bool]) -> f64 {
        let n = ds.n_rows();
        let mut sum = vec![0.0; n];
        let mut count = vec![0usize; n];
        for (tree, oob) in self.trees.iter().zip(&self.oob) {
            for &i in oob {
                sum[i] += tree.predict_ds(ds, i);
                count[i] += 1;
            }
        }
        let (mut correct, mut total) = (0usize, 0usize);
        for i in 0..n {
            if count[i] > 0 {
                total += 1;
                if vote(sum[i] / count[i] as f64) == target[i] {
                    correct += 1;
                }
            }
        }
        if total == 0 {
            return f64::NAN;
        }
        correct as f64 / total as f64
    }

    pub fn mean_oob_fraction(&self) -> f64 {
        let n = self.n_train_rows as f64;
        self.oob.iter().map(|o| o.len() as f64 / n).sum::<f64>() / self.oob.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("forest serializes")
    }

    pub fn from_json(s: &str) -> Result<Forest> {
        let f: Forest = serde_json::from_str(s)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        if f.version != FOREST_FORMAT_VERSION {
            return Err(Error::parse("forest", format!("unsupported version {}", f.version)));
        }
        Ok(f)
    }
}

/// Per-tree permutation importances.
#[derive(Debug, Clone, PartialEq)]
pub struct Importance {
    /// `per_tree[t][j]`: OOB error increase of tree `t` when column `j` is
    /// shuffled among its OOB rows.
    pub per_tree: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Sample standard deviation over trees.
    pub sd: Vec<f64>,
}

impl Importance {
    /// z = mean / (sd / sqrt(n_trees)); zero when the spread is zero.
    pub fn z_scores(&self) -> Vec<f64> {
        let t = self.per_tree.len() as f64;
        self.mean
            .iter()
            .zip(&self.sd)
            .map(|(&m, &s)| if s > 0.0 { m / (s / t.sqrt()) } else { 0.0 })
            .collect()
    }
}

/// Breiman permutation importance in raw error units: for each tree and
/// column, the increase in OOB misclassification rate after shuffling that
/// column within the tree's OOB rows. Tree `t` shuffles with RNG stream `t`
/// of `seed`.
pub fn permutation_importance(forest: &Forest, ds: &Dataset, target: &[bool], seed: u64) -> Importance {
    let p = ds.n_cols();
    let words = p.div_ceil(64);
    let row_major: Vec<f64> = (0..ds.n_rows()).flat_map(|i| (0..p).map(move |j| ds.get(i, j))).collect();
    let row = |i: usize| &row_major[i * p..(i + 1) * p];
    let per_tree: Vec<Vec<f64>> = forest
        .trees
        .par_iter()
        .zip(forest.oob.par_iter())
        .enumerate()
        .map(|(t, (tree, oob))| {
            let mut imp = vec![0.0; p];
            if oob.is_empty() {
                return imp;
            }
            let mut rng = stream_rng(derive_seed(seed, 0x1a7e), t as u64);
            let m = oob.len() as f64;
            // A row's prediction can only change when its path tests the
            // shuffled column, so remember which columns each path tests.
            let mut paths = vec![0u64; oob.len() * words];
            let mut wrong = vec![false; oob.len()];
            for (k, &i) in oob.iter().enumerate() {
                let mask = &mut paths[k * words..(k + 1) * words];
                let pred = tree.predict_tracing(row(i), |j| mask[j / 64] |= 1 << (j % 64));
                wrong[k] = vote(pred) != target[i];
            }
            let base = wrong.iter().filter(|&&w| w).count() as i64;
            let mut perm: Vec<usize> = oob.clone();
            let mut buf = vec![0.0; p];
            for (j, slot) in imp.iter_mut().enumerate() {
                perm.copy_from_slice(oob);
                perm.shuffle(&mut rng);
                if !tree.uses_feature(j) {
                    continue;
                }
                let mut delta = 0i64;
                for (k, &i) in oob.iter().enumerate() {
                    if paths[k * words + j / 64] & (1 << (j % 64)) == 0 {
                        continue;
                    }
                    buf.copy_from_slice(row(i));
                    buf[j] = row(perm[k])[j];
                    let now = vote(tree.predict_row(&buf)) != target[i];
                    delta += now as i64 - wrong[k] as i64;
                }
                *slot = ((base + delta) as f64 - base as f64) / m;
            }
            imp
        })
        .collect();
    let t = per_tree.len() as f64;
    let mean: Vec<f64> = (0..p)
        .map(|j| per_tree.iter().map(|v| v[j]).sum::<f64>() / t)
        .collect();
    let sd: Vec<f64> = (0..p)
        .map(|j| {
            if per_tree.len() < 2 {
                return 0.0;
            }
            let var = per_tree.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / (t - 1.0);
            var.sqrt()
        })
        .collect();
    Importance { per_tree, mean, sd }
}
