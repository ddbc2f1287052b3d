//! Boruta all-relevant feature selection over the random forest.
//!
//! Each run appends one shuffled shadow copy of every live feature, trains a
//! forest, and converts permutation importances to z-scores. A feature scores
//! a hit when its z beats the best shadow. After each run, tentative features
//! whose hit counts are significantly high (or low) under a two-sided
//! binomial test with p = 0.5 and a Bonferroni correction are confirmed (or
//! rejected). Rejected features and their shadows leave later runs. When
//! fewer than five features are live, shadows cycle through the live set
//! until there are five.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest::{permutation_importance, train_forest, ForestConfig};
use crate::report::{csv_string, fmt_f64};
use crate::rng::{derive_seed, stream_rng};

/// Lower bound on shadow columns per run.
pub const MIN_SHADOWS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BorutaConfig {
    pub max_runs: usize,
    pub alpha: f64,
    /// Runs kept going after every feature is decided, so that importance
    /// distributions have at least this many samples (capped by `max_runs`).
    pub n_repeats: usize,
    pub forest: ForestConfig,
    pub seed: u64,
}

impl Default for BorutaConfig {
    fn default() -> Self {
        BorutaConfig {
            max_runs: 100,
            alpha: 0.01,
            n_repeats: 30,
            forest: ForestConfig::default(),
            seed: 0,
        }
    }
}

impl BorutaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_runs < 10 {
            return Err(Error::Config("max_runs must be at least 10".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::Config("alpha must lie in (0, 0.5)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Confirmed,
    Rejected,
    Tentative,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Confirmed => "Confirmed",
            Decision::Rejected => "Rejected",
            Decision::Tentative => "Tentative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureOutcome {
    pub name: String,
    pub decision: Decision,
    /// Hits accumulated up to the decision (or the last run if tentative).
    pub hits: u32,
    /// Runs the hit count was tested over.
    pub runs: u32,
    /// Run (1-based) at which the decision was made.
    pub decided_at: Option<u32>,
    /// z-score per executed run; `-inf` once the feature was rejected and
    /// dropped from the forest.
    pub z: Vec<f64>,
}

impl FeatureOutcome {
    pub fn median_z(&self) -> f64 {
        median(self.z.iter().copied().filter(|z| z.is_finite()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub features: Vec<FeatureOutcome>,
    pub shadow: Vec<ShadowStats>,
    pub runs: usize,
    pub alpha: f64,
}

impl ImportanceReport {
    pub fn feature(&self, name: &str) -> Option<&FeatureOutcome> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn with_decision(&self, d: Decision) -> impl Iterator<Item = &FeatureOutcome> {
        self.features.iter().filter(move |f| f.decision == d)
    }

    pub fn shadow_max_median(&self) -> f64 {
        median(self.shadow.iter().map(|s| s.max).collect())
    }
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn same_multiset(a: &[f64], b: &[f64]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()) && a.len() == b.len()
}

pub const DISTRIBUTION_HEADER: [&str; 3] = ["feature", "run", "z"];
pub const DECISION_HEADER: [&str; 5] = ["feature", "decision", "hits", "runs", "median_z"];

/// Long-format z samples: one row per feature and run, then the shadow
/// aggregates as `shadow_min`, `shadow_mean` and `shadow_max`.
pub fn importance_distribution_export(report: &ImportanceReport) -> Result<String> {
    if report.runs == 0 {
        return Err(Error::Empty("no runs".into()));
    }
    let mut rows = Vec::with_capacity((report.features.len() + 3) * report.runs);
    for f in &report.features {
        for (r, z) in f.z.iter().enumerate() {
            rows.push(vec![f.name.clone(), r.to_string(), fmt_f64(*z)]);
        }
    }
    for (name, pick) in [
        ("shadow_min", (|s: &ShadowStats| s.min) as fn(&ShadowStats) -> f64),
        ("shadow_mean", |s| s.mean),
        ("shadow_max", |s| s.max),
    ] {
        for (r, s) in report.shadow.iter().enumerate() {
            rows.push(vec![name.to_string(), r.to_string(), fmt_f64(pick(s))]);
        }
    }
    Ok(csv_string(&DISTRIBUTION_HEADER, rows))
}

pub fn decision_summary(report: &ImportanceReport) -> String {
    let rows: Vec<Vec<String>> = report
        .features
        .iter()
        .map(|f| {
            vec![
                f.name.clone(),
                f.decision.as_str().to_string(),
                f.hits.to_string(),
                f.runs.to_string(),
                fmt_f64(f.median_z()),
            ]
        })
        .collect();
    csv_string(&DECISION_HEADER, rows)
}

/// Two-sided exact binomial p-value for `hits` successes in `runs` trials at p = 0.5.
pub fn binomial_two_sided(hits: u32, runs: u32) -> f64 {
    let dist = Binomial::new(0.5, runs as u64).expect("valid binomial");
    let lower = dist.cdf(hits as u64);
    let upper = if hits == 0 { 1.0 } else { dist.sf(hits as u64 - 1) };
    (2.0 * lower.min(upper)).min(1.0)
}

/// Smallest run count at which an all-hit feature can be confirmed with
/// `live` features under test.
pub fn min_runs_to_confirm(alpha: f64, live: usize) -> u32 {
    (1..=10_000)
        .find(|&n| binomial_two_sided(n, n) < alpha / live as f64)
        .expect("alpha is positive")
}

pub fn run_boruta(ds: &Dataset, target: &[bool], config: &BorutaConfig) -> Result<ImportanceReport> {
    config.validate()?;
    let p = ds.n_cols();
    if p < 2 {
        return Err(Error::InvalidArgument("Boruta needs at least 2 features".into()));
    }
    let mut outcomes: Vec<FeatureOutcome> = ds
        .columns()
        .iter()
        .map(|c| FeatureOutcome {
            name: c.clone(),
            decision: Decision::Tentative,
            hits: 0,
            runs: 0,
            decided_at: None,
            z: Vec::new(),
        })
        .collect();
    let mut shadow = Vec::new();
    let mut runs = 0usize;
    let min_runs = config.n_repeats.min(config.max_runs);

    loop {
        let tentative = outcomes.iter().filter(|o| o.decision == Decision::Tentative).count();
        let live: Vec<usize> = (0..p)
            .filter(|&j| outcomes[j].decision != Decision::Rejected)
            .collect();
        let keep_going = (tentative > 0 && runs < config.max_runs) || runs < min_runs;
        if !keep_going || live.is_empty() {
            break;
        }
        let run = runs as u64;

        let mut run_ds = ds.select(&live);
        let mut rng = stream_rng(derive_seed(config.seed, 0xb0), run);
        let n_shadows = live.len().max(MIN_SHADOWS);
        for s in 0..n_shadows {
            let j = live[s % live.len()];
            let mut col = ds.column(j).to_vec();
            col.shuffle(&mut rng);
            assert!(same_multiset(ds.column(j), &col), "shadow is not a permutation");
            let name = match s / live.len() {
                0 => format!("shadow_{}", ds.columns()[j]),
                k => format!("shadow{}_{}", k + 1, ds.columns()[j]),
            };
            run_ds.push_column(name, col)?;
        }
        let forest_cfg = ForestConfig {
            seed: derive_seed(config.seed, 0xf0_0000 + run),
            ..config.forest
        };
        let forest = train_forest(&run_ds, target, &forest_cfg)?;
        let imp = permutation_importance(&forest, &run_ds, target, derive_seed(config.seed, 0x1_0000 + run));
        let z = imp.z_scores();
        let (real_z, shadow_z) = z.split_at(live.len());
        let mzsa = shadow_z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        shadow.push(ShadowStats {
            min: shadow_z.iter().cloned().fold(f64::INFINITY, f64::min),
            mean: shadow_z.iter().sum::<f64>() / shadow_z.len() as f64,
            max: mzsa,
        });
        runs += 1;

        for (k, o) in outcomes.iter_mut().enumerate() {
            match live.iter().position(|&j| j == k) {
                Some(pos) => {
                    o.z.push(real_z[pos]);
                    if o.decision == Decision::Tentative {
                        o.runs += 1;
                        if real_z[pos] > mzsa {
                            o.hits += 1;
                        }
                    }
                }
                None => o.z.push(f64::NEG_INFINITY),
            }
        }

        let threshold = config.alpha / tentative.max(1) as f64;
        for o in outcomes.iter_mut().filter(|o| o.decision == Decision::Tentative) {
            let pval = binomial_two_sided(o.hits, o.runs);
            if pval < threshold {
                let frac = o.hits as f64 / o.runs as f64;
                if frac > 0.5 {
                    o.decision = Decision::Confirmed;
                    o.decided_at = Some(runs as u32);
                } else if frac < 0.5 {
                    o.decision = Decision::Rejected;
                    o.decided_at = Some(runs as u32);
                }
            }
        }
        log::debug!(
            "boruta run {runs}: {} confirmed, {} rejected, {} tentative",
            outcomes.iter().filter(|o| o.decision == Decision::Confirmed).count(),
            outcomes.iter().filter(|o| o.decision == Decision::Rejected).count(),
            outcomes.iter().filter(|o| o.decision == Decision::Tentative).count(),
        );
    }

    Ok(ImportanceReport {
        features: outcomes,
        shadow,
        runs,
        alpha: config.alpha,
    })
}
