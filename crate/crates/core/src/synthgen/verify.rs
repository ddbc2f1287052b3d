//! Reconciles an extracted feature table with a generator manifest.

use serde::{Deserialize, Serialize};

use super::{GroundTruthManifest, PLANTED_COLUMNS};
use crate::error::{Error, Result};
use crate::features::FeatureTable;

/// Absolute tolerance per planted column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub columns: Vec<(String, f64)>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let t = |c: &str| -> f64 {
            match c {
                "ndd_median" | "ndd_min" | "ndd_mean" | "ndd_release" => 0.25,
                "off_hull_area_mean" => 10.0,
                "ball_path_len" => 4.0,
                "shot_clock_release" | "game_clock_release" => 0.011,
                "shot_dist" => 0.25,
                _ => 0.0,
            }
        };
        Tolerances {
            columns: PLANTED_COLUMNS.iter().map(|c| (c.to_string(), t(c))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCheck {
    pub column: String,
    pub tolerance: f64,
    pub max_abs_error: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub plays_expected: usize,
    pub plays_found: usize,
    pub predicted_drops: usize,
    pub missing: Vec<(String, i64)>,
    pub shooter_mismatches: usize,
    pub outcome_mismatches: usize,
    pub checks: Vec<FeatureCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.missing.len() == self.predicted_drops
            && self.shooter_mismatches == 0
            && self.outcome_mismatches == 0
            && self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "plays {}/{} (predicted drops {}), shooter mismatches {}, outcome mismatches {}\n",
            self.plays_found,
            self.plays_expected,
            self.predicted_drops,
            self.shooter_mismatches,
            self.outcome_mismatches
        );
        for c in &self.checks {
            s.push_str(&format!(
                "{:<20} tol {:>7.3}  max err {:>9.4}  failures {}\n",
                c.column, c.tolerance, c.max_abs_error, c.failures
            ));
        }
        s.push_str(if self.passed() { "PASS\n" } else { "FAIL\n" });
        s
    }
}

/// Compares every table row with the manifest play of the same
/// (game, event). A row without a manifest play is an error.
pub fn verify_manifest(
    manifest: &GroundTruthManifest,
    table: &FeatureTable,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let index: std::collections::HashMap<(&str, i64), usize> = manifest
        .plays
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.game_id.as_str(), p.event_id), i))
        .collect();
    let mut seen = vec![false; manifest.plays.len()];
    let mut checks: Vec<FeatureCheck> = tol
        .columns
        .iter()
        .map(|(c, t)| FeatureCheck {
            column: c.clone(),
            tolerance: *t,
            max_abs_error: 0.0,
            failures: 0,
        })
        .collect();
    let mut shooter_mismatches = 0;
    let mut outcome_mismatches = 0;
    for row in &table.rows {
        let &i = index.get(&(row.game_id.as_str(), row.event_id)).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "row for game {} event {} has no manifest play",
                row.game_id, row.event_id
            ))
        })?;
        seen[i] = true;
        let truth = &manifest.plays[i];
        shooter_mismatches += (row.shooter_id != truth.shooter_id) as usize;
        outcome_mismatches += (row.features.made != truth.made) as usize;
        for check in &mut checks {
            let want = truth
                .features
                .get(&check.column)
                .ok_or_else(|| Error::MissingColumn(check.column.clone()))?;
            let got = row
                .features
                .get(&check.column)
                .ok_or_else(|| Error::MissingColumn(check.column.clone()))?;
            let err = (got - want).abs();
            if err > check.max_abs_error {
                check.max_abs_error = err;
            }
            if !(err <= check.tolerance + 1e-9) {
                check.failures += 1;
            }
        }
    }
    let missing: Vec<(String, i64)> = manifest
        .plays
        .iter()
        .zip(&seen)
        .filter(|(_, s)| !**s)
        .map(|(p, _)| (p.game_id.clone(), p.event_id))
        .collect();
    Ok(VerificationReport {
        plays_expected: manifest.plays.len(),
        plays_found: seen.iter().filter(|s| **s).count(),
        predicted_drops: manifest.predicted_drops,
        missing,
        shooter_mismatches,
        outcome_mismatches,
        checks,
    })
}
