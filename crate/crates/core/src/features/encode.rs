use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::PlayerId;

use super::FeatureRow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncodeConfig {
    pub folds: u32,
    /// Pseudo-count pulling sparse shooters toward the global make rate.
    pub smoothing: f64,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            folds: 5,
            smoothing: 10.0,
        }
    }
}

/// Fold of a play, from a 64-bit FNV-1a hash of its (game, event) key so the
/// assignment does not depend on row order.
pub fn fold_of(game_id: &str, event_id: i64, folds: u32) -> u32 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in game_id.bytes().chain([0xff]).chain(event_id.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    (h % folds as u64) as u32
}

/// Fills `shooter_enc` with the shooter's make rate computed on the other
/// folds and smoothed toward the global make rate:
/// `(makes_out + m * global) / (attempts_out + m)`.
pub fn encode_shooters(rows: &mut [FeatureRow], cfg: &EncodeConfig) {
    assert!(cfg.folds >= 2, "shooter encoding needs at least two folds");
    if rows.is_empty() {
        return;
    }
    let k = cfg.folds as usize;
    let folds: Vec<usize> = rows
        .iter()
        .map(|r| fold_of(&r.game_id, r.event_id, cfg.folds) as usize)
        .collect();
    // shooter -> per-fold (makes, attempts)
    let mut counts: HashMap<PlayerId, Vec<(f64, f64)>> = HashMap::new();
    let (mut makes, mut attempts) = (0.0, 0.0);
    for (r, &f) in rows.iter().zip(&folds) {
        let entry = counts.entry(r.shooter_id).or_insert_with(|| vec![(0.0, 0.0); k]);
        let made = r.features.made as u8 as f64;
        entry[f].0 += made;
        entry[f].1 += 1.0;
        makes += made;
        attempts += 1.0;
    }
    let global = makes / attempts;
    for (r, &f) in rows.iter_mut().zip(&folds) {
        let per_fold = &counts[&r.shooter_id];
        let (m_out, a_out) = per_fold
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != f)
            .fold((0.0, 0.0), |acc, (_, c)| (acc.0 + c.0, acc.1 + c.1));
        let denom = a_out + cfg.smoothing;
        r.features.shooter_enc = if denom > 0.0 {
            (m_out + cfg.smoothing * global) / denom
        } else {
            global
        };
    }
}
