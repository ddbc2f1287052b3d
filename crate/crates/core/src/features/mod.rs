//! Per-play strategy features for the make/miss model.

mod encode;
mod extract;
mod table;

pub use encode::{encode_shooters, fold_of, EncodeConfig};
pub use extract::{extract_features, Extracted, TOUCH_HYSTERESIS_FT};
pub use table::{assemble_dataset, encode_table, extract_rows, FeatureConfig, FeatureRow, FeatureTable, FeatureTableBuild};

use serde::{Deserialize, Serialize};

/// Feature columns in export order (the `made` target follows them).
pub const FEATURE_COLUMNS: [&str; 20] = [
    "ndd_median",
    "ndd_min",
    "ndd_mean",
    "ndd_release",
    "off_hull_area_mean",
    "def_hull_area_mean",
    "ball_path_len",
    "ball_mean_speed",
    "touch_changes",
    "shooter_path_len",
    "shot_clock_release",
    "game_clock_release",
    "period",
    "shot_dist",
    "corner_flag",
    "height_diff_cm",
    "weight_diff_kg",
    "exp_diff_yr",
    "pos_match",
    "shooter_enc",
];

pub const N_FEATURES: usize = FEATURE_COLUMNS.len();

/// Columns whose values are counts or flags and are written as integers.
pub const INTEGER_COLUMNS: [&str; 4] = ["touch_changes", "period", "corner_flag", "pos_match"];

/// Minimum shooter-to-basket distance accepted at release, feet (three-point
/// range less one foot of tracking jitter).
pub const MIN_SHOT_DIST_FT: f64 = 19.0;

/// Strategy features of one three-point play. Distances in feet, areas in
/// square feet, clocks in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub ndd_median: f64,
    pub ndd_min: f64,
    pub ndd_mean: f64,
    pub ndd_release: f64,
    pub off_hull_area_mean: f64,
    pub def_hull_area_mean: f64,
    pub ball_path_len: f64,
    pub ball_mean_speed: f64,
    pub touch_changes: u32,
    pub shooter_path_len: f64,
    pub shot_clock_release: f64,
    pub game_clock_release: f64,
    pub period: u32,
    pub shot_dist: f64,
    pub corner_flag: bool,
    pub height_diff_cm: f64,
    pub weight_diff_kg: f64,
    pub exp_diff_yr: f64,
    pub pos_match: bool,
    /// Out-of-fold smoothed make rate of the shooter; NaN until encoded.
    pub shooter_enc: f64,
    pub made: bool,
}

impl FeatureVector {
    pub fn values(&self) -> [f64; N_FEATURES] {
        [
            self.ndd_median,
            self.ndd_min,
            self.ndd_mean,
            self.ndd_release,
            self.off_hull_area_mean,
            self.def_hull_area_mean,
            self.ball_path_len,
            self.ball_mean_speed,
            self.touch_changes as f64,
            self.shooter_path_len,
            self.shot_clock_release,
            self.game_clock_release,
            self.period as f64,
            self.shot_dist,
            self.corner_flag as u8 as f64,
            self.height_diff_cm,
            self.weight_diff_kg,
            self.exp_diff_yr,
            self.pos_match as u8 as f64,
            self.shooter_enc,
        ]
    }

    pub fn from_values(v: &[f64; N_FEATURES], made: bool) -> Self {
        FeatureVector {
            ndd_median: v[0],
            ndd_min: v[1],
            ndd_mean: v[2],
            ndd_release: v[3],
            off_hull_area_mean: v[4],
            def_hull_area_mean: v[5],
            ball_path_len: v[6],
            ball_mean_speed: v[7],
            touch_changes: v[8] as u32,
            shooter_path_len: v[9],
            shot_clock_release: v[10],
            game_clock_release: v[11],
            period: v[12] as u32,
            shot_dist: v[13],
            corner_flag: v[14] != 0.0,
            height_diff_cm: v[15],
            weight_diff_kg: v[16],
            exp_diff_yr: v[17],
            pos_match: v[18] != 0.0,
            shooter_enc: v[19],
            made,
        }
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        FEATURE_COLUMNS
            .iter()
            .position(|c| *c == column)
            .map(|i| self.values()[i])
    }

    /// Invariants every extracted play must satisfy; `ndd_max` is the largest
    /// nearest-defender distance over the window.
    pub fn violations(&self, ndd_max: f64) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.ndd_min <= self.ndd_median && self.ndd_median <= ndd_max) {
            out.push("ndd ordering violated".to_string());
        }
        let distances = [
            self.ndd_median,
            self.ndd_min,
            self.ndd_mean,
            self.ndd_release,
            self.ball_path_len,
            self.shooter_path_len,
            self.shot_dist,
        ];
        if distances.iter().any(|d| !(*d >= 0.0)) {
            out.push("negative or non-finite distance".to_string());
        }
        if self.shooter_enc.is_finite() && !(0.0..=1.0).contains(&self.shooter_enc) {
            out.push("shooter_enc outside [0, 1]".to_string());
        }
        if self.shot_dist < MIN_SHOT_DIST_FT {
            out.push(format!("shot distance {:.2} ft inside the arc", self.shot_dist));
        }
        out
    }
}
