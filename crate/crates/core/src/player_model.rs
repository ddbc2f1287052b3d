//! Per-player aggregation, the leave-one-out boosting harness, and the
//! deviation and propensity scores.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result, Warnings};
use crate::features::{FeatureTable, FEATURE_COLUMNS, N_FEATURES};
use crate::gbm::{rmse_r2, train_gbm, GbmConfig, GbmModel};
use crate::model::PlayerId;
use crate::report::{csv_string, fmt_f64};
use crate::rng::stream_rng;

pub const MIN_ATTEMPTS: usize = 20;
pub const GAMES_INDEX_HEADER: [&str; 2] = ["game_id", "player_id"];
pub const SCORES_HEADER: [&str; 10] = [
    "player_id",
    "name",
    "attempts",
    "three_pct",
    "actual_3pa_pg",
    "predicted_3pa_pg",
    "deviation",
    "propensity",
    "model_rmse",
    "model_r2",
];
pub const METRICS_HEADER: [&str; 3] = ["player_id", "rmse", "r2"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlayerModelConfig {
    pub min_attempts: usize,
    pub test_fraction: f64,
    pub top_k: usize,
    pub gbm: GbmConfig,
}

impl Default for PlayerModelConfig {
    fn default() -> Self {
        PlayerModelConfig {
            min_attempts: MIN_ATTEMPTS,
            test_fraction: 0.2,
            top_k: 10,
            gbm: GbmConfig::default(),
        }
    }
}

/// Games in which each player appeared in the tracking data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GamesIndex {
    games: BTreeMap<PlayerId, BTreeSet<String>>,
}

impl GamesIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, game_id: &str, player: PlayerId) {
        self.games.entry(player).or_default().insert(game_id.to_string());
    }

    pub fn add_game(&mut self, game_id: &str, players: impl IntoIterator<Item = PlayerId>) {
        for p in players {
            self.insert(game_id, p);
        }
    }

    pub fn merge(&mut self, other: &GamesIndex) {
        for (p, gs) in &other.games {
            self.games.entry(*p).or_default().extend(gs.iter().cloned());
        }
    }

    pub fn games_played(&self, player: PlayerId) -> usize {
        self.games.get(&player).map_or(0, |g| g.len())
    }

    pub fn games_of(&self, player: PlayerId) -> Option<&BTreeSet<String>> {
        self.games.get(&player)
    }

    pub fn n_players(&self) -> usize {
        self.games.len()
    }

    /// Rows sorted by game id, then player id.
    pub fn to_csv_string(&self) -> String {
        let mut pairs: Vec<(&String, PlayerId)> = self
            .games
            .iter()
            .flat_map(|(p, gs)| gs.iter().map(move |g| (g, *p)))
            .collect();
        pairs.sort();
        csv_string(
            &GAMES_INDEX_HEADER,
            pairs.into_iter().map(|(g, p)| vec![g.clone(), p.to_string()]),
        )
    }

    pub fn read_csv<R: Read>(r: R) -> Result<GamesIndex> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse("games index header", e.to_string()))?
            .clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let (gi, pi) = (col("game_id")?, col("player_id")?);
        let mut index = GamesIndex::new();
        for (line, rec) in rdr.records().enumerate() {
            let loc = format!("games index line {}", line + 2);
            let rec = rec.map_err(|e| Error::parse(&loc, e.to_string()))?;
            let pid: i64 = rec
                .get(pi)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::parse(&loc, "bad player_id"))?;
            index.insert(rec.get(gi).unwrap_or(""), PlayerId(pid));
        }
        Ok(index)
    }

    pub fn read_path(path: &Path) -> Result<GamesIndex> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        GamesIndex::read_csv(f)
    }
}

/// Names of the per-player predictor columns: the mean of every play feature
/// except the shooter encoding, then the player's three-point percentage.
pub fn predictor_columns() -> Vec<&'static str> {
    FEATURE_COLUMNS
        .iter()
        .copied()
        .filter(|&c| c != "shooter_enc")
        .chain(std::iter::once("three_pct"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerAggregate {
    pub player_id: PlayerId,
    pub name: String,
    pub games_played: usize,
    pub attempts_total: usize,
    pub makes_total: usize,
    pub actual_3pa_per_game: f64,
    pub three_pct: f64,
    /// Means of the play features in [`predictor_columns`] order (without
    /// `three_pct`).
    pub feature_means: Vec<f64>,
}

impl PlayerAggregate {
    pub fn predictors(&self) -> Vec<f64> {
        let mut v = self.feature_means.clone();
        v.push(self.three_pct);
        v
    }
}

/// One aggregate per shooter with at least `min_attempts` plays, sorted by
/// player id. Players missing from the games index are credited with the
/// games they shot in.
pub fn aggregate_players(
    table: &FeatureTable,
    games: &GamesIndex,
    names: &BTreeMap<PlayerId, String>,
    min_attempts: usize,
) -> Result<(Vec<PlayerAggregate>, Warnings)> {
    if table.is_empty() {
        return Err(Error::Empty("empty feature table".into()));
    }
    let enc = FEATURE_COLUMNS.iter().position(|&c| c == "shooter_enc").expect("encoding column");
    let mut by_player: BTreeMap<PlayerId, Vec<usize>> = BTreeMap::new();
    for (i, r) in table.rows.iter().enumerate() {
        by_player.entry(r.shooter_id).or_default().push(i);
    }
    let mut warnings = Warnings::new();
    let mut out = Vec::new();
    for (pid, rows) in by_player {
        if rows.len() < min_attempts {
            warnings.push(
                "player_filtered",
                format!("player {pid}: {} attempts below minimum {min_attempts}", rows.len()),
            );
            continue;
        }
        let mut sums = [0.0; N_FEATURES];
        let mut makes = 0;
        let mut shot_games = BTreeSet::new();
        for &i in &rows {
            let r = &table.rows[i];
            for (s, v) in sums.iter_mut().zip(r.features.values()) {
                *s += v;
            }
            makes += r.features.made as usize;
            shot_games.insert(r.game_id.clone());
        }
        let mut seen = games.games_of(pid).cloned().unwrap_or_default();
        if !shot_games.is_subset(&seen) {
            warnings.push(
                "games_index_incomplete",
                format!("player {pid}: shooting games missing from the games index"),
            );
            seen.extend(shot_games);
        }
        let n = rows.len() as f64;
        let feature_means = sums
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != enc)
            .map(|(_, s)| s / n)
            .collect();
        out.push(PlayerAggregate {
            player_id: pid,
            name: names.get(&pid).cloned().unwrap_or_default(),
            games_played: seen.len(),
            attempts_total: rows.len(),
            makes_total: makes,
            actual_3pa_per_game: n / seen.len() as f64,
            three_pct: makes as f64 / n,
            feature_means,
        });
    }
    Ok((out, warnings))
}

/// Seeded shuffle into disjoint train and holdout sets, each sorted by id.
pub fn split_train_test(
    aggregates: &[PlayerAggregate],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<PlayerAggregate>, Vec<PlayerAggregate>)> {
    let n = aggregates.len();
    if n < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 players to split, have {n}")));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config("test_fraction must lie in (0, 1)".into()));
    }
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(seed, 0x5117));
    let pick = |ids: &[usize]| {
        let mut v: Vec<PlayerAggregate> = ids.iter().map(|&i| aggregates[i].clone()).collect();
        v.sort_by_key(|a| a.player_id);
        v
    };
    Ok((pick(&idx[n_test..]), pick(&idx[..n_test])))
}

pub fn deviation(actual_3pa: f64, predicted_3pa: f64) -> f64 {
    actual_3pa - predicted_3pa
}

pub fn propensity(deviation: f64, three_pct: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&three_pct) {
        return Err(Error::InvalidArgument(format!("three_pct {three_pct} outside [0, 1]")));
    }
    Ok(deviation * (three_pct * three_pct * three_pct))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerScore {
    pub player_id: PlayerId,
    pub name: String,
    pub attempts: usize,
    pub three_pct: f64,
    pub actual_3pa_per_game: f64,
    pub predicted_3pa_per_game: f64,
    pub deviation: f64,
    pub propensity: f64,
    pub model_rmse: f64,
    pub model_r2: f64,
    pub holdout: bool,
}

/// A trained model's provenance and its metrics on the holdout set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    /// Train player excluded from this model; `None` for the full-train model.
    pub left_out: Option<PlayerId>,
    pub training_ids: Vec<PlayerId>,
    pub rmse: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LooOutput {
    /// Train players first, then holdout players, each in id order.
    pub scores: Vec<PlayerScore>,
    /// One model per train player, in id order.
    pub loo_models: Vec<ModelReport>,
    pub full_model: ModelReport,
}

fn design(players: &[&PlayerAggregate]) -> Result<(Dataset, Vec<f64>)> {
    let names = predictor_columns().into_iter().map(String::from).collect();
    let rows: Vec<Vec<f64>> = players.iter().map(|p| p.predictors()).collect();
    let ds = Dataset::from_rows(names, &rows)?;
    Ok((ds, players.iter().map(|p| p.actual_3pa_per_game).collect()))
}

fn fit(players: &[&PlayerAggregate], cfg: &GbmConfig) -> Result<GbmModel> {
    let (ds, y) = design(players)?;
    train_gbm(&ds, &y, cfg)
}

fn evaluate(model: &GbmModel, holdout: &[PlayerAggregate]) -> Result<(f64, f64)> {
    let pred: Vec<f64> = holdout.iter().map(|p| model.predict_row(&p.predictors())).collect();
    let truth: Vec<f64> = holdout.iter().map(|p| p.actual_3pa_per_game).collect();
    rmse_r2(&truth, &pred)
}

fn score(p: &PlayerAggregate, predicted: f64, metrics: (f64, f64), holdout: bool) -> Result<PlayerScore> {
    let dev = deviation(p.actual_3pa_per_game, predicted);
    Ok(PlayerScore {
        player_id: p.player_id,
        name: p.name.clone(),
        attempts: p.attempts_total,
        three_pct: p.three_pct,
        actual_3pa_per_game: p.actual_3pa_per_game,
        predicted_3pa_per_game: predicted,
        deviation: dev,
        propensity: propensity(dev, p.three_pct).map_err(|e| Error::Player {
            player: p.player_id,
            source: Box::new(e),
        })?,
        model_rmse: metrics.0,
        model_r2: metrics.1,
        holdout,
    })
}

/// Trains one model per train player on the others and scores that player
/// with it; holdout players are scored by a model trained on the whole train
/// set. Every model is evaluated on the full holdout set.
pub fn loo_harness(train: &[PlayerAggregate], holdout: &[PlayerAggregate], cfg: &GbmConfig) -> Result<LooOutput> {
    if train.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "need at least 5 train players, have {}",
            train.len()
        )));
    }
    if holdout.is_empty() {
        return Err(Error::Empty("empty holdout set".into()));
    }
    let mut train: Vec<&PlayerAggregate> = train.iter().collect();
    train.sort_by_key(|p| p.player_id);

    let per_player: Vec<Result<(PlayerScore, ModelReport)>> = (0..train.len())
        .into_par_iter()
        .map(|i| {
            let me = train[i];
            let others: Vec<&PlayerAggregate> =
                train.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, p)| *p).collect();
            let wrap = |e: Error| Error::Player {
                player: me.player_id,
                source: Box::new(e),
            };
            let model = fit(&others, cfg).map_err(wrap)?;
            let metrics = evaluate(&model, holdout).map_err(wrap)?;
            let s = score(me, model.predict_row(&me.predictors()), metrics, false)?;
            Ok((
                s,
                ModelReport {
                    left_out: Some(me.player_id),
                    training_ids: others.iter().map(|p| p.player_id).collect(),
                    rmse: metrics.0,
                    r2: metrics.1,
                },
            ))
        })
        .collect();
    let mut scores = Vec::with_capacity(train.len() + holdout.len());
    let mut loo_models = Vec::with_capacity(train.len());
    for r in per_player {
        let (s, m) = r?;
        scores.push(s);
        loo_models.push(m);
    }

    let full = fit(&train, cfg)?;
    let metrics = evaluate(&full, holdout)?;
    let mut hold: Vec<&PlayerAggregate> = holdout.iter().collect();
    hold.sort_by_key(|p| p.player_id);
    for p in hold {
        scores.push(score(p, full.predict_row(&p.predictors()), metrics, true)?);
    }
    Ok(LooOutput {
        scores,
        loo_models,
        full_model: ModelReport {
            left_out: None,
            training_ids: train.iter().map(|p| p.player_id).collect(),
            rmse: metrics.0,
            r2: metrics.1,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// Descending propensity, ties by ascending player id.
    pub by_propensity: Vec<PlayerScore>,
    /// Largest positive deviations first.
    pub top_positive: Vec<PlayerScore>,
    /// Most negative deviations first.
    pub top_negative: Vec<PlayerScore>,
}

pub fn rank_players(scores: &[PlayerScore], top_k: usize) -> Ranking {
    let mut by_propensity = scores.to_vec();
    by_propensity.sort_by(|a, b| b.propensity.total_cmp(&a.propensity).then(a.player_id.cmp(&b.player_id)));
    let mut pos: Vec<PlayerScore> = scores.iter().filter(|s| s.deviation > 0.0).cloned().collect();
    pos.sort_by(|a, b| b.deviation.total_cmp(&a.deviation).then(a.player_id.cmp(&b.player_id)));
    pos.truncate(top_k);
    let mut neg: Vec<PlayerScore> = scores.iter().filter(|s| s.deviation < 0.0).cloned().collect();
    neg.sort_by(|a, b| a.deviation.total_cmp(&b.deviation).then(a.player_id.cmp(&b.player_id)));
    neg.truncate(top_k);
    Ranking {
        by_propensity,
        top_positive: pos,
        top_negative: neg,
    }
}

pub fn scores_csv(scores: &[PlayerScore]) -> String {
    csv_string(
        &SCORES_HEADER,
        scores.iter().map(|s| {
            vec![
                s.player_id.to_string(),
                s.name.clone(),
                s.attempts.to_string(),
                fmt_f64(s.three_pct),
                fmt_f64(s.actual_3pa_per_game),
                fmt_f64(s.predicted_3pa_per_game),
                fmt_f64(s.deviation),
                fmt_f64(s.propensity),
                fmt_f64(s.model_rmse),
                fmt_f64(s.model_r2),
            ]
        }),
    )
}

pub fn metrics_csv(models: &[ModelReport]) -> String {
    csv_string(
        &METRICS_HEADER,
        models.iter().map(|m| {
            vec![
                m.left_out.map_or_else(String::new, |p| p.to_string()),
                fmt_f64(m.rmse),
                fmt_f64(m.r2),
            ]
        }),
    )
}
