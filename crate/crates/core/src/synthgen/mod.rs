//! Synthetic seasons with a ground-truth manifest.
//!
//! A season is planned first: schedule, player latents, and for every play a
//! shooter, planted feature values, a geometric script realising them and a
//! make/miss draw. Tracking moments are rendered from the scripts one game at
//! a time, so large seasons never sit in memory at once.

mod script;
mod verify;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::path_length;
use crate::ingest::{write_playbyplay, write_player_bio, write_tracking_file, EventMoments, TrackingGame};
use crate::model::{CourtSpec, EventType, PlayEvent, PlayerBio, PlayerId, Position, TeamId};
use crate::report::write_atomic;
use crate::rng::{derive_seed, stream_rng};

pub use script::{GapSchedule, PlayScript, EVENT_FRAMES, FRAME_MS, RELEASE_FRAME, WINDOW_FRAMES};
pub use verify::{verify_manifest, FeatureCheck, Tolerances, VerificationReport};

use script::{corner_flag, draw_script, render, Clocks, Lineup, ScriptTargets, PRE_FRAMES};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const WALL_CLOCK_ORIGIN_MS: i64 = 1_446_000_000_000;
pub const FIRST_TEAM_ID: i64 = 1_610_612_737;
pub const FIRST_PLAYER_ID: i64 = 203_000;
/// Largest offensive hull area a scripted formation is asked to reach.
pub const MAX_HULL_AREA_FT2: f64 = 1600.0;

const PLAN_TAG: u64 = 0x91a4;
const PLAYER_TAG: u64 = 0x91a5;
const JITTER_TAG: u64 = 0x91a6;

/// Log-odds of a make as a linear function of planted play features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MakeModel {
    pub intercept: f64,
    pub ndd_median: f64,
    pub off_hull_area_mean: f64,
    pub ball_path_len: f64,
    pub shot_clock_release: f64,
}

impl Default for MakeModel {
    fn default() -> Self {
        MakeModel {
            intercept: 1.2,
            ndd_median: -0.35,
            off_hull_area_mean: 0.002,
            ball_path_len: 0.0,
            shot_clock_release: 0.0,
        }
    }
}

impl MakeModel {
    pub fn logit(&self, f: &PlantedFeatures) -> f64 {
        self.intercept
            + self.ndd_median * f.ndd_median
            + self.off_hull_area_mean * f.off_hull_area_mean
            + self.ball_path_len * f.ball_path_len
            + self.shot_clock_release * f.shot_clock_release
    }

    /// Features with a non-zero weight.
    pub fn informative(&self) -> Vec<String> {
        [
            ("ndd_median", self.ndd_median),
            ("off_hull_area_mean", self.off_hull_area_mean),
            ("ball_path_len", self.ball_path_len),
            ("shot_clock_release", self.shot_clock_release),
        ]
        .iter()
        .filter(|(_, w)| *w != 0.0)
        .map(|(n, _)| n.to_string())
        .collect()
    }
}

/// Planted parameters for one player, addressed by season index
/// (`team * n_players_per_team + slot`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerOverride {
    pub player: usize,
    #[serde(default)]
    pub usage_z: Option<f64>,
    #[serde(default)]
    pub skill: Option<f64>,
    /// Multiplier on the player's chance of taking a play's shot, in (0, 1].
    #[serde(default)]
    pub suppression: Option<f64>,
    /// Usage level that drives the player's play features; defaults to
    /// `usage_z`. Setting it apart from `usage_z` plants attempts that the
    /// play context does not explain.
    #[serde(default)]
    pub profile_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_teams: usize,
    pub n_games: usize,
    pub n_players_per_team: usize,
    pub plays_per_game: usize,
    pub make_model: MakeModel,
    /// Standard deviation of per-player log-odds skill offsets.
    pub skill_sd: f64,
    /// Shot-selection weight is `exp(usage_sd * usage_z)`.
    pub usage_sd: f64,
    pub overrides: Vec<PlayerOverride>,
    pub n_noise_features: usize,
    pub jitter_ft: f64,
    pub ndd_range: [f64; 2],
    pub hull_mean: f64,
    pub hull_sd: f64,
    pub hull_range: [f64; 2],
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_teams: 6,
            n_games: 10,
            n_players_per_team: 5,
            plays_per_game: 20,
            make_model: MakeModel::default(),
            skill_sd: 0.3,
            usage_sd: 0.45,
            overrides: Vec::new(),
            n_noise_features: 6,
            jitter_ft: 0.05,
            ndd_range: [1.0, 9.5],
            hull_mean: 500.0,
            hull_sd: 200.0,
            hull_range: [150.0, 1000.0],
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn n_players(&self) -> usize {
        self.n_teams * self.n_players_per_team
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_teams < 2 {
            return bad("n_teams must be at least 2".into());
        }
        if self.n_games < 1 {
            return bad("n_games must be at least 1".into());
        }
        if self.n_players_per_team < 5 {
            return bad("n_players_per_team must be at least 5".into());
        }
        if self.plays_per_game < 1 {
            return bad("plays_per_game must be at least 1".into());
        }
        if self.plays_per_game > 200 {
            return bad("plays_per_game above 200 does not fit in four periods".into());
        }
        if !(self.skill_sd >= 0.0 && self.usage_sd >= 0.0) {
            return bad("skill_sd and usage_sd must be non-negative".into());
        }
        if !(0.0..=0.5).contains(&self.jitter_ft) {
            return bad("jitter_ft must lie in [0, 0.5]".into());
        }
        let [nlo, nhi] = self.ndd_range;
        if !(nlo >= 0.5 && nlo <= nhi && nhi <= 10.0) {
            return bad(format!("ndd_range [{nlo}, {nhi}] infeasible; must lie within [0.5, 10]"));
        }
        let [hlo, hhi] = self.hull_range;
        if !(hlo >= 50.0 && hlo <= hhi) {
            return bad(format!("hull_range [{hlo}, {hhi}] infeasible"));
        }
        if hhi > MAX_HULL_AREA_FT2 {
            return bad(format!(
                "hull area {hhi} ft^2 cannot be realised on the court (max {MAX_HULL_AREA_FT2})"
            ));
        }
        if !(self.hull_sd >= 0.0 && self.hull_mean.is_finite()) {
            return bad("hull_sd must be non-negative".into());
        }
        let coefs = [
            self.make_model.intercept,
            self.make_model.ndd_median,
            self.make_model.off_hull_area_mean,
            self.make_model.ball_path_len,
            self.make_model.shot_clock_release,
        ];
        if coefs.iter().any(|c| !c.is_finite()) {
            return bad("make-model coefficients must be finite".into());
        }
        for o in &self.overrides {
            if o.player >= self.n_players() {
                return bad(format!("override for player index {} beyond {} players", o.player, self.n_players()));
            }
            if let Some(s) = o.suppression {
                if !(s > 0.0 && s <= 1.0) {
                    return bad(format!("suppression {s} outside (0, 1]"));
                }
            }
        }
        Ok(())
    }

    pub fn player_id(&self, index: usize) -> PlayerId {
        PlayerId(FIRST_PLAYER_ID + index as i64)
    }

    pub fn team_id(&self, team: usize) -> TeamId {
        TeamId(FIRST_TEAM_ID + team as i64)
    }
}

pub const PLANTED_COLUMNS: [&str; 12] = [
    "ndd_median",
    "ndd_min",
    "ndd_mean",
    "ndd_release",
    "off_hull_area_mean",
    "ball_path_len",
    "touch_changes",
    "shot_clock_release",
    "game_clock_release",
    "period",
    "shot_dist",
    "corner_flag",
];

/// Feature values of a play's unjittered script.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedFeatures {
    pub ndd_median: f64,
    pub ndd_min: f64,
    pub ndd_mean: f64,
    pub ndd_release: f64,
    pub off_hull_area_mean: f64,
    pub ball_path_len: f64,
    pub touch_changes: u32,
    pub shot_clock_release: f64,
    pub game_clock_release: f64,
    pub period: u32,
    pub shot_dist: f64,
    pub corner_flag: bool,
}

impl PlantedFeatures {
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "ndd_median" => self.ndd_median,
            "ndd_min" => self.ndd_min,
            "ndd_mean" => self.ndd_mean,
            "ndd_release" => self.ndd_release,
            "off_hull_area_mean" => self.off_hull_area_mean,
            "ball_path_len" => self.ball_path_len,
            "touch_changes" => self.touch_changes as f64,
            "shot_clock_release" => self.shot_clock_release,
            "game_clock_release" => self.game_clock_release,
            "period" => self.period as f64,
            "shot_dist" => self.shot_dist,
            "corner_flag" => self.corner_flag as u8 as f64,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayTruth {
    pub game_id: String,
    pub event_id: i64,
    pub shooter_id: PlayerId,
    pub team_id: TeamId,
    pub defender_id: PlayerId,
    pub features: PlantedFeatures,
    pub noise: Vec<f64>,
    pub logit: f64,
    pub make_prob: f64,
    pub made: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerTruth {
    pub player_id: PlayerId,
    pub team_id: TeamId,
    pub name: String,
    pub usage_z: f64,
    pub profile_z: f64,
    pub usage_weight: f64,
    pub skill: f64,
    pub suppression: f64,
    pub games: usize,
    /// Expected attempts over the season given the shot-selection weights.
    pub expected_attempts: f64,
    /// `expected_attempts / games`.
    pub true_attempt_rate: f64,
    pub attempts: usize,
    pub makes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTruth {
    pub game_id: String,
    pub home: TeamId,
    pub away: TeamId,
    /// Team attacking the right basket in periods 1 and 2.
    pub right_first_half: TeamId,
    pub players: Vec<PlayerId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthManifest {
    pub schema_version: u32,
    pub config: SynthConfig,
    pub informative_features: Vec<String>,
    pub noise_features: Vec<String>,
    /// Plays the pipeline is expected to drop during segmentation.
    pub predicted_drops: usize,
    pub games: Vec<GameTruth>,
    pub players: Vec<PlayerTruth>,
    pub plays: Vec<PlayTruth>,
}

impl GroundTruthManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: GroundTruthManifest = serde_json::from_str(s)
            .map_err(|e| Error::parse(format!("manifest line {} column {}", e.line(), e.column()), e.to_string()))?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::parse(
                "manifest",
                format!("unsupported schema_version {}", m.schema_version),
            ));
        }
        Ok(m)
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    pub fn play(&self, game_id: &str, event_id: i64) -> Option<&PlayTruth> {
        self.plays.iter().find(|p| p.game_id == game_id && p.event_id == event_id)
    }

    pub fn player(&self, id: PlayerId) -> Option<&PlayerTruth> {
        self.players.iter().find(|p| p.player_id == id)
    }

    /// Noise feature values keyed by (game, event).
    pub fn noise_by_play(&self) -> HashMap<(String, i64), Vec<f64>> {
        self.plays
            .iter()
            .map(|p| ((p.game_id.clone(), p.event_id), p.noise.clone()))
            .collect()
    }

    pub fn three_point_attempts(&self) -> usize {
        self.plays.len()
    }
}

struct PlannedPlay {
    script: PlayScript,
    lineup: Lineup,
    clocks: Clocks,
}

/// A planned season: everything except the rendered tracking moments.
pub struct Season {
    pub manifest: GroundTruthManifest,
    pub bios: Vec<PlayerBio>,
    pub court: CourtSpec,
    plans: Vec<Vec<PlannedPlay>>,
}

pub struct SynthGame {
    pub tracking: TrackingGame,
    pub events: Vec<PlayEvent>,
}

const FIRST_NAMES: [&str; 20] = [
    "Aaron", "Bruno", "Caleb", "Dario", "Elijah", "Felix", "Gavin", "Hugo", "Ivan", "Jalen", "Kofi", "Luka",
    "Marcus", "Nikola", "Omar", "Pascal", "Quentin", "Rafael", "Stefan", "Tobias",
];
const LAST_NAMES: [&str; 30] = [
    "Abbott", "Barlow", "Castillo", "Dalton", "Ellison", "Fontaine", "Garvey", "Holloway", "Ingram", "Jarrett",
    "Kessler", "Lindqvist", "Monroe", "Navarro", "Okafor", "Prescott", "Quinlan", "Ramsey", "Sorensen", "Thibault",
    "Underwood", "Valdez", "Whitlock", "Xander", "Yardley", "Zimmer", "Ashford", "Brennan", "Crowley", "Delgado",
];

fn player_name(index: usize) -> String {
    let first = FIRST_NAMES[index % FIRST_NAMES.len()];
    let last = LAST_NAMES[(index / FIRST_NAMES.len()) % LAST_NAMES.len()];
    let cycle = index / (FIRST_NAMES.len() * LAST_NAMES.len());
    if cycle == 0 {
        format!("{first} {last}")
    } else {
        format!("{first} {last} {}", cycle + 1)
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn game_id(index: usize) -> String {
    format!("00215{:05}", index + 1)
}

struct Latent {
    z: f64,
    profile_z: f64,
    weight: f64,
    skill: f64,
    suppression: f64,
}

pub fn generate_season(config: &SynthConfig) -> Result<Season> {
    config.validate()?;
    let court = CourtSpec::nba();
    let n_players = config.n_players();
    let mut prng = stream_rng(derive_seed(config.seed, PLAYER_TAG), 0);
    let mut latents = Vec::with_capacity(n_players);
    let mut bios = Vec::with_capacity(n_players);
    let height = Normal::<f64>::new(200.0, 8.0).expect("valid normal");
    let weight = Normal::<f64>::new(100.0, 10.0).expect("valid normal");
    for p in 0..n_players {
        let z: f64 = prng.sample::<f64, _>(StandardNormal).clamp(-2.0, 2.0);
        let skill = config.skill_sd * prng.sample::<f64, _>(StandardNormal);
        let ov = config.overrides.iter().find(|o| o.player == p);
        let z = ov.and_then(|o| o.usage_z).unwrap_or(z);
        latents.push(Latent {
            z,
            profile_z: ov.and_then(|o| o.profile_z).unwrap_or(z),
            weight: (config.usage_sd * z).exp(),
            skill: ov.and_then(|o| o.skill).unwrap_or(skill),
            suppression: ov.and_then(|o| o.suppression).unwrap_or(1.0),
        });
        let pos = [Position::G, Position::F, Position::C][prng.random_range(0..3)];
        bios.push(PlayerBio {
            player_id: config.player_id(p),
            name: player_name(p),
            height_cm: height.sample(&mut prng).clamp(175.0, 225.0).round(),
            weight_kg: weight.sample(&mut prng).clamp(70.0, 140.0).round(),
            experience_yr: prng.random_range(0..16) as f64,
            position: pos,
        });
    }

    let planned: Vec<Result<(GameTruth, Vec<PlayTruth>, Vec<PlannedPlay>, Vec<(usize, f64)>)>> = (0..config.n_games)
        .into_par_iter()
        .map(|g| plan_game(config, &court, &latents, g))
        .collect();

    let mut games = Vec::with_capacity(config.n_games);
    let mut plays = Vec::new();
    let mut plans = Vec::with_capacity(config.n_games);
    let mut expected = vec![0.0; n_players];
    let mut games_played = vec![0usize; n_players];
    for r in planned {
        let (gt, pt, pp, exp) = r?;
        for (p, e) in exp {
            expected[p] += e;
        }
        for pid in &gt.players {
            games_played[(pid.0 - FIRST_PLAYER_ID) as usize] += 1;
        }
        games.push(gt);
        plays.extend(pt);
        plans.push(pp);
    }
    let mut attempts = vec![0usize; n_players];
    let mut makes = vec![0usize; n_players];
    for p in &plays {
        let idx = (p.shooter_id.0 - FIRST_PLAYER_ID) as usize;
        attempts[idx] += 1;
        makes[idx] += p.made as usize;
    }
    let players = (0..n_players)
        .map(|p| {
            let l = &latents[p];
            PlayerTruth {
                player_id: config.player_id(p),
                team_id: config.team_id(p / config.n_players_per_team),
                name: bios[p].name.clone(),
                usage_z: l.z,
                profile_z: l.profile_z,
                usage_weight: l.weight,
                skill: l.skill,
                suppression: l.suppression,
                games: games_played[p],
                expected_attempts: expected[p],
                true_attempt_rate: if games_played[p] > 0 {
                    expected[p] / games_played[p] as f64
                } else {
                    0.0
                },
                attempts: attempts[p],
                makes: makes[p],
            }
        })
        .collect();
    let manifest = GroundTruthManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        config: config.clone(),
        informative_features: config.make_model.informative(),
        noise_features: (1..=config.n_noise_features).map(|k| format!("noise_{k}")).collect(),
        predicted_drops: 0,
        games,
        players,
        plays,
    };
    Ok(Season {
        manifest,
        bios,
        court,
        plans,
    })
}

/// On-court player indices of `team` in game `g` (rotating when the roster
/// is larger than five).
fn on_court(config: &SynthConfig, team: usize, g: usize) -> [usize; 5] {
    let n = config.n_players_per_team;
    std::array::from_fn(|k| team * n + (g + k) % n)
}

#[allow(clippy::type_complexity)]
fn plan_game(
    config: &SynthConfig,
    court: &CourtSpec,
    latents: &[Latent],
    g: usize,
) -> Result<(GameTruth, Vec<PlayTruth>, Vec<PlannedPlay>, Vec<(usize, f64)>)> {
    let mut rng = stream_rng(derive_seed(config.seed, PLAN_TAG), g as u64);
    let t = config.n_teams;
    let home = g % t;
    let away = (home + 1 + (g / t) % (t - 1)) % t;
    let gid = game_id(g);
    let right_home = rng.random_bool(0.5);
    let teams = [home, away];
    let court_players: [[usize; 5]; 2] = [on_court(config, home, g), on_court(config, away, g)];
    let everyone: Vec<usize> = court_players.iter().flatten().copied().collect();
    let weights: Vec<f64> = everyone.iter().map(|&p| latents[p].weight * latents[p].suppression).collect();
    let total: f64 = weights.iter().sum();
    let chooser = WeightedIndex::new(&weights).map_err(|e| Error::Config(format!("shot weights: {e}")))?;
    let mm = &config.make_model;
    let p_count = config.plays_per_game;
    let per_period: Vec<usize> = (1..=4u32)
        .map(|per| (0..p_count).filter(|j| 1 + (j * 4 / p_count) as u32 == per).count())
        .collect();

    let mut truths = Vec::with_capacity(p_count);
    let mut plans = Vec::with_capacity(p_count);
    let mut expected: Vec<(usize, f64)> = Vec::new();
    let mut seen_in_period = [0usize; 4];
    for j in 0..p_count {
        let period = 1 + (j * 4 / p_count) as u32;
        let q = seen_in_period[(period - 1) as usize];
        seen_in_period[(period - 1) as usize] += 1;
        let n_p = per_period[(period - 1) as usize] as f64;
        let gc = round2(700.0 - (q as f64 + rng.random_range(0.2..0.8)) * (680.0 / n_p));

        for (&p, &w) in everyone.iter().zip(&weights) {
            expected.push((p, w / total));
        }
        let shooter = everyone[chooser.sample(&mut rng)];
        let side = if court_players[0].contains(&shooter) { 0 } else { 1 };
        let off_team = teams[side];
        let def_team = teams[1 - side];
        let attacks_right = (side == 0) == right_home;
        let right = if period <= 2 { attacks_right } else { !attacks_right };
        let basket = if right { court.basket_right } else { court.basket_left };

        let z = latents[shooter].profile_z;
        let normal = |mean: f64, sd: f64, rng: &mut rand_chacha::ChaCha8Rng| mean + sd * rng.sample::<f64, _>(StandardNormal);
        let ndd = normal(4.0 + 0.5 * z, 1.2, &mut rng).clamp(config.ndd_range[0], config.ndd_range[1]);
        let hull = normal(config.hull_mean + 80.0 * z, config.hull_sd, &mut rng)
            .clamp(config.hull_range[0], config.hull_range[1]);
        let passes = normal(2.0 - 0.4 * z, 1.0, &mut rng).round().clamp(0.0, 4.0) as usize;
        let sc = round2(normal(12.0 - 1.5 * z, 5.0, &mut rng).clamp(1.0, 23.0));
        let dist = (23.75 + 0.4 + normal(0.0, 1.2, &mut rng).abs() + 0.25 * (z + 2.0)).min(28.5);
        let targets = ScriptTargets {
            ndd_median: ndd,
            hull_area: hull,
            passes,
            shot_dist: dist,
        };
        let script = draw_script(&targets, basket, court, &mut rng).ok_or_else(|| {
            Error::Config(format!(
                "game {gid} play {}: no court layout for hull area {hull:.1} and {passes} passes",
                j + 1
            ))
        })?;

        let mut mates: Vec<usize> = court_players[side].iter().copied().filter(|&p| p != shooter).collect();
        mates.shuffle(&mut rng);
        let mut guards: Vec<usize> = court_players[1 - side].to_vec();
        guards.shuffle(&mut rng);
        let offense: [PlayerId; 5] = std::array::from_fn(|k| {
            if k == 0 {
                config.player_id(shooter)
            } else {
                config.player_id(mates[k - 1])
            }
        });
        let defense: [PlayerId; 5] = std::array::from_fn(|k| config.player_id(guards[k]));

        let ball: Vec<_> = (PRE_FRAMES..=RELEASE_FRAME).map(|i| script.frame(i).ball_xy()).collect();
        let features = PlantedFeatures {
            ndd_median: script.gap.median,
            ndd_min: script.gap.lo,
            ndd_mean: script.gap.mean(),
            ndd_release: script.gap.release,
            off_hull_area_mean: hull,
            ball_path_len: path_length(&ball),
            touch_changes: passes as u32,
            shot_clock_release: sc,
            game_clock_release: gc,
            period,
            shot_dist: dist,
            corner_flag: corner_flag(court, basket, script.shooter_spot),
        };
        let noise: Vec<f64> = (0..config.n_noise_features)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let logit = mm.logit(&features) + latents[shooter].skill;
        let prob = logistic(logit);
        let made = rng.random::<f64>() < prob;

        let start_clock = gc + RELEASE_FRAME as f64 * script::FRAME_S;
        let wall = WALL_CLOCK_ORIGIN_MS
            + g as i64 * 86_400_000
            + (period as i64 - 1) * 1_000_000
            + ((720.0 - start_clock) * 1000.0).round() as i64;
        plans.push(PlannedPlay {
            script,
            lineup: Lineup {
                offense_team: config.team_id(off_team),
                defense_team: config.team_id(def_team),
                offense,
                defense,
                offense_first: side == 0,
            },
            clocks: Clocks {
                period,
                wall_ms_start: wall,
                game_clock_release: gc,
                shot_clock_release: sc,
            },
        });
        truths.push(PlayTruth {
            game_id: gid.clone(),
            event_id: j as i64 + 1,
            shooter_id: config.player_id(shooter),
            team_id: config.team_id(off_team),
            defender_id: defense[0],
            features,
            noise,
            logit,
            make_prob: prob,
            made,
        });
    }
    let game = GameTruth {
        game_id: gid,
        home: config.team_id(home),
        away: config.team_id(away),
        right_first_half: config.team_id(if right_home { home } else { away }),
        players: everyone.iter().map(|&p| config.player_id(p)).collect(),
    };
    Ok((game, truths, plans, expected))
}

impl Season {
    pub fn n_games(&self) -> usize {
        self.plans.len()
    }

    pub fn game_ids(&self) -> Vec<String> {
        self.manifest.games.iter().map(|g| g.game_id.clone()).collect()
    }

    pub fn bio_map(&self) -> HashMap<PlayerId, PlayerBio> {
        self.bios.iter().map(|b| (b.player_id, b.clone())).collect()
    }

    /// Play-by-play rows of game `g`: one row per three-point attempt.
    pub fn events(&self, g: usize) -> Vec<PlayEvent> {
        let gid = &self.manifest.games[g].game_id;
        let names: BTreeMap<PlayerId, &str> = self.bios.iter().map(|b| (b.player_id, b.name.as_str())).collect();
        self.manifest
            .plays
            .iter()
            .filter(|p| &p.game_id == gid)
            .map(|p| {
                let last = names[&p.shooter_id].rsplit(' ').next().unwrap_or("");
                let feet = p.features.shot_dist.round() as i64;
                let description = if p.made {
                    format!("{last} {feet}' 3PT Jump Shot")
                } else {
                    format!("MISS {last} {feet}' 3PT Jump Shot")
                };
                PlayEvent {
                    game_id: p.game_id.clone(),
                    event_id: p.event_id,
                    event_type: if p.made { EventType::MadeShot } else { EventType::MissedShot },
                    is_three: true,
                    shooter_id: Some(p.shooter_id),
                    team_id: Some(p.team_id),
                    period: p.features.period,
                    game_clock_s: p.features.game_clock_release,
                    description,
                }
            })
            .collect()
    }

    pub fn all_events(&self) -> Vec<PlayEvent> {
        (0..self.n_games()).flat_map(|g| self.events(g)).collect()
    }

    /// Renders the tracking moments of game `g`.
    pub fn render_game(&self, g: usize) -> SynthGame {
        let cfg = &self.manifest.config;
        let mut rng = stream_rng(derive_seed(cfg.seed, JITTER_TAG), g as u64);
        let events = self.plans[g]
            .iter()
            .zip(self.manifest.plays.iter().filter(|p| p.game_id == self.manifest.games[g].game_id))
            .map(|(plan, truth)| EventMoments {
                event_id: truth.event_id,
                moments: render(&plan.script, &plan.lineup, &plan.clocks, cfg.jitter_ft, &self.court, &mut rng),
            })
            .collect();
        SynthGame {
            tracking: TrackingGame {
                game_id: self.manifest.games[g].game_id.clone(),
                events,
                frame_rate_hz: 25.0,
            },
            events: self.events(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeasonFiles {
    pub tracking: Vec<PathBuf>,
    pub playbyplay: PathBuf,
    pub bios: PathBuf,
    pub manifest: PathBuf,
}

pub const TRACKING_DIR: &str = "tracking";
pub const PLAYBYPLAY_FILE: &str = "playbyplay.csv";
pub const BIOS_FILE: &str = "bios.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes tracking files (one per game), play-by-play, bios and the manifest
/// under `dir`.
pub fn write_season(season: &Season, dir: &Path) -> Result<SeasonFiles> {
    let tdir = dir.join(TRACKING_DIR);
    std::fs::create_dir_all(&tdir).map_err(|e| Error::io(&tdir, e))?;
    let tracking: Vec<PathBuf> = (0..season.n_games())
        .into_par_iter()
        .map(|g| {
            let game = season.render_game(g);
            let path = tdir.join(format!("{}.json", game.tracking.game_id));
            write_tracking_file(&path, &game.tracking)?;
            Ok(path)
        })
        .collect::<Result<_>>()?;
    let mut buf = Vec::new();
    write_playbyplay(&mut buf, &season.all_events())?;
    let playbyplay = dir.join(PLAYBYPLAY_FILE);
    write_atomic(&playbyplay, &buf)?;
    let mut buf = Vec::new();
    write_player_bio(&mut buf, &season.bios)?;
    let bios = dir.join(BIOS_FILE);
    write_atomic(&bios, &buf)?;
    let manifest = dir.join(MANIFEST_FILE);
    write_atomic(&manifest, season.manifest.to_json().as_bytes())?;
    Ok(SeasonFiles {
        tracking,
        playbyplay,
        bios,
        manifest,
    })
}
