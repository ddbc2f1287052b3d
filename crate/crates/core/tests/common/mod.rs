//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shotlab::dataset::Dataset;
use shotlab::features::{encode_table, FeatureTable};
use shotlab::geometry::Point;
use shotlab::model::{BallPos, EventType, GameSides, Moment, PlayEvent, PlayerId, PlayerPos, TeamId};
use shotlab::pipeline::{process_game, PipelineConfig};
use shotlab::player_model::GamesIndex;
use shotlab::synthgen::{generate_season, Season, SynthConfig};

pub fn pt(x: f64, y: f64) -> Point {
    Point { x, y }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p).abs() <= 1e-9
        && p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}

fn in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = orient(a, b, p);
    let d2 = orient(b, c, p);
    let d3 = orient(c, a, p);
    let neg = d1 < -1e-9 || d2 < -1e-9 || d3 < -1e-9;
    let pos = d1 > 1e-9 || d2 > 1e-9 || d3 > 1e-9;
    !(neg && pos)
}

/// Points of `pts` that are not a convex combination of the others. By
/// Caratheodory a planar point lies in the hull of a set iff it lies in a
/// triangle (or on a segment) of three (two) of its members, so every subset
/// is scanned.
pub fn extreme_points(pts: &[Point]) -> Vec<Point> {
    let mut uniq: Vec<Point> = Vec::new();
    for &p in pts {
        if !uniq.contains(&p) {
            uniq.push(p);
        }
    }
    let mut out = Vec::new();
    for (i, &p) in uniq.iter().enumerate() {
        let others: Vec<Point> = uniq.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, q)| *q).collect();
        let mut inside = false;
        'scan: for a in 0..others.len() {
            for b in a + 1..others.len() {
                if on_segment(p, others[a], others[b]) {
                    inside = true;
                    break 'scan;
                }
                for c in b + 1..others.len() {
                    if orient(others[a], others[b], others[c]).abs() > 1e-9
                        && in_triangle(p, others[a], others[b], others[c])
                    {
                        inside = true;
                        break 'scan;
                    }
                }
            }
        }
        if !inside {
            out.push(p);
        }
    }
    out
}

/// Area of a convex polygon as the sum of the triangles it forms with its
/// vertex centroid.
pub fn fan_area(vertices: &[Point]) -> f64 {
    let n = vertices.len() as f64;
    let c = pt(
        vertices.iter().map(|p| p.x).sum::<f64>() / n,
        vertices.iter().map(|p| p.y).sum::<f64>() / n,
    );
    let mut area = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        area += 0.5 * ((a.x - c.x) * (b.y - c.y) - (a.y - c.y) * (b.x - c.x)).abs();
    }
    area
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation.
pub fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Generate a season in memory and run it through segmentation, feature
/// extraction and shooter encoding.
pub fn season_table(cfg: &SynthConfig) -> (Season, FeatureTable) {
    let (season, table, _) = season_build(cfg);
    (season, table)
}

/// As [`season_table`], also returning the games index.
pub fn season_build(cfg: &SynthConfig) -> (Season, FeatureTable, GamesIndex) {
    let season = generate_season(cfg).expect("valid synth config");
    let pcfg = PipelineConfig::default();
    let bios = season.bio_map();
    let mut rows = Vec::new();
    let mut games = GamesIndex::new();
    for g in 0..season.n_games() {
        let game = season.render_game(g);
        let out = process_game(game.tracking, &game.events, &bios, None, &pcfg).expect("game processes");
        rows.extend(out.rows);
        games.merge(&out.games);
    }
    let table = encode_table(rows, &pcfg.features).expect("non-empty table");
    (season, table, games)
}

/// Table columns plus the manifest's noise columns, aligned by play.
pub fn with_noise(season: &Season, table: &FeatureTable, columns: &[&str]) -> (Dataset, Vec<bool>) {
    let (mut ds, target) = table.dataset(columns).expect("known columns");
    let noise: HashMap<(String, i64), Vec<f64>> = season.manifest.noise_by_play();
    for (k, name) in season.manifest.noise_features.iter().enumerate() {
        let values = table
            .rows
            .iter()
            .map(|r| noise[&(r.game_id.clone(), r.event_id)][k])
            .collect();
        ds.push_column(name.clone(), values).unwrap();
    }
    (ds, target)
}

/// Lower and upper 3-sigma bounds on a binomial proportion.
pub fn three_sigma(p: f64, n: usize) -> (f64, f64) {
    let s = (p * (1.0 - p) / n as f64).sqrt();
    (p - 3.0 * s, p + 3.0 * s)
}

pub const FRAME_MS: i64 = 40;
pub const OFFENSE: i64 = 10;
pub const DEFENSE: i64 = 20;
pub const SHOOTER: i64 = 101;
/// Shooter spot: 24.75 ft from the right basket.
pub const SHOOTER_XY: (f64, f64) = (64.0, 25.0);

/// Ten players in the right half: offense 101..=105, defense 201..=205, with
/// defender 201 standing 6 ft from the shooter.
pub fn lineup() -> Vec<(i64, i64, f64, f64)> {
    vec![
        (OFFENSE, 101, SHOOTER_XY.0, SHOOTER_XY.1),
        (OFFENSE, 102, 70.0, 8.0),
        (OFFENSE, 103, 70.0, 42.0),
        (OFFENSE, 104, 84.0, 5.0),
        (OFFENSE, 105, 84.0, 45.0),
        (DEFENSE, 201, SHOOTER_XY.0 + 6.0, SHOOTER_XY.1),
        (DEFENSE, 202, 75.0, 12.0),
        (DEFENSE, 203, 75.0, 38.0),
        (DEFENSE, 204, 86.0, 10.0),
        (DEFENSE, 205, 86.0, 40.0),
    ]
}

pub fn moment(
    period: u32,
    wall_clock_ms: i64,
    game_clock_s: f64,
    shot_clock_s: Option<f64>,
    ball: (f64, f64, f64),
    players: &[(i64, i64, f64, f64)],
) -> Moment {
    Moment {
        period,
        wall_clock_ms,
        game_clock_s,
        shot_clock_s,
        ball: BallPos { x: ball.0, y: ball.1, z: ball.2 },
        players: players
            .iter()
            .map(|&(t, p, x, y)| PlayerPos { team_id: TeamId(t), player_id: PlayerId(p), x, y })
            .collect(),
    }
}

/// A static lineup where the ball sits with the shooter for `before` frames
/// after the first and then flies toward the right basket, 3 ft and 0.55 ft
/// higher per frame, for `after` frames. The release is at index `before`.
pub fn shot_moments(before: usize, after: usize, period: u32, wall_start: i64, clock_start: f64) -> Vec<Moment> {
    let players = lineup();
    (0..=before + after)
        .map(|i| {
            let k = i.saturating_sub(before) as f64;
            let ball = (SHOOTER_XY.0 + 3.0 * k, SHOOTER_XY.1, 5.0 + 0.55 * k);
            let t = i as f64 * 0.04;
            moment(period, wall_start + i as i64 * FRAME_MS, clock_start - t, Some(20.0 - t), ball, &players)
        })
        .collect()
}

pub fn three_event(game_id: &str, event_id: i64, made: bool, period: u32, clock: f64) -> PlayEvent {
    PlayEvent {
        game_id: game_id.into(),
        event_id,
        event_type: if made { EventType::MadeShot } else { EventType::MissedShot },
        is_three: true,
        shooter_id: Some(PlayerId(SHOOTER)),
        team_id: Some(TeamId(OFFENSE)),
        period,
        game_clock_s: clock,
        description: "Shooter 25' 3PT Jump Shot".into(),
    }
}

/// Offense attacks the right basket in the first half.
pub fn sides(game_id: &str) -> GameSides {
    GameSides::new(game_id).with_team(TeamId(OFFENSE), true).with_team(TeamId(DEFENSE), false)
}

/// Canonical form independent of the crate: every number as an f64.
pub fn canonical(text: &str) -> serde_json::Value {
    fn walk(v: serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) => Value::from(n.as_f64().unwrap()),
            Value::Array(a) => Value::Array(a.into_iter().map(walk).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    walk(serde_json::from_str(text).unwrap())
}

pub fn names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("f{j}")).collect()
}

/// Target is `f0 > 0`; the other columns are noise.
pub fn separable(n: usize, p: usize, seed: u64) -> (Dataset, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y = rows.iter().map(|r| r[0] > 0.0).collect();
    (Dataset::from_rows(names(p), &rows).unwrap(), y)
}

pub fn coin(n: usize, p: usize, seed: u64) -> (Dataset, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y = (0..n).map(|_| rng.random_bool(0.5)).collect();
    (Dataset::from_rows(names(p), &rows).unwrap(), y)
}

