mod common;

use std::collections::HashMap;

use common::*;
use shotlab::features::*;
use shotlab::model::{CourtSpec, Moment, PlayerBio, PlayerId, Position, TeamId, ThreePointPlay};
use shotlab::synthgen::SynthConfig;

fn court() -> CourtSpec {
    CourtSpec::nba()
}

fn play(event_id: i64, window: Vec<Moment>, made: bool) -> ThreePointPlay {
    ThreePointPlay {
        game_id: "0021500200".into(),
        event_id,
        shooter_id: PlayerId(SHOOTER),
        shooter_team_id: TeamId(OFFENSE),
        made,
        release_index: window.len() - 1,
        window,
        attacking_basket: court().basket_right,
    }
}

/// `n` frames of the static lineup, ball with the shooter.
fn static_window(n: usize) -> Vec<Moment> {
    let players = lineup();
    (0..n)
        .map(|i| moment(1, i as i64 * FRAME_MS, 600.0 - i as f64 * 0.04, Some(14.0), (SHOOTER_XY.0, SHOOTER_XY.1, 5.0), &players))
        .collect()
}

fn bio(id: i64, h: f64, w: f64, e: f64, pos: Position) -> (PlayerId, PlayerBio) {
    (
        PlayerId(id),
        PlayerBio { player_id: PlayerId(id), name: format!("P{id}"), height_cm: h, weight_kg: w, experience_yr: e, position: pos },
    )
}

fn all_bios() -> HashMap<PlayerId, PlayerBio> {
    lineup()
        .iter()
        .map(|&(_, id, _, _)| bio(id, 200.0, 100.0, 3.0, Position::F))
        .chain([bio(SHOOTER, 191.0, 86.0, 6.0, Position::G), bio(201, 198.0, 95.0, 2.0, Position::G)])
        .collect()
}

#[test]
fn glued_defender() {
    let x = extract_features(&play(1, static_window(126), true), &all_bios(), &court()).unwrap();
    let f = x.features;
    assert_eq!((f.ndd_median, f.ndd_min, f.ndd_release), (6.0, 6.0, 6.0));
    assert_eq!(f.ndd_mean, 6.0);
    assert_eq!(x.ndd_max, 6.0);
    assert_eq!(f.shooter_path_len, 0.0);
    assert_eq!(f.touch_changes, 0);
    assert!(f.made);
}

#[test]
fn ball_carried_thirty_feet_in_two_seconds() {
    let mut window = static_window(51);
    for (i, m) in window.iter_mut().enumerate() {
        m.ball.x = 30.0 + 30.0 * i as f64 / 50.0;
    }
    let f = extract_features(&play(1, window, false), &all_bios(), &court()).unwrap().features;
    assert!((f.ball_path_len - 30.0).abs() < 1e-9);
    assert!((f.ball_mean_speed - 15.0).abs() < 1e-9);
}

#[test]
fn square_offense_hull() {
    let mut window = static_window(20);
    let spots = [(60.0, 20.0), (70.0, 20.0), (70.0, 30.0), (60.0, 30.0), (65.0, 25.0)];
    for m in &mut window {
        for (p, s) in m.players.iter_mut().filter(|p| p.team_id == TeamId(OFFENSE)).zip(spots) {
            p.x = s.0;
            p.y = s.1;
        }
        m.ball.x = 60.0;
        m.ball.y = 20.0;
    }
    let f = extract_features(&play(1, window, false), &all_bios(), &court()).unwrap().features;
    assert_eq!(f.off_hull_area_mean, 100.0);
}

#[test]
fn defensive_hull_and_release_context() {
    let window = static_window(30);
    let f = extract_features(&play(1, window.clone(), false), &all_bios(), &court()).unwrap().features;
    let release = &window[29];
    let def: Vec<_> = release.players.iter().filter(|p| p.team_id == TeamId(DEFENSE)).map(|p| pt(p.x, p.y)).collect();
    let def_hull = shotlab::geometry::convex_hull(&def).unwrap();
    assert!((f.def_hull_area_mean - fan_area(&def_hull.vertices)).abs() < 1e-9);
    assert_eq!(f.shot_clock_release, 14.0);
    assert_eq!(f.game_clock_release, release.game_clock_s);
    assert_eq!(f.period, 1);
    assert!((f.shot_dist - 24.75).abs() < 1e-12);
    assert!(!f.corner_flag);
}

#[test]
fn absent_shot_clock_reads_as_full() {
    let mut window = static_window(10);
    window.iter_mut().for_each(|m| m.shot_clock_s = None);
    let f = extract_features(&play(1, window, false), &all_bios(), &court()).unwrap().features;
    assert_eq!(f.shot_clock_release, 24.0);
}

#[test]
fn corner_three() {
    let mut window = static_window(10);
    for m in &mut window {
        let s = &mut m.players[0];
        s.x = 86.0;
        s.y = 3.0;
        m.players[5].x = 86.0;
        m.players[5].y = 9.0;
        m.ball.x = 86.0;
        m.ball.y = 3.0;
    }
    let f = extract_features(&play(1, window, false), &all_bios(), &court()).unwrap().features;
    assert!(f.corner_flag);
    assert!((f.shot_dist - 2.75f64.hypot(22.0)).abs() < 1e-12);
    assert_eq!(f.ndd_release, 6.0);
}

#[test]
fn matchup_differences_at_release() {
    let f = extract_features(&play(1, static_window(10), false), &all_bios(), &court()).unwrap().features;
    assert_eq!((f.height_diff_cm, f.weight_diff_kg, f.exp_diff_yr), (-7.0, -9.0, 4.0));
    assert!(f.pos_match);
}

#[test]
fn missing_bios_zero_the_matchup() {
    let x = extract_features(&play(1, static_window(10), false), &HashMap::new(), &court()).unwrap();
    let f = x.features;
    assert_eq!((f.height_diff_cm, f.weight_diff_kg, f.exp_diff_yr, f.pos_match), (0.0, 0.0, 0.0, false));
    assert_eq!(x.missing_bios, vec![PlayerId(SHOOTER), PlayerId(201)]);
}

#[test]
fn pass_counts_once_with_hysteresis() {
    let mut window = static_window(60);
    for (i, m) in window.iter_mut().enumerate() {
        // with 102 for the first 20 frames, then back to the shooter
        let (x, y) = if i < 20 { (70.0, 8.0) } else { SHOOTER_XY };
        m.ball.x = x;
        m.ball.y = y;
    }
    let f = extract_features(&play(1, window.clone(), false), &all_bios(), &court()).unwrap().features;
    assert_eq!(f.touch_changes, 1);
    // Ball halfway between two teammates wobbling by less than the band.
    for (i, m) in window.iter_mut().enumerate() {
        m.ball.x = 67.0 + if i % 2 == 0 { 0.3 } else { -0.3 };
        m.ball.y = 16.5;
    }
    let f = extract_features(&play(1, window, false), &all_bios(), &court()).unwrap().features;
    assert_eq!(f.touch_changes, 0);
}

#[test]
fn single_frame_window_is_an_error() {
    assert!(extract_features(&play(1, static_window(1), false), &all_bios(), &court()).is_err());
}

#[test]
fn downsampling_barely_moves_the_median_gap() {
    let mut window = static_window(126);
    for (i, m) in window.iter_mut().enumerate() {
        let t = i as f64 * 0.04;
        m.players[5].x = SHOOTER_XY.0 + 5.0 + 2.0 * (t * 1.3).sin();
        m.players[5].y = SHOOTER_XY.1 + 1.5 * (t * 0.7).cos();
    }
    let full = extract_features(&play(1, window.clone(), false), &all_bios(), &court()).unwrap().features;
    let half: Vec<Moment> = window.iter().step_by(2).cloned().collect();
    let low = extract_features(&play(1, half, false), &all_bios(), &court()).unwrap().features;
    assert!((full.ndd_median - low.ndd_median).abs() < 0.5);
    assert!(full.ndd_min <= full.ndd_median);
}

#[test]
fn assemble_drops_bad_plays() {
    let plays = vec![
        play(1, static_window(30), true),
        play(2, static_window(1), false),
        play(3, static_window(30), false),
        play(4, static_window(30), true),
    ];
    let build = assemble_dataset(&plays, &all_bios(), &court(), &FeatureConfig::default()).unwrap();
    assert_eq!(build.table.len(), 3);
    assert_eq!(build.warnings.count("features_dropped"), 1);
    let ids: Vec<i64> = build.table.rows.iter().map(|r| r.event_id).collect();
    assert_eq!(ids, vec![1, 3, 4]);
    let made: Vec<bool> = build.table.rows.iter().map(|r| r.features.made).collect();
    assert_eq!(made, vec![true, false, true]);
    // three plays by one shooter: out-of-fold counts sit between 0 and 1
    assert!(build.table.rows.iter().all(|r| (0.0..=1.0).contains(&r.features.shooter_enc)));
}

#[test]
fn assemble_rejects_no_plays() {
    let err = assemble_dataset(&[], &all_bios(), &court(), &FeatureConfig::default()).unwrap_err();
    assert!(err.to_string().contains("empty dataset"), "{err}");
}

#[test]
fn permuting_plays_permutes_rows() {
    let season_cfg = SynthConfig { n_teams: 3, n_games: 3, plays_per_game: 10, seed: 9, ..SynthConfig::default() };
    let (_, table) = season_table(&season_cfg);
    let mut rows = table.rows.clone();
    rows.reverse();
    for r in &mut rows {
        r.features.shooter_enc = f64::NAN;
    }
    let mut back = encode_table(rows, &FeatureConfig::default()).unwrap().rows;
    back.reverse();
    assert_eq!(back, table.rows);
}

#[test]
fn season_row_count_matches_manifest() {
    let cfg = SynthConfig { n_teams: 4, n_games: 6, plays_per_game: 15, seed: 17, ..SynthConfig::default() };
    let (season, table) = season_table(&cfg);
    let m = &season.manifest;
    assert_eq!(table.len(), m.three_point_attempts() - m.predicted_drops);
    for r in &table.rows {
        let truth = m.play(&r.game_id, r.event_id).unwrap();
        assert_eq!(r.features.made, truth.made);
        assert_eq!(r.shooter_id, truth.shooter_id);
        assert!((r.features.ndd_median - truth.features.ndd_median).abs() <= 0.25);
        assert!(r.features.shot_dist >= MIN_SHOT_DIST_FT);
        assert!(r.features.ndd_min <= r.features.ndd_median);
    }
}

#[test]
fn csv_format() {
    let cfg = SynthConfig { n_teams: 2, n_games: 1, plays_per_game: 5, seed: 4, ..SynthConfig::default() };
    let (_, table) = season_table(&cfg);
    let text = table.to_csv_string();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let mut expected = vec!["game_id", "event_id", "shooter_id"];
    expected.extend(FEATURE_COLUMNS);
    expected.push("made");
    assert_eq!(header, expected.join(","));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), expected.len());
    let ndd = first[3];
    assert_eq!(ndd.split('.').nth(1).map(str::len), Some(6), "{ndd}");
    let back = FeatureTable::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.len(), table.len());
    assert_eq!(back.to_csv_string(), text);
}
