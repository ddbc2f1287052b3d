mod common;

use std::path::Path;

use shotlab::features::FeatureTable;
use shotlab::ingest::{parse_player_bio, parse_playbyplay, parse_tracking_file};
use shotlab::model::CourtSpec;
use shotlab::synthgen::*;

fn tiny(seed: u64) -> SynthConfig {
    SynthConfig { n_teams: 2, n_games: 2, plays_per_game: 10, seed, ..SynthConfig::default() }
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn file_counts() {
    let dir = tempfile::tempdir().unwrap();
    let season = generate_season(&tiny(1)).unwrap();
    let files = write_season(&season, dir.path()).unwrap();
    assert_eq!(files.tracking.len(), 2);
    let (events, w) = parse_playbyplay(&files.playbyplay).unwrap();
    assert!(w.is_empty());
    assert_eq!(events.len(), 20);
    assert_eq!(season.manifest.plays.len(), 20);
    assert_eq!(season.manifest.three_point_attempts(), 20);
    let (bios, _) = parse_player_bio(&files.bios).unwrap();
    assert_eq!(bios.len(), 10);
    for path in &files.tracking {
        let (game, w) = parse_tracking_file(path, &CourtSpec::nba()).unwrap();
        assert!(w.is_empty());
        assert_eq!(game.events.len(), 10);
    }
    let back = GroundTruthManifest::read_path(&files.manifest).unwrap();
    assert_eq!(back, season.manifest);
}

#[test]
fn zero_coefficients_match_the_intercept_rate() {
    let cfg = SynthConfig {
        n_teams: 6,
        n_games: 40,
        plays_per_game: 50,
        make_model: MakeModel { ndd_median: 0.0, off_hull_area_mean: 0.0, ..MakeModel::default() },
        skill_sd: 0.0,
        seed: 8,
        ..SynthConfig::default()
    };
    let season = generate_season(&cfg).unwrap();
    let plays = &season.manifest.plays;
    let p = 1.0 / (1.0 + (-cfg.make_model.intercept).exp());
    let rate = plays.iter().filter(|p| p.made).count() as f64 / plays.len() as f64;
    let (lo, hi) = common::three_sigma(p, plays.len());
    assert!(lo <= rate && rate <= hi, "{rate} outside [{lo}, {hi}]");
    assert!(plays.iter().all(|q| (q.make_prob - p).abs() < 1e-12));
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = SynthConfig { n_games: 3, plays_per_game: 8, seed: 5, ..SynthConfig::default() };
    write_season(&generate_season(&cfg).unwrap(), a.path()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    pool.install(|| write_season(&generate_season(&cfg).unwrap(), b.path()).unwrap());
    assert_eq!(read_all(a.path()), read_all(b.path()));
    let c = generate_season(&SynthConfig { seed: 6, ..cfg.clone() }).unwrap();
    assert_ne!(c.manifest, generate_season(&cfg).unwrap().manifest);
}

#[test]
fn verification_passes_on_clean_data() {
    let cfg = SynthConfig { n_teams: 4, n_games: 6, plays_per_game: 15, seed: 12, ..SynthConfig::default() };
    let (season, table) = common::season_table(&cfg);
    let report = verify_manifest(&season.manifest, &table, &Tolerances::default()).unwrap();
    assert!(report.passed(), "{}", report.summary());
    assert!(report.summary().ends_with("PASS\n"));
    assert_eq!(report.plays_found, table.len());
}

#[test]
fn other_seed_manifest_fails() {
    let cfg = SynthConfig { n_teams: 4, n_games: 4, plays_per_game: 15, seed: 13, ..SynthConfig::default() };
    let (_, table) = common::season_table(&cfg);
    let other = generate_season(&SynthConfig { seed: 14, ..cfg.clone() }).unwrap();
    let failed = verify_manifest(&other.manifest, &table, &Tolerances::default()).map_or(true, |r| !r.passed());
    assert!(failed);
}

#[test]
fn zero_tolerance_fails_on_jitter() {
    let cfg = SynthConfig { n_teams: 2, n_games: 2, plays_per_game: 10, seed: 15, ..SynthConfig::default() };
    let (season, table) = common::season_table(&cfg);
    let zero = Tolerances { columns: vec![("ndd_median".into(), 0.0), ("off_hull_area_mean".into(), 0.0)] };
    let report = verify_manifest(&season.manifest, &table, &zero).unwrap();
    assert!(!report.passed());
    assert!(report.checks.iter().all(|c| c.failures > 0 && c.max_abs_error > 0.0));
    assert!(report.summary().ends_with("FAIL\n"));
}

#[test]
fn unknown_rows_are_an_error() {
    let cfg = SynthConfig { n_teams: 2, n_games: 1, plays_per_game: 5, seed: 16, ..SynthConfig::default() };
    let (season, table) = common::season_table(&cfg);
    let mut rows = table.rows.clone();
    rows[0].event_id = 9999;
    assert!(verify_manifest(&season.manifest, &FeatureTable { rows }, &Tolerances::default()).is_err());
}

#[test]
fn planted_overrides_are_recorded() {
    let cfg = SynthConfig {
        overrides: vec![
            PlayerOverride { player: 2, usage_z: Some(1.5), skill: Some(0.8), suppression: None, profile_z: Some(0.0) },
            PlayerOverride { player: 3, usage_z: None, skill: None, suppression: Some(0.7), profile_z: None },
        ],
        ..tiny(17)
    };
    let m = generate_season(&cfg).unwrap().manifest;
    let (a, b) = (&m.players[2], &m.players[3]);
    assert_eq!((a.usage_z, a.profile_z, a.skill, a.suppression), (1.5, 0.0, 0.8, 1.0));
    assert_eq!(b.suppression, 0.7);
    assert_eq!(b.profile_z, b.usage_z);
    let bad = SynthConfig { overrides: vec![PlayerOverride { player: 3, usage_z: None, skill: None, suppression: Some(1.5), profile_z: None }], ..tiny(1) };
    assert!(generate_season(&bad).is_err());
}

#[test]
fn invalid_configs() {
    assert!(generate_season(&SynthConfig { n_teams: 1, ..tiny(1) }).is_err());
    assert!(generate_season(&SynthConfig { plays_per_game: 0, ..tiny(1) }).is_err());
    assert!(generate_season(&SynthConfig { hull_range: [150.0, 5000.0], ..tiny(1) }).is_err());
}
