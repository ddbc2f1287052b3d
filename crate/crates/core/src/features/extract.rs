use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, nearest_opponent, path_length, polygon_area, Point};
use crate::model::{CourtSpec, Moment, PlayerBio, PlayerId, ThreePointPlay};

use super::FeatureVector;

/// A new player must be this much closer to the ball than the current
/// nearest player before the nearest-player identity changes.
pub const TOUCH_HYSTERESIS_FT: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub features: FeatureVector,
    /// Largest nearest-defender distance over the window.
    pub ndd_max: f64,
    /// Shooter or nearest defender without a bio; matchup diffs were zeroed.
    pub missing_bios: Vec<PlayerId>,
}

struct Sides {
    offense: [Point; 5],
    offense_ids: [PlayerId; 5],
    defense: [Point; 5],
    defense_ids: [PlayerId; 5],
    shooter: Point,
}

fn split_sides(m: &Moment, play: &ThreePointPlay) -> Result<Sides> {
    let mut off = Vec::with_capacity(5);
    let mut def = Vec::with_capacity(5);
    let mut shooter = None;
    for p in &m.players {
        if p.team_id == play.shooter_team_id {
            off.push((p.player_id, p.xy()));
        } else {
            def.push((p.player_id, p.xy()));
        }
        if p.player_id == play.shooter_id {
            shooter = Some(p.xy());
        }
    }
    let bad = || Error::InvalidArgument(format!("event {}: moment without a 5/5 split", play.event_id));
    if off.len() != 5 || def.len() != 5 {
        return Err(bad());
    }
    let shooter = shooter.ok_or_else(|| {
        Error::InvalidArgument(format!("event {}: shooter missing from moment", play.event_id))
    })?;
    Ok(Sides {
        offense: std::array::from_fn(|i| off[i].1),
        offense_ids: std::array::from_fn(|i| off[i].0),
        defense: std::array::from_fn(|i| def[i].1),
        defense_ids: std::array::from_fn(|i| def[i].0),
        shooter,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn hull_area(points: &[Point; 5]) -> f64 {
    polygon_area(&convex_hull(points).expect("five points"))
}

/// Computes every feature except `shooter_enc` over the window up to and
/// including the release moment.
pub fn extract_features(
    play: &ThreePointPlay,
    bios: &HashMap<PlayerId, PlayerBio>,
    court: &CourtSpec,
) -> Result<Extracted> {
    if play.release_index >= play.window.len() {
        return Err(Error::InvalidArgument(format!(
            "event {}: release index out of range",
            play.event_id
        )));
    }
    let window = &play.window[..=play.release_index];
    if window.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "event {}: window of {} frame(s) is too short",
            play.event_id,
            window.len()
        )));
    }
    let sides = window
        .iter()
        .map(|m| split_sides(m, play))
        .collect::<Result<Vec<_>>>()?;

    let ndd: Vec<f64> = sides
        .iter()
        .map(|s| nearest_opponent(s.shooter, &s.defense).1)
        .collect();
    let n = window.len() as f64;
    let ndd_max = ndd.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let off_hull_area_mean = sides.iter().map(|s| hull_area(&s.offense)).sum::<f64>() / n;
    let def_hull_area_mean = sides.iter().map(|s| hull_area(&s.defense)).sum::<f64>() / n;

    let ball: Vec<Point> = window.iter().map(|m| m.ball.xy()).collect();
    let ball_path_len = path_length(&ball);
    let duration_s = (window[window.len() - 1].wall_clock_ms - window[0].wall_clock_ms) as f64 / 1000.0;
    let ball_mean_speed = if duration_s > 0.0 {
        ball_path_len / duration_s
    } else {
        0.0
    };

    let mut touch_changes = 0u32;
    let mut holder = nearest_opponent(ball[0], &sides[0].offense).0;
    let mut holder_id = sides[0].offense_ids[holder];
    for (s, b) in sides.iter().zip(&ball).skip(1) {
        let Some(idx) = s.offense_ids.iter().position(|id| *id == holder_id) else {
            holder = nearest_opponent(*b, &s.offense).0;
            holder_id = s.offense_ids[holder];
            continue;
        };
        let current = b.dist(s.offense[idx]);
        let (cand, cand_dist) = nearest_opponent(*b, &s.offense);
        if s.offense_ids[cand] != holder_id && cand_dist < current - TOUCH_HYSTERESIS_FT {
            holder_id = s.offense_ids[cand];
            touch_changes += 1;
        }
    }

    let shooter_path: Vec<Point> = sides.iter().map(|s| s.shooter).collect();
    let release = &window[window.len() - 1];
    let rs = &sides[sides.len() - 1];
    let shot_dist = rs.shooter.dist(play.attacking_basket);
    let corner_flag = if play.attacking_basket.x < court.midline_x() {
        rs.shooter.x <= court.corner_zone_depth
    } else {
        rs.shooter.x >= court.length - court.corner_zone_depth
    };

    let (def_idx, _) = nearest_opponent(rs.shooter, &rs.defense);
    let defender = rs.defense_ids[def_idx];
    let mut missing_bios = Vec::new();
    let (height_diff_cm, weight_diff_kg, exp_diff_yr, pos_match) =
        match (bios.get(&play.shooter_id), bios.get(&defender)) {
            (Some(s), Some(d)) => (
                s.height_cm - d.height_cm,
                s.weight_kg - d.weight_kg,
                s.experience_yr - d.experience_yr,
                s.position == d.position,
            ),
            (s, d) => {
                if s.is_none() {
                    missing_bios.push(play.shooter_id);
                }
                if d.is_none() {
                    missing_bios.push(defender);
                }
                (0.0, 0.0, 0.0, false)
            }
        };

    Ok(Extracted {
        features: FeatureVector {
            ndd_median: median(&ndd),
            ndd_min: ndd.iter().cloned().fold(f64::INFINITY, f64::min),
            ndd_mean: ndd.iter().sum::<f64>() / n,
            ndd_release: ndd[ndd.len() - 1],
            off_hull_area_mean,
            def_hull_area_mean,
            ball_path_len,
            ball_mean_speed,
            touch_changes,
            shooter_path_len: path_length(&shooter_path),
            shot_clock_release: release.shot_clock_s.unwrap_or(24.0),
            game_clock_release: release.game_clock_s,
            period: release.period,
            shot_dist,
            corner_flag,
            height_diff_cm,
            weight_diff_kg,
            exp_diff_yr,
            pos_match,
            shooter_enc: f64::NAN,
            made: play.made,
        },
        ndd_max,
        missing_bios,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{BallPos, PlayerPos, Position, TeamId};

    /// Builds a play whose frames are produced by `frame(i, t)` returning
    /// (offense positions with the shooter first, defense positions, ball).
    pub fn scripted_play(
        frames: usize,
        frame: impl Fn(usize, f64) -> ([Point; 5], [Point; 5], (f64, f64, f64)),
    ) -> ThreePointPlay {
        let window = (0..frames)
            .map(|i| {
                let t = i as f64 * 0.04;
                let (off, def, b) = frame(i, t);
                let mut players = Vec::new();
                for k in 0..5 {
                    players.push(PlayerPos {
                        team_id: TeamId(1),
                        player_id: PlayerId(100 + k as i64),
                        x: off[k].x,
                        y: off[k].y,
                    });
                }
                for k in 0..5 {
                    players.push(PlayerPos {
                        team_id: TeamId(2),
                        player_id: PlayerId(200 + k as i64),
                        x: def[k].x,
                        y: def[k].y,
                    });
                }
                Moment {
                    period: 2,
                    wall_clock_ms: 5_000 + i as i64 * 40,
                    game_clock_s: 300.0 - t,
                    shot_clock_s: None,
                    ball: BallPos { x: b.0, y: b.1, z: b.2 },
                    players,
                }
            })
            .collect::<Vec<_>>();
        ThreePointPlay {
            game_id: "g".into(),
            event_id: 1,
            shooter_id: PlayerId(100),
            shooter_team_id: TeamId(1),
            made: true,
            release_index: frames - 1,
            window,
            attacking_basket: Point::new(88.75, 25.0),
        }
    }

    fn far_defense() -> [Point; 5] {
        [
            Point::new(60.0, 5.0),
            Point::new(60.0, 45.0),
            Point::new(50.0, 10.0),
            Point::new(50.0, 40.0),
            Point::new(55.0, 25.0),
        ]
    }

    #[test]
    fn glued_defender() {
        let play = scripted_play(60, |_, _| {
            let shooter = Point::new(65.0, 25.0);
            let mut def = far_defense();
            def[2] = Point::new(71.0, 25.0);
            let off = [
                shooter,
                Point::new(80.0, 3.0),
                Point::new(80.0, 47.0),
                Point::new(85.0, 15.0),
                Point::new(85.0, 35.0),
            ];
            (off, def, (65.5, 25.0, 4.0))
        });
        let f = extract_features(&play, &HashMap::new(), &CourtSpec::nba()).unwrap().features;
        assert_eq!(f.ndd_median, 6.0);
        assert_eq!(f.ndd_min, 6.0);
        assert_eq!(f.ndd_release, 6.0);
        assert_eq!(f.ndd_mean, 6.0);
        assert_eq!(f.touch_changes, 0);
        assert_eq!(f.shot_clock_release, 24.0);
        assert_eq!(f.period, 2);
        assert!((f.shot_dist - 23.75).abs() < 1e-12);
        assert!(!f.corner_flag);
    }

    #[test]
    fn ball_carried_thirty_feet() {
        // 51 frames span 2.0 s
        let play = scripted_play(51, |i, _| {
            let bx = 40.0 + 30.0 * i as f64 / 50.0;
            let off = [
                Point::new(bx, 25.0),
                Point::new(80.0, 3.0),
                Point::new(80.0, 47.0),
                Point::new(85.0, 15.0),
                Point::new(85.0, 35.0),
            ];
            (off, far_defense(), (bx, 25.0, 3.0))
        });
        let f = extract_features(&play, &HashMap::new(), &CourtSpec::nba());
        // shooter ends 18.75 ft from the basket, which is fine for extraction
        let f = f.unwrap().features;
        assert!((f.ball_path_len - 30.0).abs() < 1e-9);
        assert!((f.ball_mean_speed - 15.0).abs() < 1e-9);
        assert!((f.shooter_path_len - 30.0).abs() < 1e-9);
    }

    #[test]
    fn square_offense_hull() {
        let play = scripted_play(30, |_, _| {
            let off = [
                Point::new(60.0, 20.0),
                Point::new(70.0, 20.0),
                Point::new(70.0, 30.0),
                Point::new(60.0, 30.0),
                Point::new(65.0, 25.0),
            ];
            (off, far_defense(), (60.0, 20.0, 3.0))
        });
        let f = extract_features(&play, &HashMap::new(), &CourtSpec::nba()).unwrap().features;
        assert!((f.off_hull_area_mean - 100.0).abs() < 1e-9);
    }

    #[test]
    fn passes_counted_with_hysteresis() {
        // ball moves from teammate 1 to the shooter; a jittery midpoint pass
        // does not produce extra changes
        let play = scripted_play(100, |i, _| {
            let off = [
                Point::new(65.0, 25.0),
                Point::new(65.0, 45.0),
                Point::new(80.0, 3.0),
                Point::new(85.0, 15.0),
                Point::new(85.0, 35.0),
            ];
            let by = if i < 40 {
                44.5
            } else if i < 60 {
                44.5 - (i - 40) as f64 
            } else {
                25.5
            };
            let jitter = if i % 2 == 0 { 0.3 } else { -0.3 };
            (off, far_defense(), (65.0 + jitter, by, 3.0))
        });
        let f = extract_features(&play, &HashMap::new(), &CourtSpec::nba()).unwrap().features;
        assert_eq!(f.touch_changes, 1);
    }

    #[test]
    fn corner_and_bios() {
        let play = scripted_play(10, |_, _| {
            let off = [
                Point::new(88.0, 2.0),
                Point::new(65.0, 45.0),
                Point::new(60.0, 3.0),
                Point::new(70.0, 15.0),
                Point::new(70.0, 35.0),
            ];
            let mut def = far_defense();
            def[0] = Point::new(86.0, 6.0);
            (off, def, (88.0, 2.5, 5.0))
        });
        let mut bios = HashMap::new();
        let bio = |id, h, w, e, p| PlayerBio {
            player_id: PlayerId(id),
            name: String::new(),
            height_cm: h,
            weight_kg: w,
            experience_yr: e,
            position: p,
        };
        bios.insert(PlayerId(100), bio(100, 190.0, 85.0, 6.0, Position::G));
        bios.insert(PlayerId(200), bio(200, 200.0, 95.0, 2.0, Position::G));
        let out = extract_features(&play, &bios, &CourtSpec::nba()).unwrap();
        let f = out.features;
        assert!(f.corner_flag);
        assert!((f.shot_dist - ((0.75f64).powi(2) + 23.0f64.powi(2)).sqrt()).abs() < 1e-12);
        assert_eq!((f.height_diff_cm, f.weight_diff_kg, f.exp_diff_yr), (-10.0, -10.0, 4.0));
        assert!(f.pos_match);
        assert!(out.missing_bios.is_empty());

        bios.remove(&PlayerId(200));
        let out = extract_features(&play, &bios, &CourtSpec::nba()).unwrap();
        assert_eq!(out.missing_bios, vec![PlayerId(200)]);
        assert_eq!(out.features.height_diff_cm, 0.0);
        assert!(!out.features.pos_match);
    }

    #[test]
    fn single_frame_window_rejected() {
        let play = scripted_play(1, |_, _| {
            let off = [Point::new(65.0, 25.0); 5];
            (off, far_defense(), (65.0, 25.0, 3.0))
        });
        assert!(extract_features(&play, &HashMap::new(), &CourtSpec::nba()).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
