//! Joining tracking moments to play-by-play and cutting three-point play
//! windows that end at the shot release.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warnings};
use crate::model::{
    attacking_basket, CourtSpec, EventType, GameSides, Moment, PlayEvent, PlayerId, TeamId,
    ThreePointPlay,
};

use super::tracking::TrackingGame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentConfig {
    /// Trailing window length before release, seconds.
    pub window_s: f64,
    /// Minimum usable tracking before release, seconds.
    pub min_window_s: f64,
    /// Ball-to-shooter distance counted as possession at release, feet.
    pub release_radius_ft: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            window_s: 5.0,
            min_window_s: 1.0,
            release_radius_ft: 2.5,
        }
    }
}

/// A game with tracking joined to its play-by-play.
#[derive(Debug, Clone, PartialEq)]
pub struct GameBundle {
    pub game_id: String,
    pub events: BTreeMap<i64, Vec<Moment>>,
    pub plays: Vec<PlayEvent>,
    pub rosters: BTreeMap<TeamId, BTreeSet<PlayerId>>,
    pub frame_rate_hz: f64,
}

impl GameBundle {
    /// Joins a tracking game with play-by-play rows on the event id.
    ///
    /// Play-by-play rows from other games are ignored. Tracking events with no
    /// play-by-play row are dropped with a warning; moments within an event are
    /// reduced to a strictly increasing wall-clock sequence.
    pub fn join(tracking: TrackingGame, plays: &[PlayEvent]) -> Result<(GameBundle, Warnings)> {
        let mut warnings = Warnings::new();
        let rosters = tracking.rosters();
        let mut owner: BTreeMap<PlayerId, TeamId> = BTreeMap::new();
        for (team, players) in &rosters {
            for p in players {
                if let Some(other) = owner.insert(*p, *team) {
                    return Err(Error::MisJoined {
                        event_id: -1,
                        reason: format!("player {p} listed for teams {other} and {team}"),
                    });
                }
            }
        }
        if !rosters.is_empty() && rosters.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "game {} has {} teams in tracking, expected 2",
                tracking.game_id,
                rosters.len()
            )));
        }
        let plays: Vec<PlayEvent> = plays
            .iter()
            .filter(|p| p.game_id == tracking.game_id)
            .cloned()
            .collect();
        let known: BTreeSet<i64> = plays.iter().map(|p| p.event_id).collect();
        let mut events: BTreeMap<i64, Vec<Moment>> = BTreeMap::new();
        for ev in tracking.events {
            if !known.contains(&ev.event_id) {
                warnings.push(
                    "event_unjoined",
                    format!("tracking event {} has no play-by-play row", ev.event_id),
                );
                continue;
            }
            if events.contains_key(&ev.event_id) {
                warnings.push("event_duplicate", format!("tracking event {} repeated", ev.event_id));
                continue;
            }
            let mut moments: Vec<Moment> = Vec::with_capacity(ev.moments.len());
            for m in ev.moments {
                match moments.last() {
                    Some(prev) if m.wall_clock_ms <= prev.wall_clock_ms => {}
                    _ => moments.push(m),
                }
            }
            events.insert(ev.event_id, moments);
        }
        Ok((
            GameBundle {
                game_id: tracking.game_id,
                events,
                plays,
                rosters,
                frame_rate_hz: tracking.frame_rate_hz,
            },
            warnings,
        ))
    }

    pub fn team_of(&self, player: PlayerId) -> Option<TeamId> {
        self.rosters
            .iter()
            .find(|(_, players)| players.contains(&player))
            .map(|(t, _)| *t)
    }

    pub fn three_point_events(&self) -> impl Iterator<Item = &PlayEvent> {
        self.plays.iter().filter(|p| p.is_three)
    }

    pub fn players(&self) -> BTreeSet<PlayerId> {
        self.rosters.values().flatten().copied().collect()
    }
}

/// Index of the release moment within an event.
///
/// The release is the last moment, before the ball first rises above the rim,
/// at which the ball is within `radius_ft` of the shooter. Without a rim
/// crossing the moment of maximum ball height is used.
pub fn detect_release(
    moments: &[Moment],
    shooter: PlayerId,
    court: &CourtSpec,
    radius_ft: f64,
) -> Result<usize> {
    let near = |m: &Moment| {
        m.player(shooter)
            .is_some_and(|p| p.xy().dist(m.ball.xy()) <= radius_ft)
    };
    let event_id = -1;
    if !moments.iter().any(near) {
        return Err(Error::MisJoined {
            event_id,
            reason: format!("ball never within {radius_ft} ft of shooter {shooter}"),
        });
    }
    match moments.iter().position(|m| m.ball.z > court.rim_height) {
        Some(cross) => moments[..cross]
            .iter()
            .rposition(near)
            .ok_or_else(|| Error::MisJoined {
                event_id,
                reason: format!("ball not with shooter {shooter} before rising above the rim"),
            }),
        None => {
            let mut best = 0;
            for (i, m) in moments.iter().enumerate() {
                if m.ball.z > moments[best].ball.z {
                    best = i;
                }
            }
            Ok(best)
        }
    }
}

/// Infers each team's first-half attacking side from where its period-1 shots
/// were taken, falling back to period 2, then second-half shots (mirrored),
/// then the opposite of the other team.
pub fn infer_sides(bundle: &GameBundle, court: &CourtSpec, cfg: &SegmentConfig) -> Result<GameSides> {
    let mut sides = GameSides::new(bundle.game_id.clone());
    // per team: tiers of (right votes, left votes)
    let mut votes: BTreeMap<TeamId, [(u32, u32); 3]> = BTreeMap::new();
    for ev in bundle.plays.iter().filter(|p| p.event_type.is_shot()) {
        let (Some(shooter), Some(moments)) = (ev.shooter_id, bundle.events.get(&ev.event_id)) else {
            continue;
        };
        let Some(team) = bundle.team_of(shooter).or(ev.team_id) else {
            continue;
        };
        let idx = detect_release(moments, shooter, court, cfg.release_radius_ft)
            .ok()
            .or_else(|| moments.iter().rposition(|m| m.player(shooter).is_some()));
        let Some(idx) = idx else { continue };
        let m = &moments[idx];
        let Some(p) = m.player(shooter) else { continue };
        let (tier, mirrored) = match m.period {
            1 => (0, false),
            2 => (1, false),
            _ => (2, true),
        };
        let right = (p.x > court.midline_x()) != mirrored;
        let entry = &mut votes.entry(team).or_insert([(0, 0); 3])[tier];
        if right {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    let decide = |tiers: &[(u32, u32); 3]| {
        tiers
            .iter()
            .find(|(r, l)| r != l)
            .map(|(r, l)| r > l)
    };
    let teams: Vec<TeamId> = bundle.rosters.keys().copied().collect();
    let mut decided: BTreeMap<TeamId, Option<bool>> = BTreeMap::new();
    for t in &teams {
        decided.insert(*t, votes.get(t).and_then(decide));
    }
    for t in &teams {
        let side = match decided[t] {
            Some(s) => s,
            None => {
                let other = teams.iter().find(|o| *o != t).and_then(|o| decided[o]);
                match other {
                    Some(s) => !s,
                    None => {
                        return Err(Error::InvalidArgument(format!(
                            "cannot infer attacking side of team {t} in game {}",
                            bundle.game_id
                        )))
                    }
                }
            }
        };
        sides.attacks_right_first_half.insert(*t, side);
    }
    Ok(sides)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedPlay {
    pub event_id: i64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Segmentation {
    pub plays: Vec<ThreePointPlay>,
    pub dropped: Vec<DroppedPlay>,
    pub warnings: Warnings,
}

impl Segmentation {
    fn drop_play(&mut self, event_id: i64, kind: &str, reason: String) {
        self.warnings.push(kind, format!("event {event_id}: {reason}"));
        self.dropped.push(DroppedPlay { event_id, reason });
    }
}

/// One play per three-point event with enough tracking before the release.
/// Every three-point event ends up either in `plays` or in `dropped`.
pub fn segment_three_point_plays(
    bundle: &GameBundle,
    sides: &GameSides,
    court: &CourtSpec,
    cfg: &SegmentConfig,
) -> Segmentation {
    let mut out = Segmentation::default();
    let window_ms = (cfg.window_s * 1000.0).round() as i64;
    let min_ms = (cfg.min_window_s * 1000.0).round() as i64;
    for ev in bundle.three_point_events() {
        let shooter = ev.shooter_id.expect("three-point events carry a shooter");
        let Some(moments) = bundle.events.get(&ev.event_id) else {
            out.drop_play(ev.event_id, "play_dropped_no_tracking", "no tracking moments".into());
            continue;
        };
        if !moments.iter().any(|m| m.player(shooter).is_some()) {
            out.drop_play(
                ev.event_id,
                "play_dropped_shooter_absent",
                format!("shooter {shooter} absent from tracking"),
            );
            continue;
        }
        let release = match detect_release(moments, shooter, court, cfg.release_radius_ft) {
            Ok(r) => r,
            Err(e) => {
                out.drop_play(ev.event_id, "play_dropped_release", e.to_string());
                continue;
            }
        };
        let release_ms = moments[release].wall_clock_ms;
        let start = moments[..=release]
            .iter()
            .position(|m| m.wall_clock_ms >= release_ms - window_ms)
            .unwrap_or(release);
        let window = &moments[start..=release];
        let contiguous = window.windows(2).all(|w| {
            w[1].period == w[0].period && w[1].game_clock_s <= w[0].game_clock_s
        });
        if !contiguous {
            out.drop_play(ev.event_id, "play_dropped_clock_reset", "clock reset inside window".into());
            continue;
        }
        if release_ms - window[0].wall_clock_ms < min_ms {
            out.drop_play(
                ev.event_id,
                "play_dropped_short_window",
                format!(
                    "only {} ms of tracking before release",
                    release_ms - window[0].wall_clock_ms
                ),
            );
            continue;
        }
        if window.iter().any(|m| m.player(shooter).is_none()) {
            out.drop_play(
                ev.event_id,
                "play_dropped_shooter_absent",
                format!("shooter {shooter} missing from part of the window"),
            );
            continue;
        }
        let team = match bundle.team_of(shooter) {
            Some(t) => t,
            None => {
                out.drop_play(ev.event_id, "play_dropped_shooter_absent", "shooter not on a roster".into());
                continue;
            }
        };
        let basket = match attacking_basket(team, window[window.len() - 1].period, sides, court) {
            Ok(b) => b,
            Err(e) => {
                out.drop_play(ev.event_id, "play_dropped_sides", e.to_string());
                continue;
            }
        };
        out.plays.push(ThreePointPlay {
            game_id: bundle.game_id.clone(),
            event_id: ev.event_id,
            shooter_id: shooter,
            shooter_team_id: team,
            made: ev.event_type == EventType::MadeShot,
            release_index: window.len() - 1,
            window: window.to_vec(),
            attacking_basket: basket,
        });
    }
    out
}
