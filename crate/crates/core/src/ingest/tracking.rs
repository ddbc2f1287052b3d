//! Tracking game files: JSON documents holding one array of moments per event.
//!
//! Each moment is `[period, wall_clock_ms, game_clock_s, shot_clock_s|null,
//! null, entries]` where `entries` lists the ball first (team and player id
//! -1) followed by ten players as `[team_id, player_id, x, y, z]`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warnings};
use crate::model::{clamp_moment, BallPos, CourtSpec, Moment, PlayerId, PlayerPos, TeamId};

/// Nominal SportVU sampling rate.
pub const NOMINAL_FRAME_RATE_HZ: f64 = 25.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EventMoments {
    pub event_id: i64,
    pub moments: Vec<Moment>,
}

/// The moments portion of a game, as read from a tracking file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingGame {
    pub game_id: String,
    pub events: Vec<EventMoments>,
    /// Median inter-frame rate over consecutive moments, or the nominal
    /// rate when fewer than two moments exist.
    pub frame_rate_hz: f64,
}

impl TrackingGame {
    pub fn moment_count(&self) -> usize {
        self.events.iter().map(|e| e.moments.len()).sum()
    }

    /// Player ids seen on each team.
    pub fn rosters(&self) -> BTreeMap<TeamId, BTreeSet<PlayerId>> {
        let mut out: BTreeMap<TeamId, BTreeSet<PlayerId>> = BTreeMap::new();
        for m in self.events.iter().flat_map(|e| &e.moments) {
            for p in &m.players {
                out.entry(p.team_id).or_default().insert(p.player_id);
            }
        }
        out
    }
}

type RawEntry = (i64, i64, f64, f64, f64);

#[derive(Serialize, Deserialize)]
struct RawMoment(
    u32,
    i64,
    f64,
    Option<f64>,
    Option<serde_json::Value>,
    Vec<RawEntry>,
);

#[derive(Serialize, Deserialize)]
struct RawEvent {
    #[serde(rename = "eventId")]
    event_id: i64,
    moments: Vec<RawMoment>,
}

#[derive(Serialize, Deserialize)]
struct RawGame {
    gameid: String,
    events: Vec<RawEvent>,
}

pub fn parse_tracking_file(path: &Path, court: &CourtSpec) -> Result<(TrackingGame, Warnings)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tracking_str(&text, court).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}:{location}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn parse_tracking_str(text: &str, court: &CourtSpec) -> Result<(TrackingGame, Warnings)> {
    let raw: RawGame = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let mut warnings = Warnings::new();
    let mut events = Vec::with_capacity(raw.events.len());
    for ev in raw.events {
        let mut moments = Vec::with_capacity(ev.moments.len());
        for (i, rm) in ev.moments.into_iter().enumerate() {
            match moment_from_raw(rm) {
                Err(reason) => warnings.push(
                    "moment_skipped",
                    format!("event {} moment {i}: {reason}", ev.event_id),
                ),
                Ok(m) => match clamp_moment(m, court) {
                    Ok(m) => moments.push(m),
                    Err(v) => warnings.push(
                        "moment_skipped",
                        format!("event {} moment {i}: {}", ev.event_id, v.join("; ")),
                    ),
                },
            }
        }
        events.push(EventMoments {
            event_id: ev.event_id,
            moments,
        });
    }
    let frame_rate_hz = estimate_frame_rate(&events);
    Ok((
        TrackingGame {
            game_id: raw.gameid,
            events,
            frame_rate_hz,
        },
        warnings,
    ))
}

fn moment_from_raw(rm: RawMoment) -> std::result::Result<Moment, String> {
    let RawMoment(period, wall_clock_ms, game_clock_s, shot_clock_s, _, entries) = rm;
    let Some((&ball, rest)) = entries.split_first() else {
        return Err("no positional entries".into());
    };
    if ball.0 != -1 || ball.1 != -1 {
        return Err("first entry is not the ball".into());
    }
    if rest.len() != 10 {
        return Err(format!("player count {} != 10", rest.len()));
    }
    Ok(Moment {
        period,
        wall_clock_ms,
        game_clock_s,
        shot_clock_s,
        ball: BallPos {
            x: ball.2,
            y: ball.3,
            z: ball.4,
        },
        players: rest
            .iter()
            .map(|&(t, p, x, y, _z)| PlayerPos {
                team_id: TeamId(t),
                player_id: PlayerId(p),
                x,
                y,
            })
            .collect(),
    })
}

fn estimate_frame_rate(events: &[EventMoments]) -> f64 {
    let mut deltas: Vec<i64> = events
        .iter()
        .flat_map(|e| e.moments.windows(2).map(|w| w[1].wall_clock_ms - w[0].wall_clock_ms))
        .filter(|&d| d > 0)
        .collect();
    if deltas.is_empty() {
        return NOMINAL_FRAME_RATE_HZ;
    }
    deltas.sort_unstable();
    1000.0 / deltas[deltas.len() / 2] as f64
}

/// Canonical serialization: compact JSON, fixed key order, shortest
/// round-trip float formatting, player heights written as 0.
pub fn serialize_tracking(game: &TrackingGame) -> String {
    let raw = RawGame {
        gameid: game.game_id.clone(),
        events: game
            .events
            .iter()
            .map(|e| RawEvent {
                event_id: e.event_id,
                moments: e.moments.iter().map(moment_to_raw).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&raw).expect("tracking documents always serialize")
}

fn moment_to_raw(m: &Moment) -> RawMoment {
    let mut entries = Vec::with_capacity(11);
    entries.push((-1, -1, m.ball.x, m.ball.y, m.ball.z));
    entries.extend(
        m.players
            .iter()
            .map(|p| (p.team_id.0, p.player_id.0, p.x, p.y, 0.0)),
    );
    RawMoment(
        m.period,
        m.wall_clock_ms,
        m.game_clock_s,
        m.shot_clock_s,
        None,
        entries,
    )
}

pub fn write_tracking_file(path: &Path, game: &TrackingGame) -> Result<()> {
    crate::report::write_atomic(path, serialize_tracking(game).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const SAMPLE: &str = r#"{"gameid":"0021500001","events":[{"eventId":2,"moments":[[1,1446000000000,717.2,23.1,null,[[-1,-1,47.0,25.0,7.50],[10,101,40.0,20.0,0.0],[10,102,42.0,30.0,0.0],[10,103,60.0,25.0,0.0],[10,104,55.0,10.0,0.0],[10,105,55.0,40.0,0.0],[20,201,45.0,22.0,0.0],[20,202,44.0,28.0,0.0],[20,203,58.0,25.0,0.0],[20,204,53.0,12.0,0.0],[20,205,53.0,38.0,0.0]]]]}]}"#;

    #[test]
    fn parses_sample() {
        let (g, w) = parse_tracking_str(SAMPLE, &CourtSpec::nba()).unwrap();
        assert!(w.is_empty());
        assert_eq!(g.game_id, "0021500001");
        assert_eq!(g.events.len(), 1);
        assert_eq!(g.events[0].event_id, 2);
        assert_eq!(g.moment_count(), 1);
        let m = &g.events[0].moments[0];
        assert_eq!(m.ball.z, 7.50);
        assert_eq!(m.shot_clock_s, Some(23.1));
        assert_eq!(m.players.len(), 10);
        assert_eq!(g.frame_rate_hz, NOMINAL_FRAME_RATE_HZ);
    }

    #[test]
    fn empty_events_ok() {
        let (g, w) = parse_tracking_str(r#"{"gameid":"x","events":[]}"#, &CourtSpec::nba()).unwrap();
        assert_eq!(g.moment_count(), 0);
        assert!(w.is_empty());
    }

    #[test]
    fn eleven_players_skipped_with_warning() {
        let bad = SAMPLE.replace(
            "[20,205,53.0,38.0,0.0]]",
            "[20,205,53.0,38.0,0.0],[20,206,50.0,38.0,0.0]]",
        );
        let (g, w) = parse_tracking_str(&bad, &CourtSpec::nba()).unwrap();
        assert_eq!(g.moment_count(), 0);
        assert_eq!(w.count("moment_skipped"), 1);
    }

    #[test]
    fn malformed_reports_location() {
        let err = parse_tracking_str("{\"gameid\":\"x\",\n\"events\":[{\"eventId\":\"a\"}]}", &CourtSpec::nba())
            .unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn canonical_round_trip() {
        let court = CourtSpec::nba();
        let (g, _) = parse_tracking_str(SAMPLE, &court).unwrap();
        let canon = serialize_tracking(&g);
        let (g2, _) = parse_tracking_str(&canon, &court).unwrap();
        assert_eq!(g, g2);
        assert_eq!(serialize_tracking(&g2), canon);
        // differs from the sample only in float formatting
        assert_eq!(canon, SAMPLE.replace("7.50", "7.5"));
    }
}
