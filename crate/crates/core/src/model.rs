//! Domain types shared across the pipeline: court geometry, tracking moments,
//! play-by-play events, player bios and segmented three-point plays.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Out-of-bounds distance (feet) still treated as tracking jitter and clamped.
pub const CLAMP_TOLERANCE_FT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamId(pub i64);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// NBA court dimensions in feet. The origin is one corner of the court, x runs
/// along the 94 ft length and y along the 50 ft width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CourtSpec {
    pub length: f64,
    pub width: f64,
    pub basket_left: Point,
    pub basket_right: Point,
    pub rim_height: f64,
    pub arc_radius: f64,
    pub corner_distance: f64,
    pub corner_zone_depth: f64,
}

impl Default for CourtSpec {
    fn default() -> Self {
        Self::nba()
    }
}

impl CourtSpec {
    pub const fn nba() -> Self {
        CourtSpec {
            length: 94.0,
            width: 50.0,
            basket_left: Point::new(5.25, 25.0),
            basket_right: Point::new(88.75, 25.0),
            rim_height: 10.0,
            arc_radius: 23.75,
            corner_distance: 22.0,
            corner_zone_depth: 14.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.length,
            self.width,
            self.basket_left.x,
            self.basket_left.y,
            self.basket_right.x,
            self.basket_right.y,
            self.rim_height,
            self.arc_radius,
            self.corner_distance,
            self.corner_zone_depth,
        ];
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("court values must be strictly positive".into()));
        }
        let mid = self.length / 2.0;
        let symmetric = ((mid - self.basket_left.x) - (self.basket_right.x - mid)).abs() < 1e-9
            && (self.basket_left.y - self.basket_right.y).abs() < 1e-9;
        if !symmetric {
            return Err(Error::Config("baskets must be symmetric about the midline".into()));
        }
        Ok(())
    }

    pub fn midline_x(&self) -> f64 {
        self.length / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPos {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BallPos {
    pub fn xy(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerPos {
    pub team_id: TeamId,
    pub player_id: PlayerId,
    pub x: f64,
    pub y: f64,
}

impl PlayerPos {
    pub fn xy(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// One tracking snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub period: u32,
    pub wall_clock_ms: i64,
    pub game_clock_s: f64,
    pub shot_clock_s: Option<f64>,
    pub ball: BallPos,
    pub players: Vec<PlayerPos>,
}

impl Moment {
    pub fn player(&self, id: PlayerId) -> Option<&PlayerPos> {
        self.players.iter().find(|p| p.player_id == id)
    }

    pub fn team_of(&self, id: PlayerId) -> Option<TeamId> {
        self.player(id).map(|p| p.team_id)
    }

    /// Length of the regulation or overtime period the moment belongs to.
    pub fn period_length_s(&self) -> f64 {
        if self.period <= 4 {
            720.0
        } else {
            300.0
        }
    }
}

/// Lists every invariant a moment violates. An empty list means the moment is valid.
pub fn validate_moment(m: &Moment, court: &CourtSpec) -> Vec<String> {
    let mut out = Vec::new();
    if m.players.len() != 10 {
        out.push(format!("player count {} != 10", m.players.len()));
    }
    let mut per_team: BTreeMap<TeamId, usize> = BTreeMap::new();
    for p in &m.players {
        *per_team.entry(p.team_id).or_default() += 1;
    }
    if m.players.len() == 10 && (per_team.len() != 2 || per_team.values().any(|&c| c != 5)) {
        let split: Vec<String> = per_team.values().map(|c| c.to_string()).collect();
        out.push(format!("team split {} != 5/5", split.join("/")));
    }
    for p in &m.players {
        if !(p.x.is_finite() && (0.0..=court.length).contains(&p.x)) {
            out.push(format!("x out of bounds (player {}: {})", p.player_id, p.x));
        }
        if !(p.y.is_finite() && (0.0..=court.width).contains(&p.y)) {
            out.push(format!("y out of bounds (player {}: {})", p.player_id, p.y));
        }
    }
    if !(m.ball.x.is_finite() && m.ball.y.is_finite()) {
        out.push("ball position not finite".to_string());
    }
    if !(m.ball.z.is_finite() && m.ball.z >= 0.0) {
        out.push(format!("ball z below floor ({})", m.ball.z));
    }
    if m.period < 1 {
        out.push("period < 1".to_string());
    }
    if !(0.0..=m.period_length_s()).contains(&m.game_clock_s) {
        out.push(format!("game clock out of range ({})", m.game_clock_s));
    }
    if let Some(sc) = m.shot_clock_s {
        if !(0.0..=24.0).contains(&sc) {
            out.push(format!("shot clock out of range ({sc})"));
        }
    }
    out
}

fn clamp_axis(v: f64, hi: f64) -> f64 {
    if v < 0.0 && v >= -CLAMP_TOLERANCE_FT {
        0.0
    } else if v > hi && v <= hi + CLAMP_TOLERANCE_FT {
        hi
    } else {
        v
    }
}

/// Clamps player coordinates that are out of bounds by at most
/// [`CLAMP_TOLERANCE_FT`] and small negative ball heights, then validates.
pub fn clamp_moment(mut m: Moment, court: &CourtSpec) -> std::result::Result<Moment, Vec<String>> {
    for p in &mut m.players {
        p.x = clamp_axis(p.x, court.length);
        p.y = clamp_axis(p.y, court.width);
    }
    if m.ball.z < 0.0 && m.ball.z >= -CLAMP_TOLERANCE_FT {
        m.ball.z = 0.0;
    }
    let violations = validate_moment(&m, court);
    if violations.is_empty() {
        Ok(m)
    } else {
        Err(violations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventType {
    MadeShot,
    MissedShot,
    Other,
}

impl EventType {
    pub fn from_code(code: i64) -> Self {
        match code {
            1 => EventType::MadeShot,
            2 => EventType::MissedShot,
            _ => EventType::Other,
        }
    }

    pub fn is_shot(self) -> bool {
        matches!(self, EventType::MadeShot | EventType::MissedShot)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayEvent {
    pub game_id: String,
    pub event_id: i64,
    pub event_type: EventType,
    pub is_three: bool,
    pub shooter_id: Option<PlayerId>,
    pub team_id: Option<TeamId>,
    pub period: u32,
    pub game_clock_s: f64,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Position {
    G,
    F,
    C,
}

impl Position {
    /// Maps a listed position onto {G, F, C} by its first letter, so hybrid
    /// listings such as "G-F" collapse to their primary role.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().chars().next()?.to_ascii_uppercase() {
            'G' => Some(Position::G),
            'F' => Some(Position::F),
            'C' => Some(Position::C),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Position::G => "G",
            Position::F => "F",
            Position::C => "C",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerBio {
    pub player_id: PlayerId,
    pub name: String,
    pub height_cm: f64,
    pub weight_kg: f64,
    pub experience_yr: f64,
    pub position: Position,
}

impl PlayerBio {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(150.0..=240.0).contains(&self.height_cm) {
            out.push(format!("height {} outside [150, 240]", self.height_cm));
        }
        if !(50.0..=180.0).contains(&self.weight_kg) {
            out.push(format!("weight {} outside [50, 180]", self.weight_kg));
        }
        if !(self.experience_yr >= 0.0) {
            out.push(format!("experience {} negative", self.experience_yr));
        }
        out
    }
}

/// Which basket a team attacks: the side each team attacks in the first half.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GameSides {
    pub game_id: String,
    pub attacks_right_first_half: BTreeMap<TeamId, bool>,
}

impl GameSides {
    pub fn new(game_id: impl Into<String>) -> Self {
        GameSides {
            game_id: game_id.into(),
            attacks_right_first_half: BTreeMap::new(),
        }
    }

    pub fn with_team(mut self, team: TeamId, attacks_right_first_half: bool) -> Self {
        self.attacks_right_first_half
            .insert(team, attacks_right_first_half);
        self
    }
}

/// Basket attacked by `team` in `period`. Sides swap once at halftime and
/// overtime periods keep the second-half sides.
pub fn attacking_basket(
    team: TeamId,
    period: u32,
    sides: &GameSides,
    court: &CourtSpec,
) -> Result<Point> {
    let right_h1 = *sides
        .attacks_right_first_half
        .get(&team)
        .ok_or_else(|| Error::UnknownTeam {
            game_id: sides.game_id.clone(),
            team,
        })?;
    let right = if period <= 2 { right_h1 } else { !right_h1 };
    Ok(if right {
        court.basket_right
    } else {
        court.basket_left
    })
}

/// A three-point attempt segmented from tracking data: the window ends at the
/// detected release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreePointPlay {
    pub game_id: String,
    pub event_id: i64,
    pub shooter_id: PlayerId,
    pub shooter_team_id: TeamId,
    pub made: bool,
    pub release_index: usize,
    pub window: Vec<Moment>,
    pub attacking_basket: Point,
}

impl ThreePointPlay {
    pub fn release(&self) -> &Moment {
        &self.window[self.release_index]
    }

    pub fn violations(&self, max_window_s: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.window.is_empty() {
            out.push("empty window".to_string());
            return out;
        }
        if self.release_index >= self.window.len() {
            out.push("release index out of range".to_string());
        }
        if self
            .window
            .windows(2)
            .any(|w| w[1].wall_clock_ms <= w[0].wall_clock_ms)
        {
            out.push("wall clock not strictly increasing".to_string());
        }
        if self.window.iter().any(|m| m.player(self.shooter_id).is_none()) {
            out.push("shooter missing from window".to_string());
        }
        let first = self.window.first().map(|m| m.wall_clock_ms).unwrap_or(0);
        let last = self.window.last().map(|m| m.wall_clock_ms).unwrap_or(0);
        let frame_ms = 40.0;
        if (last - first) as f64 > max_window_s * 1000.0 + frame_ms {
            out.push("window longer than the configured duration".to_string());
        }
        out
    }
}
