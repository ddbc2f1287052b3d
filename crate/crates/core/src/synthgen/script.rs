//! Geometry of one scripted three-point play.
//!
//! The shooter and four teammates move as a rigid formation, so the offensive
//! hull area is constant. The shooter's defender stands between the shooter
//! and the basket at a scripted gap; every other defender stands 3 ft behind
//! its man on the far side from the shooter, which keeps it farther away than
//! any scripted gap. The ball is held low, passed along a holder sequence,
//! gathered by the shooter and released on an arc.

use std::f64::consts::PI;

use rand::Rng;

use crate::geometry::{convex_hull, polygon_area, Point};
use crate::model::{BallPos, CourtSpec, Moment, PlayerId, PlayerPos, TeamId};

pub const FRAME_MS: i64 = 40;
pub const FRAME_S: f64 = 0.04;
/// Frames in the five-second window ending at the release, inclusive.
pub const WINDOW_FRAMES: usize = 126;
pub const PRE_FRAMES: usize = 10;
pub const RELEASE_FRAME: usize = PRE_FRAMES + WINDOW_FRAMES - 1;
pub const POST_FRAMES: usize = 20;
pub const EVENT_FRAMES: usize = RELEASE_FRAME + 1 + POST_FRAMES;

pub const MAX_GAP_FT: f64 = 13.0;
const MIN_TEAMMATE_FT: f64 = 12.0;
const MAX_TEAMMATE_FT: f64 = 34.0;
const MIN_SPACING_FT: f64 = 6.0;
const HELP_OFFSET_FT: f64 = 3.0;
const HAND_OFFSET_FT: f64 = 0.5;
const DRIBBLE_Z: f64 = 4.0;
const RELEASE_Z: f64 = 9.5;
const GATHER_FRAMES: usize = 7;
const COURT_MARGIN_FT: f64 = 0.5;
const GRAVITY: f64 = 32.2;

fn lerp(a: Point, b: Point, t: f64) -> Point {
    Point::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
}

fn unit(from: Point, to: Point) -> (f64, f64) {
    let d = from.dist(to);
    ((to.x - from.x) / d, (to.y - from.y) / d)
}

/// Nearest-defender gap over the window: falls from `hi` to `median`, holds
/// `median` around the middle, dips to `lo` and recovers to `release`. At
/// least half the window lies on each side of the plateau, so the median of
/// the series is exactly `median`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSchedule {
    pub median: f64,
    pub hi: f64,
    pub lo: f64,
    pub release: f64,
    pub lo_at: usize,
}

const PLATEAU: (usize, usize) = (60, 66);

impl GapSchedule {
    pub fn draw<R: Rng>(median: f64, rng: &mut R) -> GapSchedule {
        let hi = (median + rng.random_range(1.0..6.0)).min(MAX_GAP_FT);
        let lo = median * rng.random_range(0.2..0.9);
        let release = lo + (median - lo) * rng.random_range(0.0..0.95);
        GapSchedule {
            median,
            hi,
            lo,
            release,
            lo_at: rng.random_range(80..112),
        }
    }

    /// Gap at window index `w` (0 = first window frame).
    pub fn at(&self, w: usize) -> f64 {
        let (p0, p1) = PLATEAU;
        let last = WINDOW_FRAMES - 1;
        if w < p0 {
            self.median + (self.hi - self.median) * (p0 - w) as f64 / p0 as f64
        } else if w <= p1 {
            self.median
        } else if w == self.lo_at {
            self.lo
        } else if w < self.lo_at {
            let t = (w - p1) as f64 / (self.lo_at - p1) as f64;
            self.median + (self.lo - self.median) * t
        } else if w >= last {
            self.release
        } else {
            let t = (w - self.lo_at) as f64 / (last - self.lo_at) as f64;
            self.lo + (self.release - self.lo) * t
        }
    }

    pub fn mean(&self) -> f64 {
        (0..WINDOW_FRAMES).map(|w| self.at(w)).sum::<f64>() / WINDOW_FRAMES as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayScript {
    pub basket: Point,
    pub shooter_start: Point,
    pub shooter_spot: Point,
    pub arrive_frame: usize,
    /// Teammate offsets from the shooter.
    pub offsets: [(f64, f64); 4],
    pub gap: GapSchedule,
    /// Offense slots holding the ball in turn (0 is the shooter, last entry).
    pub holders: Vec<usize>,
    /// Event-frame spans `[start, end)` of each pass.
    pub passes: Vec<(usize, usize)>,
    pub arc_peak: f64,
}

/// Positions of the ten players and the ball at one event frame.
pub struct Frame {
    pub offense: [Point; 5],
    pub defense: [Point; 5],
    pub ball: BallPos,
}

impl PlayScript {
    pub fn shooter_at(&self, i: usize) -> Point {
        let t = (i as f64 / self.arrive_frame as f64).min(1.0);
        lerp(self.shooter_start, self.shooter_spot, t)
    }

    fn gap_at(&self, i: usize) -> f64 {
        if i < PRE_FRAMES {
            self.gap.hi
        } else {
            self.gap.at((i - PRE_FRAMES).min(WINDOW_FRAMES - 1))
        }
    }

    fn offense_at(&self, i: usize) -> [Point; 5] {
        let s = self.shooter_at(i);
        let mut out = [s; 5];
        for (k, o) in self.offsets.iter().enumerate() {
            out[k + 1] = Point::new(s.x + o.0, s.y + o.1);
        }
        out
    }

    fn hand(&self, offense: &[Point; 5], slot: usize) -> Point {
        let p = offense[slot];
        let (ux, uy) = unit(p, self.basket);
        Point::new(p.x + HAND_OFFSET_FT * ux, p.y + HAND_OFFSET_FT * uy)
    }

    pub fn frame(&self, i: usize) -> Frame {
        let offense = self.offense_at(i);
        let s = offense[0];
        let mut defense = [s; 5];
        let (ux, uy) = unit(s, self.basket);
        let g = self.gap_at(i);
        defense[0] = Point::new(s.x + g * ux, s.y + g * uy);
        for (k, o) in self.offsets.iter().enumerate() {
            let len = (o.0 * o.0 + o.1 * o.1).sqrt();
            let p = offense[k + 1];
            defense[k + 1] = Point::new(p.x + HELP_OFFSET_FT * o.0 / len, p.y + HELP_OFFSET_FT * o.1 / len);
        }
        Frame {
            offense,
            defense,
            ball: self.ball_at(i, &offense),
        }
    }

    fn ball_at(&self, i: usize, offense: &[Point; 5]) -> BallPos {
        if i > RELEASE_FRAME {
            let release_off = self.offense_at(RELEASE_FRAME);
            let start = self.hand(&release_off, 0);
            let tau = (i - RELEASE_FRAME) as f64 * FRAME_S;
            let (ux, uy) = unit(start, self.basket);
            let speed = start.dist(self.basket) / 1.1;
            let v0 = (2.0 * GRAVITY * (self.arc_peak - RELEASE_Z)).sqrt();
            return BallPos {
                x: start.x + speed * tau * ux,
                y: start.y + speed * tau * uy,
                z: RELEASE_Z + v0 * tau - GRAVITY / 2.0 * tau * tau,
            };
        }
        for (q, &(a, b)) in self.passes.iter().enumerate() {
            if i >= a && i < b {
                let t = (i - a) as f64 / (b - a) as f64;
                let p = lerp(self.hand(offense, self.holders[q]), self.hand(offense, self.holders[q + 1]), t);
                return BallPos {
                    x: p.x,
                    y: p.y,
                    z: DRIBBLE_Z + 2.0 * (PI * t).sin(),
                };
            }
        }
        let done = self.passes.iter().filter(|&&(_, b)| b <= i).count();
        let holder = self.holders[done];
        let p = self.hand(offense, holder);
        let gather_from = RELEASE_FRAME - GATHER_FRAMES;
        let z = if holder == 0 && i >= gather_from {
            DRIBBLE_Z + (RELEASE_Z - DRIBBLE_Z) * (i - gather_from) as f64 / GATHER_FRAMES as f64
        } else {
            DRIBBLE_Z
        };
        BallPos { x: p.x, y: p.y, z }
    }

    /// Every player inside the court, with a margin, at every frame.
    fn in_bounds(&self, court: &CourtSpec) -> bool {
        let ok = |p: Point| {
            p.x >= COURT_MARGIN_FT
                && p.x <= court.length - COURT_MARGIN_FT
                && p.y >= COURT_MARGIN_FT
                && p.y <= court.width - COURT_MARGIN_FT
        };
        // The formation only translates along a segment, so the end frames bound it.
        [0, self.arrive_frame, EVENT_FRAMES - 1].iter().all(|&i| {
            let f = self.frame(i);
            f.offense.iter().chain(&f.defense).all(|&p| ok(p))
        })
    }
}

/// Hull area of the shooter plus the teammate offsets.
pub fn formation_area(offsets: &[(f64, f64); 4]) -> f64 {
    let mut pts = vec![Point::new(0.0, 0.0)];
    pts.extend(offsets.iter().map(|o| Point::new(o.0, o.1)));
    polygon_area(&convex_hull(&pts).expect("five points"))
}

/// Draws teammate offsets whose hull with the shooter has exactly `area`.
/// Teammates sit along a spine through the shooter, at least 12 ft from the
/// shooter and 6 ft from each other; stretching the lateral coordinates
/// scales the hull area linearly.
fn draw_formation<R: Rng>(area: f64, rng: &mut R) -> Option<[(f64, f64); 4]> {
    let mut along = [0.0f64; 4];
    for _ in 0..50 {
        for a in along.iter_mut() {
            let mag = rng.random_range(MIN_TEAMMATE_FT..MAX_TEAMMATE_FT);
            *a = if rng.random_bool(0.5) { mag } else { -mag };
        }
        let spaced = (0..4).all(|i| (i + 1..4).all(|j| (along[i] - along[j]).abs() >= MIN_SPACING_FT));
        if !spaced {
            continue;
        }
        let side: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let psi = rng.random_range(0.0..2.0 * PI);
        let (dx, dy) = (psi.cos(), psi.sin());
        let place = |w: f64| -> [(f64, f64); 4] {
            std::array::from_fn(|k| (along[k] * dx - w * side[k] * dy, along[k] * dy + w * side[k] * dx))
        };
        let base = formation_area(&place(1.0));
        if base < 1e-3 {
            continue;
        }
        let w = area / base;
        if w * side.iter().fold(0.0f64, |m, s| m.max(s.abs())) > 40.0 {
            continue;
        }
        return Some(place(w));
    }
    None
}

/// Shooter location `dist` ft from `basket` at angle `theta` from the
/// direction towards mid-court.
pub fn spot(basket: Point, court: &CourtSpec, dist: f64, theta: f64) -> Point {
    let inward = if basket.x > court.midline_x() { -1.0 } else { 1.0 };
    Point::new(basket.x + inward * dist * theta.cos(), basket.y + dist * theta.sin())
}

pub struct ScriptTargets {
    pub ndd_median: f64,
    pub hull_area: f64,
    pub passes: usize,
    pub shot_dist: f64,
}

pub fn corner_flag(court: &CourtSpec, basket: Point, p: Point) -> bool {
    if basket.x < court.midline_x() {
        p.x <= court.corner_zone_depth
    } else {
        p.x >= court.length - court.corner_zone_depth
    }
}

/// Draws a script meeting the targets, or `None` when no feasible layout
/// was found.
pub fn draw_script<R: Rng>(t: &ScriptTargets, basket: Point, court: &CourtSpec, rng: &mut R) -> Option<PlayScript> {
    let max_lateral = court.width / 2.0 - 2.5;
    let theta_max = (max_lateral / t.shot_dist).min(1.0).asin();
    let corner_x = court.length - court.corner_zone_depth;
    for _ in 0..400 {
        let theta = rng.random_range(-theta_max..theta_max);
        let s = spot(basket, court, t.shot_dist, theta);
        // keep clear of the corner-zone boundary so jitter cannot flip the flag
        let boundary = if basket.x > court.midline_x() { corner_x } else { court.corner_zone_depth };
        if (s.x - boundary).abs() < 0.3 {
            continue;
        }
        let Some(offsets) = draw_formation(t.hull_area, rng) else {
            continue;
        };
        let mv = rng.random_range(0.0..8.0);
        let ang = rng.random_range(0.0..2.0 * PI);
        let start = Point::new(s.x + mv * ang.cos(), s.y + mv * ang.sin());
        let hold = rng.random_range(12..26);
        let arrive_frame = rng.random_range(40..RELEASE_FRAME - 30);
        let mut script = PlayScript {
            basket,
            shooter_start: start,
            shooter_spot: s,
            arrive_frame,
            offsets,
            gap: GapSchedule::draw(t.ndd_median, rng),
            holders: vec![0],
            passes: Vec::new(),
            arc_peak: rng.random_range(16.0..18.0),
        };
        // rotating the formation keeps its area and spacing
        let base = script.offsets;
        let fits = (0..16).any(|_| {
            let phi = rng.random_range(0.0..2.0 * PI);
            let (c, sn) = (phi.cos(), phi.sin());
            script.offsets = base.map(|(x, y)| (x * c - y * sn, x * sn + y * c));
            script.in_bounds(court)
        });
        if !fits {
            continue;
        }
        for _ in 0..20 {
            let mut holders = Vec::with_capacity(t.passes + 1);
            for _ in 0..t.passes {
                let prev = holders.last().copied();
                let h = loop {
                    let h = rng.random_range(1..5usize);
                    if Some(h) != prev {
                        break h;
                    }
                };
                holders.push(h);
            }
            holders.push(0);
            let first = PRE_FRAMES + 5;
            let last = RELEASE_FRAME - hold;
            let mut passes = Vec::with_capacity(t.passes);
            if t.passes > 0 {
                let seg = (last - first) / t.passes;
                for q in 0..t.passes {
                    let end = first + (q + 1) * seg;
                    let len = rng.random_range(10..19).min(seg - 4);
                    passes.push((end - len, end));
                }
            }
            script.holders = holders;
            script.passes = passes;
            if count_touches(&script) == t.passes {
                return Some(script);
            }
        }
    }
    None
}

/// Touch changes over the window as the feature extractor counts them
/// (nearest offensive player to the ball, with hysteresis).
fn count_touches(script: &PlayScript) -> usize {
    use crate::features::TOUCH_HYSTERESIS_FT;
    use crate::geometry::nearest_opponent;
    let mut count = 0;
    let f0 = script.frame(PRE_FRAMES);
    let mut holder = nearest_opponent(f0.ball_xy(), &f0.offense).0;
    for i in PRE_FRAMES + 1..=RELEASE_FRAME {
        let f = script.frame(i);
        let b = f.ball_xy();
        let current = b.dist(f.offense[holder]);
        let (cand, d) = nearest_opponent(b, &f.offense);
        if cand != holder && d < current - TOUCH_HYSTERESIS_FT {
            holder = cand;
            count += 1;
        }
    }
    count
}

impl Frame {
    pub fn ball_xy(&self) -> Point {
        Point::new(self.ball.x, self.ball.y)
    }
}

/// Per-entity bounded jitter: each offset is a running blend of uniform
/// draws, so it never leaves `[-amp, amp]` and moves smoothly.
pub struct Jitter {
    amp: f64,
    state: [(f64, f64, f64); 11],
}

impl Jitter {
    pub fn new(amp: f64) -> Self {
        Jitter {
            amp,
            state: [(0.0, 0.0, 0.0); 11],
        }
    }

    pub fn step<R: Rng>(&mut self, rng: &mut R) -> [(f64, f64, f64); 11] {
        if self.amp > 0.0 {
            for s in self.state.iter_mut() {
                s.0 = 0.8 * s.0 + 0.2 * rng.random_range(-self.amp..=self.amp);
                s.1 = 0.8 * s.1 + 0.2 * rng.random_range(-self.amp..=self.amp);
                s.2 = 0.8 * s.2 + 0.2 * rng.random_range(-self.amp..=self.amp);
            }
        }
        self.state
    }
}

pub struct Lineup {
    pub offense_team: TeamId,
    pub defense_team: TeamId,
    /// Offense ids, shooter first.
    pub offense: [PlayerId; 5],
    /// Defense ids; entry `k` guards offense slot `k`.
    pub defense: [PlayerId; 5],
    /// Whether the offense is listed first in each moment.
    pub offense_first: bool,
}

pub struct Clocks {
    pub period: u32,
    pub wall_ms_start: i64,
    pub game_clock_release: f64,
    pub shot_clock_release: f64,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Renders every event frame with jitter.
pub fn render<R: Rng>(
    script: &PlayScript,
    lineup: &Lineup,
    clocks: &Clocks,
    jitter_ft: f64,
    court: &CourtSpec,
    rng: &mut R,
) -> Vec<Moment> {
    let mut jitter = Jitter::new(jitter_ft);
    let clamp = |v: f64, hi: f64| v.clamp(0.0, hi);
    (0..EVENT_FRAMES)
        .map(|i| {
            let f = script.frame(i);
            let j = jitter.step(rng);
            let dt = (RELEASE_FRAME as f64 - i as f64) * FRAME_S;
            let mut players = Vec::with_capacity(10);
            let mut push = |team: TeamId, ids: &[PlayerId; 5], pts: &[Point; 5], base: usize| {
                for k in 0..5 {
                    players.push(PlayerPos {
                        team_id: team,
                        player_id: ids[k],
                        x: clamp(pts[k].x + j[base + k].0, court.length),
                        y: clamp(pts[k].y + j[base + k].1, court.width),
                    });
                }
            };
            if lineup.offense_first {
                push(lineup.offense_team, &lineup.offense, &f.offense, 1);
                push(lineup.defense_team, &lineup.defense, &f.defense, 6);
            } else {
                push(lineup.defense_team, &lineup.defense, &f.defense, 6);
                push(lineup.offense_team, &lineup.offense, &f.offense, 1);
            }
            Moment {
                period: clocks.period,
                wall_clock_ms: clocks.wall_ms_start + i as i64 * FRAME_MS,
                game_clock_s: round2(clocks.game_clock_release + dt),
                shot_clock_s: Some(round2((clocks.shot_clock_release + dt).clamp(0.0, 24.0))),
                ball: BallPos {
                    x: f.ball.x + j[0].0,
                    y: f.ball.y + j[0].1,
                    z: (f.ball.z + j[0].2).max(0.0),
                },
                players,
            }
        })
        .collect()
}
