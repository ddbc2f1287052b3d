//! Per-game processing shared by the command line and the tests: join
//! tracking to play-by-play, cut three-point plays and extract their
//! features.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, Warnings};
use crate::features::{extract_rows, FeatureConfig, FeatureRow};
use crate::ingest::{infer_sides, segment_three_point_plays, GameBundle, SegmentConfig, TrackingGame};
use crate::model::{CourtSpec, GameSides, PlayEvent, PlayerBio, PlayerId};
use crate::player_model::GamesIndex;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub court: CourtSpec,
    pub segment: SegmentConfig,
    pub features: FeatureConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GameSummary {
    pub game_id: String,
    pub events: usize,
    pub moments: usize,
    pub three_point_events: usize,
    pub plays: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone)]
pub struct GameOutput {
    pub summary: GameSummary,
    /// Feature rows without the shooter encoding.
    pub rows: Vec<FeatureRow>,
    pub games: GamesIndex,
    pub warnings: Warnings,
}

pub fn process_game(
    tracking: TrackingGame,
    pbp: &[PlayEvent],
    bios: &HashMap<PlayerId, PlayerBio>,
    sides: Option<&GameSides>,
    cfg: &PipelineConfig,
) -> Result<GameOutput> {
    let mut summary = GameSummary {
        game_id: tracking.game_id.clone(),
        events: tracking.events.len(),
        moments: tracking.moment_count(),
        ..GameSummary::default()
    };
    let (bundle, mut warnings) = GameBundle::join(tracking, pbp)?;
    let mut games = GamesIndex::new();
    games.add_game(&bundle.game_id, bundle.players());
    summary.three_point_events = bundle.three_point_events().count();
    let sides = match sides {
        Some(s) => s.clone(),
        None if summary.three_point_events == 0 => GameSides::new(bundle.game_id.clone()),
        None => infer_sides(&bundle, &cfg.court, &cfg.segment)?,
    };
    let seg = segment_three_point_plays(&bundle, &sides, &cfg.court, &cfg.segment);
    warnings.merge(seg.warnings);
    summary.plays = seg.plays.len();
    summary.dropped = seg.dropped.len();
    let rows = extract_rows(&seg.plays, bios, &cfg.court, &mut warnings);
    Ok(GameOutput {
        summary,
        rows,
        games,
        warnings,
    })
}
