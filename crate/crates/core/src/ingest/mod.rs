//! Reading tracking, play-by-play and bio files, joining them per game and
//! segmenting three-point plays.

mod segment;
mod tables;
mod tracking;

pub use segment::{
    detect_release, infer_sides, segment_three_point_plays, DroppedPlay, GameBundle,
    SegmentConfig, Segmentation,
};
pub use tables::{
    parse_playbyplay, parse_player_bio, read_playbyplay, read_player_bio, write_playbyplay,
    write_player_bio, BIO_HEADER, PBP_HEADER, THREE_POINT_TOKEN,
};
pub use tracking::{
    parse_tracking_file, parse_tracking_str, serialize_tracking, write_tracking_file,
    EventMoments, TrackingGame, NOMINAL_FRAME_RATE_HZ,
};
