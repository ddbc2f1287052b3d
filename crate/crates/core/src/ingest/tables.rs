//! Play-by-play and player-bio CSV files.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result, Warnings};
use crate::model::{EventType, PlayEvent, PlayerBio, PlayerId, Position, TeamId};

pub const PBP_HEADER: [&str; 8] = [
    "GAME_ID",
    "EVENTNUM",
    "EVENTMSGTYPE",
    "PERIOD",
    "GAME_CLOCK_S",
    "TEAM_ID",
    "PLAYER1_ID",
    "DESCRIPTION",
];

pub const BIO_HEADER: [&str; 6] = [
    "PLAYER_ID",
    "NAME",
    "HEIGHT_CM",
    "WEIGHT_KG",
    "EXPERIENCE_YR",
    "POSITION",
];

/// Exact, case-sensitive marker for three-point attempts in descriptions.
pub const THREE_POINT_TOKEN: &str = "3PT";

fn column_indices(headers: &csv::StringRecord, required: &[&str]) -> Result<Vec<usize>> {
    required
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| Error::MissingColumn((*name).to_string()))
        })
        .collect()
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).from_reader(r)
}

fn field<'a>(rec: &'a csv::StringRecord, idx: usize, name: &str) -> std::result::Result<&'a str, String> {
    rec.get(idx).map(str::trim).ok_or_else(|| format!("missing {name}"))
}

fn num<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str) -> std::result::Result<T, String> {
    let s = field(rec, idx, name)?;
    s.parse().map_err(|_| format!("bad {name} {s:?}"))
}

fn optional_id(rec: &csv::StringRecord, idx: usize, name: &str) -> std::result::Result<Option<i64>, String> {
    let s = field(rec, idx, name)?;
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| format!("bad {name} {s:?}"))
    }
}

pub fn parse_playbyplay(path: &Path) -> Result<(Vec<PlayEvent>, Warnings)> {
    read_playbyplay(open(path)?)
}

pub fn read_playbyplay<R: Read>(r: R) -> Result<(Vec<PlayEvent>, Warnings)> {
    let mut rdr = reader(r);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    let idx = column_indices(&headers, &PBP_HEADER)?;
    let mut warnings = Warnings::new();
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let line = line + 2;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                warnings.push("pbp_row_skipped", format!("line {line}: {e}"));
                continue;
            }
        };
        match pbp_row(&rec, &idx) {
            Ok(ev) => out.push(ev),
            Err(reason) => warnings.push("pbp_row_skipped", format!("line {line}: {reason}")),
        }
    }
    Ok((out, warnings))
}

fn pbp_row(rec: &csv::StringRecord, idx: &[usize]) -> std::result::Result<PlayEvent, String> {
    let game_id = field(rec, idx[0], "GAME_ID")?.to_string();
    let event_id: i64 = num(rec, idx[1], "EVENTNUM")?;
    let code: i64 = num(rec, idx[2], "EVENTMSGTYPE")?;
    let period: u32 = num(rec, idx[3], "PERIOD")?;
    let game_clock_s: f64 = num(rec, idx[4], "GAME_CLOCK_S")?;
    let team_id = optional_id(rec, idx[5], "TEAM_ID")?.map(TeamId);
    let shooter_id = optional_id(rec, idx[6], "PLAYER1_ID")?.map(PlayerId);
    let description = field(rec, idx[7], "DESCRIPTION")?.to_string();
    let event_type = EventType::from_code(code);
    let is_three = event_type.is_shot() && description.contains(THREE_POINT_TOKEN);
    if is_three && shooter_id.is_none() {
        return Err(format!("three-point event {event_id} without PLAYER1_ID"));
    }
    Ok(PlayEvent {
        game_id,
        event_id,
        event_type,
        is_three,
        shooter_id,
        team_id,
        period,
        game_clock_s,
        description,
    })
}

pub fn write_playbyplay<W: std::io::Write>(w: W, events: &[PlayEvent]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::parse("play-by-play output", e.to_string());
    wtr.write_record(PBP_HEADER).map_err(csv_err)?;
    for ev in events {
        let code = match ev.event_type {
            EventType::MadeShot => "1",
            EventType::MissedShot => "2",
            EventType::Other => "0",
        };
        wtr.write_record([
            ev.game_id.clone(),
            ev.event_id.to_string(),
            code.to_string(),
            ev.period.to_string(),
            ev.game_clock_s.to_string(),
            ev.team_id.map(|t| t.to_string()).unwrap_or_default(),
            ev.shooter_id.map(|p| p.to_string()).unwrap_or_default(),
            ev.description.clone(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::io("play-by-play output", e))?;
    Ok(())
}

pub fn parse_player_bio(path: &Path) -> Result<(Vec<PlayerBio>, Warnings)> {
    read_player_bio(open(path)?)
}

/// Reads bios; on duplicate ids the later row wins but keeps the position of
/// the first occurrence.
pub fn read_player_bio<R: Read>(r: R) -> Result<(Vec<PlayerBio>, Warnings)> {
    let mut rdr = reader(r);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    let idx = column_indices(&headers, &BIO_HEADER)?;
    let mut warnings = Warnings::new();
    let mut out: Vec<PlayerBio> = Vec::new();
    let mut seen: HashMap<PlayerId, usize> = HashMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let line = line + 2;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                warnings.push("bio_row_skipped", format!("line {line}: {e}"));
                continue;
            }
        };
        let bio = match bio_row(&rec, &idx) {
            Ok(b) => b,
            Err(reason) => {
                warnings.push("bio_row_skipped", format!("line {line}: {reason}"));
                continue;
            }
        };
        match seen.get(&bio.player_id) {
            Some(&i) => {
                warnings.push(
                    "bio_duplicate",
                    format!("line {line}: player {} repeated, later row kept", bio.player_id),
                );
                out[i] = bio;
            }
            None => {
                seen.insert(bio.player_id, out.len());
                out.push(bio);
            }
        }
    }
    Ok((out, warnings))
}

fn bio_row(rec: &csv::StringRecord, idx: &[usize]) -> std::result::Result<PlayerBio, String> {
    let pos_raw = field(rec, idx[5], "POSITION")?;
    let bio = PlayerBio {
        player_id: PlayerId(num(rec, idx[0], "PLAYER_ID")?),
        name: field(rec, idx[1], "NAME")?.to_string(),
        height_cm: num(rec, idx[2], "HEIGHT_CM")?,
        weight_kg: num(rec, idx[3], "WEIGHT_KG")?,
        experience_yr: num(rec, idx[4], "EXPERIENCE_YR")?,
        position: Position::parse(pos_raw).ok_or_else(|| format!("bad POSITION {pos_raw:?}"))?,
    };
    let v = bio.violations();
    if v.is_empty() {
        Ok(bio)
    } else {
        Err(v.join("; "))
    }
}

pub fn write_player_bio<W: std::io::Write>(w: W, bios: &[PlayerBio]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::parse("bio output", e.to_string());
    wtr.write_record(BIO_HEADER).map_err(csv_err)?;
    for b in bios {
        wtr.write_record([
            b.player_id.to_string(),
            b.name.clone(),
            b.height_cm.to_string(),
            b.weight_kg.to_string(),
            b.experience_yr.to_string(),
            b.position.as_str().to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::io("bio output", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PBP: &str = "GAME_ID,EVENTNUM,EVENTMSGTYPE,PERIOD,GAME_CLOCK_S,TEAM_ID,PLAYER1_ID,DESCRIPTION\n\
        0021500001,2,1,1,700.0,10,201939,Curry 26' 3PT Jump Shot\n\
        0021500001,3,2,1,690.0,20,203076,Davis 12' Jump Shot\n\
        0021500001,4,6,1,680.0,20,203076,Davis Shooting Foul\n\
        0021500001,x,2,1,670.0,20,203076,broken\n\
        0021500001,6,2,1,660.0,20,203076,MISS Davis 25' 3pt Jump Shot\n";

    #[test]
    fn maps_event_codes_and_three_token() {
        let (evs, w) = read_playbyplay(PBP.as_bytes()).unwrap();
        assert_eq!(evs.len(), 4);
        assert_eq!(w.count("pbp_row_skipped"), 1);
        assert_eq!((evs[0].event_type, evs[0].is_three), (EventType::MadeShot, true));
        assert_eq!(evs[0].shooter_id, Some(PlayerId(201939)));
        assert_eq!((evs[1].event_type, evs[1].is_three), (EventType::MissedShot, false));
        assert_eq!((evs[2].event_type, evs[2].is_three), (EventType::Other, false));
        // lower-case token does not count
        assert!(!evs[3].is_three);
    }

    #[test]
    fn missing_column_named() {
        let err = read_playbyplay("GAME_ID,EVENTNUM\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "EVENTMSGTYPE"), "{err}");
    }

    #[test]
    fn bio_rows() {
        let text = "PLAYER_ID,NAME,HEIGHT_CM,WEIGHT_KG,EXPERIENCE_YR,POSITION\n\
            201939,Stephen Curry,191,86,6,G\n\
            1,Too Tall,300,100,1,C\n\
            2,First,200,100,1,F-C\n\
            2,Second,201,101,2,C\n";
        let (bios, w) = read_player_bio(text.as_bytes()).unwrap();
        assert_eq!(bios.len(), 2);
        let curry = &bios[0];
        assert_eq!(
            (curry.height_cm, curry.weight_kg, curry.experience_yr, curry.position),
            (191.0, 86.0, 6.0, Position::G)
        );
        assert_eq!(w.count("bio_row_skipped"), 1);
        assert_eq!(w.count("bio_duplicate"), 1);
        assert_eq!(bios[1].name, "Second");
        assert_eq!(bios[1].position, Position::C);
    }

    #[test]
    fn pbp_write_read_round_trip() {
        let (evs, _) = read_playbyplay(PBP.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_playbyplay(&mut buf, &evs).unwrap();
        let (again, w) = read_playbyplay(buf.as_slice()).unwrap();
        assert!(w.is_empty());
        assert_eq!(again, evs);
    }
}
