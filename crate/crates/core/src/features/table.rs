use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result, Warnings};
use crate::model::{CourtSpec, PlayerBio, PlayerId, ThreePointPlay};

use super::{encode_shooters, extract_features, EncodeConfig, FeatureVector, FEATURE_COLUMNS, INTEGER_COLUMNS, N_FEATURES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub game_id: String,
    pub event_id: i64,
    pub shooter_id: PlayerId,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub encode: EncodeConfig,
}

/// One row per play, columns in [`FEATURE_COLUMNS`] order plus `made`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<FeatureRow>,
}

#[derive(Debug, Clone)]
pub struct FeatureTableBuild {
    pub table: FeatureTable,
    pub warnings: Warnings,
}

/// Extracts features for every play (in parallel), drops plays that fail with
/// a counted warning, then fills the shooter encoding.
pub fn assemble_dataset(
    plays: &[ThreePointPlay],
    bios: &HashMap<PlayerId, PlayerBio>,
    court: &CourtSpec,
    cfg: &FeatureConfig,
) -> Result<FeatureTableBuild> {
    if plays.is_empty() {
        return Err(Error::Empty("empty dataset".into()));
    }
    let mut warnings = Warnings::new();
    let rows = extract_rows(plays, bios, court, &mut warnings);
    let table = encode_table(rows, cfg)?;
    Ok(FeatureTableBuild { table, warnings })
}

/// Feature rows for a batch of plays, without the shooter encoding. Plays
/// whose extraction fails or whose features break an invariant are dropped
/// with a `features_dropped` warning.
pub fn extract_rows(
    plays: &[ThreePointPlay],
    bios: &HashMap<PlayerId, PlayerBio>,
    court: &CourtSpec,
    warnings: &mut Warnings,
) -> Vec<FeatureRow> {
    let extracted: Vec<_> = plays
        .par_iter()
        .map(|p| extract_features(p, bios, court))
        .collect();
    let mut rows = Vec::with_capacity(plays.len());
    for (play, out) in plays.iter().zip(extracted) {
        let key = format!("game {} event {}", play.game_id, play.event_id);
        match out {
            Err(e) => warnings.push("features_dropped", format!("{key}: {e}")),
            Ok(x) => {
                let v = x.features.violations(x.ndd_max);
                if !v.is_empty() {
                    warnings.push("features_dropped", format!("{key}: {}", v.join("; ")));
                    continue;
                }
                if !x.missing_bios.is_empty() {
                    let ids: Vec<String> = x.missing_bios.iter().map(|p| p.to_string()).collect();
                    warnings.push("bio_missing", format!("{key}: no bio for {}", ids.join(", ")));
                }
                rows.push(FeatureRow {
                    game_id: play.game_id.clone(),
                    event_id: play.event_id,
                    shooter_id: play.shooter_id,
                    features: x.features,
                });
            }
        }
    }
    rows
}

/// Fills the shooter encoding over all rows and wraps them in a table.
pub fn encode_table(mut rows: Vec<FeatureRow>, cfg: &FeatureConfig) -> Result<FeatureTable> {
    if rows.is_empty() {
        return Err(Error::Empty("empty dataset".into()));
    }
    encode_shooters(&mut rows, &cfg.encode);
    Ok(FeatureTable { rows })
}

fn header() -> Vec<&'static str> {
    let mut h = vec!["game_id", "event_id", "shooter_id"];
    h.extend(FEATURE_COLUMNS);
    h.push("made");
    h
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Design matrix over the named feature columns with the `made` target.
    pub fn dataset(&self, columns: &[&str]) -> Result<(Dataset, Vec<bool>)> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| {
                FEATURE_COLUMNS
                    .iter()
                    .position(|f| f == c)
                    .ok_or_else(|| Error::MissingColumn((*c).to_string()))
            })
            .collect::<Result<_>>()?;
        let values: Vec<[f64; N_FEATURES]> = self.rows.iter().map(|r| r.features.values()).collect();
        let data = idx
            .iter()
            .map(|&j| values.iter().map(|v| v[j]).collect())
            .collect();
        let ds = Dataset::new(columns.iter().map(|c| c.to_string()).collect(), data)?;
        Ok((ds, self.rows.iter().map(|r| r.features.made).collect()))
    }

    pub fn full_dataset(&self) -> Result<(Dataset, Vec<bool>)> {
        self.dataset(&FEATURE_COLUMNS)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| Error::parse("feature table output", e.to_string());
        wtr.write_record(header()).map_err(err)?;
        for r in &self.rows {
            let mut rec = vec![r.game_id.clone(), r.event_id.to_string(), r.shooter_id.to_string()];
            for (name, v) in FEATURE_COLUMNS.iter().zip(r.features.values()) {
                rec.push(if INTEGER_COLUMNS.contains(name) {
                    format!("{}", v as i64)
                } else {
                    format!("{v:.6}")
                });
            }
            rec.push((r.features.made as u8).to_string());
            wtr.write_record(&rec).map_err(err)?;
        }
        wtr.flush().map_err(|e| Error::io("feature table output", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<FeatureTable> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse("feature table header", e.to_string()))?
            .clone();
        let idx: Vec<usize> = header()
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h == *name)
                    .ok_or_else(|| Error::MissingColumn((*name).to_string()))
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let loc = format!("feature table line {}", line + 2);
            let rec = rec.map_err(|e| Error::parse(&loc, e.to_string()))?;
            let get = |k: usize| rec.get(idx[k]).unwrap_or("");
            let num = |k: usize| -> Result<f64> {
                get(k)
                    .parse::<f64>()
                    .map_err(|_| Error::parse(&loc, format!("bad value {:?} in {}", get(k), header()[k])))
            };
            let mut values = [0.0; N_FEATURES];
            for (j, v) in values.iter_mut().enumerate() {
                *v = num(3 + j)?;
            }
            let made = match get(3 + N_FEATURES) {
                "1" => true,
                "0" => false,
                other => return Err(Error::parse(&loc, format!("bad made value {other:?}"))),
            };
            rows.push(FeatureRow {
                game_id: get(0).to_string(),
                event_id: num(1)? as i64,
                shooter_id: PlayerId(num(2)? as i64),
                features: FeatureVector::from_values(&values, made),
            });
        }
        Ok(FeatureTable { rows })
    }

    pub fn read_path(path: &Path) -> Result<FeatureTable> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        FeatureTable::read_csv(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::extract::tests::scripted_play;
    use crate::geometry::Point;

    fn play(event: i64, frames: usize, made: bool) -> ThreePointPlay {
        let mut p = scripted_play(frames, |i, _| {
            let off = [
                Point::new(65.0, 25.0),
                Point::new(80.0, 3.0),
                Point::new(80.0, 47.0),
                Point::new(85.0, 15.0),
                Point::new(85.0, 35.0),
            ];
            let def = [
                Point::new(70.0 - i as f64 * 0.01, 25.0),
                Point::new(60.0, 45.0),
                Point::new(50.0, 10.0),
                Point::new(50.0, 40.0),
                Point::new(55.0, 25.0),
            ];
            (off, def, (65.5, 25.0, 4.0))
        });
        p.event_id = event;
        p.made = made;
        p
    }

    #[test]
    fn drops_invalid_play_with_warning() {
        let plays = vec![play(1, 30, true), play(2, 30, false), play(3, 1, true), play(4, 30, true)];
        let out = assemble_dataset(&plays, &HashMap::new(), &CourtSpec::nba(), &FeatureConfig::default()).unwrap();
        assert_eq!(out.table.len(), 3);
        assert_eq!(out.warnings.count("features_dropped"), 1);
        assert!(out.table.rows.iter().all(|r| (0.0..=1.0).contains(&r.features.shooter_enc)));
        let made: Vec<bool> = out.table.rows.iter().map(|r| r.features.made).collect();
        assert_eq!(made, vec![true, false, true]);
    }

    #[test]
    fn empty_input_is_error() {
        let err = assemble_dataset(&[], &HashMap::new(), &CourtSpec::nba(), &FeatureConfig::default()).unwrap_err();
        assert_eq!(err.to_string(), "empty dataset");
    }

    #[test]
    fn csv_round_trip_is_stable() {
        let plays: Vec<_> = (0..5).map(|e| play(e, 20 + e as usize, e % 2 == 0)).collect();
        let t = assemble_dataset(&plays, &HashMap::new(), &CourtSpec::nba(), &FeatureConfig::default())
            .unwrap()
            .table;
        let text = t.to_csv_string();
        assert!(text.starts_with("game_id,event_id,shooter_id,ndd_median,"));
        assert!(text.lines().next().unwrap().ends_with(",shooter_enc,made"));
        let back = FeatureTable::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.to_csv_string(), text);
        for (a, b) in back.rows.iter().zip(&t.rows) {
            assert!((a.features.ndd_mean - b.features.ndd_mean).abs() <= 5e-7);
            assert_eq!(a.features.touch_changes, b.features.touch_changes);
        }
    }

    #[test]
    fn permuting_plays_permutes_rows() {
        let plays: Vec<_> = (0..8).map(|e| play(e, 20 + e as usize, e % 3 == 0)).collect();
        let mut rev = plays.clone();
        rev.reverse();
        let cfg = FeatureConfig::default();
        let a = assemble_dataset(&plays, &HashMap::new(), &CourtSpec::nba(), &cfg).unwrap().table;
        let mut b = assemble_dataset(&rev, &HashMap::new(), &CourtSpec::nba(), &cfg).unwrap().table;
        b.rows.reverse();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_column_in_csv() {
        let err = FeatureTable::read_csv("game_id,event_id\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "shooter_id"));
    }
}
