//! C interface to shotlab.
//!
//! Every function returns a [`ShotlabStatus`]; on failure the message is
//! available from [`shotlab_last_error`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_read`/`*_run` functions and released
//! with the matching `*_free`. Passing a null handle to a `*_free` function
//! is a no-op.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use shotlab::boruta::{run_boruta, Decision, ImportanceReport};
use shotlab::cli::RunConfig;
use shotlab::features::{FeatureTable, FEATURE_COLUMNS};
use shotlab::forest::ForestConfig;
use shotlab::gbm::GbmModel;
use shotlab::geometry::{convex_hull, polygon_area, Point};
use shotlab::player_model::{deviation, propensity};
use shotlab::synthgen::{generate_season, write_season};
use shotlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Empty = 5,
    Config = 6,
    Model = 7,
    Utf8 = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotlabDecision {
    Confirmed = 0,
    Rejected = 1,
    Tentative = 2,
}

/// A feature table read from CSV.
pub struct ShotlabFeatureTable(FeatureTable);

/// A trained gradient-boosting model.
pub struct ShotlabGbmModel(GbmModel);

/// The outcome of a Boruta run.
pub struct ShotlabImportance(ImportanceReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

fn status_of(e: &Error) -> ShotlabStatus {
    match e {
        Error::Io { .. } => ShotlabStatus::Io,
        Error::Parse { .. } | Error::MissingColumn(_) => ShotlabStatus::Parse,
        Error::Empty(_) => ShotlabStatus::Empty,
        Error::Config(_) => ShotlabStatus::Config,
        Error::InvalidArgument(_) | Error::UnknownTeam { .. } | Error::MisJoined { .. } => {
            ShotlabStatus::InvalidArgument
        }
        Error::DegenerateTarget | Error::Player { .. } | Error::Verification(_) => ShotlabStatus::Model,
    }
}

struct Failure(ShotlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ShotlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ShotlabStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside shotlab");
            ShotlabStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ShotlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ShotlabStatus::Utf8, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn shotlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn shotlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Area of the convex hull of `n` points given as parallel coordinate arrays.
#[no_mangle]
pub unsafe extern "C" fn shotlab_hull_area(xs: *const f64, ys: *const f64, n: usize, out: *mut f64) -> ShotlabStatus {
    guard(|| {
        let xs = slice_arg(xs, n, "xs")?;
        let ys = slice_arg(ys, n, "ys")?;
        let out = out_arg(out, "out")?;
        let pts: Vec<Point> = xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect();
        *out = polygon_area(&convex_hull(&pts)?);
        Ok(())
    })
}

/// Actual minus predicted three-point attempts per game.
#[no_mangle]
pub extern "C" fn shotlab_deviation(actual_3pa: f64, predicted_3pa: f64) -> f64 {
    deviation(actual_3pa, predicted_3pa)
}

/// Deviation weighted by the cube of three-point percentage.
#[no_mangle]
pub unsafe extern "C" fn shotlab_propensity(deviation: f64, three_pct: f64, out: *mut f64) -> ShotlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = propensity(deviation, three_pct)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shotlab_feature_table_read(
    path: *const c_char,
    out: *mut *mut ShotlabFeatureTable,
) -> ShotlabStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let table = FeatureTable::read_path(Path::new(path))?;
        *out = Box::into_raw(Box::new(ShotlabFeatureTable(table)));
        Ok(())
    })
}

/// Number of plays in the table; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn shotlab_feature_table_len(table: *const ShotlabFeatureTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// Copies column `column` of every play into `out`, which must hold
/// `shotlab_feature_table_len` values.
#[no_mangle]
pub unsafe extern "C" fn shotlab_feature_table_column(
    table: *const ShotlabFeatureTable,
    column: *const c_char,
    out: *mut f64,
    capacity: usize,
) -> ShotlabStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        let column = str_arg(column, "column")?;
        if !FEATURE_COLUMNS.contains(&column) {
            return Err(Error::MissingColumn(column.to_string()).into());
        }
        let n = table.0.len();
        if capacity < n || (n > 0 && out.is_null()) {
            return Err(Failure(
                ShotlabStatus::InvalidArgument,
                format!("output holds {capacity} values, table has {n} rows"),
            ));
        }
        for (k, row) in table.0.rows.iter().enumerate() {
            *out.add(k) = row.features.get(column).expect("known column");
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shotlab_feature_table_free(table: *mut ShotlabFeatureTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Loads a model from its JSON document.
#[no_mangle]
pub unsafe extern "C" fn shotlab_gbm_from_json(json: *const c_char, out: *mut *mut ShotlabGbmModel) -> ShotlabStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(ShotlabGbmModel(GbmModel::from_json(json)?)));
        Ok(())
    })
}

/// Predicts from `n` named values; every model column must be present.
#[no_mangle]
pub unsafe extern "C" fn shotlab_gbm_predict(
    model: *const ShotlabGbmModel,
    names: *const *const c_char,
    values: *const f64,
    n: usize,
    out: *mut f64,
) -> ShotlabStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let names = slice_arg(names, n, "names")?;
        let values = slice_arg(values, n, "values")?;
        let out = out_arg(out, "out")?;
        let names: Vec<String> = names
            .iter()
            .map(|&p| str_arg(p, "name").map(str::to_string))
            .collect::<Result<_, _>>()?;
        *out = model.0.predict(&names, values)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shotlab_gbm_free(model: *mut ShotlabGbmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs Boruta over every feature column of `table` with `made` as the
/// target. `n_trees` of 0 keeps the default forest size.
#[no_mangle]
pub unsafe extern "C" fn shotlab_importance_run(
    table: *const ShotlabFeatureTable,
    seed: u64,
    max_runs: usize,
    n_trees: usize,
    out: *mut *mut ShotlabImportance,
) -> ShotlabStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        let out = out_arg(out, "out")?;
        let (ds, target) = table.0.full_dataset()?;
        let mut cfg = RunConfig::default().boruta;
        cfg.seed = seed;
        cfg.max_runs = max_runs;
        if n_trees > 0 {
            cfg.forest = ForestConfig { n_trees, ..cfg.forest };
        }
        cfg.validate()?;
        let report = run_boruta(&ds, &target, &cfg)?;
        *out = Box::into_raw(Box::new(ShotlabImportance(report)));
        Ok(())
    })
}

/// Number of Boruta runs executed.
#[no_mangle]
pub unsafe extern "C" fn shotlab_importance_runs(report: *const ShotlabImportance) -> usize {
    report.as_ref().map_or(0, |r| r.0.runs)
}

#[no_mangle]
pub unsafe extern "C" fn shotlab_importance_decision(
    report: *const ShotlabImportance,
    feature: *const c_char,
    out: *mut ShotlabDecision,
) -> ShotlabStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        let feature = str_arg(feature, "feature")?;
        let out = out_arg(out, "out")?;
        let f = report
            .0
            .feature(feature)
            .ok_or_else(|| Error::MissingColumn(feature.to_string()))?;
        *out = match f.decision {
            Decision::Confirmed => ShotlabDecision::Confirmed,
            Decision::Rejected => ShotlabDecision::Rejected,
            Decision::Tentative => ShotlabDecision::Tentative,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shotlab_importance_free(report: *mut ShotlabImportance) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Generates a synthetic season into directory `dir`. `config_toml` uses
/// the command-line config format (a `[synth]` section); null means
/// defaults. `seed` overrides the file.
#[no_mangle]
pub unsafe extern "C" fn shotlab_synth_write(config_toml: *const c_char, seed: u64, dir: *const c_char) -> ShotlabStatus {
    guard(|| {
        let dir = str_arg(dir, "dir")?;
        let mut cfg = if config_toml.is_null() {
            RunConfig::default()
        } else {
            RunConfig::from_toml(str_arg(config_toml, "config_toml")?)?
        };
        cfg.synth.seed = seed;
        let season = generate_season(&cfg.synth)?;
        write_season(&season, Path::new(dir))?;
        Ok(())
    })
}
