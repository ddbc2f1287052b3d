//! The `shotlab` command line: argument parsing, configuration merging and
//! the six subcommands.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boruta::{decision_summary, importance_distribution_export, run_boruta, BorutaConfig, Decision};
use crate::error::{Error, Result, Warnings};
use crate::features::{encode_table, FeatureTable, FEATURE_COLUMNS};
use crate::ingest::{parse_playbyplay, parse_player_bio, parse_tracking_file};
use crate::model::{PlayEvent, PlayerBio, PlayerId};
use crate::pipeline::{process_game, GameSummary, PipelineConfig};
use crate::player_model::{
    aggregate_players, loo_harness, metrics_csv, rank_players, scores_csv, split_train_test, GamesIndex,
    PlayerModelConfig, PlayerScore,
};
use crate::report::{bar_chart_svg, box_plot_svg, histogram_svg, write_atomic, SvgOptions};
use crate::synthgen::{generate_season, verify_manifest, write_season, GroundTruthManifest, SynthConfig, Tolerances};

pub const FEATURES_FILE: &str = "features.csv";
pub const GAMES_INDEX_FILE: &str = "games_index.csv";
pub const INGEST_SUMMARY_FILE: &str = "ingest_summary.json";
pub const DECISIONS_FILE: &str = "boruta_decisions.csv";
pub const DISTRIBUTION_FILE: &str = "boruta_distribution.csv";
pub const IMPORTANCE_SVG: &str = "boruta_importance.svg";
pub const SCORES_FILE: &str = "player_scores.csv";
pub const METRICS_FILE: &str = "model_metrics.csv";
pub const R2_HISTOGRAM_SVG: &str = "r2_histogram.svg";
pub const VERIFY_FILE: &str = "verification.txt";

/// No three-point play survived segmentation.
pub const NO_PLAYS: &str = "no three-point events with sufficient window";

#[derive(Debug, Parser)]
#[command(name = "shotlab", version, about = "Three-point play analytics from player-tracking data")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit timestamps from generated figures.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[arg(long, global = true)]
    pub log_level: Option<String>,
    /// TOML file with `[synth]`, `[pipeline]`, `[boruta]` and
    /// `[player_model]` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic season with a ground-truth manifest.
    Synth(SynthArgs),
    /// Parse and join inputs, report counts and warnings.
    Ingest(InputArgs),
    /// Extract the per-play feature table and the games index.
    Features(InputArgs),
    /// Boruta feature selection on a feature table.
    Importance(ImportanceArgs),
    /// Leave-one-out player models, deviations and propensities.
    Playermodel(PlayerModelArgs),
    /// Check a feature table against a synthetic manifest.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub teams: Option<usize>,
    #[arg(long)]
    pub games: Option<usize>,
    #[arg(long)]
    pub plays_per_game: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Tracking files, or directories of `*.json` tracking files.
    #[arg(long, required = true, num_args = 1..)]
    pub tracking: Vec<PathBuf>,
    #[arg(long)]
    pub pbp: Option<PathBuf>,
    #[arg(long)]
    pub bios: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Comma-separated feature columns (default: all).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Synthetic manifest whose noise features are appended as columns.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlayerModelArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub games: PathBuf,
    #[arg(long)]
    pub bios: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Module configuration, read from the optional TOML file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub log_level: Option<String>,
    pub deterministic: bool,
    pub synth: SynthConfig,
    pub pipeline: PipelineConfig,
    pub boruta: BorutaConfig,
    pub player_model: PlayerModelConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::parse("config", e.to_string()))
    }

    pub fn read_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Applies command-line flags over file values.
    pub fn merge(mut self, g: &GlobalArgs) -> RunConfig {
        if g.seed.is_some() {
            self.seed = g.seed;
        }
        if g.threads.is_some() {
            self.threads = g.threads;
        }
        if g.log_level.is_some() {
            self.log_level = g.log_level.clone();
        }
        self.deterministic |= g.deterministic;
        if let Some(s) = self.seed {
            self.synth.seed = s;
            self.boruta.seed = s;
            self.player_model.gbm.seed = s;
        }
        self
    }

    fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("{command} needs a seed (--seed or `seed` in the config file)")))
    }

    fn svg(&self) -> SvgOptions {
        SvgOptions {
            deterministic: self.deterministic,
        }
    }
}

/// Process exit code for an error: 1 for failed verification, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => 1,
        _ => 2,
    }
}

/// One JSON object on one line.
pub fn error_line(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

pub fn run(cli: Cli) -> Result<()> {
    let base = match &cli.global.config {
        Some(p) => RunConfig::read_path(p)?,
        None => RunConfig::default(),
    };
    let cfg = base.merge(&cli.global);
    init_logging(cfg.log_level.as_deref());
    if let Some(n) = cfg.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = &cli.global.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    match &cli.command {
        Command::Synth(a) => cmd_synth(&cfg, a, out),
        Command::Ingest(a) => cmd_ingest(&cfg, a, out),
        Command::Features(a) => cmd_features(&cfg, a, out),
        Command::Importance(a) => cmd_importance(&cfg, a, out),
        Command::Playermodel(a) => cmd_playermodel(&cfg, a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn init_logging(level: Option<&str>) {
    let mut b = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"));
    if let Some(l) = level {
        b.parse_filters(l);
    }
    let _ = b.format_timestamp(None).try_init();
}

pub fn cmd_synth(cfg: &RunConfig, a: &SynthArgs, out: &Path) -> Result<()> {
    cfg.require_seed("synth")?;
    let mut sc = cfg.synth.clone();
    if let Some(t) = a.teams {
        sc.n_teams = t;
    }
    if let Some(g) = a.games {
        sc.n_games = g;
    }
    if let Some(p) = a.plays_per_game {
        sc.plays_per_game = p;
    }
    let season = generate_season(&sc)?;
    let files = write_season(&season, out)?;
    info!(
        "wrote {} games, {} plays to {}",
        files.tracking.len(),
        season.manifest.plays.len(),
        out.display()
    );
    Ok(())
}

fn tracking_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            paths.extend(found);
        } else {
            paths.push(p.clone());
        }
    }
    if paths.is_empty() {
        return Err(Error::InvalidArgument("no tracking files given".into()));
    }
    Ok(paths)
}

struct Inputs {
    paths: Vec<PathBuf>,
    pbp: Vec<PlayEvent>,
    bios: Vec<PlayerBio>,
    warnings: Warnings,
}

fn read_inputs(a: &InputArgs) -> Result<Inputs> {
    let mut warnings = Warnings::new();
    let pbp = match &a.pbp {
        Some(p) => {
            let (events, w) = parse_playbyplay(p)?;
            warnings.merge(w);
            events
        }
        None => Vec::new(),
    };
    let bios = match &a.bios {
        Some(p) => {
            let (bios, w) = parse_player_bio(p)?;
            warnings.merge(w);
            bios
        }
        None => Vec::new(),
    };
    Ok(Inputs {
        paths: tracking_paths(&a.tracking)?,
        pbp,
        bios,
        warnings,
    })
}

struct Processed {
    summaries: Vec<GameSummary>,
    table_rows: Vec<crate::features::FeatureRow>,
    games: GamesIndex,
    warnings: Warnings,
}

fn process_inputs(cfg: &RunConfig, inputs: Inputs) -> Result<Processed> {
    let bios: HashMap<PlayerId, PlayerBio> = inputs.bios.iter().map(|b| (b.player_id, b.clone())).collect();
    let mut by_game: HashMap<&str, Vec<PlayEvent>> = HashMap::new();
    for e in &inputs.pbp {
        by_game.entry(e.game_id.as_str()).or_default().push(e.clone());
    }
    let pc = &cfg.pipeline;
    let outputs: Vec<Result<(Warnings, crate::pipeline::GameOutput)>> = inputs
        .paths
        .par_iter()
        .map(|path| {
            let (tracking, w) = parse_tracking_file(path, &pc.court)?;
            let events = by_game.get(tracking.game_id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
            let out = process_game(tracking, events, &bios, None, pc)?;
            Ok((w, out))
        })
        .collect();
    let mut p = Processed {
        summaries: Vec::new(),
        table_rows: Vec::new(),
        games: GamesIndex::new(),
        warnings: inputs.warnings,
    };
    for r in outputs {
        let (w, out) = r?;
        p.warnings.merge(w);
        p.warnings.merge(out.warnings);
        p.summaries.push(out.summary);
        p.table_rows.extend(out.rows);
        p.games.merge(&out.games);
    }
    for (kind, n) in p.warnings.counts() {
        warn!("{n} warnings of kind {kind}");
    }
    Ok(p)
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    games: Vec<GameSummary>,
    pbp_events: usize,
    bios: usize,
    total_moments: usize,
    total_plays: usize,
    total_dropped: usize,
    warnings: BTreeMap<String, usize>,
}

pub fn cmd_ingest(cfg: &RunConfig, a: &InputArgs, out: &Path) -> Result<()> {
    let inputs = read_inputs(a)?;
    let (pbp_events, bios) = (inputs.pbp.len(), inputs.bios.len());
    let p = process_inputs(cfg, inputs)?;
    let summary = IngestSummary {
        total_moments: p.summaries.iter().map(|s| s.moments).sum(),
        total_plays: p.summaries.iter().map(|s| s.plays).sum(),
        total_dropped: p.summaries.iter().map(|s| s.dropped).sum(),
        games: p.summaries,
        pbp_events,
        bios,
        warnings: p.warnings.counts().clone(),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    write_atomic(out.join(INGEST_SUMMARY_FILE), text.as_bytes())?;
    print!("{text}");
    Ok(())
}

pub fn cmd_features(cfg: &RunConfig, a: &InputArgs, out: &Path) -> Result<()> {
    let p = process_inputs(cfg, read_inputs(a)?)?;
    if p.table_rows.is_empty() {
        return Err(Error::Empty(NO_PLAYS.into()));
    }
    let table = encode_table(p.table_rows, &cfg.pipeline.features)?;
    write_atomic(out.join(FEATURES_FILE), table.to_csv_string().as_bytes())?;
    write_atomic(out.join(GAMES_INDEX_FILE), p.games.to_csv_string().as_bytes())?;
    info!("{} plays from {} games", table.len(), p.summaries.len());
    Ok(())
}

pub fn cmd_importance(cfg: &RunConfig, a: &ImportanceArgs, out: &Path) -> Result<()> {
    cfg.require_seed("importance")?;
    let table = FeatureTable::read_path(&a.table)?;
    let columns: Vec<String> = match &a.columns {
        Some(c) => c.clone(),
        None => FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect(),
    };
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let (mut ds, target) = table.dataset(&names)?;
    if let Some(mp) = &a.manifest {
        let manifest = GroundTruthManifest::read_path(mp)?;
        let noise = manifest.noise_by_play();
        for (k, name) in manifest.noise_features.iter().enumerate() {
            let values = table
                .rows
                .iter()
                .map(|r| {
                    noise
                        .get(&(r.game_id.clone(), r.event_id))
                        .map(|v| v[k])
                        .ok_or_else(|| {
                            Error::InvalidArgument(format!(
                                "game {} event {} missing from manifest",
                                r.game_id, r.event_id
                            ))
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            ds.push_column(name.clone(), values)?;
        }
    }
    let report = run_boruta(&ds, &target, &cfg.boruta)?;
    write_atomic(out.join(DECISIONS_FILE), decision_summary(&report).as_bytes())?;
    write_atomic(out.join(DISTRIBUTION_FILE), importance_distribution_export(&report)?.as_bytes())?;

    let finite = |v: &[f64]| v.iter().copied().filter(|z| z.is_finite()).collect::<Vec<f64>>();
    let mut groups: Vec<(String, Vec<f64>)> = vec![
        ("shadow_min".into(), report.shadow.iter().map(|s| s.min).collect()),
        ("shadow_mean".into(), report.shadow.iter().map(|s| s.mean).collect()),
        ("shadow_max".into(), report.shadow.iter().map(|s| s.max).collect()),
    ];
    let mut feats: Vec<&crate::boruta::FeatureOutcome> = report.features.iter().collect();
    feats.sort_by(|a, b| a.median_z().total_cmp(&b.median_z()).then(a.name.cmp(&b.name)));
    groups.extend(feats.iter().map(|f| (f.name.clone(), finite(&f.z))));
    let svg = box_plot_svg("Boruta importance (z)", &groups, cfg.svg());
    write_atomic(out.join(IMPORTANCE_SVG), svg.as_bytes())?;
    info!(
        "{} confirmed, {} rejected, {} tentative after {} runs",
        report.with_decision(Decision::Confirmed).count(),
        report.with_decision(Decision::Rejected).count(),
        report.with_decision(Decision::Tentative).count(),
        report.runs
    );
    Ok(())
}

fn ranked_table(out: &Path, stem: &str, title: &str, scores: &[PlayerScore], value: fn(&PlayerScore) -> f64, svg: SvgOptions) -> Result<()> {
    write_atomic(out.join(format!("{stem}.csv")), scores_csv(scores).as_bytes())?;
    let max = scores.iter().map(|s| value(s).abs()).fold(0.0, f64::max);
    let bars: Vec<(String, f64, f64)> = scores
        .iter()
        .map(|s| {
            let label = if s.name.is_empty() { s.player_id.to_string() } else { s.name.clone() };
            let shade = if max > 0.0 { value(s).abs() / max } else { 0.0 };
            (label, value(s), shade)
        })
        .collect();
    write_atomic(out.join(format!("{stem}.svg")), bar_chart_svg(title, &bars, svg).as_bytes())
}

pub fn cmd_playermodel(cfg: &RunConfig, a: &PlayerModelArgs, out: &Path) -> Result<()> {
    let seed = cfg.require_seed("playermodel")?;
    let pm = &cfg.player_model;
    let table = FeatureTable::read_path(&a.table)?;
    let games = GamesIndex::read_path(&a.games)?;
    let names: BTreeMap<PlayerId, String> = match &a.bios {
        Some(p) => parse_player_bio(p)?.0.into_iter().map(|b| (b.player_id, b.name)).collect(),
        None => BTreeMap::new(),
    };
    let (aggs, warnings) = aggregate_players(&table, &games, &names, pm.min_attempts)?;
    for (kind, n) in warnings.counts() {
        warn!("{n} warnings of kind {kind}");
    }
    let (train, holdout) = split_train_test(&aggs, pm.test_fraction, seed)?;
    let loo = loo_harness(&train, &holdout, &pm.gbm)?;
    let ranking = rank_players(&loo.scores, pm.top_k);
    write_atomic(out.join(SCORES_FILE), scores_csv(&ranking.by_propensity).as_bytes())?;
    let mut models = loo.loo_models.clone();
    models.push(loo.full_model.clone());
    write_atomic(out.join(METRICS_FILE), metrics_csv(&models).as_bytes())?;
    let r2: Vec<f64> = loo.loo_models.iter().map(|m| m.r2).collect();
    let svg = histogram_svg("Holdout R-squared across player models", &r2, 20, cfg.svg());
    write_atomic(out.join(R2_HISTOGRAM_SVG), svg.as_bytes())?;

    let top: Vec<PlayerScore> = ranking.by_propensity.iter().take(pm.top_k).cloned().collect();
    ranked_table(out, "top_propensity", "Highest three-point propensity", &top, |s| s.propensity, cfg.svg())?;
    ranked_table(
        out,
        "top_positive_deviation",
        "Most attempts above prediction (per game)",
        &ranking.top_positive,
        |s| s.deviation,
        cfg.svg(),
    )?;
    ranked_table(
        out,
        "top_negative_deviation",
        "Most attempts below prediction (per game)",
        &ranking.top_negative,
        |s| s.deviation,
        cfg.svg(),
    )?;
    info!("scored {} players ({} held out)", loo.scores.len(), holdout.len());
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs, out: &Path) -> Result<()> {
    let manifest = GroundTruthManifest::read_path(&a.manifest)?;
    let table = FeatureTable::read_path(&a.table)?;
    let report = verify_manifest(&manifest, &table, &Tolerances::default())?;
    let text = report.summary();
    write_atomic(out.join(VERIFY_FILE), text.as_bytes())?;
    print!("{text}");
    if report.passed() {
        Ok(())
    } else {
        Err(Error::Verification(format!(
            "{} missing plays, {} shooter and {} outcome mismatches, {} feature failures",
            report.missing.len(),
            report.shooter_mismatches,
            report.outcome_mismatches,
            report.checks.iter().map(|c| c.failures).sum::<usize>()
        )))
    }
}
