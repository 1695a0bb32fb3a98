//! Command-line interface: every pipeline stage as one subcommand.
//!
//! Every subcommand accepts `--seed`, `--config` (a flat `key=value` file),
//! and `--out-dir`, and writes only deterministic artifacts: replaying a
//! command with the same inputs and seed reproduces every output file
//! byte for byte. Exit codes: 0 success, 2 invalid invocation or input,
//! 3 failure while doing the work.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::applications::{
    optimal_pass, optimal_position, rank_by_ppa, score_pass, team_tendency_maps, AppError,
    PpaRecord, ScoredPass,
};
use crate::autograd::GridTensor;
use crate::baselines::{BaselineError, NaiveBaseline};
use crate::channels::{
    build_channels, model_input, ChannelConfig, ChannelError, GameState, TrackingSnapshot, CHANNEL_NAMES,
};
use crate::io::{self, Config, IoError};
use crate::metrics;
use crate::network::{
    save_checkpoint, CheckpointError, Head, Model, NetworkError, NetworkSpec, Surface,
    SurfaceKind, TrainMeta,
};
use crate::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams, TeamStyle};
use crate::training::{
    ablation_table_csv, destination_predictions, finetune, fit, grid_search, grid_table_csv,
    mean_loss, run_ablation, split_dataset, Dataset, TrainConfig, TrainError, BATCH_SIZE_GRID,
    LEARNING_RATE_GRID,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// A subcommand failure, split by whose fault it is: bad invocation or
/// input (exit 2) versus failure while doing the work (exit 3).
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        validation(e)
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        validation(e)
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        validation(e)
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match &e {
            // The inputs were fine; the numerics or the machine gave out.
            TrainError::Diverged { .. } | TrainError::Autograd(_) => runtime(e),
            _ => validation(e),
        }
    }
}

impl From<AppError> for CliError {
    fn from(e: AppError) -> Self {
        match &e {
            AppError::Network(_) => runtime(e),
            _ => validation(e),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        validation(e)
    }
}

#[derive(Parser)]
#[command(
    name = "smap",
    version,
    about = "Pass probability surfaces from soccer tracking data",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic match with outcome-labeled passes.
    GenData(GenDataArgs),
    /// Rasterize one snapshot into the model's input channel grids.
    BuildChannels(BuildChannelsArgs),
    /// Train a surface model on a tracking file.
    Train(TrainArgs),
    /// Train one model per learning-rate/batch-size combination.
    GridSearch(GridSearchArgs),
    /// Log-loss, calibration error, and a reliability table on held-out passes.
    Evaluate(EvaluateArgs),
    /// Train every architecture variant and tabulate held-out losses.
    Ablate(AblateArgs),
    /// Render the model's surface for one snapshot as text and image.
    Surface(SurfaceArgs),
    /// Evaluate every teammate as a pass option on one snapshot.
    OptimalPass(OptimalPassArgs),
    /// Find where a chosen attacker should move to become a better target.
    OptimalPosition(OptimalPositionArgs),
    /// Rank players by expected pass value added per 90 minutes.
    PpaRank(PpaRankArgs),
    /// Continue training a checkpoint on one team's passes.
    Finetune(FinetuneArgs),
    /// Contrast two selection models' preferred pass destinations.
    Tendency(TendencyArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct Common {
    /// Seed for every random choice this run makes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Flat key=value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory output files are written into.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenDataArgs {
    #[command(flatten)]
    common: Common,
    /// Number of pass-labeled frames (overrides the config key `frames`).
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Args)]
struct BuildChannelsArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Snapshot index within the file.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Output head: sigmoid (pass probability), selection, or value.
    #[arg(long, default_value = "sigmoid")]
    head: String,
}

#[derive(Args)]
struct GridSearchArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Checkpoint to evaluate.
    #[arg(long, conflicts_with = "naive")]
    model: Option<PathBuf>,
    /// Evaluate the constant-rate reference predictor instead of a checkpoint.
    #[arg(long)]
    naive: bool,
    /// Number of reliability bins.
    #[arg(long, default_value_t = 10)]
    bins: usize,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read; omitted = generate `frames` synthetic passes.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Checkpoint to run.
    #[arg(long)]
    model: PathBuf,
    /// Snapshot index within the file.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct OptimalPassArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Checkpoint to run (must have the sigmoid head).
    #[arg(long)]
    model: PathBuf,
    /// Snapshot index within the file.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct OptimalPositionArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Checkpoint to run (must have the sigmoid head).
    #[arg(long)]
    model: PathBuf,
    /// Snapshot index within the file.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Attacker index to relocate (not the ball carrier).
    #[arg(long)]
    player: usize,
}

#[derive(Args)]
struct PpaRankArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Checkpoint to run (must have the sigmoid head).
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct FinetuneArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file to read.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Checkpoint to warm-start from.
    #[arg(long)]
    model: PathBuf,
    /// Keep only passes by this team id.
    #[arg(long)]
    team: Option<u32>,
}

#[derive(Args)]
struct TendencyArgs {
    #[command(flatten)]
    common: Common,
    /// Tracking file whose snapshots probe both models.
    #[arg(long)]
    data: PathBuf,
    /// Accept records with unknown fields (warn instead of failing).
    #[arg(long)]
    permissive: bool,
    /// Selection-head checkpoint trained on league-wide passes.
    #[arg(long)]
    league_model: PathBuf,
    /// Selection-head checkpoint trained on one team's passes.
    #[arg(long)]
    team_model: PathBuf,
}

/// Parse `args` and run the chosen subcommand; returns the process exit
/// code instead of exiting so it can be driven in tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; those exit cleanly.
            let _ = e.print();
            return if e.exit_code() == 0 { EXIT_OK } else { EXIT_VALIDATION };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::BuildChannels(args) => cmd_build_channels(args),
        Command::Train(args) => cmd_train(args),
        Command::GridSearch(args) => cmd_grid_search(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Surface(args) => cmd_surface(args),
        Command::OptimalPass(args) => cmd_optimal_pass(args),
        Command::OptimalPosition(args) => cmd_optimal_position(args),
        Command::PpaRank(args) => cmd_ppa_rank(args),
        Command::Finetune(args) => cmd_finetune(args),
        Command::Tendency(args) => cmd_tendency(args),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------------

fn load_config(common: &Common) -> Result<Config, CliError> {
    match &common.config {
        None => Ok(Config::default()),
        Some(path) => Config::from_file(path)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display()))),
    }
}

fn style_named(name: &str) -> Result<TeamStyle, CliError> {
    match name {
        "short_pass" => Ok(short_pass_style()),
        "long_ball" => Ok(long_ball_style()),
        other => Err(CliError::Validation(format!(
            "unknown team style `{other}`; expected `short_pass` or `long_ball`"
        ))),
    }
}

fn head_named(name: &str) -> Result<Head, CliError> {
    match name {
        "sigmoid" => Ok(Head::SigmoidProbability),
        "selection" => Ok(Head::SoftmaxSelection),
        "value" => Ok(Head::LinearValue),
        other => Err(CliError::Validation(format!(
            "unknown head `{other}`; expected `sigmoid`, `selection`, or `value`"
        ))),
    }
}

fn read_snapshots(path: &Path, permissive: bool) -> Result<Vec<TrackingSnapshot>, CliError> {
    let (snaps, warnings) = io::read_tracking(path, !permissive)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    for w in &warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    if snaps.is_empty() {
        return Err(CliError::Validation(format!("{}: no snapshots", path.display())));
    }
    Ok(snaps)
}

fn snapshot_at(snaps: &[TrackingSnapshot], index: usize) -> Result<&TrackingSnapshot, CliError> {
    snaps.get(index).ok_or_else(|| {
        CliError::Validation(format!("snapshot index {index} out of range for {} snapshots", snaps.len()))
    })
}

fn channel_config(config: &Config) -> Result<ChannelConfig, CliError> {
    Ok(ChannelConfig {
        goal_angle_channels: config.get_bool("goal_angle_channels")?.unwrap_or(false),
    })
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        validation(e)
    }
}

fn network_spec(config: &Config, head: Head) -> Result<NetworkSpec, CliError> {
    let mut spec = NetworkSpec { head, ..NetworkSpec::default() };
    if let Some(v) = config.get_usize("filters")? {
        spec.filters = v;
    }
    if let Some(v) = config.get_usize("conv_blocks")? {
        spec.conv_blocks = v;
    }
    if let Some(v) = config.get_bool("multi_scale")? {
        spec.multi_scale = v;
    }
    if let Some(v) = config.get_bool("learned_upsampling")? {
        spec.learned_upsampling = v;
    }
    if let Some(v) = config.get_bool("fusion_layer")? {
        spec.fusion_layer = v;
    }
    if let Some(v) = config.get_bool("nonlinear_prediction")? {
        spec.nonlinear_prediction = v;
    }
    Ok(spec)
}

fn train_config(config: &Config, seed: u64, base: TrainConfig) -> Result<TrainConfig, CliError> {
    let mut tc = TrainConfig { seed, ..base };
    if let Some(v) = config.get_f64("learning_rate")? {
        tc.learning_rate = v;
    }
    if let Some(v) = config.get_usize("batch_size")? {
        tc.batch_size = v;
    }
    if let Some(v) = config.get_usize("max_epochs")? {
        tc.max_epochs = v;
    }
    if let Some(v) = config.get_f64("min_delta")? {
        tc.min_delta = v;
    }
    if let Some(v) = config.get_usize("patience")? {
        tc.patience = v;
    }
    tc.validate().map_err(CliError::from)?;
    Ok(tc)
}

fn dataset_from_file(
    path: &Path,
    permissive: bool,
    channels: &ChannelConfig,
) -> Result<Dataset, CliError> {
    let snaps = read_snapshots(path, permissive)?;
    let data = Dataset::from_snapshots(&snaps, channels)?;
    if data.is_empty() {
        return Err(CliError::Validation(format!("{}: no passes to learn from", path.display())));
    }
    Ok(data)
}

fn load_model(path: &Path, expect: Option<Head>) -> Result<(Model<f32>, TrainMeta), CliError> {
    crate::network::load_checkpoint(path, expect)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    io::write_text_file(path, contents).map_err(runtime)
}

fn write_surface_pair(stem: &Path, surface: &Surface) -> Result<(), CliError> {
    io::write_surface(stem, surface).map_err(runtime)?;
    Ok(())
}

fn meta_for(seed: u64, history: &crate::training::TrainHistory) -> TrainMeta {
    TrainMeta {
        seed,
        epochs: history.epochs.len() as u32,
        train_loss: history.epochs.last().map(|e| e.train_loss).unwrap_or(f64::NAN),
        val_loss: history.best_val_loss,
    }
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

fn cmd_gen_data(args: GenDataArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let frames = match args.frames {
        Some(n) => n,
        None => config.get_usize("frames")?.unwrap_or(2000),
    };
    if frames == 0 {
        return Err(CliError::Validation("frames must be at least 1".into()));
    }
    let style_a = style_named(config.get_str("style_a").unwrap_or("short_pass"))?;
    let style_b = style_named(config.get_str("style_b").unwrap_or("long_ball"))?;
    let mut params = OracleParams::default();
    if let Some(noise) = config.get_bool("noise")? {
        params.noise = noise;
    }
    let snaps = generate_dataset(&style_a, &style_b, frames, args.common.seed, &params);
    let path = args.common.out_dir.join("tracking.jsonl");
    io::write_tracking(&path, &snaps).map_err(runtime)?;
    let passes = snaps.iter().filter(|s| s.pass.is_some()).count();
    let completed =
        snaps.iter().filter(|s| s.pass.as_ref().is_some_and(|p| p.completed)).count();
    println!(
        "wrote {} ({} snapshots, {} passes, success rate {:.4})",
        path.display(),
        snaps.len(),
        passes,
        completed as f64 / passes as f64
    );
    println!("oracle log-loss floor {:.4}", crate::synthgen::bayes_logloss(&snaps, &params));
    Ok(())
}

fn cmd_build_channels(args: BuildChannelsArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let snaps = read_snapshots(&args.data, args.permissive)?;
    let snap = snapshot_at(&snaps, args.index)?.clone().normalize_attack_direction();
    let state = build_channels(&snap, &channels)?;
    let (nx, ny, nc) = state.tensor.shape();

    let mut stats = String::from("channel,name,min,max,mean\n");
    for (c, name) in CHANNEL_NAMES.iter().enumerate() {
        let mut grid = GridTensor::zeros(nx, ny, 1);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for ix in 0..nx {
            for iy in 0..ny {
                let v = state.tensor.get(ix, iy, c);
                grid.set(ix, iy, 0, v);
                lo = lo.min(v);
                hi = hi.max(v);
                sum += v;
            }
        }
        stats.push_str(&format!("{c},{name},{lo},{hi},{}\n", sum / (nx * ny) as f64));
        let surface = Surface {
            grid,
            kind: SurfaceKind::Value,
            source: format!("{}:t={}:{}", snap.match_id, snap.t, name),
        };
        write_surface_pair(&args.common.out_dir.join(format!("channel_{c:02}_{name}")), &surface)?;
    }
    let stats_path = args.common.out_dir.join("channel_stats.csv");
    write_out(&stats_path, &stats)?;
    println!(
        "wrote {nc} channel grids ({nx}x{ny}) and {} for snapshot {} of {}",
        stats_path.display(),
        args.index,
        args.data.display()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let head = head_named(&args.head)?;
    let channels = channel_config(&config)?;
    let data = dataset_from_file(&args.data, args.permissive, &channels)?;
    let (train, val, test) = split_dataset(&data, args.common.seed);
    let spec = network_spec(&config, head)?;
    let tc = train_config(&config, args.common.seed, TrainConfig::default())?;
    let mut model: Model<f32> = Model::assemble(spec, args.common.seed)?;
    let history = fit(&mut model, &train, &val, &tc)?;
    let test_loss = mean_loss(&model, &test)?;

    let model_path = args.common.out_dir.join("model.ckpt");
    if let Some(parent) = model_path.parent() {
        std::fs::create_dir_all(parent).map_err(runtime)?;
    }
    save_checkpoint(&model, &meta_for(args.common.seed, &history), &model_path)
        .map_err(runtime)?;
    let history_path = args.common.out_dir.join("history.csv");
    write_out(&history_path, &history.to_csv())?;
    println!(
        "trained {} head for {} epochs (kept epoch {})",
        model.spec.head,
        history.epochs.len(),
        history.best_epoch
    );
    println!("val loss {:.6}, test loss {:.6}", history.best_val_loss, test_loss);
    println!("wrote {} and {}", model_path.display(), history_path.display());
    Ok(())
}

fn parse_list<T: std::str::FromStr>(raw: &str, key: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(|s| s.trim().parse::<T>())
        .collect::<Result<Vec<T>, _>>()
        .map_err(|_| {
            CliError::Validation(format!("config key `{key}`: `{raw}` is not a comma-separated list"))
        })
}

fn cmd_grid_search(args: GridSearchArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let data = dataset_from_file(&args.data, args.permissive, &channels)?;
    let (train, val, _test) = split_dataset(&data, args.common.seed);
    let spec = network_spec(&config, Head::SigmoidProbability)?;
    let tc = train_config(&config, args.common.seed, TrainConfig::default())?;
    let lrs = match config.get_str("learning_rates") {
        Some(raw) => parse_list::<f64>(raw, "learning_rates")?,
        None => LEARNING_RATE_GRID.to_vec(),
    };
    let batches = match config.get_str("batch_sizes") {
        Some(raw) => parse_list::<usize>(raw, "batch_sizes")?,
        None => BATCH_SIZE_GRID.to_vec(),
    };
    let (best, rows) = grid_search::<f32>(&spec, &train, &val, &tc, &lrs, &batches)?;
    let path = args.common.out_dir.join("grid.csv");
    write_out(&path, &grid_table_csv(&rows))?;
    println!(
        "best configuration: learning rate {}, batch size {}",
        best.learning_rate, best.batch_size
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    if args.bins == 0 {
        return Err(CliError::Validation("bins must be at least 1".into()));
    }
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let data = dataset_from_file(&args.data, args.permissive, &channels)?;
    let (train, _val, test) = split_dataset(&data, args.common.seed);
    let (preds, labels, what) = if args.naive {
        let train_labels: Vec<bool> = train.samples.iter().map(|s| s.pass.completed).collect();
        let naive = NaiveBaseline::fit(&train_labels)?;
        let labels: Vec<bool> = test.samples.iter().map(|s| s.pass.completed).collect();
        (vec![naive.predict(); labels.len()], labels, "naive rate predictor".to_string())
    } else {
        let model_path = args.model.as_deref().ok_or_else(|| {
            CliError::Validation("pass --model <checkpoint> or --naive".into())
        })?;
        let (model, _meta) = load_model(model_path, Some(Head::SigmoidProbability))?;
        let (preds, labels) = destination_predictions(&model, &test)?;
        (preds, labels, model_path.display().to_string())
    };
    let table = metrics::reliability(&preds, &labels, args.bins);
    let path = args.common.out_dir.join("reliability.csv");
    write_out(&path, &table.to_csv())?;
    println!("evaluated {what} on {} held-out passes", labels.len());
    println!("log-loss {:.6}", metrics::logloss(&preds, &labels));
    println!("ece {:.6} (K={})", table.ece(), args.bins);
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_ablate(args: AblateArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let data = match &args.data {
        Some(path) => dataset_from_file(path, args.permissive, &channels)?,
        None => {
            let frames = config.get_usize("frames")?.unwrap_or(1200);
            let snaps = generate_dataset(
                &short_pass_style(),
                &long_ball_style(),
                frames,
                args.common.seed,
                &OracleParams::default(),
            );
            Dataset::from_snapshots(&snaps, &channels)?
        }
    };
    let (train, val, test) = split_dataset(&data, args.common.seed);
    let base = network_spec(&config, Head::SigmoidProbability)?;
    let tc = train_config(&config, args.common.seed, TrainConfig::default())?;
    let rows = run_ablation::<f32>(&base, &train, &val, &test, &tc)?;
    let csv = ablation_table_csv(&rows);
    let path = args.common.out_dir.join("ablation.csv");
    write_out(&path, &csv)?;
    print!("{csv}");
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_surface(args: SurfaceArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let snaps = read_snapshots(&args.data, args.permissive)?;
    let snap = snapshot_at(&snaps, args.index)?;
    let (model, _meta) = load_model(&args.model, None)?;
    let surface = crate::applications::forward_oriented(&model, snap, &channels)?;
    write_surface_pair(&args.common.out_dir.join("surface"), &surface)?;
    let (ix, iy) = surface.argmax();
    println!(
        "{} surface for snapshot {}; peak {:.6} at cell ({ix}, {iy})",
        surface.kind,
        args.index,
        surface.at(ix, iy)
    );
    println!("wrote {}", args.common.out_dir.join("surface.{txt,pgm}").display());
    Ok(())
}

fn cmd_optimal_pass(args: OptimalPassArgs) -> Result<(), CliError> {
    let snaps = read_snapshots(&args.data, args.permissive)?;
    let snap = snapshot_at(&snaps, args.index)?;
    let (model, _meta) = load_model(&args.model, Some(Head::SigmoidProbability))?;
    let result = optimal_pass(&model, snap)?;

    let mut options = String::from(
        "teammate,expected_x,expected_y,current_probability,best_x,best_y,best_probability,gain\n",
    );
    for t in &result.teammates {
        options.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t.teammate,
            t.expected_location.0,
            t.expected_location.1,
            t.current_probability,
            t.best_location.0,
            t.best_location.1,
            t.best_probability,
            t.gain
        ));
    }
    let mut runners = String::from("teammate,x,y,probability,gain\n");
    for c in &result.suboptimal {
        runners.push_str(&format!(
            "{},{},{},{},{}\n",
            c.teammate, c.location.0, c.location.1, c.probability, c.gain
        ));
    }
    write_surface_pair(&args.common.out_dir.join("surface"), &result.surface)?;
    write_out(&args.common.out_dir.join("pass_options.csv"), &options)?;
    write_out(&args.common.out_dir.join("suboptimal_passes.csv"), &runners)?;
    let best = result
        .teammates
        .iter()
        .max_by(|a, b| a.best_probability.partial_cmp(&b.best_probability).unwrap())
        .ok_or_else(|| CliError::Validation("snapshot has no pass options".into()))?;
    println!(
        "best option: teammate {} at ({:.1}, {:.1}), probability {:.4} (gain {:.4})",
        best.teammate, best.best_location.0, best.best_location.1, best.best_probability, best.gain
    );
    println!(
        "wrote surface files, pass_options.csv, suboptimal_passes.csv to {}",
        args.common.out_dir.display()
    );
    Ok(())
}

fn cmd_optimal_position(args: OptimalPositionArgs) -> Result<(), CliError> {
    let snaps = read_snapshots(&args.data, args.permissive)?;
    let snap = snapshot_at(&snaps, args.index)?;
    let (model, _meta) = load_model(&args.model, Some(Head::SigmoidProbability))?;
    let result = optimal_position(&model, snap, args.player)?;
    let mut csv = String::from("x,y,gain\n");
    for ((x, y), gain) in &result.gains {
        csv.push_str(&format!("{x},{y},{gain}\n"));
    }
    let path = args.common.out_dir.join("position_gains.csv");
    write_out(&path, &csv)?;
    println!(
        "player {}: receiving probability {:.4}; best move to ({:.1}, {:.1}) adds {:.4}",
        result.player,
        result.baseline_probability,
        result.best_location.0,
        result.best_location.1,
        result.best_gain
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_ppa_rank(args: PpaRankArgs) -> Result<(), CliError> {
    let snaps = read_snapshots(&args.data, args.permissive)?;
    let (model, _meta) = load_model(&args.model, Some(Head::SigmoidProbability))?;
    let mut by_player: BTreeMap<(u32, usize), Vec<ScoredPass>> = BTreeMap::new();
    let mut max_minute: f64 = 0.0;
    for snap in &snaps {
        let Some(pass) = &snap.pass else { continue };
        max_minute = max_minute.max(pass.minute);
        by_player.entry((pass.team_id, pass.passer)).or_default().push(score_pass(&model, snap)?);
    }
    if by_player.is_empty() {
        return Err(CliError::Validation(format!("{}: no passes to rank", args.data.display())));
    }
    // Everyone is assumed on the pitch from kickoff to the last tagged pass.
    let minutes = max_minute.max(1.0);
    let mut records = Vec::new();
    for ((team, passer), passes) in &by_player {
        records.push(PpaRecord::new(format!("team{team}.player{passer}"), passes, minutes)?);
    }
    let ranked = rank_by_ppa(records);
    let csv = crate::applications::ppa_table_csv(&ranked);
    let path = args.common.out_dir.join("ppa.csv");
    write_out(&path, &csv)?;
    println!("ranked {} players over {} passes ({minutes:.1} minutes)",
        ranked.len(),
        by_player.values().map(Vec::len).sum::<usize>()
    );
    for r in ranked.iter().take(3) {
        println!("  {}: {:.4} per 90", r.player_id, r.ppa_per_90);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_finetune(args: FinetuneArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let mut snaps = read_snapshots(&args.data, args.permissive)?;
    if let Some(team) = args.team {
        snaps.retain(|s| s.pass.as_ref().is_some_and(|p| p.team_id == team));
        if snaps.is_empty() {
            return Err(CliError::Validation(format!(
                "{}: no passes by team {team}",
                args.data.display()
            )));
        }
    }
    let subset = Dataset::from_snapshots(&snaps, &channels)?;
    if subset.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no passes to fine-tune on",
            args.data.display()
        )));
    }
    let tc = train_config(&config, args.common.seed, TrainConfig::finetune_defaults(args.common.seed))?;
    let (model, history) = finetune::<f32>(&args.model, &subset, &tc)?;
    let model_path = args.common.out_dir.join("finetuned.ckpt");
    if let Some(parent) = model_path.parent() {
        std::fs::create_dir_all(parent).map_err(runtime)?;
    }
    save_checkpoint(&model, &meta_for(args.common.seed, &history), &model_path)
        .map_err(runtime)?;
    let history_path = args.common.out_dir.join("finetune_history.csv");
    write_out(&history_path, &history.to_csv())?;
    println!(
        "fine-tuned on {} passes for {} epochs (kept epoch {}, loss {:.6})",
        subset.len(),
        history.epochs.len(),
        history.best_epoch,
        history.best_val_loss
    );
    println!("wrote {} and {}", model_path.display(), history_path.display());
    Ok(())
}

fn cmd_tendency(args: TendencyArgs) -> Result<(), CliError> {
    let config = load_config(&args.common)?;
    let channels = channel_config(&config)?;
    let snaps = read_snapshots(&args.data, args.permissive)?;
    let limit = config.get_usize("probes")?.unwrap_or(256).max(1);
    let probes: Vec<GameState> = snaps
        .iter()
        .take(limit)
        .map(|s| model_input(&s.clone().normalize_attack_direction(), &channels))
        .collect::<Result<_, _>>()?;
    let (league, _) = load_model(&args.league_model, Some(Head::SoftmaxSelection))?;
    let (team, _) = load_model(&args.team_model, Some(Head::SoftmaxSelection))?;
    let maps = team_tendency_maps(&league, &team, &probes)?;

    let surfaces = [
        ("tendency_league", SurfaceKind::SelectionLikelihood, &maps.league_mean, "league mean"),
        ("tendency_team", SurfaceKind::SelectionLikelihood, &maps.team_mean, "team mean"),
        ("tendency_difference", SurfaceKind::Value, &maps.difference, "team minus league"),
    ];
    for (stem, kind, grid, label) in surfaces {
        let surface = Surface { grid: (*grid).clone(), kind, source: label.to_string() };
        write_surface_pair(&args.common.out_dir.join(stem), &surface)?;
    }
    let (nx, ny, _) = maps.difference.shape();
    let mut peak = (0usize, 0usize);
    let mut peak_abs = -1.0;
    for ix in 0..nx {
        for iy in 0..ny {
            let d = maps.difference.get(ix, iy, 0).abs();
            if d > peak_abs {
                peak_abs = d;
                peak = (ix, iy);
            }
        }
    }
    println!(
        "compared {} probe snapshots; largest shift at cell ({}, {}): likelihood ratio {:.4}",
        probes.len(),
        peak.0,
        peak.1,
        maps.likelihood_ratio(peak.0, peak.1)
    );
    println!("wrote tendency_{{league,team,difference}}.{{txt,pgm}} to {}", args.common.out_dir.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_line(line: &str) -> i32 {
        run(line.split_whitespace())
    }

    #[test]
    fn help_requests_exit_cleanly() {
        assert_eq!(run_line("smap --help"), EXIT_OK);
        assert_eq!(run_line("smap surface --help"), EXIT_OK);
        for sub in [
            "gen-data",
            "build-channels",
            "train",
            "grid-search",
            "evaluate",
            "ablate",
            "optimal-pass",
            "optimal-position",
            "ppa-rank",
            "finetune",
            "tendency",
        ] {
            assert_eq!(run_line(&format!("smap {sub} --help")), EXIT_OK, "{sub} --help");
        }
    }

    #[test]
    fn bad_invocations_exit_with_validation_code() {
        assert_eq!(run_line("smap"), EXIT_VALIDATION);
        assert_eq!(run_line("smap no-such-command"), EXIT_VALIDATION);
        assert_eq!(run_line("smap gen-data --no-such-flag"), EXIT_VALIDATION);
        // Missing input file.
        assert_eq!(
            run_line("smap train --data /definitely/not/here.jsonl"),
            EXIT_VALIDATION
        );
        // Evaluate needs a model source.
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let data = dir.path().join("tracking.jsonl");
        assert_eq!(
            run(["smap", "gen-data", "--frames", "8", "--out-dir", dir.path().to_str().unwrap()]),
            EXIT_OK
        );
        std::fs::rename(dir.path().join("tracking.jsonl"), &data).ok();
        assert_eq!(
            run([
                "smap",
                "evaluate",
                "--data",
                data.to_str().unwrap(),
                "--out-dir",
                out.to_str().unwrap()
            ]),
            EXIT_VALIDATION
        );
    }

    #[test]
    fn gen_data_is_seed_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        let c = dir.path().join("c");
        for (out, seed) in [(&a, 5), (&b, 5), (&c, 6)] {
            assert_eq!(
                run([
                    "smap",
                    "gen-data",
                    "--frames",
                    "20",
                    "--seed",
                    &seed.to_string(),
                    "--out-dir",
                    out.to_str().unwrap()
                ]),
                EXIT_OK
            );
        }
        let bytes_a = std::fs::read(a.join("tracking.jsonl")).unwrap();
        let bytes_b = std::fs::read(b.join("tracking.jsonl")).unwrap();
        let bytes_c = std::fs::read(c.join("tracking.jsonl")).unwrap();
        assert_eq!(bytes_a, bytes_b);
        assert_ne!(bytes_a, bytes_c);
    }

    #[test]
    fn bad_config_values_are_validation_errors() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("settings.cfg");
        std::fs::write(&config, "frames=lots\n").unwrap();
        assert_eq!(
            run([
                "smap",
                "gen-data",
                "--config",
                config.to_str().unwrap(),
                "--out-dir",
                dir.path().join("out").to_str().unwrap()
            ]),
            EXIT_VALIDATION
        );
        std::fs::write(&config, "style_a=tiki_taka\n").unwrap();
        assert_eq!(
            run([
                "smap",
                "gen-data",
                "--config",
                config.to_str().unwrap(),
                "--out-dir",
                dir.path().join("out").to_str().unwrap()
            ]),
            EXIT_VALIDATION
        );
    }

    /// Drives the whole pipeline end to end on a tiny model: generate,
    /// inspect channels, train all three heads, search, evaluate, ablate,
    /// render, analyze, rank, fine-tune, compare tendencies.
    #[test]
    fn pipeline_runs_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap().to_string();
        let data = dir.path().join("tracking.jsonl");
        let config = dir.path().join("settings.cfg");
        std::fs::write(
            &config,
            "filters=2\nconv_blocks=1\nmax_epochs=1\nbatch_size=8\nlearning_rate=0.001\n\
             patience=1\nlearning_rates=0.001\nbatch_sizes=8\nframes=20\nprobes=3\n",
        )
        .unwrap();
        let cfg = ["--config".to_string(), config.to_str().unwrap().to_string()];
        let base = |cmd: &str| {
            let mut v = vec!["smap".to_string(), cmd.to_string()];
            v.extend_from_slice(&cfg);
            v.extend_from_slice(&["--out-dir".to_string(), out.clone()]);
            v
        };

        let mut gen = base("gen-data");
        gen.extend_from_slice(&["--frames".to_string(), "20".to_string()]);
        assert_eq!(run(gen), EXIT_OK);
        assert!(data.is_file());
        let data_arg = ["--data".to_string(), data.to_str().unwrap().to_string()];

        let mut channels = base("build-channels");
        channels.extend_from_slice(&data_arg);
        assert_eq!(run(channels), EXIT_OK);
        assert!(dir.path().join("channel_stats.csv").is_file());
        assert!(dir.path().join("channel_00_att_occupancy.pgm").is_file());

        let mut train = base("train");
        train.extend_from_slice(&data_arg);
        assert_eq!(run(train), EXIT_OK);
        let model = dir.path().join("model.ckpt");
        assert!(model.is_file());
        assert!(dir.path().join("history.csv").is_file());
        let model_arg = ["--model".to_string(), model.to_str().unwrap().to_string()];

        let mut search = base("grid-search");
        search.extend_from_slice(&data_arg);
        assert_eq!(run(search), EXIT_OK);
        assert!(dir.path().join("grid.csv").is_file());

        let mut evaluate = base("evaluate");
        evaluate.extend_from_slice(&data_arg);
        evaluate.extend_from_slice(&model_arg);
        assert_eq!(run(evaluate), EXIT_OK);
        assert!(dir.path().join("reliability.csv").is_file());

        let mut naive = base("evaluate");
        naive.extend_from_slice(&data_arg);
        naive.push("--naive".to_string());
        assert_eq!(run(naive), EXIT_OK);

        let mut ablate = base("ablate");
        ablate.extend_from_slice(&data_arg);
        assert_eq!(run(ablate), EXIT_OK);
        let ablation = std::fs::read_to_string(dir.path().join("ablation.csv")).unwrap();
        assert_eq!(ablation.lines().count(), 7);

        let mut surface = base("surface");
        surface.extend_from_slice(&data_arg);
        surface.extend_from_slice(&model_arg);
        assert_eq!(run(surface), EXIT_OK);
        let text = std::fs::read_to_string(dir.path().join("surface.txt")).unwrap();
        let parsed = io::surface_from_text(&text).unwrap();
        assert_eq!(parsed.grid.shape(), (104, 68, 1));

        let mut pass = base("optimal-pass");
        pass.extend_from_slice(&data_arg);
        pass.extend_from_slice(&model_arg);
        assert_eq!(run(pass), EXIT_OK);
        assert!(dir.path().join("pass_options.csv").is_file());
        assert!(dir.path().join("suboptimal_passes.csv").is_file());

        // Pick a non-carrier attacker: the first snapshot's passer + 1.
        let (snaps, _) = io::read_tracking(&data, true).unwrap();
        let passer = snaps[0].pass.as_ref().unwrap().passer;
        let player = (passer + 1) % snaps[0].attackers.len();
        let mut position = base("optimal-position");
        position.extend_from_slice(&data_arg);
        position.extend_from_slice(&model_arg);
        position.extend_from_slice(&["--player".to_string(), player.to_string()]);
        assert_eq!(run(position), EXIT_OK);
        assert!(dir.path().join("position_gains.csv").is_file());

        let mut rank = base("ppa-rank");
        rank.extend_from_slice(&data_arg);
        rank.extend_from_slice(&model_arg);
        assert_eq!(run(rank), EXIT_OK);
        let ppa = std::fs::read_to_string(dir.path().join("ppa.csv")).unwrap();
        assert!(ppa.starts_with("player_id,ppa_raw,minutes,ppa_per_90\n"));
        assert!(ppa.lines().count() >= 2);

        let mut tune = base("finetune");
        tune.extend_from_slice(&data_arg);
        tune.extend_from_slice(&model_arg);
        tune.extend_from_slice(&["--team".to_string(), "0".to_string()]);
        assert_eq!(run(tune), EXIT_OK);
        assert!(dir.path().join("finetuned.ckpt").is_file());

        // Selection head model for tendencies; league == team here, so the
        // difference surface must be exactly zero.
        let sel_dir = dir.path().join("sel");
        let mut sel = base("train");
        sel.extend_from_slice(&data_arg);
        sel.extend_from_slice(&["--head".to_string(), "selection".to_string()]);
        let out_slot = sel.iter().position(|s| s == &out).unwrap();
        sel[out_slot] = sel_dir.to_str().unwrap().to_string();
        assert_eq!(run(sel), EXIT_OK);
        let sel_model = sel_dir.join("model.ckpt");
        let mut tendency = base("tendency");
        tendency.extend_from_slice(&data_arg);
        tendency.extend_from_slice(&[
            "--league-model".to_string(),
            sel_model.to_str().unwrap().to_string(),
            "--team-model".to_string(),
            sel_model.to_str().unwrap().to_string(),
        ]);
        assert_eq!(run(tendency), EXIT_OK);
        let diff =
            io::surface_from_text(&std::fs::read_to_string(dir.path().join("tendency_difference.txt")).unwrap())
                .unwrap();
        assert!(diff.grid.data().iter().all(|&v| v == 0.0));

        // Mismatched head: the sigmoid pipeline must reject the selection model.
        let mut wrong = base("optimal-pass");
        wrong.extend_from_slice(&data_arg);
        wrong.extend_from_slice(&["--model".to_string(), sel_model.to_str().unwrap().to_string()]);
        assert_eq!(run(wrong), EXIT_VALIDATION);
    }

    #[test]
    fn train_outputs_are_seed_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("settings.cfg");
        std::fs::write(&config, "filters=2\nconv_blocks=1\nmax_epochs=2\nbatch_size=8\n").unwrap();
        let gen_dir = dir.path().join("gen");
        assert_eq!(
            run([
                "smap",
                "gen-data",
                "--frames",
                "20",
                "--seed",
                "3",
                "--out-dir",
                gen_dir.to_str().unwrap()
            ]),
            EXIT_OK
        );
        let data = gen_dir.join("tracking.jsonl");
        let mut outputs = Vec::new();
        for name in ["t1", "t2"] {
            let out = dir.path().join(name);
            assert_eq!(
                run([
                    "smap",
                    "train",
                    "--data",
                    data.to_str().unwrap(),
                    "--config",
                    config.to_str().unwrap(),
                    "--seed",
                    "3",
                    "--out-dir",
                    out.to_str().unwrap()
                ]),
                EXIT_OK
            );
            outputs.push((
                std::fs::read(out.join("model.ckpt")).unwrap(),
                std::fs::read(out.join("history.csv")).unwrap(),
            ));
        }
        assert_eq!(outputs[0], outputs[1]);
    }
}
