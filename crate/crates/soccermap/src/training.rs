//! Datasets, losses, and the training loop: stratified splits,
//! single-cell losses for each head, early-stopped fitting with
//! best-validation restore, grid search, and fine-tuning.

use std::path::Path;

use rand::seq::SliceRandom as _;

use crate::autograd::{Adam, AutogradError, Real, Tape};
use crate::channels::{
    cell_on_grid, model_input, ChannelConfig, ChannelError, GameState, PassEvent,
    TrackingSnapshot,
};
use crate::network::{
    load_checkpoint, CheckpointError, Head, Model, NetworkError, NetworkSpec, Surface,
};
use crate::synthgen::xg_proxy;
use crate::util::seeded_rng;

/// Clamp applied to probabilities before logs, matching the training-time
/// loss nodes.
const CLAMP: f64 = crate::autograd::PROB_CLAMP;

/// The standard learning-rate sweep.
pub const LEARNING_RATE_GRID: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// The standard batch-size sweep.
pub const BATCH_SIZE_GRID: [usize; 3] = [1, 16, 32];

/// Which split a dataset came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitTag {
    Train,
    Val,
    Test,
}

impl std::fmt::Display for SplitTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SplitTag::Train => "train",
            SplitTag::Val => "val",
            SplitTag::Test => "test",
        })
    }
}

/// Source of one sample's input grid. Tracking snapshots are kept as-is
/// and rasterized on demand: a full training set of grids would dwarf
/// memory, while rebuilding one costs a fraction of a forward pass.
#[derive(Clone, Debug)]
pub enum SampleInput {
    /// A prebuilt grid (used where grids are hand-crafted).
    Eager(GameState),
    /// Build from the snapshot at each use.
    Deferred { snapshot: TrackingSnapshot, config: ChannelConfig },
}

impl SampleInput {
    /// The model-ready input grid, borrowing when it is already built.
    /// Eager states must already carry model scaling; deferred ones are
    /// built and scaled here.
    pub fn build(&self) -> Result<std::borrow::Cow<'_, GameState>, ChannelError> {
        match self {
            SampleInput::Eager(state) => Ok(std::borrow::Cow::Borrowed(state)),
            SampleInput::Deferred { snapshot, config } => {
                Ok(std::borrow::Cow::Owned(model_input(snapshot, config)?))
            }
        }
    }
}

/// One labeled pass: the input grid source, the event, and the
/// value-head target (the signed goal-proximity proxy of the
/// possession's end).
#[derive(Clone, Debug)]
pub struct Sample {
    pub input: SampleInput,
    pub pass: PassEvent,
    pub outcome_value: f64,
}

/// A set of labeled passes.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub tag: Option<SplitTag>,
}

impl Dataset {
    /// Take in every frame that carries a pass; frames without one are
    /// skipped. Each frame is first normalized to attack left-to-right so
    /// the model sees a single orientation, and validated now so grid
    /// building cannot fail later.
    pub fn from_snapshots(
        snaps: &[TrackingSnapshot],
        config: &ChannelConfig,
    ) -> Result<Dataset, ChannelError> {
        let mut samples = Vec::new();
        for snap in snaps {
            if snap.pass.is_none() {
                continue;
            }
            let snap = snap.clone().normalize_attack_direction();
            snap.validate()?;
            let pass = snap.pass.clone().unwrap();
            let outcome_value = xg_proxy(&snap, pass.destination, pass.completed);
            samples.push(Sample {
                input: SampleInput::Deferred { snapshot: snap, config: config.clone() },
                pass,
                outcome_value,
            });
        }
        Ok(Dataset { samples, tag: None })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// (completed, missed) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let completed = self.samples.iter().filter(|s| s.pass.completed).count();
        (completed, self.len() - completed)
    }

    pub fn success_rate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.class_counts().0 as f64 / self.len() as f64
    }
}

/// Hyperparameters of one training run. Adam's momentum constants are
/// fixed at 0.9 / 0.999 inside the optimizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Validation improvement below this does not reset the patience
    /// counter.
    pub min_delta: f64,
    /// Consecutive non-improving epochs tolerated before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-4,
            batch_size: 16,
            max_epochs: 50,
            min_delta: 0.001,
            patience: 5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Defaults for warm-start fine-tuning: a gentler learning rate.
    pub fn finetune_defaults(seed: u64) -> Self {
        TrainConfig { learning_rate: 1e-5, max_epochs: 20, seed, ..TrainConfig::default() }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0
            || self.max_epochs == 0
            || self.patience == 0
            || !self.learning_rate.is_finite()
            || self.learning_rate < 0.0
            || !(self.min_delta >= 0.0)
        {
            return Err(TrainError::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Training failures.
#[derive(Debug)]
pub enum TrainError {
    EmptyDataset,
    InvalidConfig(String),
    /// Value-head targets must lie in [-1, 1].
    InvalidValueTarget(f64),
    /// Loss or gradients stopped being finite.
    Diverged { epoch: usize, detail: String },
    Network(NetworkError),
    Checkpoint(CheckpointError),
    Autograd(AutogradError),
    Channel(ChannelError),
}

impl std::fmt::Display for TrainError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrainError::EmptyDataset => write!(f, "dataset contains no passes"),
            TrainError::InvalidConfig(c) => write!(f, "invalid training configuration: {c}"),
            TrainError::InvalidValueTarget(v) => {
                write!(f, "value target {v} outside [-1, 1]")
            }
            TrainError::Diverged { epoch, detail } => {
                write!(f, "training diverged at epoch {epoch}: {detail}")
            }
            TrainError::Network(e) => write!(f, "network error: {e}"),
            TrainError::Checkpoint(e) => write!(f, "checkpoint error: {e}"),
            TrainError::Autograd(e) => write!(f, "autograd error: {e}"),
            TrainError::Channel(e) => write!(f, "channel error: {e}"),
        }
    }
}

impl std::error::Error for TrainError {}

impl From<NetworkError> for TrainError {
    fn from(e: NetworkError) -> Self {
        TrainError::Network(e)
    }
}

impl From<CheckpointError> for TrainError {
    fn from(e: CheckpointError) -> Self {
        TrainError::Checkpoint(e)
    }
}

impl From<AutogradError> for TrainError {
    fn from(e: AutogradError) -> Self {
        TrainError::Autograd(e)
    }
}

impl From<ChannelError> for TrainError {
    fn from(e: ChannelError) -> Self {
        TrainError::Channel(e)
    }
}

/// Log-loss of the surface's probability at the pass destination cell
/// against the pass outcome. Depends on no other cell.
pub fn target_location_loss(surface: &Surface, pass: &PassEvent) -> f64 {
    let (nx, ny, _) = surface.grid.shape();
    let (ix, iy) = cell_on_grid(pass.destination.0, pass.destination.1, nx, ny);
    let p = surface.at(ix, iy).clamp(CLAMP, 1.0 - CLAMP);
    if pass.completed {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Cross-entropy of a normalized selection surface against a one-hot
/// grid at the pass destination cell.
pub fn selection_loss(surface: &Surface, pass: &PassEvent) -> f64 {
    let (nx, ny, _) = surface.grid.shape();
    let (ix, iy) = cell_on_grid(pass.destination.0, pass.destination.1, nx, ny);
    -surface.at(ix, iy).max(CLAMP).ln()
}

/// Squared error of the surface's value at the pass destination cell
/// against a possession outcome in [-1, 1].
pub fn value_loss(surface: &Surface, pass: &PassEvent, outcome_value: f64) -> Result<f64, TrainError> {
    if !(-1.0..=1.0).contains(&outcome_value) {
        return Err(TrainError::InvalidValueTarget(outcome_value));
    }
    let (nx, ny, _) = surface.grid.shape();
    let (ix, iy) = cell_on_grid(pass.destination.0, pass.destination.1, nx, ny);
    let d = surface.at(ix, iy) - outcome_value;
    Ok(d * d)
}

/// Mean per-sample loss of `model` on `data` under the model's own head
/// (no gradients).
pub fn mean_loss<R: Real>(model: &Model<R>, data: &Dataset) -> Result<f64, TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut total = 0.0;
    for sample in &data.samples {
        let state = sample.input.build()?;
        let surface = model.forward(&state)?;
        total += match model.spec.head {
            Head::SigmoidProbability => target_location_loss(&surface, &sample.pass),
            Head::SoftmaxSelection => selection_loss(&surface, &sample.pass),
            Head::LinearValue => value_loss(&surface, &sample.pass, sample.outcome_value)?,
        };
    }
    Ok(total / data.len() as f64)
}

/// Stratified 60:20:20 split: each outcome class is shuffled and cut
/// separately, so the success/miss ratio carries over to every split.
/// The same seed reproduces the same split.
pub fn split_dataset(dataset: &Dataset, seed: u64) -> (Dataset, Dataset, Dataset) {
    let mut rng = seeded_rng(seed, 0);
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, s) in dataset.samples.iter().enumerate() {
        by_class[usize::from(s.pass.completed)].push(i);
    }

    let mut split_indices: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for class in &mut by_class {
        class.shuffle(&mut rng);
        let n = class.len();
        let n_train = n * 6 / 10;
        let n_val = n * 2 / 10;
        split_indices[0].extend(&class[..n_train]);
        split_indices[1].extend(&class[n_train..n_train + n_val]);
        split_indices[2].extend(&class[n_train + n_val..]);
    }

    let tags = [SplitTag::Train, SplitTag::Val, SplitTag::Test];
    let mut out: Vec<Dataset> = split_indices
        .iter_mut()
        .zip(tags)
        .map(|(indices, tag)| {
            indices.shuffle(&mut rng);
            Dataset {
                samples: indices.iter().map(|&i| dataset.samples[i].clone()).collect(),
                tag: Some(tag),
            }
        })
        .collect();
    let test = out.pop().unwrap();
    let val = out.pop().unwrap();
    let train = out.pop().unwrap();
    (train, val, test)
}

/// One epoch's losses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Per-epoch record of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    /// Epoch (1-based) whose parameters the run returned.
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,val_loss,lr,batch\n");
        for e in &self.epochs {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                e.epoch, e.train_loss, e.val_loss, self.learning_rate, self.batch_size
            ));
        }
        s
    }
}

/// Minimize the head's single-cell loss on `train` with Adam, monitoring
/// `val` each epoch.
///
/// Epoch order is reshuffled from a per-epoch seeded stream, batches
/// average their gradients, and the model is left holding the parameters
/// of the epoch with the lowest validation loss (any improvement counts
/// for the snapshot; only improvements of at least `min_delta` reset the
/// patience counter).
pub fn fit<R: Real>(
    model: &mut Model<R>,
    train: &Dataset,
    val: &Dataset,
    config: &TrainConfig,
) -> Result<TrainHistory, TrainError> {
    config.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    if model.spec.head == Head::LinearValue {
        for s in &train.samples.iter().chain(&val.samples).collect::<Vec<_>>() {
            if !(-1.0..=1.0).contains(&s.outcome_value) {
                return Err(TrainError::InvalidValueTarget(s.outcome_value));
            }
        }
    }

    let mut opt = Adam::new(config.learning_rate);
    let mut history = Vec::new();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0;
    let mut best_params = None;
    let mut stop_reference = f64::INFINITY;
    let mut stall = 0;

    let mut indices: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=config.max_epochs {
        // stream 1000+epoch keeps the shuffle clear of the generator's streams
        let mut rng = seeded_rng(config.seed, 1000 + epoch as u64);
        indices.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for batch in indices.chunks(config.batch_size) {
            let seed_grad = R::from_f64(1.0 / batch.len() as f64);
            for &i in batch {
                let sample = &train.samples[i];
                let mut tape = Tape::new();
                let x = sample.input.build()?.tensor.cast();
                let out = model.record(&mut tape, x)?;
                let (nx, ny, _) = tape.value(out).shape();
                let (ix, iy) =
                    cell_on_grid(sample.pass.destination.0, sample.pass.destination.1, nx, ny);
                let loss = match model.spec.head {
                    Head::SigmoidProbability => {
                        tape.bce_at_cell(out, ix, iy, sample.pass.completed)?
                    }
                    Head::SoftmaxSelection => tape.nll_at_cell(out, ix, iy)?,
                    Head::LinearValue => {
                        tape.squared_error_at_cell(out, ix, iy, sample.outcome_value)?
                    }
                };
                loss_sum += tape.scalar(loss);
                tape.backward(loss, &mut model.params, seed_grad)?;
            }
            opt.step(&mut model.params).map_err(|e| TrainError::Diverged {
                epoch,
                detail: e.to_string(),
            })?;
        }
        let train_loss = loss_sum / train.len() as f64;
        let val_loss = mean_loss(model, val)?;
        history.push(EpochStats { epoch, train_loss, val_loss });
        if !val_loss.is_finite() {
            return Err(TrainError::Diverged {
                epoch,
                detail: format!("validation loss {val_loss}"),
            });
        }

        if val_loss < best_val {
            best_val = val_loss;
            best_epoch = epoch;
            best_params = Some(model.params.clone());
        }
        if val_loss < stop_reference - config.min_delta {
            stop_reference = val_loss;
            stall = 0;
        } else {
            stall += 1;
            if stall >= config.patience {
                break;
            }
        }
    }

    if let Some(p) = best_params {
        model.params = p;
    }
    Ok(TrainHistory {
        epochs: history,
        best_epoch,
        best_val_loss: best_val,
        learning_rate: config.learning_rate,
        batch_size: config.batch_size,
    })
}

/// One grid-search evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSearchRow {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub best_val_loss: f64,
    pub best_epoch: usize,
}

/// CSV table of grid-search results.
pub fn grid_table_csv(rows: &[GridSearchRow]) -> String {
    let mut s = String::from("lr,batch,val_loss,best_epoch\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.learning_rate, r.batch_size, r.best_val_loss, r.best_epoch
        ));
    }
    s
}

/// Train one freshly initialized model per (learning rate, batch size)
/// combination and pick the configuration with the lowest validation
/// loss. Every model starts from the same seed, so the comparison
/// isolates the hyperparameters.
pub fn grid_search<R: Real>(
    spec: &NetworkSpec,
    train: &Dataset,
    val: &Dataset,
    base: &TrainConfig,
    learning_rates: &[f64],
    batch_sizes: &[usize],
) -> Result<(TrainConfig, Vec<GridSearchRow>), TrainError> {
    if learning_rates.is_empty() || batch_sizes.is_empty() {
        return Err(TrainError::InvalidConfig("empty hyperparameter grid".into()));
    }
    let mut rows = Vec::new();
    let mut best: Option<TrainConfig> = None;
    let mut best_loss = f64::INFINITY;
    for &lr in learning_rates {
        for &batch in batch_sizes {
            let config = TrainConfig { learning_rate: lr, batch_size: batch, ..*base };
            let mut model: Model<R> = Model::assemble(*spec, base.seed)?;
            let run = fit(&mut model, train, val, &config)?;
            rows.push(GridSearchRow {
                learning_rate: lr,
                batch_size: batch,
                best_val_loss: run.best_val_loss,
                best_epoch: run.best_epoch,
            });
            if run.best_val_loss < best_loss {
                best_loss = run.best_val_loss;
                best = Some(config);
            }
        }
    }
    Ok((best.unwrap(), rows))
}

/// Warm-start from a checkpoint and continue training on a team's own
/// passes (all layers trainable). With small team subsets there is no
/// held-out data to spare, so early stopping monitors the training
/// subset itself.
pub fn finetune<R: Real>(
    checkpoint: &Path,
    team_subset: &Dataset,
    config: &TrainConfig,
) -> Result<(Model<R>, TrainHistory), TrainError> {
    if team_subset.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let (mut model, _meta) = load_checkpoint(checkpoint, None)?;
    let history = fit(&mut model, team_subset, team_subset, config)?;
    Ok((model, history))
}

/// Model probabilities at every sample's pass destination, paired with the
/// observed outcomes — the inputs for log-loss and calibration metrics.
/// Requires a probability head.
pub fn destination_predictions<R: Real>(
    model: &Model<R>,
    data: &Dataset,
) -> Result<(Vec<f64>, Vec<bool>), TrainError> {
    if model.spec.head != Head::SigmoidProbability {
        return Err(TrainError::InvalidConfig(format!(
            "destination predictions need a {} head, got {}",
            Head::SigmoidProbability,
            model.spec.head
        )));
    }
    let mut preds = Vec::with_capacity(data.len());
    let mut labels = Vec::with_capacity(data.len());
    for sample in &data.samples {
        let state = sample.input.build()?;
        let surface = model.forward(&state)?;
        let (ix, iy) = cell_on_grid(
            sample.pass.destination.0,
            sample.pass.destination.1,
            surface.grid.nx(),
            surface.grid.ny(),
        );
        preds.push(surface.at(ix, iy));
        labels.push(sample.pass.completed);
    }
    Ok((preds, labels))
}

/// One ablation run: a named architecture variant and its held-out losses.
#[derive(Debug, Clone)]
pub struct AblationRow {
    pub name: String,
    pub spec: NetworkSpec,
    pub best_val_loss: f64,
    pub test_loss: f64,
}

/// Architecture variants the ablation harness compares: the full model,
/// each refinement (learned upsampling, fusion convolution, nonlinear
/// prediction) removed in turn, the last two removed together, and the
/// single-scale reduction.
pub fn ablation_specs(base: &NetworkSpec) -> Vec<(&'static str, NetworkSpec)> {
    let full = NetworkSpec {
        multi_scale: true,
        learned_upsampling: true,
        fusion_layer: true,
        nonlinear_prediction: true,
        ..*base
    };
    vec![
        ("full", full),
        ("no_learned_upsampling", NetworkSpec { learned_upsampling: false, ..full }),
        ("no_fusion", NetworkSpec { fusion_layer: false, ..full }),
        ("no_nonlinear_prediction", NetworkSpec { nonlinear_prediction: false, ..full }),
        (
            "no_fusion_no_nonlinear_prediction",
            NetworkSpec { fusion_layer: false, nonlinear_prediction: false, ..full },
        ),
        ("single_scale", NetworkSpec { multi_scale: false, ..full }),
    ]
}

/// Train every [`ablation_specs`] variant from the same seed and report
/// each one's best validation loss and held-out test loss.
pub fn run_ablation<R: Real>(
    base: &NetworkSpec,
    train: &Dataset,
    val: &Dataset,
    test: &Dataset,
    config: &TrainConfig,
) -> Result<Vec<AblationRow>, TrainError> {
    let mut rows = Vec::new();
    for (name, spec) in ablation_specs(base) {
        let mut model: Model<R> = Model::assemble(spec, config.seed)?;
        let history = fit(&mut model, train, val, config)?;
        let test_loss = mean_loss(&model, test)?;
        rows.push(AblationRow {
            name: name.to_string(),
            spec,
            best_val_loss: history.best_val_loss,
            test_loss,
        });
    }
    Ok(rows)
}

/// Comparison table: one row per variant. `sc` is the number of scales the
/// variant predicts at, the three flag columns mark learned upsampling,
/// the fusion convolution, and nonlinear prediction, and the geometry
/// columns record convolution depth and width.
pub fn ablation_table_csv(rows: &[AblationRow]) -> String {
    let mut s =
        String::from("name,scales,learned_up,fusion,nonlinear_pred,conv_blocks,filters,val_loss,test_loss\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.name,
            if r.spec.multi_scale { 3 } else { 1 },
            r.spec.learned_upsampling as u8,
            r.spec.fusion_layer as u8,
            r.spec.nonlinear_prediction as u8,
            r.spec.conv_blocks,
            r.spec.filters,
            r.best_val_loss,
            r.test_loss,
        ));
    }
    s
}
