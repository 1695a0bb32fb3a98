//! The multi-scale fully convolutional pass-surface network.
//!
//! Three resolutions of the input grid (1x, 1/2x, 1/4x) each run a stack
//! of 5x5 conv+ReLU blocks; per-scale 1x1 prediction stacks produce
//! single-channel maps that are upsampled and merged back to full
//! resolution, then pushed through one of three heads. Every architectural
//! component can be switched off independently for ablations.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::autograd::{
    init_conv, AutogradError, GridTensor, NodeId, ParamId, Params, Real, Tape,
};
use crate::channels::GameState;
use crate::util::seeded_rng;

/// Filter count of the hidden 1x1 prediction conv (when enabled).
pub const PREDICTION_FILTERS: usize = 32;
/// Filter count of the hidden 3x3 upsampling conv (when enabled).
pub const UPSAMPLING_FILTERS: usize = 32;

/// Output head: what the final full-resolution map means.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Head {
    /// Per-cell success probability, sigmoid activation.
    SigmoidProbability,
    /// Field-wide selection likelihood, softmax over all cells.
    SoftmaxSelection,
    /// Unconstrained per-cell value, identity activation.
    LinearValue,
}

impl Head {
    pub fn surface_kind(self) -> SurfaceKind {
        match self {
            Head::SigmoidProbability => SurfaceKind::Probability,
            Head::SoftmaxSelection => SurfaceKind::SelectionLikelihood,
            Head::LinearValue => SurfaceKind::Value,
        }
    }

    fn code(self) -> u8 {
        match self {
            Head::SigmoidProbability => 0,
            Head::SoftmaxSelection => 1,
            Head::LinearValue => 2,
        }
    }

    fn from_code(code: u8) -> Option<Head> {
        match code {
            0 => Some(Head::SigmoidProbability),
            1 => Some(Head::SoftmaxSelection),
            2 => Some(Head::LinearValue),
            _ => None,
        }
    }
}

impl std::fmt::Display for Head {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Head::SigmoidProbability => "sigmoid_probability",
            Head::SoftmaxSelection => "softmax_selection",
            Head::LinearValue => "linear_value",
        };
        f.write_str(s)
    }
}

/// Architecture description; [`Model::assemble`] turns it into parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkSpec {
    /// Grid cells along the pitch length.
    pub nx: usize,
    /// Grid cells along the pitch width.
    pub ny: usize,
    pub in_channels: usize,
    /// Feature-extraction filters per scale (F).
    pub filters: usize,
    /// 5x5 conv+ReLU blocks per scale (NF), at least 1.
    pub conv_blocks: usize,
    pub head: Head,
    /// Predict at all three scales and merge (off = deepest scale only).
    pub multi_scale: bool,
    /// Learn 3x3 convs after each 2x upsampling (off = nearest only).
    pub learned_upsampling: bool,
    /// Merge prediction maps with a learned 1x1 conv (off = mean).
    pub fusion_layer: bool,
    /// Hidden 1x1x32 conv before each prediction (off = direct 1x1x1).
    pub nonlinear_prediction: bool,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec {
            nx: crate::util::GRID_NX,
            ny: crate::util::GRID_NY,
            in_channels: crate::channels::NUM_CHANNELS,
            filters: 32,
            conv_blocks: 2,
            head: Head::SigmoidProbability,
            multi_scale: true,
            learned_upsampling: true,
            fusion_layer: true,
            nonlinear_prediction: true,
        }
    }
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.nx % 4 != 0 || self.ny % 4 != 0 {
            return Err(NetworkError::IndivisibleGrid { nx: self.nx, ny: self.ny });
        }
        if self.conv_blocks == 0 {
            return Err(NetworkError::BadSpec("conv_blocks must be at least 1".into()));
        }
        if self.filters == 0 || self.in_channels == 0 {
            return Err(NetworkError::BadSpec("filters and in_channels must be positive".into()));
        }
        Ok(())
    }
}

/// What a [`Surface`] grid holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Probability,
    SelectionLikelihood,
    Value,
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SurfaceKind::Probability => "probability",
            SurfaceKind::SelectionLikelihood => "selection_likelihood",
            SurfaceKind::Value => "value",
        };
        f.write_str(s)
    }
}

/// A full-field single-channel output map.
#[derive(Clone, Debug)]
pub struct Surface {
    pub grid: GridTensor<f64>,
    pub kind: SurfaceKind,
    /// Snapshot label the surface was computed from.
    pub source: String,
}

impl Surface {
    /// Check the per-kind value invariants.
    pub fn validate(&self) -> Result<(), NetworkError> {
        match self.kind {
            SurfaceKind::Probability => {
                if !self.grid.data().iter().all(|&v| v > 0.0 && v < 1.0) {
                    return Err(NetworkError::BadSurface(
                        "probability surface has values outside (0,1)".into(),
                    ));
                }
            }
            SurfaceKind::SelectionLikelihood => {
                let sum: f64 = self.grid.data().iter().sum();
                if (sum - 1.0).abs() > 1e-6 {
                    return Err(NetworkError::BadSurface(format!(
                        "selection surface sums to {sum}, expected 1"
                    )));
                }
            }
            SurfaceKind::Value => {}
        }
        if !self.grid.all_finite() {
            return Err(NetworkError::BadSurface("surface has non-finite values".into()));
        }
        Ok(())
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.grid.get(ix, iy, 0)
    }

    /// Cell with the largest value; first in row-major scan order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let (nx, ny, _) = self.grid.shape();
        let mut best = f64::NEG_INFINITY;
        let mut cell = (0, 0);
        for ix in 0..nx {
            for iy in 0..ny {
                let v = self.grid.get(ix, iy, 0);
                if v > best {
                    best = v;
                    cell = (ix, iy);
                }
            }
        }
        cell
    }
}

/// Network-level failures: spec violations, dimension mismatches, engine
/// errors surfaced during recording.
#[derive(Debug)]
pub enum NetworkError {
    IndivisibleGrid { nx: usize, ny: usize },
    BadSpec(String),
    DimMismatch { expected: (usize, usize, usize), got: (usize, usize, usize) },
    BadSurface(String),
    Autograd(AutogradError),
}

impl From<AutogradError> for NetworkError {
    fn from(e: AutogradError) -> Self {
        NetworkError::Autograd(e)
    }
}

impl std::fmt::Display for NetworkError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetworkError::IndivisibleGrid { nx, ny } => {
                write!(f, "grid {nx}x{ny} must be divisible by 4 for three scales")
            }
            NetworkError::BadSpec(msg) => write!(f, "invalid network spec: {msg}"),
            NetworkError::DimMismatch { expected, got } => {
                write!(f, "input dims {got:?} do not match network spec {expected:?}")
            }
            NetworkError::BadSurface(msg) => write!(f, "surface invariant violated: {msg}"),
            NetworkError::Autograd(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for NetworkError {}

/// Conv layers implied by a spec, in canonical (checkpoint) order:
/// `(name, k, cin, cout)`.
fn conv_layers(spec: &NetworkSpec) -> Vec<(String, usize, usize, usize)> {
    let mut layers = Vec::new();
    for s in 0..3 {
        for b in 0..spec.conv_blocks {
            let cin = if s == 0 && b == 0 { spec.in_channels } else { spec.filters };
            layers.push((format!("scale{s}.block{b}"), 5, cin, spec.filters));
        }
    }
    let pred_scales: &[usize] = if spec.multi_scale { &[0, 1, 2] } else { &[2] };
    for &s in pred_scales {
        if spec.nonlinear_prediction {
            layers.push((format!("pred{s}.hidden"), 1, spec.filters, PREDICTION_FILTERS));
            layers.push((format!("pred{s}.out"), 1, PREDICTION_FILTERS, 1));
        } else {
            layers.push((format!("pred{s}.out"), 1, spec.filters, 1));
        }
    }
    if spec.learned_upsampling {
        for u in [1, 2] {
            layers.push((format!("up{u}.hidden"), 3, 1, UPSAMPLING_FILTERS));
            layers.push((format!("up{u}.out"), 3, UPSAMPLING_FILTERS, 1));
        }
    }
    if spec.multi_scale && spec.fusion_layer {
        for s in [0, 1] {
            layers.push((format!("fuse{s}"), 1, 2, 1));
        }
    }
    layers
}

/// Total trainable scalars a spec implies. Pure function of the spec;
/// independent of grid size (the network is fully convolutional).
pub fn param_count(spec: &NetworkSpec) -> usize {
    conv_layers(spec)
        .iter()
        .map(|(_, k, cin, cout)| k * k * cin * cout + cout)
        .sum()
}

/// An assembled network: a spec plus its named parameters.
#[derive(Clone, Debug)]
pub struct Model<R> {
    pub spec: NetworkSpec,
    pub params: Params<R>,
}

impl<R: Real> Model<R> {
    /// Build a freshly initialized model: truncated-normal conv weights
    /// scaled by fan-in, zero biases, drawn deterministically from `seed`.
    pub fn assemble(spec: NetworkSpec, seed: u64) -> Result<Model<R>, NetworkError> {
        spec.validate()?;
        let mut rng = seeded_rng(seed, 0);
        let mut params = Params::new();
        for (name, k, cin, cout) in conv_layers(&spec) {
            let (w, b) = init_conv(&mut rng, &name, k, cin, cout);
            params.add(w);
            params.add(b);
        }
        Ok(Model { spec, params })
    }

    pub fn param_count(&self) -> usize {
        self.params.total_numel()
    }

    fn ids(&self, layer: &str) -> (ParamId, ParamId) {
        let w = self
            .params
            .id_by_name(&format!("{layer}.w"))
            .unwrap_or_else(|| panic!("layer {layer} not assembled"));
        let b = self
            .params
            .id_by_name(&format!("{layer}.b"))
            .unwrap_or_else(|| panic!("layer {layer} not assembled"));
        (w, b)
    }

    fn conv_relu(&self, tape: &mut Tape<R>, x: NodeId, layer: &str) -> Result<NodeId, AutogradError> {
        let (w, b) = self.ids(layer);
        let y = tape.conv2d(x, w, b, &self.params)?;
        tape.relu(y)
    }

    fn conv_linear(&self, tape: &mut Tape<R>, x: NodeId, layer: &str) -> Result<NodeId, AutogradError> {
        let (w, b) = self.ids(layer);
        tape.conv2d(x, w, b, &self.params)
    }

    /// Feature maps -> single-channel prediction map for scale `s`.
    fn prediction_stack(&self, tape: &mut Tape<R>, x: NodeId, s: usize) -> Result<NodeId, AutogradError> {
        let x = if self.spec.nonlinear_prediction {
            self.conv_relu(tape, x, &format!("pred{s}.hidden"))?
        } else {
            x
        };
        self.conv_linear(tape, x, &format!("pred{s}.out"))
    }

    /// Double the resolution of a prediction map coming up from scale `u`.
    fn upsampling_stage(&self, tape: &mut Tape<R>, x: NodeId, u: usize) -> Result<NodeId, AutogradError> {
        let x = tape.upsample2x_nearest(x)?;
        if !self.spec.learned_upsampling {
            return Ok(x);
        }
        let x = self.conv_relu(tape, x, &format!("up{u}.hidden"))?;
        self.conv_linear(tape, x, &format!("up{u}.out"))
    }

    /// Combine the local prediction at scale `s` with the map upsampled
    /// from below.
    fn merge(&self, tape: &mut Tape<R>, local: NodeId, upsampled: NodeId, s: usize) -> Result<NodeId, AutogradError> {
        if self.spec.fusion_layer {
            let both = tape.concat_channels(local, upsampled)?;
            self.conv_linear(tape, both, &format!("fuse{s}"))
        } else {
            tape.mean_pair(local, upsampled)
        }
    }

    /// Record the whole forward graph on `tape`, returning the post-head
    /// output node (same spatial dims as the input, one channel).
    pub fn record(&self, tape: &mut Tape<R>, x: GridTensor<R>) -> Result<NodeId, NetworkError> {
        let expected = (self.spec.nx, self.spec.ny, self.spec.in_channels);
        if x.shape() != expected {
            return Err(NetworkError::DimMismatch { expected, got: x.shape() });
        }

        let mut features = Vec::with_capacity(3);
        let mut node = tape.input(x);
        for s in 0..3 {
            if s > 0 {
                node = tape.maxpool2x(node)?;
            }
            for b in 0..self.spec.conv_blocks {
                node = self.conv_relu(tape, node, &format!("scale{s}.block{b}"))?;
            }
            features.push(node);
        }

        let merged = if self.spec.multi_scale {
            let pred0 = self.prediction_stack(tape, features[0], 0)?;
            let pred1 = self.prediction_stack(tape, features[1], 1)?;
            let pred2 = self.prediction_stack(tape, features[2], 2)?;
            let up2 = self.upsampling_stage(tape, pred2, 2)?;
            let mid = self.merge(tape, pred1, up2, 1)?;
            let up1 = self.upsampling_stage(tape, mid, 1)?;
            self.merge(tape, pred0, up1, 0)?
        } else {
            let pred2 = self.prediction_stack(tape, features[2], 2)?;
            let up2 = self.upsampling_stage(tape, pred2, 2)?;
            self.upsampling_stage(tape, up2, 1)?
        };

        let out = match self.spec.head {
            Head::SigmoidProbability => tape.sigmoid(merged)?,
            Head::SoftmaxSelection => tape.softmax2d(merged)?,
            Head::LinearValue => tape.linear(merged)?,
        };
        Ok(out)
    }

    /// Run inference on a (scaled) game state and package the output map.
    pub fn forward(&self, state: &GameState) -> Result<Surface, NetworkError> {
        let x: GridTensor<R> = state.tensor.cast();
        let mut tape = Tape::new();
        let out = self.record(&mut tape, x)?;
        Ok(Surface {
            grid: tape.value(out).cast(),
            kind: self.spec.head.surface_kind(),
            source: state.source.clone(),
        })
    }

    /// Change precision, keeping names, shapes and values.
    pub fn cast<T: Real>(&self) -> Model<T> {
        Model { spec: self.spec, params: self.params.cast() }
    }
}

/// Training provenance stored alongside checkpoint weights.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrainMeta {
    pub seed: u64,
    pub epochs: u32,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Checkpoint file failures.
#[derive(Debug)]
pub enum CheckpointError {
    Io(std::io::Error),
    BadMagic,
    UnsupportedVersion(u32),
    Truncated,
    Corrupt(String),
    HeadMismatch { file: Head, requested: Head },
}

impl From<std::io::Error> for CheckpointError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            CheckpointError::Truncated
        } else {
            CheckpointError::Io(e)
        }
    }
}

impl std::fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckpointError::Io(e) => write!(f, "checkpoint io error: {e}"),
            CheckpointError::BadMagic => write!(f, "not a checkpoint file (magic mismatch)"),
            CheckpointError::UnsupportedVersion(v) => {
                write!(f, "unsupported checkpoint format version {v}")
            }
            CheckpointError::Truncated => write!(f, "checkpoint file is truncated"),
            CheckpointError::Corrupt(msg) => write!(f, "corrupt checkpoint: {msg}"),
            CheckpointError::HeadMismatch { file, requested } => write!(
                f,
                "checkpoint was trained with head '{file}' but '{requested}' was requested; \
                 load with an explicit head swap to reuse the weights"
            ),
        }
    }
}

impl std::error::Error for CheckpointError {}

const CHECKPOINT_MAGIC: &[u8; 4] = b"SMAP";
const CHECKPOINT_VERSION: u32 = 1;

fn write_string<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    w.write_u32::<LittleEndian>(s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_string<Rd: Read>(r: &mut Rd) -> Result<String, CheckpointError> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    if len > 1 << 20 {
        return Err(CheckpointError::Corrupt(format!("string length {len}")));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| CheckpointError::Corrupt("non-utf8 string".into()))
}

fn write_spec<W: Write>(w: &mut W, spec: &NetworkSpec) -> std::io::Result<()> {
    w.write_u32::<LittleEndian>(spec.nx as u32)?;
    w.write_u32::<LittleEndian>(spec.ny as u32)?;
    w.write_u32::<LittleEndian>(spec.in_channels as u32)?;
    w.write_u32::<LittleEndian>(spec.filters as u32)?;
    w.write_u32::<LittleEndian>(spec.conv_blocks as u32)?;
    w.write_u8(spec.head.code())?;
    for flag in [
        spec.multi_scale,
        spec.learned_upsampling,
        spec.fusion_layer,
        spec.nonlinear_prediction,
    ] {
        w.write_u8(flag as u8)?;
    }
    Ok(())
}

fn read_spec<Rd: Read>(r: &mut Rd) -> Result<NetworkSpec, CheckpointError> {
    let nx = r.read_u32::<LittleEndian>()? as usize;
    let ny = r.read_u32::<LittleEndian>()? as usize;
    let in_channels = r.read_u32::<LittleEndian>()? as usize;
    let filters = r.read_u32::<LittleEndian>()? as usize;
    let conv_blocks = r.read_u32::<LittleEndian>()? as usize;
    let head = Head::from_code(r.read_u8()?)
        .ok_or_else(|| CheckpointError::Corrupt("unknown head code".into()))?;
    let mut flags = [false; 4];
    for f in &mut flags {
        *f = match r.read_u8()? {
            0 => false,
            1 => true,
            other => return Err(CheckpointError::Corrupt(format!("flag byte {other}"))),
        };
    }
    Ok(NetworkSpec {
        nx,
        ny,
        in_channels,
        filters,
        conv_blocks,
        head,
        multi_scale: flags[0],
        learned_upsampling: flags[1],
        fusion_layer: flags[2],
        nonlinear_prediction: flags[3],
    })
}

/// Serialize spec, training metadata and all parameters (32-bit values,
/// little-endian, named-tensor table of contents).
pub fn save_checkpoint<R: Real>(
    model: &Model<R>,
    meta: &TrainMeta,
    path: &Path,
) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_u32::<LittleEndian>(CHECKPOINT_VERSION)?;
    write_spec(&mut w, &model.spec)?;
    w.write_u64::<LittleEndian>(meta.seed)?;
    w.write_u32::<LittleEndian>(meta.epochs)?;
    w.write_f64::<LittleEndian>(meta.train_loss)?;
    w.write_f64::<LittleEndian>(meta.val_loss)?;
    w.write_u32::<LittleEndian>(model.params.len() as u32)?;
    for p in model.params.iter() {
        write_string(&mut w, &p.name)?;
        match p.shape {
            crate::autograd::ParamShape::Conv { k, cin, cout } => {
                w.write_u8(0)?;
                w.write_u32::<LittleEndian>(k as u32)?;
                w.write_u32::<LittleEndian>(cin as u32)?;
                w.write_u32::<LittleEndian>(cout as u32)?;
            }
            crate::autograd::ParamShape::Vector { len } => {
                w.write_u8(1)?;
                w.write_u32::<LittleEndian>(len as u32)?;
            }
        }
        for v in &p.value {
            w.write_f32::<LittleEndian>(v.as_f64() as f32)?;
        }
    }
    w.flush()
}

fn load_checkpoint_impl<R: Real>(
    path: &Path,
) -> Result<(Model<R>, TrainMeta), CheckpointError> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }
    let spec = read_spec(&mut r)?;
    spec.validate()
        .map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
    let meta = TrainMeta {
        seed: r.read_u64::<LittleEndian>()?,
        epochs: r.read_u32::<LittleEndian>()?,
        train_loss: r.read_f64::<LittleEndian>()?,
        val_loss: r.read_f64::<LittleEndian>()?,
    };
    let count = r.read_u32::<LittleEndian>()? as usize;
    let expected = conv_layers(&spec).len() * 2;
    if count != expected {
        return Err(CheckpointError::Corrupt(format!(
            "{count} tensors in file, spec implies {expected}"
        )));
    }
    let mut params = Params::new();
    for _ in 0..count {
        let name = read_string(&mut r)?;
        let shape = match r.read_u8()? {
            0 => crate::autograd::ParamShape::Conv {
                k: r.read_u32::<LittleEndian>()? as usize,
                cin: r.read_u32::<LittleEndian>()? as usize,
                cout: r.read_u32::<LittleEndian>()? as usize,
            },
            1 => crate::autograd::ParamShape::Vector {
                len: r.read_u32::<LittleEndian>()? as usize,
            },
            other => return Err(CheckpointError::Corrupt(format!("shape tag {other}"))),
        };
        let numel = shape.numel();
        if numel > (1 << 28) {
            return Err(CheckpointError::Corrupt(format!("tensor '{name}' numel {numel}")));
        }
        let mut value = Vec::with_capacity(numel);
        for _ in 0..numel {
            value.push(R::from_f64(r.read_f32::<LittleEndian>()? as f64));
        }
        params.add(crate::autograd::Parameter::new(name, shape, value));
    }
    // verify names/shapes against what the spec implies
    for ((name, k, cin, cout), pair) in conv_layers(&spec)
        .into_iter()
        .zip(params.iter().collect::<Vec<_>>().chunks(2))
    {
        let (w, b) = (pair[0], pair[1]);
        let want_w = crate::autograd::ParamShape::Conv { k, cin, cout };
        let want_b = crate::autograd::ParamShape::Vector { len: cout };
        if w.name != format!("{name}.w") || w.shape != want_w || b.name != format!("{name}.b") || b.shape != want_b {
            return Err(CheckpointError::Corrupt(format!(
                "tensor table does not match spec at layer '{name}'"
            )));
        }
    }
    Ok((Model { spec, params }, meta))
}

/// Load a checkpoint, requiring the stored head to match `expect_head`
/// when given. Pass `None` to accept whatever the file holds.
pub fn load_checkpoint<R: Real>(
    path: &Path,
    expect_head: Option<Head>,
) -> Result<(Model<R>, TrainMeta), CheckpointError> {
    let (model, meta) = load_checkpoint_impl(path)?;
    if let Some(head) = expect_head {
        if head != model.spec.head {
            return Err(CheckpointError::HeadMismatch { file: model.spec.head, requested: head });
        }
    }
    Ok((model, meta))
}

/// Load a checkpoint for fine-tuning under a different head. All weights
/// carry over unchanged — the heads themselves hold no parameters — so
/// this is the explicit opt-in the plain loader demands on a head
/// mismatch.
pub fn load_checkpoint_with_head_swap<R: Real>(
    path: &Path,
    new_head: Head,
) -> Result<(Model<R>, TrainMeta), CheckpointError> {
    let (mut model, meta) = load_checkpoint_impl(path)?;
    model.spec.head = new_head;
    Ok((model, meta))
}
