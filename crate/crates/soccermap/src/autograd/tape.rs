//! Operation tape: records the forward pass, replays it in reverse.

use super::params::{ParamId, ParamShape, Params};
use super::tensor::GridTensor;
use super::{AutogradError, Real};

pub type NodeId = usize;

/// Clamp bounds applied to probabilities before logs in the cell losses.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone)]
enum Op {
    Input,
    Identity { input: NodeId },
    Conv2d { input: NodeId, weights: ParamId, bias: ParamId, k: usize },
    MaxPool2x { input: NodeId, argmax: Vec<u32> },
    Upsample2x { input: NodeId },
    Relu { input: NodeId },
    Sigmoid { input: NodeId },
    Softmax2d { input: NodeId },
    ConcatChannels { a: NodeId, b: NodeId },
    MeanPair { a: NodeId, b: NodeId },
    SumAll { input: NodeId },
    /// −[y·log p + (1−y)·log(1−p)] at one grid cell of a probability map.
    BceCell { input: NodeId, ix: usize, iy: usize, positive: bool },
    /// −log p at one grid cell of a normalized selection map.
    NllCell { input: NodeId, ix: usize, iy: usize },
    /// (p − target)² at one grid cell of a value map.
    SquaredErrorCell { input: NodeId, ix: usize, iy: usize, target: f64 },
}

struct Node<R> {
    value: GridTensor<R>,
    grad: Option<Vec<R>>,
    op: Op,
}

/// A Wengert list over [`GridTensor`]s. One tape records one forward pass;
/// [`Tape::backward`] replays it exactly once in reverse.
pub struct Tape<R> {
    nodes: Vec<Node<R>>,
    consumed: bool,
    scratch_cols: Vec<R>,
    scratch_dcols: Vec<R>,
}

impl<R: Real> Default for Tape<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> Tape<R> {
    pub fn new() -> Self {
        Tape {
            nodes: Vec::new(),
            consumed: false,
            scratch_cols: Vec::new(),
            scratch_dcols: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &GridTensor<R> {
        &self.nodes[id].value
    }

    /// Scalar convenience for 1-element nodes (losses, sums).
    pub fn scalar(&self, id: NodeId) -> f64 {
        debug_assert_eq!(self.nodes[id].value.numel(), 1);
        self.nodes[id].value.data()[0].as_f64()
    }

    /// Gradient accumulated on a node by the last backward replay, if the
    /// node was reachable from the loss.
    pub fn grad(&self, id: NodeId) -> Option<&[R]> {
        self.nodes[id].grad.as_deref()
    }

    fn check(&self, id: NodeId) -> Result<(), AutogradError> {
        if id >= self.nodes.len() {
            return Err(AutogradError::InvalidNode {
                id,
                len: self.nodes.len(),
            });
        }
        Ok(())
    }

    fn push(&mut self, value: GridTensor<R>, op: Op) -> NodeId {
        self.nodes.push(Node {
            value,
            grad: None,
            op,
        });
        self.nodes.len() - 1
    }

    pub fn input(&mut self, value: GridTensor<R>) -> NodeId {
        self.push(value, Op::Input)
    }

    /// Linear activation: passes values through unchanged.
    pub fn linear(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let value = self.nodes[input].value.clone();
        Ok(self.push(value, Op::Identity { input }))
    }

    pub fn relu(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let x = &self.nodes[input].value;
        let (nx, ny, ch) = x.shape();
        let data = x
            .data()
            .iter()
            .map(|&v| if v > R::zero() { v } else { R::zero() })
            .collect();
        let value = GridTensor::from_vec(nx, ny, ch, data);
        Ok(self.push(value, Op::Relu { input }))
    }

    pub fn sigmoid(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let x = &self.nodes[input].value;
        let (nx, ny, ch) = x.shape();
        let data = x
            .data()
            .iter()
            .map(|&v| {
                let s = 1.0 / (1.0 + (-v.as_f64()).exp());
                clamp_open_unit(R::from_f64(s))
            })
            .collect();
        let value = GridTensor::from_vec(nx, ny, ch, data);
        Ok(self.push(value, Op::Sigmoid { input }))
    }

    /// Softmax over all cells of a single-channel grid, max-subtracted for
    /// stability; the output sums to 1.
    pub fn softmax2d(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let x = &self.nodes[input].value;
        let (nx, ny, ch) = x.shape();
        if ch != 1 {
            return Err(AutogradError::ShapeMismatch {
                op: "softmax2d",
                detail: format!("expected a single channel, got {ch}"),
            });
        }
        let max = x
            .data()
            .iter()
            .fold(R::neg_infinity(), |m, &v| if v > m { v } else { m });
        let mut data: Vec<R> = x.data().iter().map(|&v| (v - max).exp()).collect();
        let sum: f64 = data.iter().map(|v| v.as_f64()).sum();
        let inv = R::from_f64(1.0 / sum);
        for v in &mut data {
            *v = *v * inv;
        }
        let value = GridTensor::from_vec(nx, ny, 1, data);
        Ok(self.push(value, Op::Softmax2d { input }))
    }

    /// 2-D convolution with stride 1, odd kernel, symmetric padding that
    /// mirrors edge rows/columns including the edge itself. Spatial dims
    /// are preserved.
    pub fn conv2d(
        &mut self,
        input: NodeId,
        weights: ParamId,
        bias: ParamId,
        params: &Params<R>,
    ) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let (nx, ny, cin) = self.nodes[input].value.shape();
        let w = params.get(weights);
        let (k, wcin, cout) = match w.shape {
            ParamShape::Conv { k, cin, cout } => (k, cin, cout),
            _ => {
                return Err(AutogradError::ShapeMismatch {
                    op: "conv2d",
                    detail: format!("parameter '{}' is not a conv kernel", w.name),
                })
            }
        };
        if k % 2 == 0 {
            return Err(AutogradError::ShapeMismatch {
                op: "conv2d",
                detail: format!("kernel size {k} must be odd"),
            });
        }
        if wcin != cin {
            return Err(AutogradError::ShapeMismatch {
                op: "conv2d",
                detail: format!(
                    "input has {cin} channels but kernel '{}' expects {wcin}",
                    w.name
                ),
            });
        }
        let b = params.get(bias);
        match b.shape {
            ParamShape::Vector { len } if len == cout => {}
            _ => {
                return Err(AutogradError::ShapeMismatch {
                    op: "conv2d",
                    detail: format!(
                        "bias '{}' does not match {cout} output channels",
                        b.name
                    ),
                })
            }
        }

        let cells = nx * ny;
        let kk = k * k * cin;
        self.scratch_cols.resize(cells * kk, R::zero());
        im2col(&self.nodes[input].value, k, &mut self.scratch_cols);

        let mut out = GridTensor::zeros(nx, ny, cout);
        {
            let od = out.data_mut();
            for cell in 0..cells {
                od[cell * cout..(cell + 1) * cout].copy_from_slice(&b.value);
            }
            unsafe {
                R::gemm(
                    cells,
                    kk,
                    cout,
                    R::one(),
                    self.scratch_cols.as_ptr(),
                    kk as isize,
                    1,
                    w.value.as_ptr(),
                    cout as isize,
                    1,
                    R::one(),
                    od.as_mut_ptr(),
                    cout as isize,
                    1,
                );
            }
        }
        Ok(self.push(out, Op::Conv2d { input, weights, bias, k }))
    }

    /// 2x2 max-pool over disjoint blocks; both spatial dims must be even.
    /// Backward routes each gradient to the block argmax, first cell in
    /// row-major scan order winning ties.
    pub fn maxpool2x(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let x = &self.nodes[input].value;
        let (nx, ny, ch) = x.shape();
        if nx % 2 != 0 || ny % 2 != 0 {
            return Err(AutogradError::OddSpatialDims {
                op: "maxpool2x",
                nx,
                ny,
            });
        }
        let (ox, oy) = (nx / 2, ny / 2);
        let mut out = GridTensor::zeros(ox, oy, ch);
        let mut argmax = vec![0u32; ox * oy * ch];
        let xd = x.data();
        for bx in 0..ox {
            for by in 0..oy {
                for c in 0..ch {
                    let mut best = R::neg_infinity();
                    let mut best_idx = 0u32;
                    for dx in 0..2 {
                        for dy in 0..2 {
                            let src = ((2 * bx + dx) * ny + (2 * by + dy)) * ch + c;
                            if xd[src] > best {
                                best = xd[src];
                                best_idx = src as u32;
                            }
                        }
                    }
                    let dst = (bx * oy + by) * ch + c;
                    out.data_mut()[dst] = best;
                    argmax[dst] = best_idx;
                }
            }
        }
        Ok(self.push(out, Op::MaxPool2x { input, argmax }))
    }

    /// 2x nearest-neighbor upsampling: every 2x2 output block copies its
    /// source cell. Backward is the 2x2 block sum.
    pub fn upsample2x_nearest(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let x = &self.nodes[input].value;
        let (nx, ny, ch) = x.shape();
        let mut out = GridTensor::zeros(2 * nx, 2 * ny, ch);
        let xd = x.data();
        let od = out.data_mut();
        for ix in 0..2 * nx {
            let sx = ix / 2;
            for iy in 0..2 * ny {
                let sy = iy / 2;
                let src = (sx * ny + sy) * ch;
                let dst = (ix * 2 * ny + iy) * ch;
                od[dst..dst + ch].copy_from_slice(&xd[src..src + ch]);
            }
        }
        Ok(self.push(out, Op::Upsample2x { input }))
    }

    /// Stack the channels of two grids with matching spatial dims.
    pub fn concat_channels(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, AutogradError> {
        self.check(a)?;
        self.check(b)?;
        let (nxa, nya, ca) = self.nodes[a].value.shape();
        let (nxb, nyb, cb) = self.nodes[b].value.shape();
        if (nxa, nya) != (nxb, nyb) {
            return Err(AutogradError::ShapeMismatch {
                op: "concat_channels",
                detail: format!("{nxa}x{nya} vs {nxb}x{nyb}"),
            });
        }
        let mut out = GridTensor::zeros(nxa, nya, ca + cb);
        let (ad, bd) = (self.nodes[a].value.data(), self.nodes[b].value.data());
        let od = out.data_mut();
        for cell in 0..nxa * nya {
            let dst = cell * (ca + cb);
            od[dst..dst + ca].copy_from_slice(&ad[cell * ca..(cell + 1) * ca]);
            od[dst + ca..dst + ca + cb].copy_from_slice(&bd[cell * cb..(cell + 1) * cb]);
        }
        Ok(self.push(out, Op::ConcatChannels { a, b }))
    }

    /// Elementwise mean of two same-shape grids (the parameter-free merge).
    pub fn mean_pair(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, AutogradError> {
        self.check(a)?;
        self.check(b)?;
        let sa = self.nodes[a].value.shape();
        let sb = self.nodes[b].value.shape();
        if sa != sb {
            return Err(AutogradError::ShapeMismatch {
                op: "mean_pair",
                detail: format!("{sa:?} vs {sb:?}"),
            });
        }
        let half = R::from_f64(0.5);
        let data = self.nodes[a]
            .value
            .data()
            .iter()
            .zip(self.nodes[b].value.data())
            .map(|(&x, &y)| (x + y) * half)
            .collect();
        let value = GridTensor::from_vec(sa.0, sa.1, sa.2, data);
        Ok(self.push(value, Op::MeanPair { a, b }))
    }

    /// Sum of all elements, as a 1x1x1 scalar node.
    pub fn sum_all(&mut self, input: NodeId) -> Result<NodeId, AutogradError> {
        self.check(input)?;
        let sum: f64 = self.nodes[input].value.data().iter().map(|v| v.as_f64()).sum();
        let value = GridTensor::from_vec(1, 1, 1, vec![R::from_f64(sum)]);
        Ok(self.push(value, Op::SumAll { input }))
    }

    fn check_cell(&self, op: &'static str, input: NodeId, ix: usize, iy: usize) -> Result<(), AutogradError> {
        self.check(input)?;
        let (nx, ny, ch) = self.nodes[input].value.shape();
        if ch != 1 {
            return Err(AutogradError::ShapeMismatch {
                op,
                detail: format!("expected a single-channel map, got {ch} channels"),
            });
        }
        if ix >= nx || iy >= ny {
            return Err(AutogradError::CellOutOfRange { ix, iy, nx, ny });
        }
        Ok(())
    }

    /// Binary log-loss at one cell of a probability map; the probability is
    /// clamped to `[1e-7, 1-1e-7]` before the logs. Gradient flows only
    /// through that cell.
    pub fn bce_at_cell(
        &mut self,
        input: NodeId,
        ix: usize,
        iy: usize,
        positive: bool,
    ) -> Result<NodeId, AutogradError> {
        self.check_cell("bce_at_cell", input, ix, iy)?;
        let p = self.nodes[input].value.get(ix, iy, 0).as_f64();
        let pc = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        let loss = if positive { -pc.ln() } else { -(1.0 - pc).ln() };
        let value = GridTensor::from_vec(1, 1, 1, vec![R::from_f64(loss)]);
        Ok(self.push(value, Op::BceCell { input, ix, iy, positive }))
    }

    /// Negative log of a normalized selection map at one cell (cross-entropy
    /// against a one-hot grid).
    pub fn nll_at_cell(&mut self, input: NodeId, ix: usize, iy: usize) -> Result<NodeId, AutogradError> {
        self.check_cell("nll_at_cell", input, ix, iy)?;
        let p = self.nodes[input].value.get(ix, iy, 0).as_f64();
        let loss = -p.max(PROB_CLAMP).ln();
        let value = GridTensor::from_vec(1, 1, 1, vec![R::from_f64(loss)]);
        Ok(self.push(value, Op::NllCell { input, ix, iy }))
    }

    /// Squared error against a target value at one cell of a value map.
    pub fn squared_error_at_cell(
        &mut self,
        input: NodeId,
        ix: usize,
        iy: usize,
        target: f64,
    ) -> Result<NodeId, AutogradError> {
        self.check_cell("squared_error_at_cell", input, ix, iy)?;
        let p = self.nodes[input].value.get(ix, iy, 0).as_f64();
        let d = p - target;
        let value = GridTensor::from_vec(1, 1, 1, vec![R::from_f64(d * d)]);
        Ok(self.push(value, Op::SquaredErrorCell { input, ix, iy, target }))
    }

    /// Replay the tape in reverse from a scalar loss node, accumulating
    /// gradients into reachable nodes and into `params` (`+=`, so batch
    /// accumulation across tapes works). `seed` is the upstream gradient of
    /// the loss, typically 1 (or 1/batch for mean reduction).
    ///
    /// A tape can be replayed only once per forward recording.
    pub fn backward(
        &mut self,
        loss: NodeId,
        params: &mut Params<R>,
        seed: R,
    ) -> Result<(), AutogradError> {
        self.check(loss)?;
        if self.consumed {
            return Err(AutogradError::BackwardConsumed);
        }
        if self.nodes[loss].value.numel() != 1 {
            return Err(AutogradError::NotAScalar {
                op: "backward",
                numel: self.nodes[loss].value.numel(),
            });
        }
        self.consumed = true;
        self.nodes[loss].grad = Some(vec![seed]);

        for id in (0..=loss).rev() {
            let (before, rest) = self.nodes.split_at_mut(id);
            let node = &rest[0];
            let Some(upstream) = node.grad.as_deref() else {
                continue;
            };
            match &node.op {
                Op::Input => {}
                Op::Identity { input } => {
                    let g = ensure_grad(&mut before[*input]);
                    for (gi, &u) in g.iter_mut().zip(upstream) {
                        *gi += u;
                    }
                }
                Op::Relu { input } => {
                    let inp = &mut before[*input];
                    if inp.grad.is_none() {
                        inp.grad = Some(vec![R::zero(); inp.value.numel()]);
                    }
                    let Node { value, grad, .. } = inp;
                    let g = grad.as_mut().unwrap();
                    for ((gi, &u), &x) in g.iter_mut().zip(upstream).zip(value.data()) {
                        if x > R::zero() {
                            *gi += u;
                        }
                    }
                }
                Op::Sigmoid { .. } => {
                    let Op::Sigmoid { input } = node.op else { unreachable!() };
                    // ds/dx = s(1-s), using the stored output
                    let s = node.value.data();
                    let g = ensure_grad(&mut before[input]);
                    for ((gi, &u), &sv) in g.iter_mut().zip(upstream).zip(s) {
                        *gi += u * sv * (R::one() - sv);
                    }
                }
                Op::Softmax2d { .. } => {
                    let Op::Softmax2d { input } = node.op else { unreachable!() };
                    let s = node.value.data();
                    let dot: f64 = upstream
                        .iter()
                        .zip(s)
                        .map(|(&u, &sv)| u.as_f64() * sv.as_f64())
                        .sum();
                    let dot = R::from_f64(dot);
                    let g = ensure_grad(&mut before[input]);
                    for ((gi, &u), &sv) in g.iter_mut().zip(upstream).zip(s) {
                        *gi += sv * (u - dot);
                    }
                }
                Op::Conv2d { input, weights, bias, k } => {
                    let (input, weights, bias, k) = (*input, *weights, *bias, *k);
                    let inp = &mut before[input];
                    if inp.grad.is_none() {
                        inp.grad = Some(vec![R::zero(); inp.value.numel()]);
                    }
                    let Node { value: x, grad, .. } = inp;
                    let xgrad = grad.as_mut().unwrap();
                    let (nx, ny, cin) = x.shape();
                    let cells = nx * ny;
                    let kk = k * k * cin;
                    let cout = node.value.channels();

                    // bias gradient: column sums of upstream
                    {
                        let bg = &mut params.get_mut(bias).grad;
                        for cell in 0..cells {
                            let row = &upstream[cell * cout..(cell + 1) * cout];
                            for (bgo, &u) in bg.iter_mut().zip(row) {
                                *bgo += u;
                            }
                        }
                    }

                    self.scratch_cols.resize(cells * kk, R::zero());
                    im2col(x, k, &mut self.scratch_cols);

                    // dW += colsᵀ · dY
                    {
                        let w = params.get_mut(weights);
                        unsafe {
                            R::gemm(
                                kk,
                                cells,
                                cout,
                                R::one(),
                                self.scratch_cols.as_ptr(),
                                1,
                                kk as isize,
                                upstream.as_ptr(),
                                cout as isize,
                                1,
                                R::one(),
                                w.grad.as_mut_ptr(),
                                cout as isize,
                                1,
                            );
                        }
                    }

                    // dX: dcols = dY · Wᵀ, then scatter-add through the
                    // same mirrored index map
                    self.scratch_dcols.resize(cells * kk, R::zero());
                    {
                        let w = params.get(weights);
                        unsafe {
                            R::gemm(
                                cells,
                                cout,
                                kk,
                                R::one(),
                                upstream.as_ptr(),
                                cout as isize,
                                1,
                                w.value.as_ptr(),
                                1,
                                cout as isize,
                                R::zero(),
                                self.scratch_dcols.as_mut_ptr(),
                                kk as isize,
                                1,
                            );
                        }
                    }
                    col2im_add(&self.scratch_dcols, nx, ny, cin, k, xgrad);
                }
                Op::MaxPool2x { input, argmax } => {
                    let g = ensure_grad(&mut before[*input]);
                    for (&src, &u) in argmax.iter().zip(upstream) {
                        g[src as usize] += u;
                    }
                }
                Op::Upsample2x { .. } => {
                    let Op::Upsample2x { input } = node.op else { unreachable!() };
                    let (onx, ony, ch) = node.value.shape();
                    let g = ensure_grad(&mut before[input]);
                    let ny = ony / 2;
                    for ix in 0..onx {
                        let sx = ix / 2;
                        for iy in 0..ony {
                            let sy = iy / 2;
                            let src = (ix * ony + iy) * ch;
                            let dst = (sx * ny + sy) * ch;
                            for c in 0..ch {
                                g[dst + c] += upstream[src + c];
                            }
                        }
                    }
                }
                Op::ConcatChannels { a, b } => {
                    let (a, b) = (*a, *b);
                    let ca = before[a].value.channels();
                    let cb = before[b].value.channels();
                    let cells = node.value.nx() * node.value.ny();
                    {
                        let ga = ensure_grad(&mut before[a]);
                        for cell in 0..cells {
                            let src = cell * (ca + cb);
                            for c in 0..ca {
                                ga[cell * ca + c] += upstream[src + c];
                            }
                        }
                    }
                    {
                        let gb = ensure_grad(&mut before[b]);
                        for cell in 0..cells {
                            let src = cell * (ca + cb) + ca;
                            for c in 0..cb {
                                gb[cell * cb + c] += upstream[src + c];
                            }
                        }
                    }
                }
                Op::MeanPair { a, b } => {
                    let (a, b) = (*a, *b);
                    let half = R::from_f64(0.5);
                    {
                        let ga = ensure_grad(&mut before[a]);
                        for (gi, &u) in ga.iter_mut().zip(upstream) {
                            *gi += u * half;
                        }
                    }
                    {
                        let gb = ensure_grad(&mut before[b]);
                        for (gi, &u) in gb.iter_mut().zip(upstream) {
                            *gi += u * half;
                        }
                    }
                }
                Op::SumAll { input } => {
                    let u = upstream[0];
                    let g = ensure_grad(&mut before[*input]);
                    for gi in g.iter_mut() {
                        *gi += u;
                    }
                }
                Op::BceCell { input, ix, iy, positive } => {
                    let (input, ix, iy, positive) = (*input, *ix, *iy, *positive);
                    let u = upstream[0];
                    let inp = &mut before[input];
                    let p = inp.value.get(ix, iy, 0).as_f64();
                    // zero outside the clamp interval, where the loss is flat
                    let d = if (PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&p) {
                        let y = if positive { 1.0 } else { 0.0 };
                        (p - y) / (p * (1.0 - p))
                    } else {
                        0.0
                    };
                    let idx = inp.value.idx(ix, iy, 0);
                    ensure_grad(inp)[idx] += u * R::from_f64(d);
                }
                Op::NllCell { input, ix, iy } => {
                    let (input, ix, iy) = (*input, *ix, *iy);
                    let u = upstream[0];
                    let inp = &mut before[input];
                    let p = inp.value.get(ix, iy, 0).as_f64();
                    let d = if p >= PROB_CLAMP { -1.0 / p } else { 0.0 };
                    let idx = inp.value.idx(ix, iy, 0);
                    ensure_grad(inp)[idx] += u * R::from_f64(d);
                }
                Op::SquaredErrorCell { input, ix, iy, target } => {
                    let (input, ix, iy, target) = (*input, *ix, *iy, *target);
                    let u = upstream[0];
                    let inp = &mut before[input];
                    let p = inp.value.get(ix, iy, 0).as_f64();
                    let idx = inp.value.idx(ix, iy, 0);
                    ensure_grad(inp)[idx] += u * R::from_f64(2.0 * (p - target));
                }
            }
        }
        Ok(())
    }
}

fn ensure_grad<R: Real>(node: &mut Node<R>) -> &mut Vec<R> {
    if node.grad.is_none() {
        node.grad = Some(vec![R::zero(); node.value.numel()]);
    }
    node.grad.as_mut().unwrap()
}

fn clamp_open_unit<R: Real>(v: R) -> R {
    if v <= R::zero() {
        R::min_positive_value()
    } else if v >= R::one() {
        prev_before_one::<R>()
    } else {
        v
    }
}

/// Largest representable value strictly below 1.
fn prev_before_one<R: Real>() -> R {
    R::one() - R::epsilon() / (R::one() + R::one())
}

/// Mirror an out-of-range index back into `[0, n)`, reflecting about the
/// edges and including the edge element itself (symmetric padding).
#[inline]
fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Unfold `k`x`k` windows (symmetric padding) into rows of `cols`:
/// `cols[cell][(kx*k + ky)*cin + ci]`, cell-major to match the tensor
/// layout so conv2d is a plain row-major GEMM.
fn im2col<R: Real>(x: &GridTensor<R>, k: usize, cols: &mut [R]) {
    let (nx, ny, cin) = x.shape();
    let pad = ((k - 1) / 2) as isize;
    let xd = x.data();
    let mut w = 0usize;
    for ix in 0..nx {
        for iy in 0..ny {
            for kx in 0..k {
                let sx = mirror(ix as isize + kx as isize - pad, nx);
                for ky in 0..k {
                    let sy = mirror(iy as isize + ky as isize - pad, ny);
                    let src = (sx * ny + sy) * cin;
                    cols[w..w + cin].copy_from_slice(&xd[src..src + cin]);
                    w += cin;
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: scatter-add column gradients back through the
/// same mirrored index map.
fn col2im_add<R: Real>(dcols: &[R], nx: usize, ny: usize, cin: usize, k: usize, dx: &mut [R]) {
    let pad = ((k - 1) / 2) as isize;
    let mut r = 0usize;
    for ix in 0..nx {
        for iy in 0..ny {
            for kx in 0..k {
                let sx = mirror(ix as isize + kx as isize - pad, nx);
                for ky in 0..k {
                    let sy = mirror(iy as isize + ky as isize - pad, ny);
                    let dst = (sx * ny + sy) * cin;
                    for ci in 0..cin {
                        dx[dst + ci] += dcols[r + ci];
                    }
                    r += cin;
                }
            }
        }
    }
}
