//! Named trainable parameters and their optimizer state.

use super::Real;
use crate::util::Rng;
use rand::Rng as _;

/// Shape of one parameter tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamShape {
    /// Convolution kernels laid out `[k, k, cin, cout]`, index
    /// `((kx * k + ky) * cin + ci) * cout + co`.
    Conv { k: usize, cin: usize, cout: usize },
    /// Flat vector, e.g. per-output-channel biases.
    Vector { len: usize },
}

impl ParamShape {
    pub fn numel(&self) -> usize {
        match *self {
            ParamShape::Conv { k, cin, cout } => k * k * cin * cout,
            ParamShape::Vector { len } => len,
        }
    }
}

/// One named tensor of trainable values with its gradient buffer and Adam
/// moment estimates.
#[derive(Clone, Debug)]
pub struct Parameter<R> {
    pub name: String,
    pub shape: ParamShape,
    pub value: Vec<R>,
    pub grad: Vec<R>,
    pub(crate) adam_m: Vec<R>,
    pub(crate) adam_v: Vec<R>,
}

impl<R: Real> Parameter<R> {
    pub fn new(name: impl Into<String>, shape: ParamShape, value: Vec<R>) -> Self {
        assert_eq!(value.len(), shape.numel());
        let n = value.len();
        Parameter {
            name: name.into(),
            shape,
            value,
            grad: vec![R::zero(); n],
            adam_m: vec![R::zero(); n],
            adam_v: vec![R::zero(); n],
        }
    }

    pub fn numel(&self) -> usize {
        self.value.len()
    }
}

/// Handle into a [`Params`] set.
pub type ParamId = usize;

/// The full parameter set of a model. Tapes refer to entries by [`ParamId`];
/// backward accumulates into `grad`, the optimizer consumes it.
#[derive(Clone, Debug, Default)]
pub struct Params<R> {
    items: Vec<Parameter<R>>,
}

impl<R: Real> Params<R> {
    pub fn new() -> Self {
        Params { items: Vec::new() }
    }

    pub fn add(&mut self, p: Parameter<R>) -> ParamId {
        self.items.push(p);
        self.items.len() - 1
    }

    pub fn get(&self, id: ParamId) -> &Parameter<R> {
        &self.items[id]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Parameter<R> {
        &mut self.items[id]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Parameter<R>> {
        self.items.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Parameter<R>> {
        self.items.iter_mut()
    }

    pub fn by_name(&self, name: &str) -> Option<&Parameter<R>> {
        self.items.iter().find(|p| p.name == name)
    }

    pub fn id_by_name(&self, name: &str) -> Option<ParamId> {
        self.items.iter().position(|p| p.name == name)
    }

    /// Total number of scalar values across all parameter tensors.
    pub fn total_numel(&self) -> usize {
        self.items.iter().map(|p| p.numel()).sum()
    }

    pub fn zero_grads(&mut self) {
        for p in &mut self.items {
            for g in &mut p.grad {
                *g = R::zero();
            }
        }
    }

    /// Reset Adam moments, e.g. when restarting optimization on loaded
    /// parameters.
    pub fn reset_optimizer_state(&mut self) {
        for p in &mut self.items {
            for m in &mut p.adam_m {
                *m = R::zero();
            }
            for v in &mut p.adam_v {
                *v = R::zero();
            }
        }
    }

    pub fn cast<T: Real>(&self) -> Params<T> {
        Params {
            items: self
                .items
                .iter()
                .map(|p| Parameter {
                    name: p.name.clone(),
                    shape: p.shape,
                    value: p.value.iter().map(|v| T::from_f64(v.as_f64())).collect(),
                    grad: vec![T::zero(); p.numel()],
                    adam_m: vec![T::zero(); p.numel()],
                    adam_v: vec![T::zero(); p.numel()],
                })
                .collect(),
        }
    }
}

/// Truncated-normal draw: std-normal samples rejected outside ±2σ, scaled.
///
/// Values are rounded through f32 so that checkpoints (32-bit payload)
/// round-trip bitwise for any engine precision.
pub fn truncated_normal<R: Real>(rng: &mut Rng, n: usize, std: f64) -> Vec<R> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        // Box-Muller on uniform draws keeps the stream identical across R.
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random::<f64>();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        if z.abs() <= 2.0 {
            out.push(R::from_f64((z * std) as f32 as f64));
        }
    }
    out
}

/// He-style fan-in initialization for a conv kernel, zero bias.
pub fn init_conv<R: Real>(
    rng: &mut Rng,
    name: &str,
    k: usize,
    cin: usize,
    cout: usize,
) -> (Parameter<R>, Parameter<R>) {
    let fan_in = (k * k * cin) as f64;
    let std = (2.0 / fan_in).sqrt();
    let w = Parameter::new(
        format!("{name}.w"),
        ParamShape::Conv { k, cin, cout },
        truncated_normal(rng, k * k * cin * cout, std),
    );
    let b = Parameter::new(
        format!("{name}.b"),
        ParamShape::Vector { len: cout },
        vec![R::zero(); cout],
    );
    (w, b)
}
