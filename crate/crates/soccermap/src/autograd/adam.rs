//! Adam optimizer with bias-corrected first and second moments.

use super::params::Params;
use super::{AutogradError, Real};

#[derive(Debug, Clone, Copy)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Completed steps; drives the bias correction.
    pub t: u64,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
        }
    }

    /// Apply one update from the gradients currently accumulated in
    /// `params`, then zero them. If any gradient is non-finite the step is
    /// aborted before touching any parameter, and the offending parameter
    /// is named in the error.
    pub fn step<R: Real>(&mut self, params: &mut Params<R>) -> Result<(), AutogradError> {
        for p in params.iter() {
            if p.grad.iter().any(|g| !g.is_finite()) {
                return Err(AutogradError::NonFiniteGradient {
                    param: p.name.clone(),
                });
            }
        }
        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let (b1, b2) = (R::from_f64(self.beta1), R::from_f64(self.beta2));
        let (ob1, ob2) = (R::from_f64(1.0 - self.beta1), R::from_f64(1.0 - self.beta2));
        for p in params.iter_mut() {
            for i in 0..p.value.len() {
                let g = p.grad[i];
                p.adam_m[i] = b1 * p.adam_m[i] + ob1 * g;
                p.adam_v[i] = b2 * p.adam_v[i] + ob2 * g * g;
                let mhat = p.adam_m[i].as_f64() / bc1;
                let vhat = p.adam_v[i].as_f64() / bc2;
                let delta = self.lr * mhat / (vhat.sqrt() + self.eps);
                p.value[i] = p.value[i] - R::from_f64(delta);
            }
        }
        params.zero_grads();
        Ok(())
    }
}
