//! Verify analytic gradients against central finite differences: first a
//! hand-assembled conv -> sigmoid -> log-loss pipeline (checking input,
//! kernel, and bias gradients separately), then every parameter of the
//! fully assembled model on a small grid.
//!
//! Run with `cargo run --example gradient_check`.

use rand::Rng as _;
use soccermap::autograd::gradcheck::{central_diff, max_rel_err};
use soccermap::autograd::{GridTensor, ParamShape, Parameter, Params, Tape};
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::util::seeded_rng;

fn rand_vec(rng: &mut soccermap::util::Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Scalar loss and its gradients for a 5x5 conv over a 6x6x2 grid followed
/// by a sigmoid and a single-cell log-loss.
fn conv_pipeline(x: &[f64], w: &[f64], b: &[f64]) -> (f64, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut tape: Tape<f64> = Tape::new();
    let mut params = Params::new();
    let wid = params.add(Parameter::new(
        "w",
        ParamShape::Conv { k: 5, cin: 2, cout: 1 },
        w.to_vec(),
    ));
    let bid = params.add(Parameter::new("b", ParamShape::Vector { len: 1 }, b.to_vec()));

    let input = tape.input(GridTensor::from_vec(6, 6, 2, x.to_vec()));
    let conv = tape.conv2d(input, wid, bid, &params).unwrap();
    let act = tape.sigmoid(conv).unwrap();
    let loss = tape.bce_at_cell(act, 2, 3, true).unwrap();
    let value = tape.scalar(loss);
    // Input gradients require asking the tape; parameter gradients
    // accumulate into `params`.
    let input_grad = {
        tape.backward(loss, &mut params, 1.0).unwrap();
        tape.grad(input).unwrap().to_vec()
    };
    let (wg, bg) = (params.get(wid).grad.clone(), params.get(bid).grad.clone());
    (value, input_grad, wg, bg)
}

fn check_conv_pipeline() {
    let mut rng = seeded_rng(7, 0);
    let x = rand_vec(&mut rng, 6 * 6 * 2, 1.0);
    let w = rand_vec(&mut rng, 5 * 5 * 2, 0.3);
    let b = rand_vec(&mut rng, 1, 0.1);

    let (_, gx, gw, gb) = conv_pipeline(&x, &w, &b);
    let eps = 1e-6;
    let nx = central_diff(|v| conv_pipeline(v, &w, &b).0, &x, eps);
    let nw = central_diff(|v| conv_pipeline(&x, v, &b).0, &w, eps);
    let nb = central_diff(|v| conv_pipeline(&x, &w, v).0, &b, eps);

    println!("conv -> sigmoid -> log-loss pipeline (6x6x2 input, one filter):");
    for (name, analytic, numeric) in
        [("input", &gx, &nx), ("kernel", &gw, &nw), ("bias", &gb, &nb)]
    {
        let err = max_rel_err(analytic, numeric);
        println!("  {name:<6} max relative error {err:.3e}");
        assert!(err < 1e-6, "{name} gradient mismatch");
    }
}

fn check_full_model() {
    let spec = NetworkSpec {
        nx: 8,
        ny: 8,
        in_channels: 13,
        filters: 2,
        conv_blocks: 1,
        head: Head::SigmoidProbability,
        ..NetworkSpec::default()
    };
    let mut reference: Model<f64> = Model::assemble(spec, 11).unwrap();
    // Jitter the zero-initialized biases away from the ReLU kink, where
    // subgradients and finite differences legitimately disagree.
    let mut rng = seeded_rng(12, 1);
    for p in reference.params.iter_mut() {
        if matches!(p.shape, ParamShape::Vector { .. }) {
            for v in p.value.iter_mut() {
                *v = rng.random_range(-0.05..0.05);
            }
        }
    }
    let x = GridTensor::from_vec(8, 8, 13, rand_vec(&mut rng, 8 * 8 * 13, 1.0));

    let flat: Vec<f64> = reference.params.iter().flat_map(|p| p.value.clone()).collect();
    let eval = |values: &[f64]| -> (f64, Vec<f64>) {
        let mut model = reference.clone();
        let mut offset = 0;
        for p in model.params.iter_mut() {
            let n = p.numel();
            p.value.copy_from_slice(&values[offset..offset + n]);
            offset += n;
        }
        let mut tape = Tape::new();
        let out = model.record(&mut tape, x.clone()).unwrap();
        let loss = tape.sum_all(out).unwrap();
        let value = tape.scalar(loss);
        tape.backward(loss, &mut model.params, 1.0).unwrap();
        (value, model.params.iter().flat_map(|p| p.grad.clone()).collect())
    };

    let (_, analytic) = eval(&flat);
    let numeric = central_diff(|v| eval(v).0, &flat, 1e-5);
    let err = max_rel_err(&analytic, &numeric);
    println!("full model, all {} parameters on an 8x8x13 grid:", flat.len());
    println!("  max relative error {err:.3e}");
    assert!(err < 1e-3, "full-model gradient mismatch");
}

fn main() {
    check_conv_pipeline();
    check_full_model();
    println!("all gradients agree with finite differences");
}
