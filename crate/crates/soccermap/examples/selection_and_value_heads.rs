//! The same backbone serves three output heads. This example exercises
//! the two that are not the completion-probability head:
//!
//! * selection head — a softmax over all field cells predicting where the
//!   pass will be aimed; scored by negative log-likelihood of the true
//!   destination cell against the uniform-surface baseline ln(104*68).
//! * value head — a linear map trained with squared error against a
//!   possession-value proxy in [-1, 1]. The proxy is mostly outcome
//!   noise, so always predicting the mean is already strong; the demo
//!   shows the fit collapsing the untrained model's error toward that
//!   reference.
//!
//! Both models are small (4 filters, a few epochs, ~600 passes); the
//! selection head pulls clear of the uniform surface right away. Takes
//! a couple of minutes.
//!
//! Run with `cargo run --example selection_and_value_heads`.

use soccermap::channels::ChannelConfig;
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{fit, mean_loss, split_dataset, Dataset, TrainConfig};
use soccermap::util::{GRID_NX, GRID_NY};

fn main() {
    let seed = 3;
    let frames = generate_dataset(
        &short_pass_style(),
        &long_ball_style(),
        600,
        seed,
        &OracleParams::default(),
    );
    let data = Dataset::from_snapshots(&frames, &ChannelConfig::default()).unwrap();
    let (train, val, test) = split_dataset(&data, seed);
    println!("{} train / {} val / {} test passes", train.len(), val.len(), test.len());

    let config = TrainConfig {
        learning_rate: 1e-3,
        batch_size: 16,
        max_epochs: 3,
        min_delta: 1e-4,
        patience: 3,
        seed,
    };
    let spec = |head| NetworkSpec {
        filters: 4,
        conv_blocks: 1,
        head,
        ..NetworkSpec::default()
    };

    // Selection head: negative log-likelihood of the chosen cell. The
    // uniform surface assigns every cell 1/(104*68), so anything below
    // ln(7072) means the model has learned where passes actually go.
    println!("\ntraining the selection head...");
    let mut selection: Model<f32> = Model::assemble(spec(Head::SoftmaxSelection), seed).unwrap();
    fit(&mut selection, &train, &val, &config).unwrap();
    let nll = mean_loss(&selection, &test).unwrap();
    let uniform = ((GRID_NX * GRID_NY) as f64).ln();
    println!(
        "selection NLL {:.4} vs uniform {:.4} ({:.0}% below)",
        nll,
        uniform,
        (1.0 - nll / uniform) * 100.0
    );
    assert!(nll < uniform, "selection head should beat the uniform surface");

    // Value head: squared error at the destination cell against the
    // outcome-value proxy. Most of the proxy's variance is outcome noise
    // that no location-conditional model can explain, so predicting the
    // training-set mean is a strong reference; the interesting signal at
    // this scale is how much of the untrained model's error the fit
    // removes on the way toward it.
    println!("\ntraining the value head...");
    let mut value: Model<f32> = Model::assemble(spec(Head::LinearValue), seed).unwrap();
    let untrained_mse = mean_loss(&value, &test).unwrap();
    let value_config = TrainConfig { learning_rate: 2e-3, max_epochs: 10, ..config };
    fit(&mut value, &train, &val, &value_config).unwrap();
    let mse = mean_loss(&value, &test).unwrap();
    let mean_target: f64 = train.samples.iter().map(|s| s.outcome_value).sum::<f64>()
        / train.len() as f64;
    let baseline_mse: f64 = test
        .samples
        .iter()
        .map(|s| (s.outcome_value - mean_target).powi(2))
        .sum::<f64>()
        / test.len() as f64;
    println!(
        "value MSE: untrained {untrained_mse:.4} -> trained {mse:.4} \
         (predict-the-mean reference {baseline_mse:.4})"
    );
    assert!(mse < untrained_mse, "training should reduce value error");
}
