use std::time::Instant;

use soccermap::channels::ChannelConfig;
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{fit, mean_loss, split_dataset, Dataset, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lr: f64 = args[1].parse().unwrap();
    let batch: usize = args[2].parse().unwrap();
    let epochs: usize = args[3].parse().unwrap();
    let init_seed: u64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0);

    let seed = 0;
    let params = OracleParams::default();
    let frames = generate_dataset(&short_pass_style(), &long_ball_style(), 2000, seed, &params);
    let data = Dataset::from_snapshots(&frames, &ChannelConfig::default()).unwrap();
    let (train, val, test) = split_dataset(&data, seed);

    let spec = NetworkSpec { filters: 16, head: Head::SigmoidProbability, ..NetworkSpec::default() };
    let config = TrainConfig {
        learning_rate: lr,
        batch_size: batch,
        max_epochs: epochs,
        min_delta: 1e-4,
        patience: epochs,
        seed,
    };
    let mut model: Model<f32> = Model::assemble(spec, init_seed).unwrap();
    let t = Instant::now();
    let history = fit(&mut model, &train, &val, &config).unwrap();
    for e in &history.epochs {
        println!(
            "lr={lr} b={batch} init={init_seed} epoch {}: train {:.4} val {:.4} [{:?}]",
            e.epoch,
            e.train_loss,
            e.val_loss,
            t.elapsed()
        );
    }
    println!(
        "lr={lr} b={batch} init={init_seed} test {:.4}",
        mean_loss(&model, &test).unwrap()
    );
}
