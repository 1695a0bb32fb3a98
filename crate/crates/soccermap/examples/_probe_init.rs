use std::time::Instant;

use soccermap::autograd::ParamShape;
use soccermap::channels::ChannelConfig;
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{fit, mean_loss, split_dataset, Dataset, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cap: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(10.0);
    let epochs: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(5);
    let n_frames: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(2000);
    let occ_only: bool = args.get(4).map(|s| s == "occ").unwrap_or(false);
    let blocks: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(2);
    let lr: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(1e-3);
    let batch: usize = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(16);
    let seed = 0;
    let params = OracleParams::default();
    let frames = generate_dataset(&short_pass_style(), &long_ball_style(), n_frames, seed, &params);
    let data = Dataset::from_snapshots(&frames, &ChannelConfig::default()).unwrap();
    let (train, val, test) = split_dataset(&data, seed);

    // Per-channel mean square over a handful of states.
    let mut msq = [0.0f64; 13];
    let mut count = 0usize;
    for sample in train.samples.iter().take(40) {
        let state = sample.input.build().unwrap();
        let (nx, ny, c) = state.tensor.shape();
        for ix in 0..nx {
            for iy in 0..ny {
                for ch in 0..c {
                    msq[ch] += state.tensor.get(ix, iy, ch).powi(2);
                }
            }
        }
        count += nx * ny;
    }
    for m in &mut msq {
        *m /= count as f64;
    }
    println!("per-channel mean square: {msq:.6?}");
    let target = msq.iter().sum::<f64>() / 13.0;
    let mut factors: Vec<f64> = msq.iter().map(|m| (target / m.max(1e-9)).sqrt().min(cap)).collect();
    if occ_only {
        for (c, f) in factors.iter_mut().enumerate() {
            if !(c == 0 || c == 3) && *f > 1.0 {
                *f = 1.0;
            }
        }
    }
    println!("rebalance factors: {factors:.2?}");

    let spec = NetworkSpec {
        filters: 16,
        conv_blocks: blocks,
        head: Head::SigmoidProbability,
        ..NetworkSpec::default()
    };
    let config = TrainConfig {
        learning_rate: lr,
        batch_size: batch,
        max_epochs: epochs,
        min_delta: 1e-4,
        patience: epochs,
        seed,
    };
    let mut model: Model<f32> = Model::assemble(spec, seed).unwrap();
    for p in model.params.iter_mut() {
        if p.name == "scale0.block0.w" {
            if let ParamShape::Conv { cin, cout, .. } = p.shape {
                for (i, w) in p.value.iter_mut().enumerate() {
                    let c = (i / cout) % cin;
                    *w *= factors[c] as f32;
                }
            }
        }
    }

    let t = Instant::now();
    let history = fit(&mut model, &train, &val, &config).unwrap();
    for e in &history.epochs {
        println!("epoch {}: train {:.4} val {:.4} [{:?}]", e.epoch, e.train_loss, e.val_loss, t.elapsed());
    }
    println!("test {:.4}", mean_loss(&model, &test).unwrap());
}
