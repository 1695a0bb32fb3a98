use std::time::Instant;

use soccermap::baselines::{features_and_labels, BaselineKind, BaselineNet, Standardizer};
use soccermap::channels::ChannelConfig;
use soccermap::metrics::{ece, logloss};
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{
    bayes_logloss, generate_dataset, long_ball_style, short_pass_style, OracleParams,
};
use soccermap::training::{destination_predictions, fit, split_dataset, Dataset, TrainConfig};

fn main() {
    let t0 = Instant::now();
    let seed = 0;
    let params = OracleParams::default();
    let frames = generate_dataset(&short_pass_style(), &long_ball_style(), 8000, seed, &params);
    let data = Dataset::from_snapshots(&frames, &ChannelConfig::default()).unwrap();
    let (train, val, test) = split_dataset(&data, seed);
    println!("[{:?}] data ready: {}/{}/{}", t0.elapsed(), train.len(), val.len(), test.len());
    println!("bayes floor (all): {:.4}", bayes_logloss(&frames, &params));

    let spec = NetworkSpec {
        filters: 16,
        head: Head::SigmoidProbability,
        ..NetworkSpec::default()
    };
    let config = TrainConfig {
        learning_rate: 1e-3,
        batch_size: 16,
        max_epochs: 8,
        min_delta: 1e-4,
        patience: 3,
        seed,
    };
    let mut model: Model<f32> = Model::assemble(spec, seed).unwrap();
    let fit_start = Instant::now();
    let history = fit(&mut model, &train, &val, &config).unwrap();
    for e in &history.epochs {
        println!("epoch {}: train {:.4} val {:.4}", e.epoch, e.train_loss, e.val_loss);
    }
    println!("[fit took {:?}]", fit_start.elapsed());

    let (preds, labels) = destination_predictions(&model, &test).unwrap();
    println!("test logloss {:.4}, ece(10) {:.4}", logloss(&preds, &labels), ece(&preds, &labels, 10));

    // Baselines on the same split indices are fiddly; approximate with
    // first-80% train / last-20% eval on the same frames for scale info.
    let (rows, ys) = features_and_labels(&frames);
    let split_at = rows.len() * 8 / 10;
    let flat: Vec<[f64; 12]> = rows.iter().map(|r| r.flatten()).collect();
    let standardizer = Standardizer::fit(&flat[..split_at]).unwrap();
    let tail: Vec<bool> = ys[split_at..].to_vec();
    let naive = ys[..split_at].iter().filter(|&&y| y).count() as f64 / split_at as f64;
    println!("naive logloss {:.4}", logloss(&vec![naive; tail.len()], &tail));
    for (name, kind) in [("logistic", BaselineKind::Logistic), ("dense2", BaselineKind::Dense2)] {
        let mut net = BaselineNet::new(kind, standardizer.clone(), seed);
        let cfg = TrainConfig { max_epochs: 60, ..config };
        net.fit(&rows[..split_at], &ys[..split_at], &cfg).unwrap();
        let preds: Vec<f64> = rows[split_at..].iter().map(|r| net.predict(r)).collect();
        println!("{name} logloss {:.4}", logloss(&preds, &tail));
    }
    println!("[total {:?}]", t0.elapsed());
}
