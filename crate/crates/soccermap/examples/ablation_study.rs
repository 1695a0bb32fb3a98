//! Train the architecture with individual components switched off and
//! compare held-out loss across variants: no learned upsampling (bilinear
//! instead), no fusion layers, no non-linear prediction stack, both of
//! those at once, and a single-scale network. Prints the comparison table
//! as CSV, matching the `smap ablation` subcommand's output.
//!
//! Kept deliberately small (4 filters, 300 passes, 2 epochs per variant)
//! so all six runs finish in about a minute; differences between variants
//! are accordingly noisy at this scale.
//!
//! Run with `cargo run --example ablation_study`.

use soccermap::channels::ChannelConfig;
use soccermap::network::{Head, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{ablation_table_csv, run_ablation, split_dataset, Dataset, TrainConfig};

fn main() {
    let seed = 5;
    let frames = generate_dataset(
        &short_pass_style(),
        &long_ball_style(),
        300,
        seed,
        &OracleParams::default(),
    );
    let data = Dataset::from_snapshots(&frames, &ChannelConfig::default()).unwrap();
    let (train, val, test) = split_dataset(&data, seed);

    let base = NetworkSpec {
        filters: 4,
        conv_blocks: 1,
        head: Head::SigmoidProbability,
        ..NetworkSpec::default()
    };
    let config = TrainConfig {
        learning_rate: 1e-3,
        batch_size: 16,
        max_epochs: 2,
        min_delta: 1e-4,
        patience: 2,
        seed,
    };

    println!("training 6 variants ({} train / {} test passes)...", train.len(), test.len());
    let rows = run_ablation::<f32>(&base, &train, &val, &test, &config).unwrap();
    print!("{}", ablation_table_csv(&rows));

    let full = rows.iter().find(|r| r.name == "full").unwrap();
    let best = rows
        .iter()
        .min_by(|a, b| a.test_loss.partial_cmp(&b.test_loss).unwrap())
        .unwrap();
    println!(
        "\nfull architecture test loss {:.4}; best variant at this scale: {} ({:.4})",
        full.test_loss, best.name, best.test_loss
    );
}
