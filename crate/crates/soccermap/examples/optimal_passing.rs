//! Use a trained probability surface to answer two tactical questions
//! about a single frozen frame:
//!
//! * optimal pass — for every teammate, compare the pass to where they
//!   are heading against the best cell in a 5x5 meter box around them,
//!   and list spaced-out high-value alternatives elsewhere on the field.
//! * optimal position — re-run the model with one off-ball attacker
//!   shifted to each cell of a 5x5 box around their location, and report
//!   which relocation most improves the pass to them.
//!
//! Takes about half a minute, most of it spent on the quick warm-up fit.
//!
//! Run with `cargo run --example optimal_passing`.

use soccermap::applications::{optimal_pass, optimal_position};
use soccermap::channels::ChannelConfig;
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{fit, split_dataset, Dataset, TrainConfig};

fn main() {
    let seed = 17;
    let frames = generate_dataset(
        &short_pass_style(),
        &long_ball_style(),
        400,
        seed,
        &OracleParams::default(),
    );
    let data = Dataset::from_snapshots(&frames, &ChannelConfig::default()).unwrap();
    let (train, val, _) = split_dataset(&data, seed);

    let spec = NetworkSpec {
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
    let mut model: Model<f32> = Model::assemble(spec, seed).unwrap();
    println!("warming up a {}-filter model...", spec.filters);
    fit(&mut model, &train, &val, &config).unwrap();

    let snap = frames.iter().find(|s| s.pass.is_some()).unwrap();
    println!(
        "\nframe: match {} t={:.1}s, ball at ({:.1}, {:.1}), carrier is attacker {}",
        snap.match_id,
        snap.t,
        snap.ball.0,
        snap.ball.1,
        snap.carrier()
    );

    let result = optimal_pass(&model, snap).unwrap();
    println!("\npass options (probability now -> best within 5 m):");
    for t in &result.teammates {
        println!(
            "  attacker {:>2} heading to ({:5.1}, {:5.1}): {:.3} -> {:.3} at ({:5.1}, {:5.1}), gain {:+.3}",
            t.teammate,
            t.expected_location.0,
            t.expected_location.1,
            t.current_probability,
            t.best_probability,
            t.best_location.0,
            t.best_location.1,
            t.gain
        );
    }
    println!("spaced alternatives elsewhere:");
    for c in result.suboptimal.iter().take(3) {
        println!(
            "  toward attacker {:>2} at ({:5.1}, {:5.1}): {:.3} (gain {:+.3})",
            c.teammate, c.location.0, c.location.1, c.probability, c.gain
        );
    }

    // Reposition the teammate whose current pass is weakest (the carrier
    // cannot be repositioned): where should they stand instead?
    let worst = result
        .teammates
        .iter()
        .filter(|t| t.teammate != snap.carrier())
        .min_by(|a, b| a.current_probability.partial_cmp(&b.current_probability).unwrap())
        .unwrap();
    let repositioned = optimal_position(&model, snap, worst.teammate).unwrap();
    println!(
        "\nrepositioning attacker {} (pass probability {:.3} where they stand):",
        repositioned.player, repositioned.baseline_probability
    );
    println!(
        "  best of {} candidate spots: ({:.1}, {:.1}), gain {:+.3}",
        repositioned.gains.len(),
        repositioned.best_location.0,
        repositioned.best_location.1,
        repositioned.best_gain
    );
}
