//! Generate a synthetic match with outcome-labeled passes and poke at the
//! physics oracle behind the labels: its success probabilities, how they
//! fall with pass distance and rise with receiver separation, and the
//! log-loss floor no predictor trained on this data can beat.
//!
//! Run with `cargo run --example synthetic_match`.

use soccermap::channels::PlayerState;
use soccermap::synthgen::{
    bayes_logloss, generate_dataset, long_ball_style, oracle_success_probability,
    short_pass_style, OracleParams,
};

fn main() {
    let params = OracleParams::default();
    let frames = generate_dataset(&short_pass_style(), &long_ball_style(), 500, 42, &params);

    let passes: Vec<_> = frames.iter().filter_map(|s| s.pass.as_ref()).collect();
    let completed = passes.iter().filter(|p| p.completed).count();
    let mean_length: f64 = passes
        .iter()
        .map(|p| {
            let (dx, dy) = (p.destination.0 - p.origin.0, p.destination.1 - p.origin.1);
            (dx * dx + dy * dy).sqrt()
        })
        .sum::<f64>()
        / passes.len() as f64;
    println!("generated {} snapshots, one labeled pass each", frames.len());
    println!(
        "  completed {}/{} ({:.1}%), mean pass length {:.1} m",
        completed,
        passes.len(),
        100.0 * completed as f64 / passes.len() as f64,
        mean_length
    );
    println!("  oracle log-loss floor: {:.4}", bayes_logloss(&frames, &params));

    // A controlled scene: the defender guards the midpoint of the lane,
    // 4 m off it. Longer passes leave them ever farther from the receiver,
    // so the completion chance climbs.
    println!("\npass along the halfway line, defender 4 m off the midpoint:");
    println!("  length   success probability");
    for length in [5.0, 10.0, 20.0, 30.0, 40.0] {
        let snap = soccermap::TrackingSnapshot {
            match_id: "probe".into(),
            t: 0.0,
            attack_left_to_right: true,
            attackers: vec![
                PlayerState::new(30.0, 34.0, 0.0, 0.0),
                PlayerState::new(30.0 + length, 34.0, 0.0, 0.0),
            ],
            defenders: vec![PlayerState::new(30.0 + length / 2.0, 30.0, 0.0, 0.0)],
            ball: (30.0, 34.0),
            pass: None,
        };
        let p = oracle_success_probability(&snap, (30.0 + length, 34.0), &params);
        println!("  {length:>4.0} m   {p:.4}");
    }

    // A marker closing down the receiver on a 20 m pass. Far away they
    // cannot beat the ball to the lane (reaction time plus footspeed) and
    // the pass is safe; once they can, interception risk takes over.
    println!("\n20 m pass, marker closing on the receiver along the lane:");
    println!("  marker distance   success probability");
    for offset in [12.0, 8.0, 6.0, 3.0, 0.5] {
        let snap = soccermap::TrackingSnapshot {
            match_id: "probe".into(),
            t: 0.0,
            attack_left_to_right: true,
            attackers: vec![
                PlayerState::new(30.0, 34.0, 0.0, 0.0),
                PlayerState::new(50.0, 34.0, 0.0, 0.0),
            ],
            defenders: vec![PlayerState::new(50.0 - offset, 34.0, 0.0, 0.0)],
            ball: (30.0, 34.0),
            pass: None,
        };
        let p = oracle_success_probability(&snap, (50.0, 34.0), &params);
        println!("  {offset:>10.1} m   {p:.4}");
    }
}
