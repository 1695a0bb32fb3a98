//! Rank passers by pass completion added (PPA): credit for completing
//! passes, weighted by how much risk they accepted relative to the
//! safest option the surface model could find at that moment.
//!
//! Every pass in a synthetic match is scored with `score_pass` (best
//! available probability vs probability at the actual destination), the
//! scores are grouped by passer, and the table is normalized per 90
//! minutes. Takes about a minute.
//!
//! Run with `cargo run --example player_ranking`.

use std::collections::BTreeMap;

use soccermap::applications::{ppa_table_csv, rank_by_ppa, score_pass, PpaRecord, ScoredPass};
use soccermap::channels::ChannelConfig;
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_match, long_ball_style, short_pass_style};
use soccermap::training::{fit, split_dataset, Dataset, TrainConfig};

fn main() {
    let seed = 23;
    let style_a = short_pass_style();
    let style_b = long_ball_style();

    // Fit a small surface model on one match, rank passers on another.
    let train_frames = generate_match(&style_a, &style_b, 400, seed);
    let data = Dataset::from_snapshots(&train_frames, &ChannelConfig::default()).unwrap();
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
    println!("fitting the scoring model...");
    fit(&mut model, &train, &val, &config).unwrap();

    let match_frames = generate_match(&style_a, &style_b, 300, seed + 1);
    let mut by_player: BTreeMap<String, Vec<ScoredPass>> = BTreeMap::new();
    let mut minutes_seen: BTreeMap<String, f64> = BTreeMap::new();
    for snap in match_frames.iter().filter(|s| s.pass.is_some()) {
        let pass = snap.pass.as_ref().unwrap();
        let id = format!("team{}_no{:02}", pass.team_id, pass.passer);
        let scored = score_pass(&model, snap).unwrap();
        by_player.entry(id.clone()).or_default().push(scored);
        // Use the latest match clock as a stand-in for minutes played.
        let m = minutes_seen.entry(id).or_insert(0.0);
        *m = m.max(pass.minute);
    }

    let mut records = Vec::new();
    for (id, passes) in &by_player {
        let minutes = minutes_seen[id].max(1.0);
        records.push(PpaRecord::new(id.clone(), passes, minutes).unwrap());
    }
    let ranked = rank_by_ppa(records);

    println!(
        "\n{} passes by {} players, top and bottom of the table:",
        match_frames.iter().filter(|s| s.pass.is_some()).count(),
        ranked.len()
    );
    println!("  {:<12} {:>6} {:>8} {:>8}", "player", "passes", "ppa", "per 90");
    let show: Vec<&PpaRecord> =
        ranked.iter().take(3).chain(ranked.iter().rev().take(2).rev()).collect();
    for r in show {
        println!(
            "  {:<12} {:>6} {:>8.3} {:>8.3}",
            r.player_id,
            by_player[&r.player_id].len(),
            r.ppa_raw,
            r.ppa_per_90
        );
    }

    let csv = ppa_table_csv(&ranked);
    println!("\nfull table has {} CSV rows (header + players)", csv.lines().count());
}
