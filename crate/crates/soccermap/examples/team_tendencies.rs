//! Contrast where two playing styles like to pass. Two selection-head
//! models are trained — a "league" model on possession-style matches and
//! a "team" model on direct, long-ball matches — then averaged over the
//! same probe states. The difference map shows where the team puts more
//! selection mass than the league norm.
//!
//! Takes a minute or two: two quick fits plus a few hundred forwards.
//!
//! Run with `cargo run --example team_tendencies`.

use soccermap::applications::{player_likelihood_ratios, team_tendency_maps};
use soccermap::channels::{model_input, ChannelConfig, GameState};
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{fit, split_dataset, Dataset, TrainConfig};

fn fit_selection_model(frames: &[soccermap::TrackingSnapshot], seed: u64) -> Model<f32> {
    let data = Dataset::from_snapshots(frames, &ChannelConfig::default()).unwrap();
    let (train, val, _) = split_dataset(&data, seed);
    let spec = NetworkSpec {
        filters: 4,
        conv_blocks: 1,
        head: Head::SoftmaxSelection,
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
    fit(&mut model, &train, &val, &config).unwrap();
    model
}

/// Center of mass along the field length, in meters from the own goal.
fn mass_center_x(map: &soccermap::GridTensor<f64>) -> f64 {
    let (nx, ny, _) = map.shape();
    let mut total = 0.0;
    let mut weighted = 0.0;
    for ix in 0..nx {
        for iy in 0..ny {
            let w = map.get(ix, iy, 0);
            total += w;
            weighted += w * (ix as f64 + 0.5);
        }
    }
    weighted / total
}

fn main() {
    let seed = 29;
    let params = OracleParams::default();
    let short = short_pass_style();
    let long = long_ball_style();

    println!("fitting the league model (possession style)...");
    let league_frames = generate_dataset(&short, &short, 400, seed, &params);
    let league = fit_selection_model(&league_frames, seed);

    println!("fitting the team model (direct style)...");
    let team_frames = generate_dataset(&long, &long, 400, seed + 1, &params);
    let team = fit_selection_model(&team_frames, seed + 1);

    // Probe on neutral states drawn from a third set of matches, so both
    // models are asked about situations neither trained on.
    let probe_frames = generate_dataset(&short, &long, 400, seed + 2, &params);
    let config = ChannelConfig::default();
    let probes: Vec<GameState> = probe_frames
        .iter()
        .filter(|s| s.pass.is_some())
        .take(60)
        .map(|s| model_input(&s.clone().normalize_attack_direction(), &config).unwrap())
        .collect();
    println!("averaging selection surfaces over {} probe states...", probes.len());
    let maps = team_tendency_maps(&league, &team, &probes).unwrap();

    let league_x = mass_center_x(&maps.league_mean);
    let team_x = mass_center_x(&maps.team_mean);
    println!("\nselection mass center along the field (attacking to the right):");
    println!("  league model: {league_x:.1} m");
    println!("  team model:   {team_x:.1} m ({:+.1} m vs league)", team_x - league_x);

    let (nx, ny, _) = maps.difference.shape();
    let mut hot = (0usize, 0usize, f64::NEG_INFINITY);
    let mut cold = (0usize, 0usize, f64::INFINITY);
    for ix in 0..nx {
        for iy in 0..ny {
            let d = maps.difference.get(ix, iy, 0);
            if d > hot.2 {
                hot = (ix, iy, d);
            }
            if d < cold.2 {
                cold = (ix, iy, d);
            }
        }
    }
    println!("  team over-indexes most at cell ({}, {}): {:+.2e}", hot.0, hot.1, hot.2);
    println!("  team under-indexes most at cell ({}, {}): {:+.2e}", cold.0, cold.1, cold.2);

    // Per-player view of one frame: which attackers stand where the team
    // passes more than the league does?
    let snap = probe_frames
        .iter()
        .find(|s| s.pass.is_some())
        .unwrap()
        .clone()
        .normalize_attack_direction();
    let ratios = player_likelihood_ratios(&maps, &snap);
    let favored = ratios.iter().filter(|(_, r)| *r > 0.0).count();
    println!(
        "\nin one probe frame, {} of {} attackers stand in cells the team favors over the league",
        favored,
        ratios.len()
    );
}
