//! Produce a full-field pass probability surface for one game state and
//! save it in both output formats: the exact text grid and a grayscale
//! PGM image. Also prints a coarse ASCII rendering so the surface can be
//! eyeballed in the terminal.
//!
//! A tiny model is trained for a couple of epochs first, just enough for
//! the surface to develop structure around the ball carrier. Takes around
//! half a minute.
//!
//! Run with `cargo run --example pass_surface`.

use soccermap::applications::forward_oriented;
use soccermap::channels::ChannelConfig;
use soccermap::io::{read_text_file, surface_from_text, write_surface};
use soccermap::network::{Head, Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};
use soccermap::training::{fit, split_dataset, Dataset, TrainConfig};

fn main() {
    let seed = 11;
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
    println!("training a {}-filter model for {} epochs...", spec.filters, config.max_epochs);
    fit(&mut model, &train, &val, &config).unwrap();

    // Any frame works; pick one with plenty of options ahead of the ball.
    let snap = frames.iter().find(|s| s.pass.is_some()).unwrap();
    let surface = forward_oriented(&model, snap, &ChannelConfig::default()).unwrap();
    let (nx, ny, _) = surface.grid.shape();
    let (bx, by) = (snap.ball.0, snap.ball.1);
    println!(
        "surface for match {} at t={:.1}s: {}x{} cells, ball at ({:.1}, {:.1})",
        snap.match_id, snap.t, nx, ny, bx, by
    );

    // Coarse terminal rendering: sample every 2nd column and 4th row so
    // the field fits a terminal, darker glyph = higher probability.
    let glyphs: Vec<char> = " .:-=+*#%@".chars().collect();
    let lo = surface.grid.data().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = surface.grid.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    println!("probability range [{lo:.3}, {hi:.3}], attacking to the right:");
    for row in (0..ny / 4).rev() {
        let iy = row * 4 + 1;
        let line: String = (0..nx / 2)
            .map(|col| {
                let ix = col * 2;
                let v = (surface.at(ix, iy) - lo) / span;
                let level = ((v * (glyphs.len() - 1) as f64).round() as usize).min(glyphs.len() - 1);
                glyphs[level]
            })
            .collect();
        println!("  |{line}|");
    }

    let out_dir = std::env::temp_dir().join("soccermap_pass_surface");
    std::fs::create_dir_all(&out_dir).unwrap();
    let (txt, pgm) = write_surface(&out_dir.join("surface"), &surface).unwrap();
    println!("wrote {} and {}", txt.display(), pgm.display());

    // The text format is exact: parsing it back restores every cell
    // bit-for-bit, and the header min/max doubles as a tamper check.
    let restored = surface_from_text(&read_text_file(&txt).unwrap()).unwrap();
    assert_eq!(restored.grid.data(), surface.grid.data());
    assert_eq!(restored.kind, surface.kind);
    println!("text round-trip restored all {} cells exactly", nx * ny);
}
