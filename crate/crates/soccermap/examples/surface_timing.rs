//! Measure single-core inference and training-step latency of the
//! full-size network.
//!
//! ```sh
//! cargo run --release --example surface_timing
//! ```

use std::time::Instant;

use soccermap::autograd::Tape;
use soccermap::channels::{build_channels, ChannelConfig};
use soccermap::network::{Model, NetworkSpec};
use soccermap::synthgen::{generate_dataset, long_ball_style, short_pass_style, OracleParams};

fn time_model(label: &str, spec: NetworkSpec, reps: usize) {
    let model: Model<f32> = Model::assemble(spec, 7).expect("valid architecture");
    let frames = generate_dataset(
        &short_pass_style(),
        &long_ball_style(),
        1,
        7,
        &OracleParams::default(),
    );
    let state = build_channels(&frames[0], &ChannelConfig::default()).expect("in-bounds frame");

    // warm-up pass to fault in buffers
    model.forward(&state).expect("forward");

    let start = Instant::now();
    for _ in 0..reps {
        model.forward(&state).expect("forward");
    }
    let per_forward = start.elapsed().as_secs_f64() / reps as f64;

    let start = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let mut trial = model.cast::<f32>();
        let out = trial.record(&mut tape, state.tensor.cast()).expect("record");
        let loss = tape.bce_at_cell(out, 52, 34, true).expect("loss");
        tape.backward(loss, &mut trial.params, 1.0).expect("backward");
    }
    let per_step = start.elapsed().as_secs_f64() / reps as f64;

    println!(
        "{label}: {} parameters, forward {:.1} ms, forward+backward {:.1} ms",
        model.param_count(),
        per_forward * 1e3,
        per_step * 1e3
    );
}

fn main() {
    time_model("full size (F=32)", NetworkSpec::default(), 10);
    time_model(
        "benchmark size (F=16)",
        NetworkSpec { filters: 16, ..NetworkSpec::default() },
        10,
    );
}
