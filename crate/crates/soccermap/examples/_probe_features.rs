use soccermap::baselines::features_and_labels;
use soccermap::metrics::logloss;
use soccermap::synthgen::{
    bayes_logloss, generate_dataset, long_ball_style, short_pass_style, OracleParams,
};

/// Plain logistic regression on a chosen feature subset, gradient descent
/// with per-feature standardization. Reports held-out logloss.
fn fit_logistic(x: &[Vec<f64>], y: &[bool], xt: &[Vec<f64>], yt: &[bool]) -> f64 {
    let d = x[0].len();
    let n = x.len() as f64;
    let mut mean = vec![0.0; d];
    let mut std = vec![0.0; d];
    for row in x {
        for j in 0..d {
            mean[j] += row[j] / n;
        }
    }
    for row in x {
        for j in 0..d {
            std[j] += (row[j] - mean[j]).powi(2) / n;
        }
    }
    for s in &mut std {
        *s = s.sqrt().max(1e-9);
    }
    let norm = |row: &[f64]| -> Vec<f64> {
        row.iter().enumerate().map(|(j, v)| (v - mean[j]) / std[j]).collect()
    };
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let lr = 0.5;
    for _ in 0..500 {
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let z = norm(row);
            let p = 1.0 / (1.0 + (-(z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b)).exp());
            let e = p - if label { 1.0 } else { 0.0 };
            for j in 0..d {
                gw[j] += e * z[j] / n;
            }
            gb += e / n;
        }
        for j in 0..d {
            w[j] -= lr * gw[j];
        }
        b -= lr * gb;
    }
    let preds: Vec<f64> = xt
        .iter()
        .map(|row| {
            let z = norm(row);
            1.0 / (1.0 + (-(z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b)).exp())
        })
        .collect();
    logloss(&preds, yt)
}

fn main() {
    let params = OracleParams::default();
    let frames = generate_dataset(&short_pass_style(), &long_ball_style(), 2000, 0, &params);
    let (rows, ys) = features_and_labels(&frames);
    let split = rows.len() * 8 / 10;
    println!("bayes floor {:.4}", bayes_logloss(&frames, &params));

    let subsets: [(&str, Box<dyn Fn(&soccermap::baselines::HandcraftedFeatures) -> Vec<f64>>); 7] = [
        ("dest influence only", Box::new(|f| vec![
            f.attack_influence_dest, f.defend_influence_dest,
        ])),
        ("line only", Box::new(|f| vec![f.max_opponent_influence_on_line])),
        ("dest influence + geometry", Box::new(|f| vec![
            f.attack_influence_dest, f.defend_influence_dest,
            f.origin.0, f.origin.1, f.destination.0, f.destination.1,
            f.pass_distance, f.angle_to_goal_origin, f.angle_to_goal_dest,
        ])),
        ("geometry only (origin/dest/dist/angles)", Box::new(|f| vec![
            f.origin.0, f.origin.1, f.destination.0, f.destination.1,
            f.pass_distance, f.angle_to_goal_origin, f.angle_to_goal_dest,
        ])),
        ("influence only", Box::new(|f| vec![
            f.attack_influence_origin, f.attack_influence_dest,
            f.defend_influence_origin, f.defend_influence_dest,
            f.max_opponent_influence_on_line,
        ])),
        ("dest influence + line", Box::new(|f| vec![
            f.attack_influence_dest, f.defend_influence_dest,
            f.max_opponent_influence_on_line,
        ])),
        ("all 12", Box::new(|f| f.flatten().to_vec())),
    ];
    for (name, select) in &subsets {
        let x: Vec<Vec<f64>> = rows[..split].iter().map(|r| select(r)).collect();
        let xt: Vec<Vec<f64>> = rows[split..].iter().map(|r| select(r)).collect();
        let loss = fit_logistic(&x, &ys[..split], &xt, &ys[split..]);
        println!("{name}: {loss:.4}");
    }
}
