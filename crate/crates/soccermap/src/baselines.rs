//! Benchmark models over handcrafted pass features: a constant
//! base-rate predictor, a logistic unit, and a small two-hidden-layer
//! net, all sharing one feature pipeline and the same Adam protocol as
//! the main model.

use rand::seq::SliceRandom as _;

use crate::autograd::{init_conv, Adam, AutogradError, GridTensor, Params, Tape};
use crate::channels::{PassEvent, PlayerState, TrackingSnapshot};
use crate::training::TrainConfig;
use crate::util::seeded_rng;

/// Flattened feature-vector length: two location pairs plus eight scalars.
pub const FEATURE_LEN: usize = 12;

/// Column order of [`HandcraftedFeatures::flatten`] and the CSV export.
pub const FEATURE_NAMES: [&str; FEATURE_LEN] = [
    "origin_x",
    "origin_y",
    "dest_x",
    "dest_y",
    "pass_distance",
    "attack_influence_origin",
    "attack_influence_dest",
    "defend_influence_origin",
    "defend_influence_dest",
    "angle_to_goal_origin",
    "angle_to_goal_dest",
    "max_opponent_influence_on_line",
];

/// The classic pass-difficulty summary: where the ball goes, how far,
/// who controls each end, and what stands in the way.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HandcraftedFeatures {
    pub origin: (f64, f64),
    pub destination: (f64, f64),
    pub pass_distance: f64,
    pub attack_influence_origin: f64,
    pub attack_influence_dest: f64,
    pub defend_influence_origin: f64,
    pub defend_influence_dest: f64,
    pub angle_to_goal_origin: f64,
    pub angle_to_goal_dest: f64,
    pub max_opponent_influence_on_line: f64,
}

impl HandcraftedFeatures {
    pub fn flatten(&self) -> [f64; FEATURE_LEN] {
        [
            self.origin.0,
            self.origin.1,
            self.destination.0,
            self.destination.1,
            self.pass_distance,
            self.attack_influence_origin,
            self.attack_influence_dest,
            self.defend_influence_origin,
            self.defend_influence_dest,
            self.angle_to_goal_origin,
            self.angle_to_goal_dest,
            self.max_opponent_influence_on_line,
        ]
    }
}

/// CSV audit dump of a feature matrix, one row per pass.
pub fn features_to_csv(rows: &[HandcraftedFeatures]) -> String {
    let mut s = FEATURE_NAMES.join(",");
    s.push('\n');
    for r in rows {
        let flat = r.flatten();
        let cells: Vec<String> = flat.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

const INFLUENCE_SIGMA: f64 = 5.0;
const VELOCITY_LEAD: f64 = 0.5;

/// A team's control of a point: mean over its players of an isotropic
/// Gaussian (σ = 5 m) centered half a second ahead of each player,
/// clamped to [0, 1]. Empty teams control nothing.
pub fn influence(players: &[PlayerState], point: (f64, f64)) -> f64 {
    if players.is_empty() {
        return 0.0;
    }
    let sum: f64 = players
        .iter()
        .map(|p| {
            let cx = p.x + VELOCITY_LEAD * p.vx;
            let cy = p.y + VELOCITY_LEAD * p.vy;
            let d2 = (point.0 - cx).powi(2) + (point.1 - cy).powi(2);
            (-d2 / (2.0 * INFLUENCE_SIGMA * INFLUENCE_SIGMA)).exp()
        })
        .sum();
    (sum / players.len() as f64).clamp(0.0, 1.0)
}

fn angle_to_goal(point: (f64, f64), goal: (f64, f64)) -> f64 {
    (goal.1 - point.1).atan2(goal.0 - point.0)
}

/// Highest defending-team influence along the ball's straight path,
/// sampled at steps of at most one meter (endpoints included).
fn max_influence_on_line(
    defenders: &[PlayerState],
    origin: (f64, f64),
    destination: (f64, f64),
) -> f64 {
    let length = ((destination.0 - origin.0).powi(2) + (destination.1 - origin.1).powi(2)).sqrt();
    let steps = length.ceil().max(1.0) as usize;
    (0..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            let p = (
                origin.0 + t * (destination.0 - origin.0),
                origin.1 + t * (destination.1 - origin.1),
            );
            influence(defenders, p)
        })
        .fold(0.0, f64::max)
}

/// Compute the full feature vector for one pass. Angles are measured
/// toward the goal the attacking team plays at.
pub fn extract_features(snap: &TrackingSnapshot, pass: &PassEvent) -> HandcraftedFeatures {
    let goal = snap.goal();
    let origin = pass.origin;
    let destination = pass.destination;
    HandcraftedFeatures {
        origin,
        destination,
        pass_distance: ((destination.0 - origin.0).powi(2) + (destination.1 - origin.1).powi(2))
            .sqrt(),
        attack_influence_origin: influence(&snap.attackers, origin),
        attack_influence_dest: influence(&snap.attackers, destination),
        defend_influence_origin: influence(&snap.defenders, origin),
        defend_influence_dest: influence(&snap.defenders, destination),
        angle_to_goal_origin: angle_to_goal(origin, goal),
        angle_to_goal_dest: angle_to_goal(destination, goal),
        max_opponent_influence_on_line: max_influence_on_line(&snap.defenders, origin, destination),
    }
}

/// Baseline failures.
#[derive(Debug)]
pub enum BaselineError {
    EmptyDataset,
    LengthMismatch { expected: usize, got: usize },
    /// Input magnitudes are far outside the range standardized features
    /// can reach, so the caller skipped standardization.
    NotStandardized(f64),
    Autograd(AutogradError),
}

impl std::fmt::Display for BaselineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaselineError::EmptyDataset => write!(f, "no feature rows"),
            BaselineError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} features, got {got}")
            }
            BaselineError::NotStandardized(v) => {
                write!(f, "input value {v} is not plausibly standardized")
            }
            BaselineError::Autograd(e) => write!(f, "autograd error: {e}"),
        }
    }
}

impl std::error::Error for BaselineError {}

impl From<AutogradError> for BaselineError {
    fn from(e: AutogradError) -> Self {
        BaselineError::Autograd(e)
    }
}

/// Columnwise mean/std scaler, fit on the training split only.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub mean: [f64; FEATURE_LEN],
    pub std: [f64; FEATURE_LEN],
}

impl Standardizer {
    pub fn fit(rows: &[[f64; FEATURE_LEN]]) -> Result<Standardizer, BaselineError> {
        if rows.is_empty() {
            return Err(BaselineError::EmptyDataset);
        }
        let n = rows.len() as f64;
        let mut mean = [0.0; FEATURE_LEN];
        for row in rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut std = [0.0; FEATURE_LEN];
        for row in rows {
            for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
                *s += (v - m).powi(2);
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt();
            // constant columns map to zero rather than dividing by zero
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        Ok(Standardizer { mean, std })
    }

    pub fn transform(&self, row: &[f64; FEATURE_LEN]) -> [f64; FEATURE_LEN] {
        let mut z = [0.0; FEATURE_LEN];
        for i in 0..FEATURE_LEN {
            z[i] = (row[i] - self.mean[i]) / self.std[i];
        }
        z
    }
}

/// Predicts the training-split completion rate for every pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaiveBaseline {
    pub rate: f64,
}

impl NaiveBaseline {
    pub fn fit(labels: &[bool]) -> Result<NaiveBaseline, BaselineError> {
        if labels.is_empty() {
            return Err(BaselineError::EmptyDataset);
        }
        let positives = labels.iter().filter(|&&l| l).count();
        Ok(NaiveBaseline { rate: positives as f64 / labels.len() as f64 })
    }

    pub fn predict(&self) -> f64 {
        self.rate
    }
}

/// Architecture of a feature-vector net.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    /// One sigmoid unit over the features.
    Logistic,
    /// Hidden ReLU layers of widths 16 and 8, then a sigmoid unit.
    Dense2,
}

impl BaselineKind {
    fn widths(self) -> Vec<usize> {
        match self {
            BaselineKind::Logistic => vec![FEATURE_LEN, 1],
            BaselineKind::Dense2 => vec![FEATURE_LEN, 16, 8, 1],
        }
    }
}

/// A dense net over standardized features, built from 1x1 convolutions
/// on a 1x1 grid so it shares the training machinery of the main model.
#[derive(Clone, Debug)]
pub struct BaselineNet {
    pub kind: BaselineKind,
    pub params: Params<f64>,
    pub standardizer: Standardizer,
}

impl BaselineNet {
    /// Freshly initialized net; `standardizer` must come from the
    /// training split.
    pub fn new(kind: BaselineKind, standardizer: Standardizer, seed: u64) -> BaselineNet {
        let widths = kind.widths();
        let mut rng = seeded_rng(seed, 4);
        let mut params = Params::new();
        for (i, pair) in widths.windows(2).enumerate() {
            let (w, b) = init_conv(&mut rng, &format!("l{i}"), 1, pair[0], pair[1]);
            params.add(w);
            params.add(b);
        }
        BaselineNet { kind, params, standardizer }
    }

    pub fn param_count(&self) -> usize {
        self.params.total_numel()
    }

    fn record(&self, tape: &mut Tape<f64>, z: &[f64; FEATURE_LEN]) -> Result<usize, AutogradError> {
        let mut node = tape.input(GridTensor::from_vec(1, 1, FEATURE_LEN, z.to_vec()));
        let n_layers = self.kind.widths().len() - 1;
        for i in 0..n_layers {
            let w = self.params.id_by_name(&format!("l{i}.w")).unwrap();
            let b = self.params.id_by_name(&format!("l{i}.b")).unwrap();
            node = tape.conv2d(node, w, b, &self.params)?;
            if i + 1 < n_layers {
                node = tape.relu(node)?;
            }
        }
        tape.sigmoid(node)
    }

    /// Probability for a raw feature row (standardized internally).
    pub fn predict(&self, features: &HandcraftedFeatures) -> f64 {
        let z = self.standardizer.transform(&features.flatten());
        self.predict_standardized(&z).expect("standardized features are always accepted")
    }

    /// Probability for an already-standardized row. Rejects rows of the
    /// wrong length and values no standardized column could produce.
    pub fn predict_standardized(&self, z: &[f64]) -> Result<f64, BaselineError> {
        let z: &[f64; FEATURE_LEN] = z
            .try_into()
            .map_err(|_| BaselineError::LengthMismatch { expected: FEATURE_LEN, got: z.len() })?;
        for &v in z {
            if !v.is_finite() || v.abs() > 100.0 {
                return Err(BaselineError::NotStandardized(v));
            }
        }
        let mut tape = Tape::new();
        let out = self.record(&mut tape, z)?;
        Ok(tape.scalar(out))
    }

    /// Minimize log-loss with minibatch Adam for `config.max_epochs`
    /// epochs (no early stopping at this scale). Rows are standardized
    /// internally with the net's own scaler.
    pub fn fit(
        &mut self,
        rows: &[HandcraftedFeatures],
        labels: &[bool],
        config: &TrainConfig,
    ) -> Result<f64, BaselineError> {
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(BaselineError::EmptyDataset);
        }
        let z_rows: Vec<[f64; FEATURE_LEN]> =
            rows.iter().map(|r| self.standardizer.transform(&r.flatten())).collect();
        let mut opt = Adam::new(config.learning_rate);
        let mut indices: Vec<usize> = (0..rows.len()).collect();
        let mut last_epoch_loss = f64::INFINITY;
        for epoch in 1..=config.max_epochs {
            let mut rng = seeded_rng(config.seed, 2000 + epoch as u64);
            indices.shuffle(&mut rng);
            let mut loss_sum = 0.0;
            for batch in indices.chunks(config.batch_size.max(1)) {
                let seed_grad = 1.0 / batch.len() as f64;
                for &i in batch {
                    let mut tape = Tape::new();
                    let out = self.record(&mut tape, &z_rows[i])?;
                    let loss = tape.bce_at_cell(out, 0, 0, labels[i])?;
                    loss_sum += tape.scalar(loss);
                    tape.backward(loss, &mut self.params, seed_grad)?;
                }
                opt.step(&mut self.params)?;
            }
            last_epoch_loss = loss_sum / rows.len() as f64;
        }
        Ok(last_epoch_loss)
    }
}

/// Convenience: features and labels for every pass-carrying frame.
pub fn features_and_labels(snaps: &[TrackingSnapshot]) -> (Vec<HandcraftedFeatures>, Vec<bool>) {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for snap in snaps {
        if let Some(pass) = &snap.pass {
            rows.push(extract_features(snap, pass));
            labels.push(pass.completed);
        }
    }
    (rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autograd::gradcheck::{central_diff, max_rel_err};
    use crate::metrics::{ece, logloss};
    use crate::util::{FIELD_LENGTH, FIELD_WIDTH};

    fn still(x: f64, y: f64) -> PlayerState {
        PlayerState::new(x, y, 0.0, 0.0)
    }

    fn snapshot(attackers: Vec<PlayerState>, defenders: Vec<PlayerState>) -> TrackingSnapshot {
        TrackingSnapshot {
            match_id: "t".into(),
            t: 0.0,
            attack_left_to_right: true,
            attackers,
            defenders,
            ball: (30.0, 30.0),
            pass: None,
        }
    }

    #[test]
    fn influence_peaks_on_a_lone_player_within_a_full_team() {
        let mut team = vec![still(50.0, 30.0)];
        for i in 0..10 {
            team.push(still(3.0 + i as f64 * 0.1, 1.0)); // 50+ m away
        }
        let v = influence(&team, (50.0, 30.0));
        approx::assert_abs_diff_eq!(v, 1.0 / 11.0, epsilon = 1e-9);

        // exact value straight from the formula
        let direct: f64 = team
            .iter()
            .map(|p| {
                let d2 = (50.0 - p.x) * (50.0 - p.x) + (30.0 - p.y) * (30.0 - p.y);
                (-d2 / 50.0).exp()
            })
            .sum::<f64>()
            / 11.0;
        assert_eq!(v, direct.clamp(0.0, 1.0));
    }

    #[test]
    fn influence_of_an_empty_team_is_zero() {
        assert_eq!(influence(&[], (52.0, 34.0)), 0.0);
    }

    #[test]
    fn influence_is_translation_invariant() {
        let team = vec![still(20.0, 20.0), still(40.0, 25.0), PlayerState::new(33.0, 30.0, 2.0, -1.0)];
        let shifted: Vec<PlayerState> = team
            .iter()
            .map(|p| PlayerState::new(p.x + 7.3, p.y - 3.1, p.vx, p.vy))
            .collect();
        let a = influence(&team, (30.0, 28.0));
        let b = influence(&shifted, (37.3, 24.9));
        approx::assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn influence_leads_a_moving_player_by_half_a_second() {
        let runner = vec![PlayerState::new(10.0, 10.0, 4.0, 0.0)];
        // the lead point (12, 10) is where control is total
        assert_eq!(influence(&runner, (12.0, 10.0)), 1.0);
        assert!(influence(&runner, (12.0, 10.0)) > influence(&runner, (10.0, 10.0)));
    }

    #[test]
    fn feature_extraction_hand_values() {
        let snap = snapshot(vec![still(0.0, 0.0), still(3.0, 4.0)], vec![still(80.0, 60.0)]);
        let pass = PassEvent {
            origin: (0.0, 0.0),
            destination: (3.0, 4.0),
            completed: true,
            passer: 0,
            team_id: 0,
            minute: 0.0,
        };
        let f = extract_features(&snap, &pass);
        assert_eq!(f.pass_distance, 5.0);
        assert_eq!(f.origin, (0.0, 0.0));
        assert_eq!(f.destination, (3.0, 4.0));

        // on the goal spot the angle convention collapses to zero
        let at_goal = PassEvent { destination: (104.0, 34.0), ..pass };
        let g = extract_features(&snap, &at_goal);
        assert_eq!(g.angle_to_goal_dest, 0.0);

        // 45 degrees below-left of the goal
        let diagonal = PassEvent { destination: (100.0, 30.0), ..pass };
        let d = extract_features(&snap, &diagonal);
        approx::assert_abs_diff_eq!(d.angle_to_goal_dest, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn line_influence_agrees_with_a_dense_resampling() {
        let snap = snapshot(
            vec![still(20.0, 30.0)],
            vec![still(35.2, 31.7), still(50.0, 28.9), PlayerState::new(42.0, 33.0, -3.0, 1.0)],
        );
        let origin = (20.0, 30.0);
        let destination = (61.0, 27.0);
        let coarse = max_influence_on_line(&snap.defenders, origin, destination);

        let length = ((destination.0 - origin.0).powi(2) + (destination.1 - origin.1).powi(2)).sqrt();
        // a multiple of the coarse grid, at ~0.06 m spacing, so every
        // coarse sample point is also a fine one
        let fine_steps = length.ceil().max(1.0) as usize * 16;
        let fine = (0..=fine_steps)
            .map(|k| {
                let t = k as f64 / fine_steps as f64;
                influence(
                    &snap.defenders,
                    (origin.0 + t * (destination.0 - origin.0), origin.1 + t * (destination.1 - origin.1)),
                )
            })
            .fold(0.0, f64::max);
        assert!(coarse <= fine + 1e-12);
        assert!((fine - coarse).abs() < 0.05, "coarse {coarse} vs fine {fine}");
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_std() {
        let mut rng = seeded_rng(31, 0);
        let rows: Vec<[f64; FEATURE_LEN]> = (0..200)
            .map(|_| {
                let mut r = [0.0; FEATURE_LEN];
                for (j, v) in r.iter_mut().enumerate() {
                    *v = rand::Rng::random_range(&mut rng, -1.0..1.0) * (j + 1) as f64 + j as f64;
                }
                r
            })
            .collect();
        let scaler = Standardizer::fit(&rows).unwrap();
        let z: Vec<[f64; FEATURE_LEN]> = rows.iter().map(|r| scaler.transform(r)).collect();
        for j in 0..FEATURE_LEN {
            let mean: f64 = z.iter().map(|r| r[j]).sum::<f64>() / z.len() as f64;
            let var: f64 = z.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / z.len() as f64;
            assert!(mean.abs() < 1e-9, "column {j} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-6, "column {j} std {}", var.sqrt());
        }

        // constant columns transform to zero instead of dividing by zero
        let constant = vec![[2.5; FEATURE_LEN]; 10];
        let s = Standardizer::fit(&constant).unwrap();
        assert_eq!(s.transform(&[2.5; FEATURE_LEN]), [0.0; FEATURE_LEN]);
    }

    #[test]
    fn naive_baseline_is_the_base_rate_and_its_entropy() {
        let labels: Vec<bool> = (0..1000).map(|i| i < 800).collect();
        let naive = NaiveBaseline::fit(&labels).unwrap();
        assert_eq!(naive.predict(), 0.8);

        // held-out split with the identical rate scores the closed-form
        // entropy of a 80/20 coin
        let preds = vec![naive.predict(); 1000];
        let ll = logloss(&preds, &labels);
        let closed_form = -(0.8 * 0.8f64.ln() + 0.2 * 0.2f64.ln());
        approx::assert_abs_diff_eq!(ll, closed_form, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(ll, 0.50040, epsilon = 1e-5);
        assert!(ece(&preds, &labels, 10) < 1e-12);
    }

    fn unit_standardizer() -> Standardizer {
        Standardizer { mean: [0.0; FEATURE_LEN], std: [1.0; FEATURE_LEN] }
    }

    #[test]
    fn zeroed_logistic_unit_predicts_a_half() {
        let mut net = BaselineNet::new(BaselineKind::Logistic, unit_standardizer(), 1);
        for p in net.params.iter_mut() {
            p.value.iter_mut().for_each(|v| *v = 0.0);
        }
        let p = net.predict_standardized(&[0.25; FEATURE_LEN]).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn parameter_counts_follow_the_widths() {
        let logistic = BaselineNet::new(BaselineKind::Logistic, unit_standardizer(), 1);
        assert_eq!(logistic.param_count(), FEATURE_LEN + 1);
        let dense2 = BaselineNet::new(BaselineKind::Dense2, unit_standardizer(), 1);
        assert_eq!(dense2.param_count(), 12 * 16 + 16 + 16 * 8 + 8 + 8 + 1);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let net = BaselineNet::new(BaselineKind::Logistic, unit_standardizer(), 1);
        assert!(matches!(
            net.predict_standardized(&[0.0; 5]),
            Err(BaselineError::LengthMismatch { expected: FEATURE_LEN, got: 5 })
        ));
        let mut raw = [0.0; FEATURE_LEN];
        raw[0] = 52.0 * 104.0; // an unstandardized coordinate-scale value
        assert!(matches!(
            net.predict_standardized(&raw),
            Err(BaselineError::NotStandardized(_))
        ));
    }

    #[test]
    fn net_gradients_pass_a_finite_difference_check() {
        for kind in [BaselineKind::Logistic, BaselineKind::Dense2] {
            let mut net = BaselineNet::new(kind, unit_standardizer(), 3);
            // move biases off zero so no rectifier sits exactly on its kink
            let mut rng = seeded_rng(33, 0);
            for p in net.params.iter_mut() {
                for v in p.value.iter_mut() {
                    *v += rand::Rng::random_range(&mut rng, -0.05..0.05);
                }
            }
            let z: [f64; FEATURE_LEN] =
                std::array::from_fn(|i| (i as f64 * 0.37).sin() * 0.8 + 0.1);

            let flat: Vec<f64> = net.params.iter().flat_map(|p| p.value.clone()).collect();
            let mut loss_of = |values: &[f64]| {
                let mut trial = net.clone();
                let mut offset = 0;
                for p in trial.params.iter_mut() {
                    let n = p.value.len();
                    p.value.copy_from_slice(&values[offset..offset + n]);
                    offset += n;
                }
                let mut tape = Tape::new();
                let out = trial.record(&mut tape, &z).unwrap();
                let loss = tape.bce_at_cell(out, 0, 0, true).unwrap();
                tape.scalar(loss)
            };
            let numeric = central_diff(&mut loss_of, &flat, 1e-6);

            let mut tape = Tape::new();
            let out = net.record(&mut tape, &z).unwrap();
            let loss = tape.bce_at_cell(out, 0, 0, true).unwrap();
            tape.backward(loss, &mut net.params, 1.0).unwrap();
            let analytic: Vec<f64> =
                net.params.iter().flat_map(|p| p.grad.clone()).collect();

            let err = max_rel_err(&analytic, &numeric);
            assert!(err < 1e-6, "{kind:?} max relative error {err}");
        }
    }

    #[test]
    fn nets_learn_a_separable_rule() {
        // label = (first feature positive); both nets should beat a coin
        let mut rng = seeded_rng(34, 0);
        let rows: Vec<HandcraftedFeatures> = (0..200)
            .map(|_| {
                let v: f64 = rand::Rng::random_range(&mut rng, -2.0..2.0);
                HandcraftedFeatures {
                    origin: (v, rand::Rng::random_range(&mut rng, -1.0..1.0)),
                    destination: (0.0, 0.0),
                    pass_distance: 0.0,
                    attack_influence_origin: 0.0,
                    attack_influence_dest: 0.0,
                    defend_influence_origin: 0.0,
                    defend_influence_dest: 0.0,
                    angle_to_goal_origin: 0.0,
                    angle_to_goal_dest: 0.0,
                    max_opponent_influence_on_line: 0.0,
                }
            })
            .collect();
        let labels: Vec<bool> = rows.iter().map(|r| r.origin.0 > 0.0).collect();
        let flat: Vec<[f64; FEATURE_LEN]> = rows.iter().map(|r| r.flatten()).collect();
        let scaler = Standardizer::fit(&flat).unwrap();
        let config = TrainConfig {
            learning_rate: 0.05,
            batch_size: 32,
            max_epochs: 30,
            seed: 34,
            ..TrainConfig::default()
        };
        for kind in [BaselineKind::Logistic, BaselineKind::Dense2] {
            let mut net = BaselineNet::new(kind, scaler.clone(), 34);
            let final_loss = net.fit(&rows, &labels, &config).unwrap();
            assert!(final_loss < 0.3, "{kind:?} loss {final_loss}");
            let preds: Vec<f64> = rows.iter().map(|r| net.predict(r)).collect();
            let ll = logloss(&preds, &labels);
            assert!(ll < std::f64::consts::LN_2, "{kind:?} log-loss {ll}");
        }
    }

    #[test]
    fn feature_csv_has_header_and_rows() {
        let snap = snapshot(vec![still(10.0, 10.0), still(30.0, 30.0)], vec![still(60.0, 40.0)]);
        let pass = PassEvent {
            origin: (10.0, 10.0),
            destination: (30.0, 30.0),
            completed: true,
            passer: 0,
            team_id: 0,
            minute: 0.0,
        };
        let rows = vec![extract_features(&snap, &pass); 3];
        let csv = features_to_csv(&rows);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], FEATURE_NAMES.join(","));
        assert_eq!(lines[1].split(',').count(), FEATURE_LEN);
    }

    #[test]
    fn features_and_labels_skip_passless_frames() {
        use crate::synthgen::{generate_dataset, generate_match, long_ball_style, short_pass_style, OracleParams};
        let with = generate_dataset(&short_pass_style(), &long_ball_style(), 10, 41, &OracleParams::default());
        let (rows, labels) = features_and_labels(&with);
        assert_eq!(rows.len(), 10);
        assert_eq!(labels.len(), 10);
        for r in &rows {
            assert!(r.pass_distance >= 0.0);
            assert!((0.0..=FIELD_LENGTH).contains(&r.destination.0));
            assert!((0.0..=FIELD_WIDTH).contains(&r.destination.1));
        }
        let without = generate_match(&short_pass_style(), &long_ball_style(), 10, 41);
        assert_eq!(features_and_labels(&without).0.len(), 0);
    }
}
