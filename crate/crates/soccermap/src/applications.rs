//! Analyses built on top of the probability and selection surfaces:
//! best passing options, off-ball repositioning, pass-completion-added
//! player ranking, and team selection-tendency maps.

use crate::autograd::{GridTensor, Real};
use crate::channels::{cell_on_grid, model_input, ChannelConfig, ChannelError, GameState, TrackingSnapshot};
use crate::network::{Head, Model, NetworkError, Surface, SurfaceKind};
use crate::util::{FIELD_LENGTH, FIELD_WIDTH};

/// Half-width of the candidate square, in cells: a 5x5 neighborhood.
const GRID_REACH: isize = 2;
/// Minimum spacing between listed sub-optimal locations, meters.
const SUBOPTIMAL_SPACING: f64 = 5.0;
/// Constant-velocity lookahead when anticipating a teammate, seconds.
const LOOKAHEAD: f64 = 1.0;

/// Application-layer failures.
#[derive(Debug)]
pub enum AppError {
    /// The operation needs a model with a specific output head.
    HeadMismatch { expected: Head, got: Head },
    EmptyProbeSet,
    /// No such attacker, or the attacker holds the ball and cannot be
    /// relocated independently of it.
    InvalidPlayer(usize),
    MissingPass,
    NoTeammates,
    InvalidMinutes(f64),
    Network(NetworkError),
    Channel(ChannelError),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::HeadMismatch { expected, got } => {
                write!(f, "needs a {expected} head, model has {got}")
            }
            AppError::EmptyProbeSet => write!(f, "no probe states supplied"),
            AppError::InvalidPlayer(i) => write!(f, "attacker {i} cannot be relocated"),
            AppError::MissingPass => write!(f, "snapshot carries no pass event"),
            AppError::NoTeammates => write!(f, "the passer has no teammates to receive"),
            AppError::InvalidMinutes(m) => write!(f, "minutes played must be positive, got {m}"),
            AppError::Network(e) => write!(f, "network error: {e}"),
            AppError::Channel(e) => write!(f, "channel error: {e}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<NetworkError> for AppError {
    fn from(e: NetworkError) -> Self {
        AppError::Network(e)
    }
}

impl From<ChannelError> for AppError {
    fn from(e: ChannelError) -> Self {
        AppError::Channel(e)
    }
}

/// One teammate's passing outlook: where they are heading, how good a
/// pass there is now, and the best nearby alternative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeammateEvaluation {
    /// Index into the snapshot's attacker list.
    pub teammate: usize,
    /// Constant-velocity position one second ahead.
    pub expected_location: (f64, f64),
    pub current_probability: f64,
    /// Best candidate cell center (the current location when nothing
    /// nearby beats it).
    pub best_location: (f64, f64),
    pub best_probability: f64,
    /// `best_probability - current_probability`, never negative.
    pub gain: f64,
}

/// A positive-gain alternative location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub teammate: usize,
    pub location: (f64, f64),
    pub probability: f64,
    pub gain: f64,
}

/// Output of [`optimal_pass`]: every teammate evaluated against one
/// forward surface, plus spaced-out runner-up locations.
#[derive(Clone, Debug)]
pub struct OptimalPassResult {
    /// The probability surface, oriented like the input snapshot.
    pub surface: Surface,
    pub teammates: Vec<TeammateEvaluation>,
    /// Positive-gain cells at least 5 m from every best location and
    /// from each other, in descending gain order.
    pub suboptimal: Vec<Candidate>,
}

fn center_of(ix: usize, iy: usize, nx: usize, ny: usize) -> (f64, f64) {
    (
        (ix as f64 + 0.5) * FIELD_LENGTH / nx as f64,
        (iy as f64 + 0.5) * FIELD_WIDTH / ny as f64,
    )
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// In-grid cells of the 5x5 square centered on the cell containing
/// `point`; cells beyond the field edge are skipped, not clamped.
fn candidate_cells(point: (f64, f64), nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let (cx, cy) = cell_on_grid(point.0, point.1, nx, ny);
    let mut cells = Vec::with_capacity(25);
    for dx in -GRID_REACH..=GRID_REACH {
        for dy in -GRID_REACH..=GRID_REACH {
            let ix = cx as isize + dx;
            let iy = cy as isize + dy;
            if ix >= 0 && iy >= 0 && (ix as usize) < nx && (iy as usize) < ny {
                cells.push((ix as usize, iy as usize));
            }
        }
    }
    cells
}

/// Evaluate every non-passer teammate against an existing probability
/// surface oriented like `snap`. Exposed so precomputed surfaces can be
/// reused; [`optimal_pass`] wraps the forward pass around it.
pub fn evaluate_pass_options(
    surface: &Surface,
    snap: &TrackingSnapshot,
) -> Result<OptimalPassResult, AppError> {
    if surface.kind != SurfaceKind::Probability {
        return Err(AppError::HeadMismatch {
            expected: Head::SigmoidProbability,
            got: match surface.kind {
                SurfaceKind::SelectionLikelihood => Head::SoftmaxSelection,
                _ => Head::LinearValue,
            },
        });
    }
    // Evaluate in the left-to-right frame regardless of the caller's
    // orientation, so cells with identical probability resolve the same
    // way in both frames, then reflect every location back.
    if !snap.attack_left_to_right {
        let flipped = Surface {
            grid: reflect_surface_grid(&surface.grid),
            kind: surface.kind,
            source: surface.source.clone(),
        };
        let mut result =
            evaluate_pass_options(&flipped, &snap.clone().point_reflect())?;
        let back = |loc: (f64, f64)| (FIELD_LENGTH - loc.0, FIELD_WIDTH - loc.1);
        for t in &mut result.teammates {
            t.expected_location = back(t.expected_location);
            t.best_location = back(t.best_location);
        }
        for c in &mut result.suboptimal {
            c.location = back(c.location);
        }
        result.surface = surface.clone();
        return Ok(result);
    }
    let (nx, ny, _) = surface.grid.shape();
    let passer = snap.carrier();

    let mut teammates = Vec::new();
    let mut all_candidates: Vec<Candidate> = Vec::new();
    for (i, p) in snap.attackers.iter().enumerate() {
        if i == passer {
            continue;
        }
        let (cur_ix, cur_iy) = cell_on_grid(p.x, p.y, nx, ny);
        let current_probability = surface.at(cur_ix, cur_iy);
        let expected_location = (p.x + LOOKAHEAD * p.vx, p.y + LOOKAHEAD * p.vy);

        let mut best_location = (p.x, p.y);
        let mut best_probability = current_probability;
        for (ix, iy) in candidate_cells(expected_location, nx, ny) {
            let prob = surface.at(ix, iy);
            let gain = prob - current_probability;
            if gain > 0.0 {
                all_candidates.push(Candidate {
                    teammate: i,
                    location: center_of(ix, iy, nx, ny),
                    probability: prob,
                    gain,
                });
            }
            if prob > best_probability {
                best_probability = prob;
                best_location = center_of(ix, iy, nx, ny);
            }
        }
        teammates.push(TeammateEvaluation {
            teammate: i,
            expected_location,
            current_probability,
            best_location,
            best_probability,
            gain: best_probability - current_probability,
        });
    }

    // spaced runner-ups: never within 5 m of a chosen best location or
    // of a better candidate already listed
    all_candidates.sort_by(|a, b| b.gain.partial_cmp(&a.gain).unwrap());
    let mut taken: Vec<(f64, f64)> =
        teammates.iter().filter(|t| t.gain > 0.0).map(|t| t.best_location).collect();
    let mut suboptimal = Vec::new();
    for c in all_candidates {
        if taken.iter().all(|&t| distance(t, c.location) >= SUBOPTIMAL_SPACING) {
            taken.push(c.location);
            suboptimal.push(c);
        }
    }

    Ok(OptimalPassResult { surface: surface.clone(), teammates, suboptimal })
}

/// Reverse a single-channel grid through the field's point reflection.
fn reflect_surface_grid(grid: &GridTensor<f64>) -> GridTensor<f64> {
    let (nx, ny, ch) = grid.shape();
    let mut out = GridTensor::zeros(nx, ny, ch);
    for ix in 0..nx {
        for iy in 0..ny {
            for c in 0..ch {
                out.set(ix, iy, c, grid.get(nx - 1 - ix, ny - 1 - iy, c));
            }
        }
    }
    out
}

/// Run the model on a snapshot of either attacking direction, returning
/// a surface oriented like the original snapshot. The model always sees
/// the left-to-right normalization it was trained on.
pub fn forward_oriented<R: Real>(
    model: &Model<R>,
    snap: &TrackingSnapshot,
    config: &ChannelConfig,
) -> Result<Surface, AppError> {
    let flipped = !snap.attack_left_to_right;
    let normalized = snap.clone().normalize_attack_direction();
    let state = model_input(&normalized, config)?;
    let mut surface = model.forward(&state)?;
    if flipped {
        surface.grid = reflect_surface_grid(&surface.grid);
    }
    Ok(surface)
}

/// Score a pass to every teammate from one forward pass of a
/// probability-head model: current-location probability, the best cell
/// in a 5x5 grid around each teammate's anticipated position, and
/// spaced sub-optimal alternatives.
pub fn optimal_pass<R: Real>(
    model: &Model<R>,
    snap: &TrackingSnapshot,
) -> Result<OptimalPassResult, AppError> {
    if model.spec.head != Head::SigmoidProbability {
        return Err(AppError::HeadMismatch {
            expected: Head::SigmoidProbability,
            got: model.spec.head,
        });
    }
    let surface = forward_oriented(model, snap, &ChannelConfig::default())?;
    evaluate_pass_options(&surface, snap)
}

/// Output of [`optimal_position`]: how much an off-ball attacker could
/// improve the pass to them by standing somewhere else nearby.
#[derive(Clone, Debug)]
pub struct OptimalPositionResult {
    pub player: usize,
    /// Probability at the player's actual location on the unmodified
    /// surface.
    pub baseline_probability: f64,
    pub best_location: (f64, f64),
    pub best_gain: f64,
    /// One entry per in-field relocation of the 5x5 grid: the location
    /// and the probability gain of moving there (the identity relocation
    /// gains exactly zero).
    pub gains: Vec<((f64, f64), f64)>,
}

/// Recompute the surface once per relocation of `player` on a 5x5
/// one-meter grid around their position; the gain of a relocation is the
/// new surface's probability at the new spot minus the baseline at the
/// current spot.
pub fn optimal_position<R: Real>(
    model: &Model<R>,
    snap: &TrackingSnapshot,
    player: usize,
) -> Result<OptimalPositionResult, AppError> {
    if model.spec.head != Head::SigmoidProbability {
        return Err(AppError::HeadMismatch {
            expected: Head::SigmoidProbability,
            got: model.spec.head,
        });
    }
    if player >= snap.attackers.len() || player == snap.carrier() {
        return Err(AppError::InvalidPlayer(player));
    }
    let config = ChannelConfig::default();
    let baseline = forward_oriented(model, snap, &config)?;
    let (nx, ny, _) = baseline.grid.shape();
    let p = snap.attackers[player];
    let (bx, by) = cell_on_grid(p.x, p.y, nx, ny);
    let baseline_probability = baseline.at(bx, by);

    let mut relocations = Vec::new();
    for dx in -GRID_REACH..=GRID_REACH {
        for dy in -GRID_REACH..=GRID_REACH {
            let loc = (p.x + dx as f64, p.y + dy as f64);
            if (0.0..=FIELD_LENGTH).contains(&loc.0) && (0.0..=FIELD_WIDTH).contains(&loc.1) {
                relocations.push(loc);
            }
        }
    }

    let surfaces = crate::util::parallel_map(relocations.len(), |i| {
        let loc = relocations[i];
        let mut moved = snap.clone();
        moved.attackers[player].x = loc.0;
        moved.attackers[player].y = loc.1;
        forward_oriented(model, &moved, &config)
    });

    let mut gains = Vec::with_capacity(relocations.len());
    let mut best_location = (p.x, p.y);
    let mut best_gain = 0.0;
    for (loc, surface) in relocations.iter().zip(surfaces) {
        let surface = surface?;
        let (ix, iy) = cell_on_grid(loc.0, loc.1, nx, ny);
        let gain = surface.at(ix, iy) - baseline_probability;
        gains.push((*loc, gain));
        if gain > best_gain {
            best_gain = gain;
            best_location = *loc;
        }
    }

    Ok(OptimalPositionResult {
        player,
        baseline_probability,
        best_location,
        best_gain,
        gains,
    })
}

/// One pass scored for pass-completion-added: the best available option
/// `optimal`, the chosen option `selected`, and whether it came off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredPass {
    pub optimal: f64,
    pub selected: f64,
    pub completed: bool,
}

/// Pass completion added over a list of scored passes: completed passes
/// contribute `(1 - optimal) * (1 - (optimal - selected))`, missed ones
/// subtract `optimal * (optimal - selected)`. No clamping is applied.
pub fn ppa(passes: &[ScoredPass]) -> f64 {
    passes
        .iter()
        .map(|p| {
            let risk_spread = p.optimal - p.selected;
            if p.completed {
                (1.0 - p.optimal) * (1.0 - risk_spread)
            } else {
                -(p.optimal * risk_spread)
            }
        })
        .sum()
}

/// A player's pass-completion-added summary.
#[derive(Clone, Debug, PartialEq)]
pub struct PpaRecord {
    pub player_id: String,
    pub ppa_raw: f64,
    pub minutes: f64,
    pub ppa_per_90: f64,
}

impl PpaRecord {
    pub fn new(player_id: impl Into<String>, passes: &[ScoredPass], minutes: f64) -> Result<PpaRecord, AppError> {
        if !(minutes > 0.0) {
            return Err(AppError::InvalidMinutes(minutes));
        }
        let raw = ppa(passes);
        Ok(PpaRecord {
            player_id: player_id.into(),
            ppa_raw: raw,
            minutes,
            ppa_per_90: raw * 90.0 / minutes,
        })
    }
}

/// Sort a ranking table by per-90 value, best first (ties by id so the
/// order is reproducible).
pub fn rank_by_ppa(mut records: Vec<PpaRecord>) -> Vec<PpaRecord> {
    records.sort_by(|a, b| {
        b.ppa_per_90
            .partial_cmp(&a.ppa_per_90)
            .unwrap()
            .then_with(|| a.player_id.cmp(&b.player_id))
    });
    records
}

/// CSV of a ranking table.
pub fn ppa_table_csv(records: &[PpaRecord]) -> String {
    let mut s = String::from("player_id,ppa_raw,minutes,ppa_per_90\n");
    for r in records {
        s.push_str(&format!("{},{},{},{}\n", r.player_id, r.ppa_raw, r.minutes, r.ppa_per_90));
    }
    s
}

/// Score the snapshot's own pass for PPA: `optimal` is the best
/// best-location probability over all teammates, `selected` the surface
/// probability at the actual destination.
pub fn score_pass<R: Real>(model: &Model<R>, snap: &TrackingSnapshot) -> Result<ScoredPass, AppError> {
    let pass = snap.pass.clone().ok_or(AppError::MissingPass)?;
    let result = optimal_pass(model, snap)?;
    let optimal = result
        .teammates
        .iter()
        .map(|t| t.best_probability)
        .fold(f64::NEG_INFINITY, f64::max);
    if !optimal.is_finite() {
        return Err(AppError::NoTeammates);
    }
    let (nx, ny, _) = result.surface.grid.shape();
    let (ix, iy) = cell_on_grid(pass.destination.0, pass.destination.1, nx, ny);
    Ok(ScoredPass { optimal, selected: result.surface.at(ix, iy), completed: pass.completed })
}

/// Mean selection surfaces of two models over the same probe states, and
/// their signed difference (team minus league).
#[derive(Clone, Debug)]
pub struct TendencyMaps {
    pub league_mean: GridTensor<f64>,
    pub team_mean: GridTensor<f64>,
    pub difference: GridTensor<f64>,
}

impl TendencyMaps {
    /// Relative shift of selection mass at one cell:
    /// `(team - league) / league`.
    pub fn likelihood_ratio(&self, ix: usize, iy: usize) -> f64 {
        self.difference.get(ix, iy, 0) / self.league_mean.get(ix, iy, 0)
    }
}

fn mean_selection_surface<R: Real>(
    model: &Model<R>,
    probes: &[GameState],
) -> Result<GridTensor<f64>, AppError> {
    let mut mean = GridTensor::zeros(model.spec.nx, model.spec.ny, 1);
    for state in probes {
        let surface = model.forward(state)?;
        for (m, v) in mean.data_mut().iter_mut().zip(surface.grid.data()) {
            *m += v;
        }
    }
    let inv = 1.0 / probes.len() as f64;
    for m in mean.data_mut() {
        *m *= inv;
    }
    Ok(mean)
}

/// Where does a team like to pass, compared with the league? Both models
/// must carry the selection head; `probes` are the game states to
/// average over (typically filtered to a ball region of interest).
pub fn team_tendency_maps<R: Real>(
    league_model: &Model<R>,
    team_model: &Model<R>,
    probes: &[GameState],
) -> Result<TendencyMaps, AppError> {
    for model in [league_model, team_model] {
        if model.spec.head != Head::SoftmaxSelection {
            return Err(AppError::HeadMismatch {
                expected: Head::SoftmaxSelection,
                got: model.spec.head,
            });
        }
    }
    if probes.is_empty() {
        return Err(AppError::EmptyProbeSet);
    }
    let league_mean = mean_selection_surface(league_model, probes)?;
    let team_mean = mean_selection_surface(team_model, probes)?;
    let mut difference = GridTensor::zeros(league_mean.nx(), league_mean.ny(), 1);
    for ((d, t), l) in difference
        .data_mut()
        .iter_mut()
        .zip(team_mean.data())
        .zip(league_mean.data())
    {
        *d = t - l;
    }
    Ok(TendencyMaps { league_mean, team_mean, difference })
}

/// The tendency ratio at each attacker's cell of a snapshot.
pub fn player_likelihood_ratios(
    maps: &TendencyMaps,
    snap: &TrackingSnapshot,
) -> Vec<(usize, f64)> {
    let (nx, ny, _) = maps.difference.shape();
    snap.attackers
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (ix, iy) = cell_on_grid(p.x, p.y, nx, ny);
            (i, maps.likelihood_ratio(ix, iy))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{PassEvent, PlayerState};
    use crate::network::NetworkSpec;
    use crate::util::{seeded_rng, GRID_NX, GRID_NY};

    fn small_spec(head: Head) -> NetworkSpec {
        NetworkSpec {
            filters: 2,
            conv_blocks: 1,
            head,
            multi_scale: false,
            learned_upsampling: false,
            fusion_layer: false,
            nonlinear_prediction: false,
            ..NetworkSpec::default()
        }
    }

    /// All-zero parameters: sigmoid surfaces are flat 0.5, softmax flat
    /// uniform.
    fn flat_model(head: Head) -> Model<f32> {
        let mut model: Model<f32> = Model::assemble(small_spec(head), 1).unwrap();
        for p in model.params.iter_mut() {
            p.value.iter_mut().for_each(|v| *v = 0.0);
        }
        model
    }

    fn random_model(head: Head, seed: u64) -> Model<f32> {
        Model::assemble(small_spec(head), seed).unwrap()
    }

    fn snapshot() -> TrackingSnapshot {
        TrackingSnapshot {
            match_id: "app".into(),
            t: 4.0,
            attack_left_to_right: true,
            // sub-cell offsets keep every position away from cell
            // boundaries, where a mirrored lookup lands one cell over
            attackers: vec![
                PlayerState::new(30.2, 30.4, 0.0, 0.0), // carrier
                PlayerState::new(50.3, 30.4, 0.0, 0.0),
                PlayerState::new(40.2, 50.3, 3.1, 0.0),
            ],
            defenders: vec![
                PlayerState::new(55.3, 32.2, 0.0, 0.0),
                PlayerState::new(70.1, 40.4, 0.0, 0.0),
            ],
            ball: (30.2, 30.4),
            pass: None,
        }
    }

    fn probability_surface(grid: GridTensor<f64>) -> Surface {
        Surface { grid, kind: SurfaceKind::Probability, source: "test".into() }
    }

    #[test]
    fn flat_surface_yields_zero_gains_and_no_candidates() {
        let surface = probability_surface(GridTensor::filled(GRID_NX, GRID_NY, 1, 0.5));
        let result = evaluate_pass_options(&surface, &snapshot()).unwrap();
        assert_eq!(result.teammates.len(), 2);
        for t in &result.teammates {
            assert_eq!(t.gain, 0.0);
            assert_eq!(t.best_probability, 0.5);
            // nothing beats the current spot, so the answer is the spot itself
            let p = snapshot().attackers[t.teammate];
            assert_eq!(t.best_location, (p.x, p.y));
        }
        assert!(result.suboptimal.is_empty());
    }

    #[test]
    fn passer_is_excluded_from_the_evaluation() {
        let surface = probability_surface(GridTensor::filled(GRID_NX, GRID_NY, 1, 0.5));
        let result = evaluate_pass_options(&surface, &snapshot()).unwrap();
        assert!(result.teammates.iter().all(|t| t.teammate != snapshot().carrier()));
    }

    #[test]
    fn a_peak_near_the_anticipated_position_is_found() {
        // teammate 2 runs at 3.1 m/s: anticipated cell is (43, 50)
        let mut grid = GridTensor::filled(GRID_NX, GRID_NY, 1, 0.3);
        grid.set(43, 50, 0, 0.9);
        let result = evaluate_pass_options(&probability_surface(grid), &snapshot()).unwrap();
        let runner = result.teammates.iter().find(|t| t.teammate == 2).unwrap();
        approx::assert_abs_diff_eq!(runner.expected_location.0, 43.3, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(runner.expected_location.1, 50.3, epsilon = 1e-12);
        assert_eq!(runner.best_location, (43.5, 50.5));
        approx::assert_abs_diff_eq!(runner.gain, 0.6, epsilon = 1e-12);

        // the stationary teammate saw no better cell
        let stationary = result.teammates.iter().find(|t| t.teammate == 1).unwrap();
        assert_eq!(stationary.gain, 0.0);
    }

    #[test]
    fn best_probability_never_drops_below_the_current_cell() {
        let mut rng = seeded_rng(71, 0);
        let data: Vec<f64> =
            (0..GRID_NX * GRID_NY).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let surface = probability_surface(GridTensor::from_vec(GRID_NX, GRID_NY, 1, data));
        let result = evaluate_pass_options(&surface, &snapshot()).unwrap();
        for t in &result.teammates {
            assert!(t.best_probability >= t.current_probability);
            assert!(t.gain >= 0.0);
            assert!((0.0..=FIELD_LENGTH).contains(&t.best_location.0));
            assert!((0.0..=FIELD_WIDTH).contains(&t.best_location.1));
        }
    }

    #[test]
    fn suboptimal_candidates_are_spaced_and_sorted() {
        let mut rng = seeded_rng(72, 0);
        let data: Vec<f64> =
            (0..GRID_NX * GRID_NY).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let surface = probability_surface(GridTensor::from_vec(GRID_NX, GRID_NY, 1, data));
        let result = evaluate_pass_options(&surface, &snapshot()).unwrap();

        let gains: Vec<f64> = result.suboptimal.iter().map(|c| c.gain).collect();
        let mut sorted = gains.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(gains, sorted, "sub-optimal list is not in descending gain order");

        let bests: Vec<(f64, f64)> =
            result.teammates.iter().filter(|t| t.gain > 0.0).map(|t| t.best_location).collect();
        for (i, c) in result.suboptimal.iter().enumerate() {
            assert!(c.gain > 0.0);
            for b in &bests {
                assert!(distance(*b, c.location) >= SUBOPTIMAL_SPACING);
            }
            for other in &result.suboptimal[..i] {
                assert!(distance(other.location, c.location) >= SUBOPTIMAL_SPACING);
            }
        }
    }

    #[test]
    fn selection_surfaces_are_rejected_for_pass_evaluation() {
        let surface = Surface {
            grid: GridTensor::filled(GRID_NX, GRID_NY, 1, 1.0 / 7072.0),
            kind: SurfaceKind::SelectionLikelihood,
            source: "test".into(),
        };
        assert!(matches!(
            evaluate_pass_options(&surface, &snapshot()),
            Err(AppError::HeadMismatch { expected: Head::SigmoidProbability, .. })
        ));
        let model = flat_model(Head::SoftmaxSelection);
        assert!(matches!(
            optimal_pass(&model, &snapshot()),
            Err(AppError::HeadMismatch { .. })
        ));
    }

    #[test]
    fn orientation_is_transparent_to_the_caller() {
        let model = random_model(Head::SigmoidProbability, 73);
        let ltr = snapshot();
        let rtl = ltr.clone().point_reflect();
        assert!(!rtl.attack_left_to_right);

        let a = optimal_pass(&model, &ltr).unwrap();
        let b = optimal_pass(&model, &rtl).unwrap();
        assert_eq!(a.teammates.len(), b.teammates.len());
        for (ta, tb) in a.teammates.iter().zip(&b.teammates) {
            assert_eq!(ta.teammate, tb.teammate);
            assert_eq!(ta.current_probability, tb.current_probability);
            assert_eq!(ta.best_probability, tb.best_probability);
            // locations come back in each snapshot's own frame
            approx::assert_abs_diff_eq!(
                ta.best_location.0,
                FIELD_LENGTH - tb.best_location.0,
                epsilon = 1e-9
            );
            approx::assert_abs_diff_eq!(
                ta.best_location.1,
                FIELD_WIDTH - tb.best_location.1,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn repositioning_reports_every_infield_relocation() {
        let model = flat_model(Head::SigmoidProbability);
        let snap = snapshot();
        let result = optimal_position(&model, &snap, 1).unwrap();
        assert_eq!(result.player, 1);
        assert_eq!(result.gains.len(), 25, "interior player has a full grid");
        // flat model: every relocation is as good as staying put
        assert_eq!(result.best_gain, 0.0);
        assert_eq!(result.best_location, (50.3, 30.4));
        let identity = result.gains.iter().find(|(loc, _)| *loc == (50.3, 30.4)).unwrap();
        assert_eq!(identity.1, 0.0);
        for (loc, gain) in &result.gains {
            assert!((0.0..=FIELD_LENGTH).contains(&loc.0));
            assert!((0.0..=FIELD_WIDTH).contains(&loc.1));
            assert_eq!(*gain, 0.0);
        }
    }

    #[test]
    fn repositioning_skips_cells_beyond_the_touchline() {
        let model = flat_model(Head::SigmoidProbability);
        let mut snap = snapshot();
        snap.attackers[1] = PlayerState::new(1.0, 1.0, 0.0, 0.0);
        let result = optimal_position(&model, &snap, 1).unwrap();
        // dx in {-1..2} x dy in {-1..2} survive: 4x4 = 16
        assert_eq!(result.gains.len(), 16);
    }

    #[test]
    fn the_carrier_and_ghosts_cannot_be_repositioned() {
        let model = flat_model(Head::SigmoidProbability);
        let snap = snapshot();
        assert!(matches!(optimal_position(&model, &snap, 0), Err(AppError::InvalidPlayer(0))));
        assert!(matches!(optimal_position(&model, &snap, 9), Err(AppError::InvalidPlayer(9))));
    }

    #[test]
    fn identity_relocation_reproduces_the_baseline_surface() {
        let model = random_model(Head::SigmoidProbability, 74);
        let snap = snapshot();
        let config = ChannelConfig::default();
        let baseline = forward_oriented(&model, &snap, &config).unwrap();
        let moved = snap.clone(); // identity move of player 1
        let again = forward_oriented(&model, &moved, &config).unwrap();
        assert_eq!(baseline.grid, again.grid, "same input must give bitwise-equal surfaces");
    }

    #[test]
    fn ppa_matches_hand_substitution() {
        let one = |optimal, selected, completed| ScoredPass { optimal, selected, completed };
        approx::assert_abs_diff_eq!(ppa(&[one(0.9, 0.9, true)]), 0.1, epsilon = 1e-12);
        assert_eq!(ppa(&[one(0.3, 0.3, false)]), 0.0);
        approx::assert_abs_diff_eq!(ppa(&[one(0.8, 0.6, true)]), 0.16, epsilon = 1e-12);
        // a missed risky pass costs optimal * (optimal - selected)
        approx::assert_abs_diff_eq!(ppa(&[one(0.8, 0.6, false)]), -0.16, epsilon = 1e-12);
    }

    #[test]
    fn ppa_is_zero_on_empty_and_additive_over_disjoint_lists() {
        assert_eq!(ppa(&[]), 0.0);
        let a = vec![
            ScoredPass { optimal: 0.7, selected: 0.5, completed: true },
            ScoredPass { optimal: 0.4, selected: 0.4, completed: false },
        ];
        let b = vec![ScoredPass { optimal: 0.9, selected: 0.2, completed: false }];
        let joined: Vec<ScoredPass> = a.iter().chain(&b).copied().collect();
        approx::assert_abs_diff_eq!(ppa(&joined), ppa(&a) + ppa(&b), epsilon = 1e-12);
    }

    #[test]
    fn ppa_records_normalize_to_ninety_minutes() {
        let passes = vec![ScoredPass { optimal: 0.9, selected: 0.9, completed: true }; 20];
        let record = PpaRecord::new("p1", &passes, 180.0).unwrap();
        approx::assert_abs_diff_eq!(record.ppa_raw, 2.0, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(record.ppa_per_90, 1.0, epsilon = 1e-12);
        assert!(matches!(PpaRecord::new("p2", &passes, 0.0), Err(AppError::InvalidMinutes(_))));
        assert!(matches!(PpaRecord::new("p3", &passes, -4.0), Err(AppError::InvalidMinutes(_))));
    }

    #[test]
    fn ranking_sorts_by_per_ninety_descending() {
        let mk = |id: &str, per90: f64| PpaRecord {
            player_id: id.into(),
            ppa_raw: per90,
            minutes: 90.0,
            ppa_per_90: per90,
        };
        let ranked = rank_by_ppa(vec![mk("low", 0.1), mk("high", 0.9), mk("mid", 0.5)]);
        let ids: Vec<&str> = ranked.iter().map(|r| r.player_id.as_str()).collect();
        assert_eq!(ids, ["high", "mid", "low"]);
        let csv = ppa_table_csv(&ranked);
        assert!(csv.starts_with("player_id,ppa_raw,minutes,ppa_per_90\n"));
        assert_eq!(csv.trim_end().lines().count(), 4);
    }

    #[test]
    fn scoring_a_pass_reads_both_probabilities_off_one_surface() {
        let model = flat_model(Head::SigmoidProbability);
        let mut snap = snapshot();
        snap.pass = Some(PassEvent {
            origin: snap.ball,
            destination: (50.0, 30.0),
            completed: true,
            passer: 0,
            team_id: 0,
            minute: 1.0,
        });
        let scored = score_pass(&model, &snap).unwrap();
        assert_eq!(scored.optimal, 0.5);
        assert_eq!(scored.selected, 0.5);
        assert!(scored.completed);

        let mut no_pass = snap.clone();
        no_pass.pass = None;
        assert!(matches!(score_pass(&model, &no_pass), Err(AppError::MissingPass)));
    }

    #[test]
    fn identical_models_show_no_tendency_difference() {
        let model = random_model(Head::SoftmaxSelection, 75);
        let snap = snapshot();
        let state = model_input(&snap, &ChannelConfig::default()).unwrap();
        let maps = team_tendency_maps(&model, &model, &[state.clone(), state]).unwrap();
        assert!(maps.difference.data().iter().all(|&v| v == 0.0));
        let ratios = player_likelihood_ratios(&maps, &snap);
        assert_eq!(ratios.len(), 3);
        assert!(ratios.iter().all(|&(_, r)| r == 0.0));
    }

    #[test]
    fn tendency_maps_are_normalized_and_antisymmetric() {
        let league = random_model(Head::SoftmaxSelection, 76);
        let team = random_model(Head::SoftmaxSelection, 77);
        let snap = snapshot();
        let state = model_input(&snap, &ChannelConfig::default()).unwrap();
        let probes = vec![state.clone(), state.clone(), state];
        let maps = team_tendency_maps(&league, &team, &probes).unwrap();

        let league_sum: f64 = maps.league_mean.data().iter().sum();
        let team_sum: f64 = maps.team_mean.data().iter().sum();
        // the forwards run in f32, so normalization holds to f32 precision
        approx::assert_abs_diff_eq!(league_sum, 1.0, epsilon = 1e-5);
        approx::assert_abs_diff_eq!(team_sum, 1.0, epsilon = 1e-5);
        let diff_sum: f64 = maps.difference.data().iter().sum();
        approx::assert_abs_diff_eq!(diff_sum, 0.0, epsilon = 1e-5);

        let swapped = team_tendency_maps(&team, &league, &probes).unwrap();
        for (a, b) in maps.difference.data().iter().zip(swapped.difference.data()) {
            assert_eq!(*a, -b);
        }
    }

    #[test]
    fn tendency_maps_reject_bad_inputs() {
        let selection = random_model(Head::SoftmaxSelection, 78);
        let sigmoid = random_model(Head::SigmoidProbability, 78);
        let snap = snapshot();
        let state = model_input(&snap, &ChannelConfig::default()).unwrap();
        assert!(matches!(
            team_tendency_maps(&selection, &sigmoid, &[state.clone()]),
            Err(AppError::HeadMismatch { expected: Head::SoftmaxSelection, .. })
        ));
        assert!(matches!(
            team_tendency_maps(&selection, &selection, &[]),
            Err(AppError::EmptyProbeSet)
        ));
    }
}
