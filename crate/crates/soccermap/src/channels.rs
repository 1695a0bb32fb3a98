//! Game-state representation: turns one tracking snapshot into the
//! 13-channel grid stack the network consumes.

use crate::autograd::GridTensor;
use crate::util::{FIELD_LENGTH, FIELD_WIDTH, GOAL, GRID_NX, GRID_NY};

/// Number of channels in a [`GameState`] tensor.
pub const NUM_CHANNELS: usize = 13;

/// Channel order of [`GameState::tensor`].
pub const CHANNEL_NAMES: [&str; NUM_CHANNELS] = [
    "att_occupancy",
    "att_vx",
    "att_vy",
    "def_occupancy",
    "def_vx",
    "def_vy",
    "dist_to_ball",
    "dist_to_goal",
    "ball_goal_angle_sin",
    "ball_goal_angle_cos",
    "goal_angle",
    "carrier_angle_sin",
    "carrier_angle_cos",
];

pub const CH_ATT_OCC: usize = 0;
pub const CH_ATT_VX: usize = 1;
pub const CH_ATT_VY: usize = 2;
pub const CH_DEF_OCC: usize = 3;
pub const CH_DEF_VX: usize = 4;
pub const CH_DEF_VY: usize = 5;
pub const CH_DIST_BALL: usize = 6;
pub const CH_DIST_GOAL: usize = 7;
pub const CH_ANGLE_SIN: usize = 8;
pub const CH_ANGLE_COS: usize = 9;
pub const CH_GOAL_ANGLE: usize = 10;
pub const CH_CARRIER_SIN: usize = 11;
pub const CH_CARRIER_COS: usize = 12;

/// Distances are divided by this before entering the network.
pub const DISTANCE_SCALE: f64 = FIELD_LENGTH;
/// Velocity components are divided by this before entering the network.
pub const VELOCITY_SCALE: f64 = 10.0;

/// One player's position (meters) and velocity (m/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlayerState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl PlayerState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        PlayerState { x, y, vx, vy }
    }

    fn reflected(self) -> Self {
        PlayerState {
            x: FIELD_LENGTH - self.x,
            y: FIELD_WIDTH - self.y,
            vx: -self.vx,
            vy: -self.vy,
        }
    }
}

/// A pass tagged on a snapshot: where it was aimed and how it ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PassEvent {
    /// Where the ball left from (the ball position at the event).
    pub origin: (f64, f64),
    /// Intended/observed end location of the pass.
    pub destination: (f64, f64),
    /// Whether a teammate received the ball.
    pub completed: bool,
    /// Index of the passer within the snapshot's attacker list.
    pub passer: usize,
    pub team_id: u32,
    /// Match clock in minutes at the event.
    pub minute: f64,
}

/// A tracking snapshot: both teams, the ball, and optionally one pass.
/// The team in possession is always `attackers`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackingSnapshot {
    pub match_id: String,
    /// Time within the match, seconds.
    pub t: f64,
    /// True when the attacking team plays toward the right goal line.
    pub attack_left_to_right: bool,
    pub attackers: Vec<PlayerState>,
    pub defenders: Vec<PlayerState>,
    pub ball: (f64, f64),
    pub pass: Option<PassEvent>,
}

/// Contract violations in a snapshot or channel request.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    OutOfBounds { what: &'static str, x: f64, y: f64 },
    TeamSize { team: &'static str, n: usize },
    PasserIndex { index: usize, attackers: usize },
}

impl std::fmt::Display for ChannelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelError::OutOfBounds { what, x, y } => {
                write!(f, "{what} at ({x:.2}, {y:.2}) is outside the {FIELD_LENGTH}x{FIELD_WIDTH} m field")
            }
            ChannelError::TeamSize { team, n } => {
                write!(f, "{team} has {n} players; expected 1 to 11")
            }
            ChannelError::PasserIndex { index, attackers } => {
                write!(f, "passer index {index} out of range for {attackers} attackers")
            }
        }
    }
}

impl std::error::Error for ChannelError {}

fn in_field(x: f64, y: f64) -> bool {
    (0.0..=FIELD_LENGTH).contains(&x) && (0.0..=FIELD_WIDTH).contains(&y)
}

/// Grid cell covering a point, under floor rasterization clamped to the
/// grid: cell (i, j) covers [i, i+1) x [j, j+1) meters.
pub fn cell_of(x: f64, y: f64) -> (usize, usize) {
    cell_on_grid(x, y, GRID_NX, GRID_NY)
}

/// Floor rasterization of a field point onto an `nx` x `ny` grid (the
/// standard grid divides the field one cell per meter; coarser grids
/// scale accordingly).
pub fn cell_on_grid(x: f64, y: f64, nx: usize, ny: usize) -> (usize, usize) {
    // one multiplication keeps the meter-per-cell grid exact (scale 1.0)
    let sx = nx as f64 / FIELD_LENGTH;
    let sy = ny as f64 / FIELD_WIDTH;
    let ix = ((x * sx).floor() as isize).clamp(0, nx as isize - 1) as usize;
    let iy = ((y * sy).floor() as isize).clamp(0, ny as isize - 1) as usize;
    (ix, iy)
}

/// Center of a grid cell, in meters.
pub fn cell_center(ix: usize, iy: usize) -> (f64, f64) {
    (ix as f64 + 0.5, iy as f64 + 0.5)
}

impl TrackingSnapshot {
    /// The goal the attacking team is playing toward.
    pub fn goal(&self) -> (f64, f64) {
        if self.attack_left_to_right {
            GOAL
        } else {
            (FIELD_LENGTH - GOAL.0, FIELD_WIDTH - GOAL.1)
        }
    }

    /// Point-reflect everything about the field center (x <- 104-x,
    /// y <- 68-y, velocities negated) and flip the direction flag. The
    /// reflection preserves handedness, so left/right wings keep their
    /// roles.
    pub fn point_reflect(mut self) -> Self {
        for p in self.attackers.iter_mut().chain(self.defenders.iter_mut()) {
            *p = p.reflected();
        }
        self.ball = (FIELD_LENGTH - self.ball.0, FIELD_WIDTH - self.ball.1);
        if let Some(pass) = &mut self.pass {
            pass.origin = (FIELD_LENGTH - pass.origin.0, FIELD_WIDTH - pass.origin.1);
            pass.destination = (
                FIELD_LENGTH - pass.destination.0,
                FIELD_WIDTH - pass.destination.1,
            );
        }
        self.attack_left_to_right = !self.attack_left_to_right;
        self
    }

    /// Ensure the attacking team plays left to right, reflecting the
    /// snapshot if needed. Idempotent: an already-normalized snapshot is
    /// returned unchanged.
    pub fn normalize_attack_direction(self) -> Self {
        if self.attack_left_to_right {
            self
        } else {
            self.point_reflect()
        }
    }

    /// Check the field-bounds and team-size invariants.
    pub fn validate(&self) -> Result<(), ChannelError> {
        for (team, players) in [("attackers", &self.attackers), ("defenders", &self.defenders)] {
            if players.is_empty() || players.len() > 11 {
                return Err(ChannelError::TeamSize { team, n: players.len() });
            }
            for p in players {
                if !in_field(p.x, p.y) {
                    return Err(ChannelError::OutOfBounds { what: "player", x: p.x, y: p.y });
                }
            }
        }
        if !in_field(self.ball.0, self.ball.1) {
            return Err(ChannelError::OutOfBounds { what: "ball", x: self.ball.0, y: self.ball.1 });
        }
        if let Some(pass) = &self.pass {
            if !in_field(pass.destination.0, pass.destination.1) {
                return Err(ChannelError::OutOfBounds {
                    what: "pass destination",
                    x: pass.destination.0,
                    y: pass.destination.1,
                });
            }
            if pass.passer >= self.attackers.len() {
                return Err(ChannelError::PasserIndex {
                    index: pass.passer,
                    attackers: self.attackers.len(),
                });
            }
        }
        Ok(())
    }

    /// Index of the ball carrier in `attackers`: the passer at pass events,
    /// else the attacker nearest the ball.
    pub fn carrier(&self) -> usize {
        if let Some(pass) = &self.pass {
            return pass.passer;
        }
        let mut best = 0;
        let mut best_d2 = f64::INFINITY;
        for (i, p) in self.attackers.iter().enumerate() {
            let d2 = (p.x - self.ball.0).powi(2) + (p.y - self.ball.1).powi(2);
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
        }
        best
    }
}

/// How the dense angle channels are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelConfig {
    /// When false (default), channels 9-10 hold the sine/cosine of the
    /// angle *at each cell* between the cell->goal and cell->ball rays.
    /// When true they instead hold the sine/cosine of the cell->goal
    /// bearing itself (the same angle as channel 11).
    pub goal_angle_channels: bool,
}

#[allow(clippy::derivable_impls)]
impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { goal_angle_channels: false }
    }
}

/// The 13-channel network input built from one snapshot.
#[derive(Clone, Debug)]
pub struct GameState {
    pub tensor: GridTensor<f64>,
    /// Label of the snapshot this state was built from ("match_id@t").
    pub source: String,
}

impl GameState {
    pub fn channel_names() -> &'static [&'static str; NUM_CHANNELS] {
        &CHANNEL_NAMES
    }
}

/// Signed sine/cosine of the angle from vector `u` to vector `v`;
/// (0, 1) when either is degenerate.
fn angle_between(ux: f64, uy: f64, vx: f64, vy: f64) -> (f64, f64) {
    let nu = (ux * ux + uy * uy).sqrt();
    let nv = (vx * vx + vy * vy).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return (0.0, 1.0);
    }
    let inv = 1.0 / (nu * nv);
    let sin = (ux * vy - uy * vx) * inv;
    let cos = (ux * vx + uy * vy) * inv;
    (sin.clamp(-1.0, 1.0), cos.clamp(-1.0, 1.0))
}

/// Build the 13-channel game state for a validated snapshot.
///
/// Channel layout (see [`CHANNEL_NAMES`]): sparse attacker occupancy /
/// velocity (0-2), the same for defenders (3-5), dense distances to ball
/// and goal from cell centers (6-7), dense sine/cosine of the angle each
/// cell sees between goal and ball (8-9), dense cell->goal bearing in
/// radians (10), and sparse sine/cosine of the angle between the carrier's
/// velocity and the carrier->teammate direction at each teammate cell,
/// passer excluded (11-12).
///
/// Two players rasterizing to the same cell keep occupancy at 1.0 and let
/// the later player win the velocity channels (logged).
pub fn build_channels(
    snap: &TrackingSnapshot,
    config: &ChannelConfig,
) -> Result<GameState, ChannelError> {
    snap.validate()?;
    let mut t = GridTensor::zeros(GRID_NX, GRID_NY, NUM_CHANNELS);

    for (players, occ_ch) in [(&snap.attackers, CH_ATT_OCC), (&snap.defenders, CH_DEF_OCC)] {
        for p in players.iter() {
            let (ix, iy) = cell_of(p.x, p.y);
            if t.get(ix, iy, occ_ch) != 0.0 {
                log::warn!(
                    "match {} t={:.2}: two players rasterized to cell ({ix},{iy}); velocities keep the last writer",
                    snap.match_id,
                    snap.t
                );
            }
            t.set(ix, iy, occ_ch, 1.0);
            t.set(ix, iy, occ_ch + 1, p.vx);
            t.set(ix, iy, occ_ch + 2, p.vy);
        }
    }

    let (bx, by) = snap.ball;
    let (gx, gy) = snap.goal();
    for ix in 0..GRID_NX {
        for iy in 0..GRID_NY {
            let (cx, cy) = cell_center(ix, iy);
            let (dbx, dby) = (bx - cx, by - cy);
            let (dgx, dgy) = (gx - cx, gy - cy);
            t.set(ix, iy, CH_DIST_BALL, (dbx * dbx + dby * dby).sqrt());
            t.set(ix, iy, CH_DIST_GOAL, (dgx * dgx + dgy * dgy).sqrt());
            let bearing = dgy.atan2(dgx);
            // keep the bearing in (-pi, pi]
            let bearing = if bearing == -std::f64::consts::PI {
                std::f64::consts::PI
            } else {
                bearing
            };
            let (sin, cos) = if config.goal_angle_channels {
                (bearing.sin(), bearing.cos())
            } else {
                angle_between(dgx, dgy, dbx, dby)
            };
            t.set(ix, iy, CH_ANGLE_SIN, sin);
            t.set(ix, iy, CH_ANGLE_COS, cos);
            t.set(ix, iy, CH_GOAL_ANGLE, bearing);
        }
    }

    let carrier = snap.carrier();
    let cp = snap.attackers[carrier];
    for (i, mate) in snap.attackers.iter().enumerate() {
        if i == carrier {
            continue;
        }
        let (sin, cos) = if cp.vx == 0.0 && cp.vy == 0.0 {
            // no velocity direction to measure against
            (0.0, 0.0)
        } else {
            angle_between(cp.vx, cp.vy, mate.x - cp.x, mate.y - cp.y)
        };
        let (ix, iy) = cell_of(mate.x, mate.y);
        t.set(ix, iy, CH_CARRIER_SIN, sin);
        t.set(ix, iy, CH_CARRIER_COS, cos);
    }

    Ok(GameState {
        tensor: t,
        source: format!("{}@{:.2}", snap.match_id, snap.t),
    })
}

/// The network's input representation of a snapshot: the physical
/// channels of [`build_channels`] brought to comparable magnitudes by
/// [`scale_channels`]. Every training and inference path builds its
/// tensors here, so the two can never disagree about scaling.
pub fn model_input(
    snapshot: &TrackingSnapshot,
    config: &ChannelConfig,
) -> Result<GameState, ChannelError> {
    Ok(scale_channels(build_channels(snapshot, config)?))
}

/// Bring channels to comparable magnitudes: distances / 104, velocities
/// / 10, everything else untouched. Applied identically at train and
/// inference time.
pub fn scale_channels(mut state: GameState) -> GameState {
    let t = &mut state.tensor;
    for ix in 0..GRID_NX {
        for iy in 0..GRID_NY {
            for ch in [CH_ATT_VX, CH_ATT_VY, CH_DEF_VX, CH_DEF_VY] {
                t.set(ix, iy, ch, t.get(ix, iy, ch) / VELOCITY_SCALE);
            }
            for ch in [CH_DIST_BALL, CH_DIST_GOAL] {
                t.set(ix, iy, ch, t.get(ix, iy, ch) / DISTANCE_SCALE);
            }
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::seeded_rng;
    use rand::Rng as _;

    fn snapshot(attackers: Vec<PlayerState>, defenders: Vec<PlayerState>, ball: (f64, f64)) -> TrackingSnapshot {
        TrackingSnapshot {
            match_id: "m0".into(),
            t: 12.5,
            attack_left_to_right: true,
            attackers,
            defenders,
            ball,
            pass: None,
        }
    }

    fn random_snapshot(rng: &mut crate::util::Rng) -> TrackingSnapshot {
        let player = |rng: &mut crate::util::Rng| {
            PlayerState::new(
                rng.random_range(1.0..103.0),
                rng.random_range(1.0..67.0),
                rng.random_range(-6.0..6.0),
                rng.random_range(-6.0..6.0),
            )
        };
        let attackers: Vec<_> = (0..11).map(|_| player(rng)).collect();
        let defenders: Vec<_> = (0..11).map(|_| player(rng)).collect();
        let ball = (rng.random_range(1.0..103.0), rng.random_range(1.0..67.0));
        snapshot(attackers, defenders, ball)
    }

    fn collision_free(s: &TrackingSnapshot) -> bool {
        for players in [&s.attackers, &s.defenders] {
            let mut cells: Vec<_> = players.iter().map(|p| cell_of(p.x, p.y)).collect();
            cells.sort_unstable();
            cells.dedup();
            if cells.len() != players.len() {
                return false;
            }
        }
        true
    }

    #[test]
    fn normalize_is_identity_when_already_left_to_right() {
        let s = snapshot(vec![PlayerState::new(10.0, 20.0, 2.0, 1.0)], vec![PlayerState::new(50.0, 30.0, 0.0, 0.0)], (11.0, 21.0));
        let normalized = s.clone().normalize_attack_direction();
        assert_eq!(normalized, s);
    }

    #[test]
    fn normalize_reflects_right_to_left_snapshots() {
        let mut s = snapshot(vec![PlayerState::new(10.0, 20.0, 2.0, 1.0)], vec![PlayerState::new(50.0, 30.0, 0.5, -0.5)], (11.0, 21.0));
        s.attack_left_to_right = false;
        let n = s.clone().normalize_attack_direction();
        // point reflection moves (10, 20, vx=2) to (94, 48, vx=-2)
        assert_eq!(n.attackers[0], PlayerState::new(94.0, 48.0, -2.0, -1.0));
        assert_eq!(n.ball, (93.0, 47.0));
        assert!(n.attack_left_to_right);
        // idempotent: a second application changes nothing
        assert_eq!(n.clone().normalize_attack_direction(), n);
    }

    #[test]
    fn goal_follows_attack_direction() {
        let mut s = snapshot(vec![PlayerState::new(10.0, 20.0, 0.0, 0.0)], vec![PlayerState::new(50.0, 30.0, 0.0, 0.0)], (11.0, 21.0));
        assert_eq!(s.goal(), (104.0, 34.0));
        s.attack_left_to_right = false;
        assert_eq!(s.goal(), (0.0, 34.0));
    }

    #[test]
    fn thirteen_channels_with_names() {
        let s = snapshot(vec![PlayerState::new(10.2, 30.7, 1.0, -2.0)], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (10.2, 30.7));
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        assert_eq!(gs.tensor.channels(), NUM_CHANNELS);
        assert_eq!(GameState::channel_names().len(), NUM_CHANNELS);
        assert_eq!(gs.tensor.shape(), (104, 68, 13));
    }

    #[test]
    fn floor_rasterization_sets_occupancy_and_velocity() {
        let s = snapshot(vec![PlayerState::new(10.2, 30.7, 1.0, -2.0)], vec![PlayerState::new(80.9, 40.1, 3.0, 4.0)], (50.0, 30.0));
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        assert_eq!(gs.tensor.get(10, 30, CH_ATT_OCC), 1.0);
        assert_eq!(gs.tensor.get(10, 30, CH_ATT_VX), 1.0);
        assert_eq!(gs.tensor.get(10, 30, CH_ATT_VY), -2.0);
        assert_eq!(gs.tensor.get(80, 40, CH_DEF_OCC), 1.0);
        assert_eq!(gs.tensor.get(80, 40, CH_DEF_VX), 3.0);
        // exactly one occupied cell per side
        let occ_sum: f64 = (0..104)
            .flat_map(|ix| (0..68).map(move |iy| (ix, iy)))
            .map(|(ix, iy)| gs.tensor.get(ix, iy, CH_ATT_OCC))
            .sum();
        assert_eq!(occ_sum, 1.0);
    }

    #[test]
    fn occupancy_sum_counts_players_without_collisions() {
        let mut rng = seeded_rng(21, 0);
        let mut checked = 0;
        while checked < 50 {
            let s = random_snapshot(&mut rng);
            if !collision_free(&s) {
                continue;
            }
            checked += 1;
            let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
            for (ch, players) in [(CH_ATT_OCC, &s.attackers), (CH_DEF_OCC, &s.defenders)] {
                let sum: f64 = (0..104)
                    .flat_map(|ix| (0..68).map(move |iy| (ix, iy)))
                    .map(|(ix, iy)| gs.tensor.get(ix, iy, ch))
                    .sum();
                assert_eq!(sum, players.len() as f64);
            }
        }
    }

    #[test]
    fn collision_keeps_occupancy_one_and_last_velocity() {
        let s = snapshot(
            vec![PlayerState::new(10.2, 30.7, 1.0, 1.0), PlayerState::new(10.8, 30.1, -4.0, 2.0)],
            vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)],
            (50.0, 30.0),
        );
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        assert_eq!(gs.tensor.get(10, 30, CH_ATT_OCC), 1.0);
        assert_eq!(gs.tensor.get(10, 30, CH_ATT_VX), -4.0);
        assert_eq!(gs.tensor.get(10, 30, CH_ATT_VY), 2.0);
    }

    #[test]
    fn distance_to_ball_vanishes_at_ball_cell() {
        let s = snapshot(vec![PlayerState::new(20.0, 20.0, 0.0, 0.0)], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (10.2, 30.7));
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        let d = gs.tensor.get(10, 30, CH_DIST_BALL);
        assert!(d < std::f64::consts::SQRT_2, "distance at ball cell: {d}");
        // and the exact center distance
        approx::assert_relative_eq!(d, (0.3f64 * 0.3 + 0.2 * 0.2).sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn dense_channels_respect_value_ranges() {
        let mut rng = seeded_rng(22, 0);
        for _ in 0..5 {
            let s = random_snapshot(&mut rng);
            let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
            for ix in 0..104 {
                for iy in 0..68 {
                    assert!(gs.tensor.get(ix, iy, CH_DIST_BALL) >= 0.0);
                    assert!(gs.tensor.get(ix, iy, CH_DIST_GOAL) >= 0.0);
                    for ch in [CH_ANGLE_SIN, CH_ANGLE_COS, CH_CARRIER_SIN, CH_CARRIER_COS] {
                        let v = gs.tensor.get(ix, iy, ch);
                        assert!((-1.0..=1.0).contains(&v), "channel {ch} value {v}");
                    }
                    let a = gs.tensor.get(ix, iy, CH_GOAL_ANGLE);
                    assert!(a > -std::f64::consts::PI && a <= std::f64::consts::PI);
                    assert!(gs.tensor.all_finite());
                }
            }
        }
    }

    #[test]
    fn cell_angle_matches_bearing_difference() {
        let s = snapshot(vec![PlayerState::new(20.0, 20.0, 0.0, 0.0)], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (52.5, 30.5));
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        // check the angle channels against the difference of the two
        // bearings at a handful of cells
        for (ix, iy) in [(10usize, 30usize), (0, 0), (103, 67), (60, 10)] {
            let (cx, cy) = cell_center(ix, iy);
            let to_goal = (34.0 - cy).atan2(104.0 - cx);
            let to_ball = (30.5 - cy).atan2(52.5 - cx);
            let theta = to_ball - to_goal;
            approx::assert_abs_diff_eq!(gs.tensor.get(ix, iy, CH_ANGLE_SIN), theta.sin(), epsilon = 1e-9);
            approx::assert_abs_diff_eq!(gs.tensor.get(ix, iy, CH_ANGLE_COS), theta.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn goal_angle_channel_is_cell_to_goal_bearing() {
        let s = snapshot(vec![PlayerState::new(20.0, 20.0, 0.0, 0.0)], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (50.0, 30.0));
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        let (cx, cy) = cell_center(40, 10);
        let want = (34.0 - cy).atan2(104.0 - cx);
        approx::assert_abs_diff_eq!(gs.tensor.get(40, 10, CH_GOAL_ANGLE), want, epsilon = 1e-12);
    }

    #[test]
    fn alternative_angle_reading_duplicates_the_bearing() {
        let s = snapshot(vec![PlayerState::new(20.0, 20.0, 0.0, 0.0)], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (50.0, 30.0));
        let cfg = ChannelConfig { goal_angle_channels: true };
        let gs = build_channels(&s, &cfg).unwrap();
        for (ix, iy) in [(5usize, 5usize), (70, 50), (103, 0)] {
            let bearing = gs.tensor.get(ix, iy, CH_GOAL_ANGLE);
            approx::assert_abs_diff_eq!(gs.tensor.get(ix, iy, CH_ANGLE_SIN), bearing.sin(), epsilon = 1e-12);
            approx::assert_abs_diff_eq!(gs.tensor.get(ix, iy, CH_ANGLE_COS), bearing.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn carrier_channels_mark_teammates_but_not_the_passer() {
        let carrier = PlayerState::new(50.0, 30.0, 1.0, 0.0);
        let mate = PlayerState::new(60.0, 40.0, 0.0, 0.0);
        let mut s = snapshot(vec![carrier, mate], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (50.0, 30.0));
        s.pass = Some(PassEvent {
            origin: s.ball,
            destination: (60.0, 40.0),
            completed: true,
            passer: 0,
            team_id: 1,
            minute: 10.0,
        });
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        // 45 degrees between velocity (1,0) and direction (10,10)
        let want = 10.0 / 200f64.sqrt();
        approx::assert_relative_eq!(gs.tensor.get(60, 40, CH_CARRIER_SIN), want, max_relative = 1e-12);
        approx::assert_relative_eq!(gs.tensor.get(60, 40, CH_CARRIER_COS), want, max_relative = 1e-12);
        // the passer's own cell stays empty
        assert_eq!(gs.tensor.get(50, 30, CH_CARRIER_SIN), 0.0);
        assert_eq!(gs.tensor.get(50, 30, CH_CARRIER_COS), 0.0);
    }

    #[test]
    fn stationary_carrier_leaves_angle_channels_zero() {
        let s = snapshot(
            vec![PlayerState::new(50.0, 30.0, 0.0, 0.0), PlayerState::new(60.0, 40.0, 0.0, 0.0)],
            vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)],
            (50.0, 30.0),
        );
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        assert_eq!(gs.tensor.get(60, 40, CH_CARRIER_SIN), 0.0);
        assert_eq!(gs.tensor.get(60, 40, CH_CARRIER_COS), 0.0);
    }

    #[test]
    fn carrier_defaults_to_attacker_nearest_the_ball() {
        let s = snapshot(
            vec![PlayerState::new(10.0, 10.0, 1.0, 1.0), PlayerState::new(49.0, 30.0, 2.0, 0.0)],
            vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)],
            (50.0, 30.0),
        );
        assert_eq!(s.carrier(), 1);
    }

    #[test]
    fn scaling_divides_distances_and_velocities_only() {
        let s = snapshot(vec![PlayerState::new(10.2, 30.7, 5.0, -5.0)], vec![PlayerState::new(80.0, 40.0, 2.0, 0.0)], (62.5, 30.5));
        let gs = build_channels(&s, &ChannelConfig::default()).unwrap();
        let cos_before = gs.tensor.get(40, 10, CH_ANGLE_COS);
        let scaled = scale_channels(gs);
        // ball 52 m from cell (10, 30)'s center: 0.5 after scaling
        approx::assert_relative_eq!(scaled.tensor.get(10, 30, CH_DIST_BALL), 0.5, max_relative = 1e-12);
        assert_eq!(scaled.tensor.get(10, 30, CH_ATT_VX), 0.5);
        assert_eq!(scaled.tensor.get(10, 30, CH_ATT_VY), -0.5);
        assert_eq!(scaled.tensor.get(10, 30, CH_ATT_OCC), 1.0);
        assert_eq!(scaled.tensor.get(40, 10, CH_ANGLE_COS), cos_before);
    }

    #[test]
    fn model_input_is_built_then_scaled() {
        let s = snapshot(
            vec![PlayerState::new(10.2, 30.7, 5.0, -5.0)],
            vec![PlayerState::new(80.0, 40.0, 2.0, 0.0)],
            (62.5, 30.5),
        );
        let direct = model_input(&s, &ChannelConfig::default()).unwrap();
        let two_step = scale_channels(build_channels(&s, &ChannelConfig::default()).unwrap());
        assert_eq!(direct.tensor.data(), two_step.tensor.data());
        // every distance cell lands in the scaled range, none in meters
        for ix in 0..GRID_NX {
            for iy in 0..GRID_NY {
                let d = direct.tensor.get(ix, iy, CH_DIST_BALL);
                assert!((0.0..=1.2).contains(&d), "scaled ball distance {d} at ({ix},{iy})");
            }
        }
    }

    #[test]
    fn reflecting_the_snapshot_reflects_the_channels() {
        let mut rng = seeded_rng(23, 0);
        let mut checked = 0;
        while checked < 10 {
            let s = random_snapshot(&mut rng);
            if !collision_free(&s) {
                continue;
            }
            checked += 1;
            let cfg = ChannelConfig::default();
            let a = build_channels(&s, &cfg).unwrap();
            let b = build_channels(&s.clone().point_reflect(), &cfg).unwrap();
            for ix in 0..104 {
                for iy in 0..68 {
                    let (rx, ry) = (103 - ix, 67 - iy);
                    // sparse: occupancy moves, velocities negate
                    assert_eq!(b.tensor.get(rx, ry, CH_ATT_OCC), a.tensor.get(ix, iy, CH_ATT_OCC));
                    assert_eq!(b.tensor.get(rx, ry, CH_ATT_VX), -a.tensor.get(ix, iy, CH_ATT_VX));
                    assert_eq!(b.tensor.get(rx, ry, CH_DEF_VY), -a.tensor.get(ix, iy, CH_DEF_VY));
                    // dense: distances and relative angles carry over
                    approx::assert_abs_diff_eq!(
                        b.tensor.get(rx, ry, CH_DIST_BALL),
                        a.tensor.get(ix, iy, CH_DIST_BALL),
                        epsilon = 1e-9
                    );
                    approx::assert_abs_diff_eq!(
                        b.tensor.get(rx, ry, CH_DIST_GOAL),
                        a.tensor.get(ix, iy, CH_DIST_GOAL),
                        epsilon = 1e-9
                    );
                    approx::assert_abs_diff_eq!(
                        b.tensor.get(rx, ry, CH_ANGLE_SIN),
                        a.tensor.get(ix, iy, CH_ANGLE_SIN),
                        epsilon = 1e-9
                    );
                    approx::assert_abs_diff_eq!(
                        b.tensor.get(rx, ry, CH_ANGLE_COS),
                        a.tensor.get(ix, iy, CH_ANGLE_COS),
                        epsilon = 1e-9
                    );
                    // bearings rotate by half a turn
                    let (ba, aa) = (b.tensor.get(rx, ry, CH_GOAL_ANGLE), a.tensor.get(ix, iy, CH_GOAL_ANGLE));
                    approx::assert_abs_diff_eq!(ba.sin(), -aa.sin(), epsilon = 1e-9);
                    approx::assert_abs_diff_eq!(ba.cos(), -aa.cos(), epsilon = 1e-9);
                    // carrier angles are reflection-invariant
                    approx::assert_abs_diff_eq!(
                        b.tensor.get(rx, ry, CH_CARRIER_SIN),
                        a.tensor.get(ix, iy, CH_CARRIER_SIN),
                        epsilon = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn validation_rejects_contract_violations() {
        let ok = snapshot(vec![PlayerState::new(10.0, 10.0, 0.0, 0.0)], vec![PlayerState::new(80.0, 40.0, 0.0, 0.0)], (50.0, 30.0));
        assert!(ok.validate().is_ok());

        let mut empty = ok.clone();
        empty.attackers.clear();
        assert!(matches!(empty.validate(), Err(ChannelError::TeamSize { team: "attackers", n: 0 })));

        let mut crowded = ok.clone();
        crowded.defenders = vec![PlayerState::new(50.0, 30.0, 0.0, 0.0); 12];
        assert!(matches!(crowded.validate(), Err(ChannelError::TeamSize { team: "defenders", n: 12 })));

        let mut outside = ok.clone();
        outside.attackers[0].x = 105.0;
        assert!(matches!(outside.validate(), Err(ChannelError::OutOfBounds { what: "player", .. })));

        let mut lost_ball = ok.clone();
        lost_ball.ball = (-1.0, 30.0);
        assert!(matches!(lost_ball.validate(), Err(ChannelError::OutOfBounds { what: "ball", .. })));

        let mut bad_pass = ok.clone();
        bad_pass.pass = Some(PassEvent {
            origin: (50.0, 30.0),
            destination: (200.0, 30.0),
            completed: true,
            passer: 0,
            team_id: 1,
            minute: 5.0,
        });
        assert!(matches!(bad_pass.validate(), Err(ChannelError::OutOfBounds { what: "pass destination", .. })));

        let mut bad_passer = ok.clone();
        bad_passer.pass = Some(PassEvent {
            origin: (50.0, 30.0),
            destination: (60.0, 30.0),
            completed: true,
            passer: 5,
            team_id: 1,
            minute: 5.0,
        });
        assert!(matches!(bad_passer.validate(), Err(ChannelError::PasserIndex { index: 5, attackers: 1 })));
    }

    #[test]
    fn cells_clamp_to_the_grid() {
        assert_eq!(cell_of(10.2, 30.7), (10, 30));
        assert_eq!(cell_of(0.0, 0.0), (0, 0));
        assert_eq!(cell_of(104.0, 68.0), (103, 67));
        assert_eq!(cell_of(-3.0, 200.0), (0, 67));
        assert_eq!(cell_center(10, 30), (10.5, 30.5));
    }
}
