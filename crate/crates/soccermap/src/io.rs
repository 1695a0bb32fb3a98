//! File formats: line-delimited tracking records, surface files (plain text
//! plus an 8-bit graymap image), and flat `key=value` configuration.
//!
//! Both round-trippable formats print floats with Rust's shortest-exact
//! formatting, so `parse(serialize(x)) == x` holds bit-for-bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autograd::GridTensor;
use crate::channels::{PassEvent, PlayerState, TrackingSnapshot};
use crate::network::{Surface, SurfaceKind};

/// Failures while reading or writing artifact files.
#[derive(Debug)]
pub enum IoError {
    /// Operating-system level failure, tagged with the path involved.
    File { path: PathBuf, source: std::io::Error },
    /// A line (1-based) of an input file could not be interpreted.
    Parse { line: usize, message: String },
    /// Strict-mode rejection: fields no reader of this format understands.
    UnknownFields { line: usize, fields: Vec<String> },
    /// The in-memory value cannot be expressed in the file format.
    Unrepresentable(String),
    /// A required configuration key is absent.
    MissingKey(String),
    /// A configuration value failed to parse as the requested type.
    BadValue { key: String, value: String, expected: &'static str },
}

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IoError::File { path, source } => {
                write!(f, "{}: {}", path.display(), source)
            }
            IoError::Parse { line, message } => write!(f, "line {line}: {message}"),
            IoError::UnknownFields { line, fields } => {
                write!(f, "line {line}: unknown fields: {}", fields.join(", "))
            }
            IoError::Unrepresentable(msg) => write!(f, "cannot serialize: {msg}"),
            IoError::MissingKey(key) => write!(f, "config key `{key}` is required"),
            IoError::BadValue { key, value, expected } => {
                write!(f, "config key `{key}`: `{value}` is not a valid {expected}")
            }
        }
    }
}

impl std::error::Error for IoError {}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File { path: path.to_path_buf(), source }
}

/// Read a whole text file, tagging any failure with the path.
pub fn read_text_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(file_err(path))
}

/// Write a whole text file, creating parent directories as needed.
pub fn write_text_file(path: &Path, contents: &str) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(file_err(path))?;
        }
    }
    std::fs::write(path, contents).map_err(file_err(path))
}

// ---------------------------------------------------------------------------
// Tracking records: one JSON object per line.
// ---------------------------------------------------------------------------

const DIRECTION_LTR: &str = "left_to_right";
const DIRECTION_RTL: &str = "right_to_left";

const SNAPSHOT_KEYS: [&str; 7] =
    ["match_id", "t", "attack_direction", "attackers", "defenders", "ball", "pass"];
const PLAYER_KEYS: [&str; 4] = ["x", "y", "vx", "vy"];
const PASS_KEYS: [&str; 5] = ["dest", "outcome", "passer_id", "team_id", "minute"];

#[derive(Serialize, Deserialize)]
struct PlayerRecord {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
}

#[derive(Serialize, Deserialize)]
struct PassRecord {
    dest: (f64, f64),
    outcome: bool,
    passer_id: usize,
    team_id: u32,
    minute: f64,
}

#[derive(Serialize, Deserialize)]
struct SnapshotRecord {
    match_id: String,
    t: f64,
    attack_direction: String,
    attackers: Vec<PlayerRecord>,
    defenders: Vec<PlayerRecord>,
    ball: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<PassRecord>,
}

fn player_to_record(p: &PlayerState) -> PlayerRecord {
    PlayerRecord { x: p.x, y: p.y, vx: p.vx, vy: p.vy }
}

fn record_to_player(r: &PlayerRecord) -> PlayerState {
    PlayerState::new(r.x, r.y, r.vx, r.vy)
}

fn snapshot_to_record(snap: &TrackingSnapshot) -> Result<SnapshotRecord, IoError> {
    let pass = match &snap.pass {
        None => None,
        Some(p) => {
            // The record format stores the pass origin only once, as the ball
            // position, so an origin elsewhere would not survive a round trip.
            if p.origin != snap.ball {
                return Err(IoError::Unrepresentable(format!(
                    "pass origin ({}, {}) differs from ball position ({}, {})",
                    p.origin.0, p.origin.1, snap.ball.0, snap.ball.1
                )));
            }
            Some(PassRecord {
                dest: p.destination,
                outcome: p.completed,
                passer_id: p.passer,
                team_id: p.team_id,
                minute: p.minute,
            })
        }
    };
    Ok(SnapshotRecord {
        match_id: snap.match_id.clone(),
        t: snap.t,
        attack_direction: if snap.attack_left_to_right { DIRECTION_LTR } else { DIRECTION_RTL }
            .to_string(),
        attackers: snap.attackers.iter().map(player_to_record).collect(),
        defenders: snap.defenders.iter().map(player_to_record).collect(),
        ball: snap.ball,
        pass,
    })
}

fn record_to_snapshot(rec: SnapshotRecord, line: usize) -> Result<TrackingSnapshot, IoError> {
    let attack_left_to_right = match rec.attack_direction.as_str() {
        DIRECTION_LTR => true,
        DIRECTION_RTL => false,
        other => {
            return Err(IoError::Parse {
                line,
                message: format!(
                    "attack_direction must be `{DIRECTION_LTR}` or `{DIRECTION_RTL}`, got `{other}`"
                ),
            })
        }
    };
    let pass = rec.pass.map(|p| PassEvent {
        origin: rec.ball,
        destination: p.dest,
        completed: p.outcome,
        passer: p.passer_id,
        team_id: p.team_id,
        minute: p.minute,
    });
    Ok(TrackingSnapshot {
        match_id: rec.match_id,
        t: rec.t,
        attack_left_to_right,
        attackers: rec.attackers.iter().map(record_to_player).collect(),
        defenders: rec.defenders.iter().map(record_to_player).collect(),
        ball: rec.ball,
        pass,
    })
}

/// Collect dotted paths of object keys this format does not define.
fn unknown_fields(value: &serde_json::Value) -> Vec<String> {
    fn scan_object(
        obj: &serde_json::Map<String, serde_json::Value>,
        known: &[&str],
        prefix: &str,
        out: &mut Vec<String>,
    ) {
        for key in obj.keys() {
            if !known.contains(&key.as_str()) {
                out.push(format!("{prefix}{key}"));
            }
        }
    }

    let mut out = Vec::new();
    let Some(obj) = value.as_object() else { return out };
    scan_object(obj, &SNAPSHOT_KEYS, "", &mut out);
    for team in ["attackers", "defenders"] {
        if let Some(players) = obj.get(team).and_then(|v| v.as_array()) {
            for (i, player) in players.iter().enumerate() {
                if let Some(p) = player.as_object() {
                    scan_object(p, &PLAYER_KEYS, &format!("{team}[{i}]."), &mut out);
                }
            }
        }
    }
    if let Some(pass) = obj.get("pass").and_then(|v| v.as_object()) {
        scan_object(pass, &PASS_KEYS, "pass.", &mut out);
    }
    out
}

/// Serialize snapshots as line-delimited records.
pub fn tracking_to_string(snapshots: &[TrackingSnapshot]) -> Result<String, IoError> {
    let mut out = String::new();
    for snap in snapshots {
        let record = snapshot_to_record(snap)?;
        let json = serde_json::to_string(&record)
            .map_err(|e| IoError::Unrepresentable(e.to_string()))?;
        out.push_str(&json);
        out.push('\n');
    }
    Ok(out)
}

/// Parse line-delimited tracking records.
///
/// In strict mode any field outside the format definition is an error; in
/// permissive mode such fields are dropped and reported in the returned
/// warning list. Blank lines are skipped.
pub fn tracking_from_str(
    text: &str,
    strict: bool,
) -> Result<(Vec<TrackingSnapshot>, Vec<String>), IoError> {
    let mut snapshots = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(raw)
            .map_err(|e| IoError::Parse { line, message: format!("invalid record: {e}") })?;
        let extra = unknown_fields(&value);
        if !extra.is_empty() {
            if strict {
                return Err(IoError::UnknownFields { line, fields: extra });
            }
            warnings.push(format!("line {line}: ignoring unknown fields: {}", extra.join(", ")));
        }
        let record: SnapshotRecord = serde_json::from_value(value)
            .map_err(|e| IoError::Parse { line, message: format!("invalid record: {e}") })?;
        snapshots.push(record_to_snapshot(record, line)?);
    }
    Ok((snapshots, warnings))
}

/// Write snapshots to a tracking file.
pub fn write_tracking(path: &Path, snapshots: &[TrackingSnapshot]) -> Result<(), IoError> {
    write_text_file(path, &tracking_to_string(snapshots)?)
}

/// Read a tracking file; see [`tracking_from_str`] for strictness semantics.
pub fn read_tracking(
    path: &Path,
    strict: bool,
) -> Result<(Vec<TrackingSnapshot>, Vec<String>), IoError> {
    tracking_from_str(&read_text_file(path)?, strict)
}

// ---------------------------------------------------------------------------
// Surface files: a text grid and a matching graymap image.
// ---------------------------------------------------------------------------

fn kind_from_str(s: &str) -> Option<SurfaceKind> {
    match s {
        "probability" => Some(SurfaceKind::Probability),
        "selection_likelihood" => Some(SurfaceKind::SelectionLikelihood),
        "value" => Some(SurfaceKind::Value),
        _ => None,
    }
}

fn grid_min_max(grid: &GridTensor<f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in grid.data() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Iterate grid values in file order: the far touchline (largest y) is the
/// first row, so text rows and image rows read like a pitch seen from above.
fn rows_top_down(grid: &GridTensor<f64>) -> impl Iterator<Item = (usize, usize)> + '_ {
    let (nx, ny, _) = grid.shape();
    (0..ny).rev().flat_map(move |iy| (0..nx).map(move |ix| (ix, iy)))
}

/// Render a surface as a self-describing text grid.
///
/// Header lines are `key: value`; the body holds `ny` rows of `nx` numbers,
/// top row = far touchline. `l` and `h` record the grid's min and max.
pub fn surface_to_text(surface: &Surface) -> String {
    let (nx, ny, _) = surface.grid.shape();
    let (lo, hi) = grid_min_max(&surface.grid);
    let mut out = String::new();
    let _ = writeln!(out, "kind: {}", surface.kind);
    let _ = writeln!(out, "source: {}", surface.source);
    let _ = writeln!(out, "l: {lo}");
    let _ = writeln!(out, "h: {hi}");
    let _ = writeln!(out, "grid: {nx} {ny}");
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            if ix > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", surface.grid.get(ix, iy, 0));
        }
        out.push('\n');
    }
    out
}

/// Parse a surface text file produced by [`surface_to_text`].
///
/// The recorded `l`/`h` must equal the body's min and max exactly; a mismatch
/// means the file was edited or truncated.
pub fn surface_from_text(text: &str) -> Result<Surface, IoError> {
    let mut lines = text.lines().enumerate();
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut grid_dims = None;
    for (idx, raw) in lines.by_ref() {
        let line = idx + 1;
        let Some((key, value)) = raw.split_once(':') else {
            return Err(IoError::Parse { line, message: format!("expected `key: value`, got `{raw}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "grid" {
            let dims: Vec<&str> = value.split_whitespace().collect();
            let parsed = (dims.len() == 2)
                .then(|| Some((dims[0].parse::<usize>().ok()?, dims[1].parse::<usize>().ok()?)))
                .flatten();
            match parsed {
                Some((nx, ny)) if nx > 0 && ny > 0 => grid_dims = Some((nx, ny)),
                _ => {
                    return Err(IoError::Parse {
                        line,
                        message: format!("grid header must be two positive integers, got `{value}`"),
                    })
                }
            }
            break;
        }
        header.insert(key.to_string(), value.to_string());
    }
    let Some((nx, ny)) = grid_dims else {
        return Err(IoError::Parse { line: 1, message: "missing `grid: nx ny` header".into() });
    };
    let field = |name: &str| {
        header
            .get(name)
            .cloned()
            .ok_or_else(|| IoError::Parse { line: 1, message: format!("missing `{name}:` header") })
    };
    let kind_text = field("kind")?;
    let kind = kind_from_str(&kind_text).ok_or_else(|| IoError::Parse {
        line: 1,
        message: format!("unknown surface kind `{kind_text}`"),
    })?;
    let source = field("source")?;
    let parse_float = |name: &str, text: String| {
        text.parse::<f64>().map_err(|_| IoError::Parse {
            line: 1,
            message: format!("header `{name}` is not a number: `{text}`"),
        })
    };
    let lo = parse_float("l", field("l")?)?;
    let hi = parse_float("h", field("h")?)?;

    let mut grid = GridTensor::zeros(nx, ny, 1);
    let mut rows_read = 0;
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if rows_read >= ny {
            return Err(IoError::Parse { line, message: format!("more than {ny} grid rows") });
        }
        let iy = ny - 1 - rows_read;
        let mut count = 0;
        for cell in raw.split_whitespace() {
            if count >= nx {
                break;
            }
            let v = cell.parse::<f64>().map_err(|_| IoError::Parse {
                line,
                message: format!("grid cell is not a number: `{cell}`"),
            })?;
            grid.set(count, iy, 0, v);
            count += 1;
        }
        if count != nx {
            return Err(IoError::Parse {
                line,
                message: format!("grid row has {count} cells; expected {nx}"),
            });
        }
        rows_read += 1;
    }
    if rows_read != ny {
        return Err(IoError::Parse {
            line: 1,
            message: format!("grid has {rows_read} rows; expected {ny}"),
        });
    }
    let (actual_lo, actual_hi) = grid_min_max(&grid);
    if actual_lo != lo || actual_hi != hi {
        return Err(IoError::Parse {
            line: 1,
            message: format!(
                "header range [{lo}, {hi}] does not match grid range [{actual_lo}, {actual_hi}]"
            ),
        });
    }
    Ok(Surface { grid, kind, source })
}

/// Render a surface as a binary 8-bit graymap (`P5`) scaled to `[l, h]`.
///
/// Shares row order with [`surface_to_text`] so the two artifacts are views of
/// the same grid. A constant grid maps to all-black.
pub fn surface_to_pgm(surface: &Surface) -> Vec<u8> {
    let (nx, ny, _) = surface.grid.shape();
    let (lo, hi) = grid_min_max(&surface.grid);
    let span = hi - lo;
    let mut out = Vec::with_capacity(nx * ny + 128);
    let _ = write!(
        out,
        "P5\n# kind: {}\n# source: {}\n# l: {lo}\n# h: {hi}\n{nx} {ny}\n255\n",
        surface.kind, surface.source
    );
    for (ix, iy) in rows_top_down(&surface.grid) {
        let v = surface.grid.get(ix, iy, 0);
        let level = if span > 0.0 { ((v - lo) / span * 255.0).round() as u8 } else { 0 };
        out.push(level);
    }
    out
}

/// Write `<stem>.txt` and `<stem>.pgm` for one surface; returns both paths.
pub fn write_surface(stem: &Path, surface: &Surface) -> Result<(PathBuf, PathBuf), IoError> {
    let text_path = stem.with_extension("txt");
    let pgm_path = stem.with_extension("pgm");
    write_text_file(&text_path, &surface_to_text(surface))?;
    std::fs::write(&pgm_path, surface_to_pgm(surface)).map_err(file_err(&pgm_path))?;
    Ok((text_path, pgm_path))
}

// ---------------------------------------------------------------------------
// Flat key=value configuration.
// ---------------------------------------------------------------------------

/// Parsed `key=value` configuration file.
///
/// Blank lines and lines starting with `#` are skipped; keys and values are
/// trimmed; a repeated key is an error so typos cannot silently override.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, IoError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(IoError::Parse {
                    line,
                    message: format!("expected `key=value`, got `{trimmed}`"),
                });
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(IoError::Parse { line, message: "empty key".into() });
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(IoError::Parse { line, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(Config { entries })
    }

    pub fn from_file(path: &Path) -> Result<Config, IoError> {
        Config::parse(&read_text_file(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    /// Error on any key outside `known`, so misspelled settings surface
    /// instead of silently falling back to defaults.
    pub fn expect_known(&self, known: &[&str]) -> Result<(), IoError> {
        for key in self.entries.keys() {
            if !known.contains(&key.as_str()) {
                return Err(IoError::BadValue {
                    key: key.clone(),
                    value: self.entries[key].clone(),
                    expected: "known configuration key",
                });
            }
        }
        Ok(())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|v| v.as_str())
    }

    fn get_parsed<T: std::str::FromStr>(
        &self,
        key: &str,
        expected: &'static str,
    ) -> Result<Option<T>, IoError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| IoError::BadValue {
                key: key.to_string(),
                value: raw.clone(),
                expected,
            }),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, IoError> {
        self.get_parsed(key, "number")
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, IoError> {
        self.get_parsed(key, "unsigned integer")
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, IoError> {
        self.get_parsed(key, "unsigned integer")
    }

    pub fn get_u32(&self, key: &str) -> Result<Option<u32>, IoError> {
        self.get_parsed(key, "unsigned integer")
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, IoError> {
        self.get_parsed(key, "boolean (true/false)")
    }
}
