//! FPQA machine model: SLM trap grid, AOD line grid, movement legality and
//! Rydberg coupling.
//!
//! Lengths are in units of the Rydberg radius. SLM site `(row, col)` sits at
//! `x = col * site_spacing`, `y = row * site_spacing`. An AOD is described by
//! the y coordinate of each row and the x coordinate of each column; an atom
//! held at crossing `(r, c)` is at `(col_x[c], row_y[r])`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// SLM trap coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub row: u32,
    pub col: u32,
}

impl Site {
    pub fn new(row: u32, col: u32) -> Site {
        Site { row, col }
    }

    /// Dominance order: `self` is upper-left of (or equal to) `other`.
    pub fn dominated_by(self, other: Site) -> bool {
        self.row <= other.row && self.col <= other.col
    }
}

/// AOD grid crossing (row line, column line).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Crossing {
    pub row: u32,
    pub col: u32,
}

impl Crossing {
    pub fn new(row: u32, col: u32) -> Crossing {
        Crossing { row, col }
    }

    pub fn diagonal(k: u32) -> Crossing {
        Crossing { row: k, col: k }
    }
}

/// Physical atom identity: data qubits sit in SLM traps, ancillas on AOD
/// crossings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomId {
    Data(u32),
    Ancilla(u32),
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomId::Data(q) => write!(f, "q{q}"),
            AtomId::Ancilla(a) => write!(f, "a{a}"),
        }
    }
}

/// Machine geometry. Invariants are enforced by [`FpqaConfig::validate`],
/// which deserialization also runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigRepr")]
pub struct FpqaConfig {
    pub slm_rows: u32,
    pub slm_cols: u32,
    pub aod_rows: u32,
    pub aod_cols: u32,
    pub site_spacing: f64,
    pub rydberg_radius: f64,
    pub separation_factor: f64,
    pub interaction_offset: f64,
}

pub const DEFAULT_SPACING: f64 = 2.6;
pub const DEFAULT_SEPARATION: f64 = 2.5;
pub const DEFAULT_OFFSET: f64 = 0.5;

#[derive(Deserialize)]
struct ConfigRepr {
    slm_rows: u32,
    slm_cols: u32,
    aod_rows: u32,
    aod_cols: u32,
    #[serde(default = "default_spacing")]
    site_spacing: f64,
    #[serde(default = "default_radius")]
    rydberg_radius: f64,
    #[serde(default = "default_separation")]
    separation_factor: f64,
    #[serde(default = "default_offset")]
    interaction_offset: f64,
}

fn default_spacing() -> f64 {
    DEFAULT_SPACING
}
fn default_radius() -> f64 {
    1.0
}
fn default_separation() -> f64 {
    DEFAULT_SEPARATION
}
fn default_offset() -> f64 {
    DEFAULT_OFFSET
}

impl TryFrom<ConfigRepr> for FpqaConfig {
    type Error = Error;

    fn try_from(r: ConfigRepr) -> Result<FpqaConfig> {
        let cfg = FpqaConfig {
            slm_rows: r.slm_rows,
            slm_cols: r.slm_cols,
            aod_rows: r.aod_rows,
            aod_cols: r.aod_cols,
            site_spacing: r.site_spacing,
            rydberg_radius: r.rydberg_radius,
            separation_factor: r.separation_factor,
            interaction_offset: r.interaction_offset,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Default for FpqaConfig {
    fn default() -> FpqaConfig {
        FpqaConfig::with_grid(16, 16)
    }
}

impl FpqaConfig {
    /// An SLM grid of `rows x cols` with an AOD large enough for every
    /// router: one ancilla per data qubit, and at least `rows + cols`
    /// diagonal crossings.
    pub fn with_grid(rows: u32, cols: u32) -> FpqaConfig {
        let aod = (rows * cols).max(rows + cols);
        FpqaConfig {
            slm_rows: rows,
            slm_cols: cols,
            aod_rows: aod,
            aod_cols: aod,
            site_spacing: DEFAULT_SPACING,
            rydberg_radius: 1.0,
            separation_factor: DEFAULT_SEPARATION,
            interaction_offset: DEFAULT_OFFSET,
        }
    }

    /// Rectangular array of the given width holding `n_qubits` in reading
    /// order.
    pub fn for_qubits(n_qubits: u32, width: u32) -> FpqaConfig {
        let width = width.max(1);
        let rows = n_qubits.div_ceil(width).max(1);
        let mut cfg = FpqaConfig::with_grid(rows, width);
        let aod = n_qubits.max(rows + width);
        cfg.aod_rows = aod;
        cfg.aod_cols = aod;
        cfg
    }

    /// Near-square array for `n_qubits`.
    pub fn square_for(n_qubits: u32) -> FpqaConfig {
        let mut w = 1;
        while w * w < n_qubits {
            w += 1;
        }
        FpqaConfig::for_qubits(n_qubits, w)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.slm_rows == 0 || self.slm_cols == 0 {
            return bad(format!("empty SLM grid {}x{}", self.slm_rows, self.slm_cols));
        }
        if !(self.rydberg_radius > 0.0) {
            return bad(format!("rydberg radius {} must be positive", self.rydberg_radius));
        }
        if !(self.separation_factor >= 1.0) {
            return bad(format!("separation factor {} below 1", self.separation_factor));
        }
        if !(self.site_spacing > self.separation_factor * self.rydberg_radius) {
            return bad(format!(
                "site spacing {} must exceed separation {} x radius {}",
                self.site_spacing, self.separation_factor, self.rydberg_radius
            ));
        }
        if !(self.interaction_offset > 0.0 && self.interaction_offset < self.rydberg_radius) {
            return bad(format!(
                "interaction offset {} must lie in (0, {})",
                self.interaction_offset, self.rydberg_radius
            ));
        }
        Ok(())
    }

    pub fn slm_capacity(&self) -> usize {
        self.slm_rows as usize * self.slm_cols as usize
    }

    /// Ancillas that fit on the AOD diagonal.
    pub fn diagonal_capacity(&self) -> usize {
        self.aod_rows.min(self.aod_cols) as usize
    }

    pub fn separation_distance(&self) -> f64 {
        self.separation_factor * self.rydberg_radius
    }

    pub fn site_position(&self, site: Site) -> (f64, f64) {
        (site.col as f64 * self.site_spacing, site.row as f64 * self.site_spacing)
    }

    /// Largest x coordinate of an SLM column.
    pub fn x_extent(&self) -> f64 {
        (self.slm_cols - 1) as f64 * self.site_spacing
    }

    /// Largest y coordinate of an SLM row.
    pub fn y_extent(&self) -> f64 {
        (self.slm_rows - 1) as f64 * self.site_spacing
    }

    /// Length used to normalise move distances: the SLM array diagonal, or
    /// one site spacing for a single-site array.
    pub fn array_diagonal(&self) -> f64 {
        let d = libm::hypot(self.x_extent(), self.y_extent());
        if d > 0.0 {
            d
        } else {
            self.site_spacing
        }
    }

    /// Per-axis offset bound used when parking an ancilla beside its partner.
    ///
    /// An ancilla displaced by at most `m` on each axis from its partner site
    /// stays within the radius when `m·√2 < r_b`, and stays clear of every
    /// other SLM atom and every other parked ancilla when
    /// `spacing - 2m > separation · r_b`. The returned value is 80% of the
    /// supremum of both bounds, capped by `interaction_offset`.
    pub fn parking_offset(&self) -> Result<f64> {
        self.validate()?;
        let radial = self.rydberg_radius / core::f64::consts::SQRT_2;
        let clearance = (self.site_spacing - self.separation_distance()) / 2.0;
        let m = 0.8 * radial.min(clearance);
        if !(m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "no parking offset satisfies radius {} and spacing {}",
                self.rydberg_radius, self.site_spacing
            )));
        }
        Ok(m.min(self.interaction_offset))
    }
}

/// AOD line coordinates. Rows and columns may never cross or coincide, so
/// both vectors are strictly increasing in any legal state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AodState {
    pub row_y: Vec<f64>,
    pub col_x: Vec<f64>,
}

impl AodState {
    /// All lines parked below and to the right of the SLM array, one site
    /// spacing apart.
    pub fn parked(cfg: &FpqaConfig) -> AodState {
        let s = cfg.site_spacing;
        AodState {
            row_y: (0..cfg.aod_rows).map(|i| cfg.y_extent() + (2 + i) as f64 * s).collect(),
            col_x: (0..cfg.aod_cols).map(|j| cfg.x_extent() + (2 + j) as f64 * s).collect(),
        }
    }

    pub fn position(&self, c: Crossing) -> (f64, f64) {
        (self.col_x[c.col as usize], self.row_y[c.row as usize])
    }

    pub fn contains(&self, c: Crossing) -> bool {
        (c.row as usize) < self.row_y.len() && (c.col as usize) < self.col_x.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineAxis {
    Row,
    Column,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MoveViolation {
    Dimension {
        rows: (usize, usize),
        cols: (usize, usize),
    },
    /// Lines `first < second` end up out of order or coincident.
    Order {
        axis: LineAxis,
        first: usize,
        second: usize,
    },
}

impl fmt::Display for MoveViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveViolation::Dimension { rows, cols } => {
                write!(f, "AOD dimension changed from {}x{} to {}x{}", rows.0, cols.0, rows.1, cols.1)
            }
            MoveViolation::Order { axis, first, second } => {
                write!(f, "{axis:?} lines {first} and {second} cross or coincide")
            }
        }
    }
}

/// Checks an AOD transition. `before` is assumed legal; the move is legal iff
/// `after` keeps both line sets strictly increasing.
pub fn check_move(before: &AodState, after: &AodState) -> core::result::Result<(), MoveViolation> {
    if before.row_y.len() != after.row_y.len() || before.col_x.len() != after.col_x.len() {
        return Err(MoveViolation::Dimension {
            rows: (before.row_y.len(), after.row_y.len()),
            cols: (before.col_x.len(), after.col_x.len()),
        });
    }
    check_lines(&after.row_y, LineAxis::Row)?;
    check_lines(&after.col_x, LineAxis::Column)
}

fn check_lines(coords: &[f64], axis: LineAxis) -> core::result::Result<(), MoveViolation> {
    for (i, w) in coords.windows(2).enumerate() {
        // written so that NaN also fails
        if !(w[0] < w[1]) {
            return Err(MoveViolation::Order { axis, first: i, second: i + 1 });
        }
    }
    Ok(())
}

/// Where every atom sits: data qubits on SLM sites, live ancillas on AOD
/// crossings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomLayout {
    /// SLM site of data qubit `q` at index `q`.
    pub slm_atoms: Vec<Site>,
    pub aod_atoms: BTreeMap<u32, Crossing>,
}

impl AtomLayout {
    pub fn n_qubits(&self) -> u32 {
        self.slm_atoms.len() as u32
    }

    pub fn site(&self, q: u32) -> Site {
        self.slm_atoms[q as usize]
    }
}

/// Maps qubit `q` to site `(q / slm_cols, q % slm_cols)`.
pub fn reading_order_mapping(n_qubits: u32, cfg: &FpqaConfig) -> Result<AtomLayout> {
    if n_qubits as usize > cfg.slm_capacity() {
        return Err(Error::Capacity { needed: n_qubits as usize, capacity: cfg.slm_capacity() });
    }
    Ok(AtomLayout {
        slm_atoms: (0..n_qubits).map(|q| Site::new(q / cfg.slm_cols, q % cfg.slm_cols)).collect(),
        aod_atoms: BTreeMap::new(),
    })
}

/// Pairs of atoms classified by distance under a global Rydberg pulse.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RydbergPairs {
    /// Within the radius: these interact.
    pub coupled: BTreeSet<(AtomId, AtomId)>,
    /// Outside the radius but within the separation distance: forbidden
    /// while the laser is on.
    pub violations: BTreeSet<(AtomId, AtomId)>,
}

pub fn ordered_pair(a: AtomId, b: AtomId) -> (AtomId, AtomId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Classifies every atom pair: coupled when the distance is at most `r_b`,
/// a violation when it lies in `(r_b, separation · r_b]`.
///
/// Sweeps atoms in x order, so the cost is proportional to the number of
/// pairs whose x gap is within the separation distance.
pub fn rydberg_pairs(positions: &[(AtomId, f64, f64)], cfg: &FpqaConfig) -> RydbergPairs {
    let rb = cfg.rydberg_radius;
    let sep = cfg.separation_distance();
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&i, &j| positions[i].1.total_cmp(&positions[j].1));
    let mut out = RydbergPairs::default();
    for (k, &i) in order.iter().enumerate() {
        let (a, xa, ya) = positions[i];
        for &j in &order[k + 1..] {
            let (b, xb, yb) = positions[j];
            if xb - xa > sep {
                break;
            }
            let d = libm::hypot(xb - xa, yb - ya);
            if d <= rb {
                out.coupled.insert(ordered_pair(a, b));
            } else if d <= sep {
                out.violations.insert(ordered_pair(a, b));
            }
        }
    }
    out
}

/// Movement time `t0 · √D` for a normalised distance `D`.
pub fn move_duration(max_distance: f64, t0: f64) -> Result<f64> {
    if max_distance < 0.0 || max_distance.is_nan() {
        return Err(Error::NegativeDistance(max_distance));
    }
    Ok(t0 * libm::sqrt(max_distance))
}

/// Spreads non-decreasing base coordinates into strictly increasing ones.
///
/// Runs of equal bases are fanned out evenly over `[-m, m]`; a value with no
/// tie is shifted by `single`. Distinct bases must differ by more than `2m`.
pub(crate) fn spread_ties(bases: &[f64], m: f64, single: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(bases.len());
    let mut start = 0;
    while start < bases.len() {
        let mut end = start + 1;
        while end < bases.len() && bases[end] == bases[start] {
            end += 1;
        }
        let run = end - start;
        if run == 1 {
            out.push(bases[start] + single);
        } else {
            let step = 2.0 * m / (run - 1) as f64;
            for i in 0..run {
                out.push(bases[start] - m + step * i as f64);
            }
        }
        start = end;
    }
    out
}

/// Fills unplaced AOD lines so the whole axis is strictly increasing.
///
/// `placed` must have its `Some` entries contiguous and increasing. Lines
/// before them are parked below `min(first, 0) - 2s`, lines after above
/// `max(last, extent) + 2s`, one spacing apart, which keeps them clear of
/// the SLM array.
pub(crate) fn complete_lines(placed: &[Option<f64>], extent: f64, spacing: f64) -> Vec<f64> {
    let first = placed.iter().position(Option::is_some);
    let last = placed.iter().rposition(Option::is_some);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => return (0..placed.len()).map(|i| extent + (2 + i) as f64 * spacing).collect(),
    };
    let lo = placed[first].unwrap().min(0.0) - 2.0 * spacing;
    let hi = placed[last].unwrap().max(extent) + 2.0 * spacing;
    placed
        .iter()
        .enumerate()
        .map(|(i, p)| match *p {
            Some(v) => v,
            None if i < first => lo - (first - 1 - i) as f64 * spacing,
            None => {
                debug_assert!(i > last, "gap inside placed AOD lines");
                hi + (i - last - 1) as f64 * spacing
            }
        })
        .collect()
}
