//! Vineyard geometry, infected-spot generation, and yield-map ingestion.
//!
//! The field is a set of parallel rows indexed `0..num_rows`. A position in
//! the field is a [`FieldPoint`]: a row index plus an along-row offset in
//! meters. The Cartesian frame places row `r`, offset `x` at
//! `origin + (r * row_spacing, x)` — the first axis steps across rows, the
//! second runs along them. Agents may only move along rows and across the two
//! headlands at `x = 0` and `x = row_length`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

use crate::error::{Error, Result};

/// Total area used to derive a row spacing when none is given: ten acres
/// expressed in square meters.
pub const TEN_ACRES_M2: f64 = 40_468.6;

/// Row spacing implied by the ten-acre total for a given row layout.
pub fn derived_spacing(num_rows: usize, row_length: f64) -> f64 {
    TEN_ACRES_M2 / (num_rows as f64 * row_length)
}

/// Row-structured field layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGeometry {
    num_rows: usize,
    row_length: f64,
    row_spacing: f64,
    origin: (f64, f64),
}

impl FieldGeometry {
    /// Builds a field; every dimension must be positive.
    pub fn new(num_rows: usize, row_length: f64, row_spacing: f64) -> Result<Self> {
        if num_rows < 1 {
            return Err(Error::InvalidGeometry("num_rows must be >= 1".into()));
        }
        if row_length.is_nan() || row_length <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "row_length must be positive (got {row_length})"
            )));
        }
        if row_spacing.is_nan() || row_spacing <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "row_spacing must be positive (got {row_spacing})"
            )));
        }
        Ok(Self {
            num_rows,
            row_length,
            row_spacing,
            origin: (0.0, 0.0),
        })
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn row_length(&self) -> f64 {
        self.row_length
    }

    pub fn row_spacing(&self) -> f64 {
        self.row_spacing
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    /// Total footprint in square meters (rows x length x spacing).
    pub fn area_m2(&self) -> f64 {
        self.num_rows as f64 * self.row_length * self.row_spacing
    }

    /// Cartesian position of a field point.
    pub fn cartesian(&self, p: FieldPoint) -> (f64, f64) {
        (
            self.origin.0 + p.row as f64 * self.row_spacing,
            self.origin.1 + p.x,
        )
    }

    /// Nearest valid field point to a Cartesian position: nearest row
    /// (ties round away from zero), along-row offset clamped to the row.
    pub fn nearest_point(&self, cart: (f64, f64)) -> FieldPoint {
        let row_f = (cart.0 - self.origin.0) / self.row_spacing;
        let row = row_f.round().max(0.0) as usize;
        let row = row.min(self.num_rows - 1);
        let x = (cart.1 - self.origin.1).clamp(0.0, self.row_length);
        FieldPoint { row, x }
    }

    /// Checks that a point lies on a row of this field.
    pub fn validate_point(&self, p: FieldPoint) -> Result<()> {
        if p.row >= self.num_rows {
            return Err(Error::InvalidPoint {
                row: p.row,
                x: p.x,
                reason: format!("row index out of range (field has {} rows)", self.num_rows),
            });
        }
        if !(0.0..=self.row_length).contains(&p.x) || p.x.is_nan() {
            return Err(Error::InvalidPoint {
                row: p.row,
                x: p.x,
                reason: format!("x outside [0, {}]", self.row_length),
            });
        }
        Ok(())
    }

    pub fn contains(&self, p: FieldPoint) -> bool {
        self.validate_point(p).is_ok()
    }
}

/// Built-in field layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPreset {
    /// 52 rows x 227 m, spacing 3.428 m (the default layout).
    Rows52x227,
    /// 75 rows x 200 m, spacing 2.698 m.
    Rows75x200,
}

impl FieldPreset {
    pub fn geometry(self) -> FieldGeometry {
        match self {
            FieldPreset::Rows52x227 => FieldGeometry::new(52, 227.0, 3.428),
            FieldPreset::Rows75x200 => FieldGeometry::new(75, 200.0, 2.698),
        }
        .expect("preset dimensions are valid")
    }
}

impl std::str::FromStr for FieldPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "52x227" => Ok(FieldPreset::Rows52x227),
            "75x200" => Ok(FieldPreset::Rows75x200),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// A location in the field: row index plus along-row position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub row: usize,
    pub x: f64,
}

impl FieldPoint {
    pub fn new(row: usize, x: f64) -> Self {
        Self { row, x }
    }

    /// (row, x) lexicographic order, used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &FieldPoint) -> std::cmp::Ordering {
        self.row
            .cmp(&other.row)
            .then(self.x.partial_cmp(&other.x).expect("x is never NaN"))
    }
}

/// Which side of the row a spot sits on, relative to the outbound
/// (increasing-x) travel direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Accessibility class of an infected spot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difficulty {
    /// Clearly visible and easily reachable.
    Easy,
    /// Partially hidden in the canopy; slower to reach.
    Difficult,
}

/// One infected location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spot {
    pub location: FieldPoint,
    pub side: Side,
    pub difficulty: Difficulty,
}

/// Draws `n` spots uniformly over the field. Rows, along-row positions and
/// sides are uniform; difficulty is Bernoulli(`p_difficult`). The output is a
/// pure function of `(field, n, p_difficult, seed)`.
pub fn generate_spots(field: &FieldGeometry, n: usize, p_difficult: f64, seed: u64) -> Vec<Spot> {
    assert!(
        (0.0..=1.0).contains(&p_difficult),
        "p_difficult must be in [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spots = Vec::with_capacity(n);
    for _ in 0..n {
        let row = rng.gen_range(0..field.num_rows());
        let x = rng.gen_range(0.0..field.row_length());
        let side = if rng.gen_bool(0.5) {
            Side::Left
        } else {
            Side::Right
        };
        let difficulty = if rng.gen_bool(p_difficult) {
            Difficulty::Difficult
        } else {
            Difficulty::Easy
        };
        spots.push(Spot {
            location: FieldPoint { row, x },
            side,
            difficulty,
        });
    }
    spots
}

/// Gridded yield values overlaying the field.
///
/// Grid rows follow the yield-file layout: CSV line 0 holds the northernmost
/// cells. North is the direction of increasing along-row offset, so cell
/// `(i, j)` is centered at
/// `grid_origin + ((j + 0.5) * cell_size, (rows - 1 - i + 0.5) * cell_size)`
/// in field Cartesian coordinates. Columns step across the vineyard rows.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldMap {
    cell_size: f64,
    grid: Vec<Vec<f64>>,
    grid_origin: (f64, f64),
}

impl YieldMap {
    /// Wraps an in-memory grid; it must be rectangular and non-empty, and the
    /// cell size positive.
    pub fn new(grid: Vec<Vec<f64>>, cell_size: f64, grid_origin: (f64, f64)) -> Result<Self> {
        if cell_size.is_nan() || cell_size <= 0.0 {
            return Err(Error::format(format!(
                "cell size must be positive (got {cell_size})"
            )));
        }
        if grid.is_empty() || grid[0].is_empty() {
            return Err(Error::format("yield grid is empty"));
        }
        let width = grid[0].len();
        for (i, row) in grid.iter().enumerate() {
            if row.len() != width {
                return Err(Error::format(format!(
                    "yield grid row {} has {} values, expected {}",
                    i + 1,
                    row.len(),
                    width
                )));
            }
        }
        Ok(Self {
            cell_size,
            grid,
            grid_origin,
        })
    }

    pub fn grid_rows(&self) -> usize {
        self.grid.len()
    }

    pub fn grid_cols(&self) -> usize {
        self.grid[0].len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.grid[i][j]
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn grid_origin(&self) -> (f64, f64) {
        self.grid_origin
    }

    pub fn set_grid_origin(&mut self, origin: (f64, f64)) {
        self.grid_origin = origin;
    }

    /// Cartesian center of cell `(i, j)`; row 0 is northernmost.
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let cx = self.grid_origin.0 + (j as f64 + 0.5) * self.cell_size;
        let cy =
            self.grid_origin.1 + ((self.grid_rows() - 1 - i) as f64 + 0.5) * self.cell_size;
        (cx, cy)
    }

    /// Replaces ordinal class values using a class -> yield table. Every cell
    /// must hold an integral class present in the table.
    pub fn map_classes(&self, table: &std::collections::BTreeMap<i64, f64>) -> Result<YieldMap> {
        let mut grid = Vec::with_capacity(self.grid_rows());
        for (i, row) in self.grid.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, &v) in row.iter().enumerate() {
                if v.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "yield cell ({}, {}) holds {v}, not an integral class",
                        i + 1,
                        j + 1
                    )));
                }
                let class = v as i64;
                match table.get(&class) {
                    Some(&mapped) => out.push(mapped),
                    None => {
                        return Err(Error::Config(format!(
                            "yield class {class} at cell ({}, {}) has no entry in class_values",
                            i + 1,
                            j + 1
                        )))
                    }
                }
            }
            grid.push(out);
        }
        YieldMap::new(grid, self.cell_size, self.grid_origin)
    }
}

/// Parses a yield grid from CSV text: one grid row per line, comma-separated
/// numeric values, line 1 northernmost. An optional first line
/// `#cell_size=<meters>` overrides the `cell_size` argument.
pub fn load_yield_map_str(contents: &str, cell_size: f64) -> Result<YieldMap> {
    let mut cell_size = cell_size;
    let mut grid: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut pending_blank: Option<usize> = None;

    for (idx, line) in contents.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            // Blank lines are only tolerated at the end of the file.
            pending_blank.get_or_insert(lineno);
            continue;
        }
        if let Some(blank) = pending_blank {
            return Err(Error::format_at(blank, "blank line inside yield grid"));
        }
        if line.starts_with('#') {
            if lineno != 1 {
                return Err(Error::format_at(lineno, "unexpected comment line"));
            }
            let value = line
                .strip_prefix("#cell_size=")
                .ok_or_else(|| Error::format_at(lineno, "header must be #cell_size=<meters>"))?;
            cell_size = value.trim().parse::<f64>().map_err(|_| {
                Error::format_at(lineno, format!("cannot parse cell size '{value}'"))
            })?;
            continue;
        }
        let mut row = Vec::new();
        for (j, tok) in line.split(',').enumerate() {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| {
                Error::format_at(lineno, format!("column {}: cannot parse '{tok}'", j + 1))
            })?;
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::format_at(
                    lineno,
                    format!("row has {} values, expected {w}", row.len()),
                ));
            }
            _ => {}
        }
        grid.push(row);
    }

    if cell_size.is_nan() || cell_size <= 0.0 {
        return Err(Error::format(format!(
            "cell size must be positive (got {cell_size})"
        )));
    }
    YieldMap::new(grid, cell_size, (0.0, 0.0))
}

/// Reads a yield grid file. See [`load_yield_map_str`] for the format.
pub fn load_yield_map(path: &Path, cell_size: f64) -> Result<YieldMap> {
    let contents = std::fs::read_to_string(path)?;
    load_yield_map_str(&contents, cell_size)
}

/// Representative point of one contiguous low-yield region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneEpicenter {
    /// Index after sorting zones by (row, x) of the epicenter.
    pub id: usize,
    pub center: FieldPoint,
    pub cell_count: usize,
}

/// Groups cells with `value <= threshold` into 4-connected components and
/// returns one epicenter per component: the centroid of its member cell
/// centers snapped to the nearest valid field point. Zones are ordered by
/// (row, x) of the epicenter.
pub fn extract_low_yield_zones(
    map: &YieldMap,
    threshold: f64,
    field: &FieldGeometry,
) -> Vec<ZoneEpicenter> {
    let rows = map.grid_rows();
    let cols = map.grid_cols();
    let id = |i: usize, j: usize| i * cols + j;

    // Union-find over qualifying cells; left/up unions make 4-connectivity.
    let mut parent: Vec<usize> = (0..rows * cols).collect();
    fn find(parent: &mut [usize], a: usize) -> usize {
        let mut a = a;
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    let low = |i: usize, j: usize| map.value(i, j) <= threshold;

    for i in 0..rows {
        for j in 0..cols {
            if !low(i, j) {
                continue;
            }
            if i > 0 && low(i - 1, j) {
                let (a, b) = (find(&mut parent, id(i, j)), find(&mut parent, id(i - 1, j)));
                parent[a] = b;
            }
            if j > 0 && low(i, j - 1) {
                let (a, b) = (find(&mut parent, id(i, j)), find(&mut parent, id(i, j - 1)));
                parent[a] = b;
            }
        }
    }

    // Accumulate centroid sums per component root, scanning row-major so the
    // summation order is deterministic.
    let mut components: std::collections::BTreeMap<usize, (f64, f64, usize)> =
        std::collections::BTreeMap::new();
    for i in 0..rows {
        for j in 0..cols {
            if !low(i, j) {
                continue;
            }
            let root = find(&mut parent, id(i, j));
            let (cx, cy) = map.cell_center(i, j);
            let entry = components.entry(root).or_insert((0.0, 0.0, 0));
            entry.0 += cx;
            entry.1 += cy;
            entry.2 += 1;
        }
    }

    let mut zones: Vec<ZoneEpicenter> = components
        .values()
        .map(|&(sx, sy, count)| {
            let centroid = (sx / count as f64, sy / count as f64);
            ZoneEpicenter {
                id: 0,
                center: field.nearest_point(centroid),
                cell_count: count,
            }
        })
        .collect();
    zones.sort_by(|a, b| a.center.lex_cmp(&b.center));
    for (i, z) in zones.iter_mut().enumerate() {
        z.id = i;
    }
    zones
}
