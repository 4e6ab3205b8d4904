//! Cubical tessellations of the unit cube and cell colorings induced by a
//! link's components.
//!
//! The cube is cut into `n^3` closed cells of side `h = epsilon / 4`, with
//! `n = ceil(4 / epsilon)`. A component's color lands on every cell whose
//! closed cube the curve meets; the meet test is the separating-axis test
//! between segment and box, so no sampling is involved. Two components that
//! carry a mutual separation constraint may never color cells whose closed
//! cubes touch (share a face, edge, or corner): their curves would then be
//! closer than twice the cell diameter, which the constraint forbids.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{vadd, vscale, vsub, PLLink, Point3};

/// Default ceiling on cell count, roughly a 100 MB dense color array.
pub const DEFAULT_MAX_CELLS: u64 = 100_000_000;

/// Tolerance for the segment-box meet test; touching within this margin
/// counts as meeting, so boundary contact never drops a cell.
const SAT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("epsilon must be a finite value in (0, 0.5], got {got}")]
    BadEpsilon { got: f64 },
    #[error("tessellation at epsilon {epsilon} needs {cells} cells, above the cap of {cap}")]
    TooManyCells { epsilon: f64, cells: u64, cap: u64 },
    #[error("no component labeled {label:?}")]
    UnknownLabel { label: String },
    #[error("too many colors: {got} labels, limit 254")]
    TooManyColors { got: usize },
    #[error(
        "components {a:?} and {b:?} meet the same or touching cells near ({i}, {j}, {k}); \
         their distance is under half a cell diagonal, violating the declared constraint"
    )]
    ConstraintViolation {
        a: String,
        b: String,
        i: u32,
        j: u32,
        k: u32,
    },
    #[error("unconstrained components {a:?} and {b:?} both meet cell ({i}, {j}, {k}); every cell takes one color")]
    ColorClash {
        a: String,
        b: String,
        i: u32,
        j: u32,
        k: u32,
    },
    #[error("no palette entry {label:?}")]
    UnknownColor { label: String },
}

type Result<T> = std::result::Result<T, GridError>;

/// Index of a grid cell; cell `(i, j, k)` spans
/// `[i*h, (i+1)*h] x [j*h, (j+1)*h] x [k*h, (k+1)*h]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CellIx {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

/// A cubical tessellation of the unit cube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n_side: u32,
    h: f64,
    epsilon: f64,
}

/// Ceiling with a snap window: values within `tol` of an integer round to
/// it instead of jumping to the next one, absorbing float noise in `4 / e`.
fn snap_ceil(q: f64, tol: f64) -> f64 {
    let r = q.round();
    if (q - r).abs() < tol {
        r
    } else {
        q.ceil()
    }
}

pub fn tessellate(epsilon: f64) -> Result<Grid> {
    tessellate_with_cap(epsilon, DEFAULT_MAX_CELLS)
}

pub fn tessellate_with_cap(epsilon: f64, max_cells: u64) -> Result<Grid> {
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 0.5 {
        return Err(GridError::BadEpsilon { got: epsilon });
    }
    let n = snap_ceil(4.0 / epsilon, 1e-9);
    let cells = (n * n * n) as u64;
    if cells > max_cells {
        return Err(GridError::TooManyCells {
            epsilon,
            cells,
            cap: max_cells,
        });
    }
    Ok(Grid {
        n_side: n as u32,
        h: epsilon / 4.0,
        epsilon,
    })
}

impl Grid {
    pub fn n_side(&self) -> u32 {
        self.n_side
    }

    /// Cell side length, `epsilon / 4`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn cell_count(&self) -> u64 {
        let n = self.n_side as u64;
        n * n * n
    }

    /// The cell containing a point, clamped into the grid so points
    /// slightly outside the cube land in boundary cells.
    pub fn cell_of_point(&self, p: &Point3) -> CellIx {
        let n = self.n_side;
        let clamp = |x: f64| -> u32 { ((x / self.h).floor().max(0.0) as u32).min(n - 1) };
        CellIx {
            i: clamp(p.x),
            j: clamp(p.y),
            k: clamp(p.z),
        }
    }

    pub fn cell_bounds(&self, c: CellIx) -> ([f64; 3], [f64; 3]) {
        let lo = [
            c.i as f64 * self.h,
            c.j as f64 * self.h,
            c.k as f64 * self.h,
        ];
        let hi = [lo[0] + self.h, lo[1] + self.h, lo[2] + self.h];
        (lo, hi)
    }

    fn linear_index(&self, c: CellIx) -> usize {
        let n = self.n_side as usize;
        (c.i as usize * n + c.j as usize) * n + c.k as usize
    }
}

/// Separating-axis test between a segment and an axis-aligned box, with
/// touching counted as meeting.
fn segment_meets_box(p: [f64; 3], q: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> bool {
    let e = vscale(0.5, vsub(hi, lo));
    let center = vscale(0.5, vadd(hi, lo));
    let m = vsub(vscale(0.5, vadd(p, q)), center);
    let d = vscale(0.5, vsub(q, p));
    let ad = [d[0].abs(), d[1].abs(), d[2].abs()];
    for a in 0..3 {
        if m[a].abs() > e[a] + ad[a] + SAT_TOL {
            return false;
        }
    }
    if (m[1] * d[2] - m[2] * d[1]).abs() > e[1] * ad[2] + e[2] * ad[1] + SAT_TOL {
        return false;
    }
    if (m[2] * d[0] - m[0] * d[2]).abs() > e[2] * ad[0] + e[0] * ad[2] + SAT_TOL {
        return false;
    }
    if (m[0] * d[1] - m[1] * d[0]).abs() > e[0] * ad[1] + e[1] * ad[0] + SAT_TOL {
        return false;
    }
    true
}

/// A coloring of every grid cell: 0 is white, values from 1 on map to the
/// labels passed to [`color_cells`] in order.
#[derive(Clone, Debug)]
pub struct Coloring {
    grid: Grid,
    palette: Vec<String>,
    cells: Vec<u8>,
}

impl Coloring {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Palette entry 0 is always "white".
    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn color_at(&self, c: CellIx) -> u8 {
        self.cells[self.grid.linear_index(c)]
    }

    pub fn color_index(&self, label: &str) -> Option<u8> {
        self.palette.iter().position(|l| l == label).map(|p| p as u8)
    }

    /// Run-length encoding over the linear cell order (i-major, then j,
    /// then k) as `{"dims", "palette", "runs"}` JSON.
    pub fn to_rle_json(&self) -> String {
        #[derive(Serialize)]
        struct Rle<'a> {
            dims: [u32; 3],
            palette: &'a [String],
            runs: Vec<(u8, u64)>,
        }
        let mut runs: Vec<(u8, u64)> = Vec::new();
        for &v in &self.cells {
            match runs.last_mut() {
                Some((value, len)) if *value == v => *len += 1,
                _ => runs.push((v, 1)),
            }
        }
        let n = self.grid.n_side;
        serde_json::to_string_pretty(&Rle {
            dims: [n, n, n],
            palette: &self.palette,
            runs,
        })
        .expect("coloring serialization cannot fail")
    }
}

/// Colors every cell met by each listed component, in palette order.
///
/// Fails when two mutually constrained components would color cells whose
/// closed cubes touch, or when two unconstrained components land on the
/// same cell.
pub fn color_cells(grid: &Grid, link: &PLLink, labels: &[&str]) -> Result<Coloring> {
    if labels.len() > 254 {
        return Err(GridError::TooManyColors { got: labels.len() });
    }
    let mut palette = vec!["white".to_string()];
    for &label in labels {
        if link.component(label).is_none() {
            return Err(GridError::UnknownLabel {
                label: label.to_string(),
            });
        }
        palette.push(label.to_string());
    }
    // Color index pairs (lo, hi) that must stay strictly apart.
    let mut constrained: BTreeSet<(u8, u8)> = BTreeSet::new();
    for c in link.constraints() {
        let pair = (
            palette.iter().position(|l| *l == c.a),
            palette.iter().position(|l| *l == c.b),
        );
        if let (Some(x), Some(y)) = pair {
            constrained.insert((x.min(y) as u8, x.max(y) as u8));
        }
    }
    let n = grid.n_side;
    let mut cells = vec![0u8; grid.cell_count() as usize];
    for (pos, &label) in labels.iter().enumerate() {
        let color = (pos + 1) as u8;
        let curve = link.component(label).expect("label checked above");
        for (p, q) in curve.segments() {
            let (p, q) = (p.coords(), q.coords());
            // Candidate range from the segment's bounding box, padded by a
            // cell so exact boundary contact is never missed.
            let mut range = [[0u32; 2]; 3];
            for a in 0..3 {
                let lo = p[a].min(q[a]);
                let hi = p[a].max(q[a]);
                let lo_ix = ((lo / grid.h).floor() - 1.0).max(0.0) as u32;
                let hi_ix = (((hi / grid.h).floor() + 1.0).max(0.0) as u32).min(n - 1);
                range[a] = [lo_ix.min(n - 1), hi_ix];
            }
            for i in range[0][0]..=range[0][1] {
                for j in range[1][0]..=range[1][1] {
                    for k in range[2][0]..=range[2][1] {
                        let cell = CellIx { i, j, k };
                        let (lo, hi) = grid.cell_bounds(cell);
                        if !segment_meets_box(p, q, lo, hi) {
                            continue;
                        }
                        assign(
                            grid,
                            &mut cells,
                            &palette,
                            &constrained,
                            cell,
                            color,
                        )?;
                    }
                }
            }
        }
    }
    Ok(Coloring {
        grid: *grid,
        palette,
        cells,
    })
}

/// Writes one color into one cell, enforcing the disjointness rules against
/// the cell itself and its 26 neighbors.
fn assign(
    grid: &Grid,
    cells: &mut [u8],
    palette: &[String],
    constrained: &BTreeSet<(u8, u8)>,
    cell: CellIx,
    color: u8,
) -> Result<()> {
    let existing = cells[grid.linear_index(cell)];
    if existing != 0 && existing != color {
        let (a, b) = (existing.min(color), existing.max(color));
        return Err(if constrained.contains(&(a, b)) {
            GridError::ConstraintViolation {
                a: palette[a as usize].clone(),
                b: palette[b as usize].clone(),
                i: cell.i,
                j: cell.j,
                k: cell.k,
            }
        } else {
            GridError::ColorClash {
                a: palette[a as usize].clone(),
                b: palette[b as usize].clone(),
                i: cell.i,
                j: cell.j,
                k: cell.k,
            }
        });
    }
    let n = grid.n_side;
    for di in -1i64..=1 {
        for dj in -1i64..=1 {
            for dk in -1i64..=1 {
                if di == 0 && dj == 0 && dk == 0 {
                    continue;
                }
                let (ni, nj, nk) = (
                    cell.i as i64 + di,
                    cell.j as i64 + dj,
                    cell.k as i64 + dk,
                );
                if ni < 0 || nj < 0 || nk < 0 || ni >= n as i64 || nj >= n as i64 || nk >= n as i64
                {
                    continue;
                }
                let neighbor = CellIx {
                    i: ni as u32,
                    j: nj as u32,
                    k: nk as u32,
                };
                let other = cells[grid.linear_index(neighbor)];
                if other == 0 || other == color {
                    continue;
                }
                let (a, b) = (other.min(color), other.max(color));
                if constrained.contains(&(a, b)) {
                    return Err(GridError::ConstraintViolation {
                        a: palette[a as usize].clone(),
                        b: palette[b as usize].clone(),
                        i: cell.i,
                        j: cell.j,
                        k: cell.k,
                    });
                }
            }
        }
    }
    cells[grid.linear_index(cell)] = color;
    Ok(())
}

/// All cells of one color, sorted by `(i, j, k)`, with the grid they live in.
#[derive(Clone, Debug)]
pub struct Region {
    label: String,
    cells: Vec<CellIx>,
    grid: Grid,
}

impl Region {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cells(&self) -> &[CellIx] {
        &self.cells
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn contains(&self, c: CellIx) -> bool {
        self.cells.binary_search(&c).is_ok()
    }

    /// Builds a region directly from cells, mainly for hand-made complexes
    /// in tests and experiments. Cells are sorted and deduplicated.
    pub fn from_cells(label: impl Into<String>, grid: &Grid, mut cells: Vec<CellIx>) -> Region {
        cells.sort();
        cells.dedup();
        Region {
            label: label.into(),
            cells,
            grid: *grid,
        }
    }
}

pub fn region_of(coloring: &Coloring, label: &str) -> Result<Region> {
    let color = coloring
        .color_index(label)
        .ok_or_else(|| GridError::UnknownColor {
            label: label.to_string(),
        })?;
    let n = coloring.grid.n_side;
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = CellIx { i, j, k };
                if coloring.color_at(c) == color {
                    cells.push(c);
                }
            }
        }
    }
    Ok(Region {
        label: label.to_string(),
        cells,
        grid: *coloring.grid(),
    })
}
