//! Structured velocity-space mesh on the box `[-v_max, v_max]^2` and the
//! element-local Gauss quadrature used by every integral in the crate.

mod quadrature;

pub use quadrature::{gauss_legendre, QuadPoint, QuadratureRule};

use crate::error::{Error, Result};

/// Axis-aligned rectangular element, `lo` is the lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Cell {
    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// Maps a reference coordinate in `[-1, 1]^2` onto the cell.
    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            0.5 * (self.lo[0] + self.hi[0]) + 0.5 * self.width(0) * xi[0],
            0.5 * (self.lo[1] + self.hi[1]) + 0.5 * self.width(1) * xi[1],
        ]
    }
}

/// Uniform `n_cells x n_cells` tiling of `[-v_max, v_max]^2`.
///
/// Cells are numbered row-major with the first velocity component running
/// fastest: cell `(ix, iy)` has index `iy * n_cells + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityMesh {
    v_max: f64,
    n_cells: usize,
    /// Grid lines along each axis, `n_cells + 1` strictly increasing values.
    lines: Vec<f64>,
    cells: Vec<Cell>,
}

impl VelocityMesh {
    pub const DIMENSION: usize = 2;

    pub fn new(v_max: f64, n_cells: usize) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mesh.v_max must be positive and finite, got {v_max}"
            )));
        }
        if n_cells == 0 {
            return Err(Error::InvalidConfig(
                "mesh.n_cells must be at least 1".into(),
            ));
        }
        let h = 2.0 * v_max / n_cells as f64;
        // Pin the outer lines so the box is reproduced exactly.
        let lines: Vec<f64> = (0..=n_cells)
            .map(|k| match k {
                0 => -v_max,
                k if k == n_cells => v_max,
                k => -v_max + k as f64 * h,
            })
            .collect();
        let mut cells = Vec::with_capacity(n_cells * n_cells);
        for iy in 0..n_cells {
            for ix in 0..n_cells {
                cells.push(Cell {
                    lo: [lines[ix], lines[iy]],
                    hi: [lines[ix + 1], lines[iy + 1]],
                });
            }
        }
        Ok(Self {
            v_max,
            n_cells,
            lines,
            cells,
        })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn grid_lines(&self) -> &[f64] {
        &self.lines
    }

    pub fn area(&self) -> f64 {
        let side = 2.0 * self.v_max;
        side * side
    }
}
