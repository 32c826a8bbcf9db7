//! Discrete flat cylinder `T^{N-1} × (0, 1)` for `N ∈ {1, 2}`.
//!
//! Nodes are vertex-centred and include both boundary components, so the
//! trace of a nodal field is a plain read of its `j = 0` and `j = M` rows.
//! Node `(j, p)` (normal index `j`, periodic index `p`) is stored at
//! `j * P + p`: the normal index is the major one.

use crate::error::{Error, Result};

/// Tolerance used when deciding whether a length is a multiple of `h`.
pub const ALIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    dimension: usize,
    cells_normal: usize,
    cells_periodic: usize,
}

/// Which of the two boundary components a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x_N = 0`
    Bottom,
    /// `x_N = 1`
    Top,
}

impl Grid {
    /// Builds the grid with `cells_normal` cells across `(0, 1)` and, in two
    /// dimensions, `cells_periodic` cells around the torus.
    pub fn new(
        dimension: usize,
        cells_normal: usize,
        cells_periodic: Option<usize>,
    ) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::Dimension(dimension));
        }
        if cells_normal < 8 {
            return Err(Error::GridTooCoarse(cells_normal));
        }
        let cells_periodic = if dimension == 2 {
            let p = cells_periodic.ok_or(Error::PeriodicTooCoarse(0))?;
            if p < 4 {
                return Err(Error::PeriodicTooCoarse(p));
            }
            p
        } else {
            1
        };
        Ok(Self {
            dimension,
            cells_normal,
            cells_periodic,
        })
    }

    pub fn one_dimensional(cells_normal: usize) -> Result<Self> {
        Self::new(1, cells_normal, None)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `M`, the number of cells in the normal direction.
    pub fn cells_normal(&self) -> usize {
        self.cells_normal
    }

    /// `P`, the number of periodic cells (1 in one dimension).
    pub fn cells_periodic(&self) -> usize {
        self.cells_periodic
    }

    /// Normal spacing `h = 1/M`.
    pub fn h(&self) -> f64 {
        1.0 / self.cells_normal as f64
    }

    /// Periodic spacing `1/P` (1 in one dimension).
    pub fn periodic_spacing(&self) -> f64 {
        1.0 / self.cells_periodic as f64
    }

    /// Number of node rows in the normal direction, `M + 1`.
    pub fn rows(&self) -> usize {
        self.cells_normal + 1
    }

    pub fn node_count(&self) -> usize {
        self.rows() * self.cells_periodic
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cells_periodic + col
    }

    /// `(row, col)` of a node index.
    #[inline]
    pub fn position(&self, index: usize) -> (usize, usize) {
        (index / self.cells_periodic, index % self.cells_periodic)
    }

    /// Normal coordinate `x_N = j/M` of row `j`.
    #[inline]
    pub fn x_normal(&self, row: usize) -> f64 {
        row as f64 / self.cells_normal as f64
    }

    /// Periodic coordinate `x' = p/P` of column `p`.
    #[inline]
    pub fn x_periodic(&self, col: usize) -> f64 {
        col as f64 / self.cells_periodic as f64
    }

    /// Boundary distance of row `j`, `min(x_N, 1 - x_N)`, computed from the
    /// integer index so that it is exact and symmetric.
    #[inline]
    pub fn row_distance(&self, row: usize) -> f64 {
        row.min(self.cells_normal - row) as f64 / self.cells_normal as f64
    }

    /// `d(node) = min(x_N, 1 - x_N)`.
    pub fn boundary_distance(&self, index: usize) -> Result<f64> {
        if index >= self.node_count() {
            return Err(Error::NodeIndex {
                index,
                count: self.node_count(),
            });
        }
        Ok(self.row_distance(self.position(index).0))
    }

    /// Trapezoid weight of row `j` in the normal direction.
    #[inline]
    pub fn row_weight(&self, row: usize) -> f64 {
        if row == 0 || row == self.cells_normal {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    /// Quadrature weight of a node: normal trapezoid weight times `1/P`.
    #[inline]
    pub fn node_weight(&self, index: usize) -> f64 {
        self.row_weight(self.position(index).0) * self.periodic_spacing()
    }

    /// All node weights in storage order.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| self.node_weight(i))
            .collect()
    }

    /// `H^{N-1}` measure carried by each boundary node: `1/P` (1 in 1D).
    pub fn boundary_node_measure(&self) -> f64 {
        self.periodic_spacing()
    }

    /// Row index of a boundary side.
    pub fn boundary_row(&self, side: Side) -> usize {
        match side {
            Side::Bottom => 0,
            Side::Top => self.cells_normal,
        }
    }

    /// Returns `k` when `length = k h` within [`ALIGN_TOL`].
    pub fn cells_in(&self, length: f64) -> Option<usize> {
        let ratio = length * self.cells_normal as f64;
        let k = ratio.round();
        if k >= 0.0 && (ratio - k).abs() <= ALIGN_TOL * self.cells_normal as f64 {
            Some(k as usize)
        } else {
            None
        }
    }
}

/// Exact ε-layer partition: `ε = k h`.
///
/// Bulk rows are those with `d ≥ ε`, i.e. `k ≤ j ≤ M - k`; the interface rows
/// `j = k` and `j = M - k` belong to the bulk. Each layer holds the `k` rows
/// strictly closer than ε to its boundary component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    epsilon: f64,
    layer_cells: usize,
    grid: Grid,
}

impl LayerSpec {
    /// Partitions `grid` at depth `epsilon`, which must be a grid multiple.
    pub fn new(grid: &Grid, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || 2.0 * epsilon >= 1.0 {
            if 2.0 * epsilon >= 1.0 {
                return Err(Error::LayerTooWide(2.0 * epsilon));
            }
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let k = grid.cells_in(epsilon).ok_or(Error::NotAligned {
            epsilon,
            h: grid.h(),
        })?;
        if k == 0 {
            return Err(Error::NotAligned {
                epsilon,
                h: grid.h(),
            });
        }
        Ok(Self {
            epsilon: k as f64 * grid.h(),
            layer_cells: k,
            grid: *grid,
        })
    }

    /// ε, snapped to exactly `k/M`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `k` with `ε = k h`.
    pub fn layer_cells(&self) -> usize {
        self.layer_cells
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// True for rows with `d < ε`.
    #[inline]
    pub fn is_layer_row(&self, row: usize) -> bool {
        row < self.layer_cells || row > self.grid.cells_normal() - self.layer_cells
    }

    /// True for rows with `d ≥ ε`.
    #[inline]
    pub fn is_bulk_row(&self, row: usize) -> bool {
        !self.is_layer_row(row)
    }

    /// Row of the interface `d = ε` next to a boundary side.
    pub fn interface_row(&self, side: Side) -> usize {
        match side {
            Side::Bottom => self.layer_cells,
            Side::Top => self.grid.cells_normal() - self.layer_cells,
        }
    }

    /// Node mask of `{d ≥ ε}`.
    pub fn bulk_mask(&self) -> Vec<bool> {
        (0..self.grid.node_count())
            .map(|i| self.is_bulk_row(self.grid.position(i).0))
            .collect()
    }

    /// Node mask of the layer next to `side`.
    pub fn layer_mask(&self, side: Side) -> Vec<bool> {
        let m = self.grid.cells_normal();
        (0..self.grid.node_count())
            .map(|i| {
                let row = self.grid.position(i).0;
                match side {
                    Side::Bottom => row < self.layer_cells,
                    Side::Top => row > m - self.layer_cells,
                }
            })
            .collect()
    }

    /// Checks that `grid` is the grid this partition was built on.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if &self.grid != grid {
            return Err(Error::Mismatch(format!(
                "layer built for M = {}, P = {} used with M = {}, P = {}",
                self.grid.cells_normal(),
                self.grid.cells_periodic(),
                grid.cells_normal(),
                grid.cells_periodic()
            )));
        }
        Ok(())
    }
}
