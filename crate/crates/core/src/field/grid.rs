use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structured box mesh `[0, L₁] (× [0, L₂])` with uniform cells.
///
/// Nodes are numbered row-major with the first axis fastest. The boundary
/// mask is the set of nodes on the faces of the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    extents: [f64; 2],
    cells: [usize; 2],
}

/// Per-cell differentiation and averaging weights, identical for every cell
/// of a grid. `nodes` lists the local corner order used by [`Grid::cell_nodes`].
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub corners: usize,
    pub dx: [f64; 4],
    pub dy: [f64; 4],
    pub avg: [f64; 4],
}

impl Grid {
    pub fn new_1d(length: f64, cells: usize) -> Result<Self> {
        Self::new(&[length], &[cells])
    }

    pub fn new_2d(extents: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        Self::new(&extents, &cells)
    }

    pub fn new(extents: &[f64], cells: &[usize]) -> Result<Self> {
        let dim = extents.len();
        if !(1..=2).contains(&dim) || cells.len() != dim {
            return Err(Error::Geometry(format!(
                "grids are 1D or 2D with one cell count per axis (got {} extents, {} counts)",
                extents.len(),
                cells.len()
            )));
        }
        for (&l, &n) in extents.iter().zip(cells) {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Geometry(format!("axis length must be positive, got {l}")));
            }
            if n < 2 {
                return Err(Error::Geometry(format!("need at least 2 cells per axis, got {n}")));
            }
        }
        let mut e = [1.0; 2];
        let mut c = [1; 2];
        e[..dim].copy_from_slice(extents);
        c[..dim].copy_from_slice(cells);
        Ok(Self {
            dim,
            extents: e,
            cells: c,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents[..self.dim]
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / self.cells[axis] as f64
    }

    /// Smallest mesh spacing over the axes.
    pub fn h(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn nodes_per_axis(&self, axis: usize) -> usize {
        self.cells[axis] + 1
    }

    pub fn node_count(&self) -> usize {
        (0..self.dim).map(|a| self.nodes_per_axis(a)).product()
    }

    pub fn cell_count(&self) -> usize {
        self.cells[..self.dim].iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn measure(&self) -> f64 {
        self.extents[..self.dim].iter().product()
    }

    /// Node index from per-axis indices.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.nodes_per_axis(0) + i
    }

    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        let nx = self.nodes_per_axis(0);
        (node % nx, node / nx)
    }

    pub fn node_coords(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.node_ij(node);
        [
            i as f64 * self.spacing(0),
            if self.dim == 2 { j as f64 * self.spacing(1) } else { 0.0 },
        ]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = self.node_ij(node);
        let on_x = i == 0 || i == self.cells[0];
        if self.dim == 1 {
            on_x
        } else {
            on_x || j == 0 || j == self.cells[1]
        }
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        (0..self.node_count()).map(|n| self.is_boundary(n)).collect()
    }

    pub fn cell_ij(&self, cell: usize) -> (usize, usize) {
        (cell % self.cells[0], cell / self.cells[0])
    }

    pub fn cell_center(&self, cell: usize) -> [f64; 2] {
        let (i, j) = self.cell_ij(cell);
        let x = (i as f64 + 0.5) * self.spacing(0);
        let y = if self.dim == 2 {
            (j as f64 + 0.5) * self.spacing(1)
        } else {
            0.0
        };
        [x, y]
    }

    /// Corner nodes of a cell in stencil order: `(i,j), (i+1,j), (i,j+1), (i+1,j+1)`.
    pub fn cell_nodes(&self, cell: usize) -> [usize; 4] {
        let (i, j) = self.cell_ij(cell);
        if self.dim == 1 {
            [i, i + 1, 0, 0]
        } else {
            [
                self.node_index(i, j),
                self.node_index(i + 1, j),
                self.node_index(i, j + 1),
                self.node_index(i + 1, j + 1),
            ]
        }
    }

    /// Forward differences along each axis, averaged over the two opposite
    /// edges of the cell in 2D so the gradient sits at the cell center.
    pub fn stencil(&self) -> Stencil {
        let hx = self.spacing(0);
        if self.dim == 1 {
            Stencil {
                corners: 2,
                dx: [-1.0 / hx, 1.0 / hx, 0.0, 0.0],
                dy: [0.0; 4],
                avg: [0.5, 0.5, 0.0, 0.0],
            }
        } else {
            let hy = self.spacing(1);
            let a = 0.5 / hx;
            let b = 0.5 / hy;
            Stencil {
                corners: 4,
                dx: [-a, a, -a, a],
                dy: [-b, -b, b, b],
                avg: [0.25; 4],
            }
        }
    }

    /// Half-bandwidth of node-coupling matrices assembled on this grid.
    pub fn bandwidth(&self) -> usize {
        if self.dim == 1 {
            1
        } else {
            self.nodes_per_axis(0) + 1
        }
    }

    pub fn contains_ball(&self, center: [f64; 2], radius: f64) -> bool {
        (0..self.dim).all(|a| center[a] - radius >= 0.0 && center[a] + radius <= self.extents[a])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_boundary() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.boundary_mask(), vec![true, false, false, false, true]);

        let g = Grid::new_2d([2.0, 1.0], [4, 2]).unwrap();
        assert_eq!(g.node_count(), 15);
        assert_eq!(g.cell_count(), 8);
        assert_eq!(g.boundary_mask().iter().filter(|b| !**b).count(), 3);
        assert!((g.cell_volume() - 0.25).abs() < 1e-15);
        assert_eq!(g.bandwidth(), 6);
    }

    #[test]
    fn rejects_degenerate_meshes() {
        assert!(Grid::new_1d(0.0, 4).is_err());
        assert!(Grid::new_1d(1.0, 1).is_err());
        assert!(Grid::new(&[1.0, 1.0, 1.0], &[2, 2, 2]).is_err());
    }
}
