use crate::error::{Error, Result};
use crate::field::{CellField, Grid};

/// Variable exponent `q(x)` sampled at the nodes of a grid.
///
/// Cell values are corner averages, matching how node fields are averaged
/// to cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    grid: Grid,
    values: Vec<f64>,
    cells: Vec<f64>,
    q_minus: f64,
    q_plus: f64,
}

impl ExponentField {
    pub fn constant(grid: Grid, q: f64) -> Result<Self> {
        Self::from_values(grid, vec![q; grid.node_count()])
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.node_count()).map(|n| f(grid.node_coords(n))).collect();
        Self::from_values(grid, values)
    }

    /// Every value must be finite and above 1.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Shape {
                expected: grid.node_count(),
                got: values.len(),
            });
        }
        if let Some((n, q)) = values.iter().enumerate().find(|(_, q)| !(**q > 1.0 && q.is_finite())) {
            let x = grid.node_coords(n);
            return Err(Error::Domain(format!(
                "q must exceed 1 at every node; q = {q} at {:?}",
                &x[..grid.dim()]
            )));
        }
        let q_minus = values.iter().copied().fold(f64::INFINITY, f64::min);
        let q_plus = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let st = grid.stencil();
        let cells = (0..grid.cell_count())
            .map(|c| {
                let nodes = grid.cell_nodes(c);
                (0..st.corners).map(|k| st.avg[k] * values[nodes[k]]).sum()
            })
            .collect();
        Ok(Self {
            grid,
            values,
            cells,
            q_minus,
            q_plus,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.cells
    }

    pub fn cell_field(&self) -> CellField {
        CellField::from_values(self.grid, self.cells.clone()).expect("cell count matches grid")
    }

    pub fn q_minus(&self) -> f64 {
        self.q_minus
    }

    pub fn q_plus(&self) -> f64 {
        self.q_plus
    }

    pub fn is_constant(&self) -> bool {
        self.q_minus == self.q_plus
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if &self.grid != grid {
            return Err(Error::Shape {
                expected: self.grid.node_count(),
                got: grid.node_count(),
            });
        }
        Ok(())
    }
}
