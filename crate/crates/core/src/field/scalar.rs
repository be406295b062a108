use crate::error::{Error, Result};
use crate::field::grid::Grid;

/// Node values on a [`Grid`].
///
/// Fields built with [`ScalarField::from_fn`] or [`ScalarField::zeros`] satisfy
/// the homogeneous Dirichlet condition; [`ScalarField::from_values`] accepts
/// arbitrary data (for instance constant fields used to test modulars) and
/// [`ScalarField::is_dirichlet`] reports whether the condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

/// One value per mesh cell, e.g. gradient magnitudes at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            values: vec![0.0; grid.node_count()],
            grid,
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Shape {
                expected: grid.node_count(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the nodes and clamps boundary nodes to zero.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|n| {
                if grid.is_boundary(n) {
                    0.0
                } else {
                    f(grid.node_coords(n))
                }
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_dirichlet(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(n, v)| *v == 0.0 || !self.grid.is_boundary(n))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &ScalarField) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn dot(&self, other: &ScalarField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Node values averaged to cell centers.
    pub fn cell_averages(&self) -> CellField {
        let st = self.grid.stencil();
        let values = (0..self.grid.cell_count())
            .map(|c| {
                let nodes = self.grid.cell_nodes(c);
                (0..st.corners).map(|k| st.avg[k] * self.values[nodes[k]]).sum()
            })
            .collect();
        CellField {
            grid: self.grid,
            values,
        }
    }

    /// Cell-center gradient vector of cell `c`.
    pub fn cell_gradient(&self, c: usize) -> [f64; 2] {
        let st = self.grid.stencil();
        let nodes = self.grid.cell_nodes(c);
        let mut g = [0.0; 2];
        for k in 0..st.corners {
            let v = self.values[nodes[k]];
            g[0] += st.dx[k] * v;
            g[1] += st.dy[k] * v;
        }
        g
    }
}

impl CellField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::Shape {
                expected: grid.cell_count(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.cell_count()).map(|c| f(grid.cell_center(c))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }
}

/// `|∇u|` at cell centers.
pub fn gradient_magnitude(u: &ScalarField) -> CellField {
    let values = (0..u.grid.cell_count())
        .map(|c| {
            let [gx, gy] = u.cell_gradient(c);
            gx.hypot(gy)
        })
        .collect();
    CellField { grid: u.grid, values }
}

/// Midpoint rule: `Σ f_cell · cell_volume`.
pub fn integrate(f: &CellField) -> f64 {
    f.values.iter().sum::<f64>() * f.grid.cell_volume()
}
