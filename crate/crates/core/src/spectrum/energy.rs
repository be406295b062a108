use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CellField, Grid, ScalarField};
use crate::linalg::BandMatrix;
use crate::orlicz::{luxemburg_norm, ExponentField, GrowthIndices, YoungFunction};

/// Relative floor for the cell mean `|ū|` inside `|ū|^{q-2}` when assembling
/// Hessians with `q < 2`.
const MEAN_FLOOR: f64 = 1e-6;
/// Gradient-magnitude floor inside Hessian weights.
const SLOPE_FLOOR: f64 = 1e-12;
/// Stiffness regularization of the preconditioner, relative to its largest weight.
const STIFFNESS_SHIFT: f64 = 1e-6;

/// Everything the discrete energy
/// `J_λ(u) = Σ_cells |cell| (Φ(|∇u|) - λ |ū|^q / q)` depends on.
///
/// Gradients live at cell centers and node values are averaged to cell
/// centers, so [`energy_gradient`](Self::energy_gradient) is the exact
/// derivative of [`energy`](Self::energy).
#[derive(Debug, Clone)]
pub struct EnergyContext {
    yf: YoungFunction,
    q: ExponentField,
    grid: Grid,
    indices: GrowthIndices,
    mask: Vec<bool>,
}

/// A nontrivial critical point of `J_λ` with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub lambda: f64,
    #[serde(skip)]
    pub u: ScalarField,
    pub energy: f64,
    /// `max_i |∂J/∂u_i| / |cell|` over free nodes.
    pub residual: f64,
    /// `∫ a(|∇u|)|∇u|² / ∫ |u|^q`.
    pub lambda_recovered: f64,
    /// Luxemburg norm of `|∇u|` under `Φ`.
    pub sobolev_norm: f64,
}

struct CellState {
    nodes: [usize; 4],
    grad: [f64; 2],
    slope: f64,
    mean: f64,
    q: f64,
}

impl EnergyContext {
    pub fn new(yf: YoungFunction, q: ExponentField) -> Result<Self> {
        let indices = GrowthIndices::of(&yf)?;
        Ok(Self::with_indices(yf, q, indices))
    }

    pub fn with_indices(yf: YoungFunction, q: ExponentField, indices: GrowthIndices) -> Self {
        let grid = *q.grid();
        let mask = grid.boundary_mask();
        Self {
            yf,
            q,
            grid,
            indices,
            mask,
        }
    }

    pub fn yf(&self) -> &YoungFunction {
        &self.yf
    }

    pub fn q(&self) -> &ExponentField {
        &self.q
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn indices(&self) -> &GrowthIndices {
        &self.indices
    }

    /// Dirichlet nodes.
    pub fn boundary_mask(&self) -> &[bool] {
        &self.mask
    }

    fn check(&self, u: &ScalarField) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(Error::Shape {
                expected: self.grid.node_count(),
                got: u.grid().node_count(),
            });
        }
        Ok(())
    }

    fn check_lambda(lambda: f64) -> Result<()> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "λ must be finite and non-negative, got {lambda}"
            )));
        }
        Ok(())
    }

    fn cells<'a>(&'a self, u: &'a ScalarField) -> impl Iterator<Item = CellState> + 'a {
        let st = self.grid.stencil();
        let qc = self.q.cell_values();
        (0..self.grid.cell_count()).map(move |c| {
            let nodes = self.grid.cell_nodes(c);
            let mut grad = [0.0; 2];
            let mut mean = 0.0;
            for k in 0..st.corners {
                let v = u.values()[nodes[k]];
                grad[0] += st.dx[k] * v;
                grad[1] += st.dy[k] * v;
                mean += st.avg[k] * v;
            }
            CellState {
                nodes,
                grad,
                slope: grad[0].hypot(grad[1]),
                mean,
                q: qc[c],
            }
        })
    }

    /// `∫ Φ(|∇u|)`.
    pub fn gradient_modular(&self, u: &ScalarField) -> Result<f64> {
        self.check(u)?;
        let mut sum = 0.0;
        for s in self.cells(u) {
            sum += self.yf.Phi(s.slope)?;
        }
        Ok(sum * self.grid.cell_volume())
    }

    /// `∫ |u|^{q(x)} / q(x)`.
    pub fn potential(&self, u: &ScalarField) -> Result<f64> {
        self.check(u)?;
        let sum: f64 = self.cells(u).map(|s| s.mean.abs().powf(s.q) / s.q).sum();
        Ok(sum * self.grid.cell_volume())
    }

    pub fn energy(&self, u: &ScalarField, lambda: f64) -> Result<f64> {
        Self::check_lambda(lambda)?;
        self.check(u)?;
        let mut sum = 0.0;
        for s in self.cells(u) {
            sum += self.yf.Phi(s.slope)? - lambda * s.mean.abs().powf(s.q) / s.q;
        }
        Ok(sum * self.grid.cell_volume())
    }

    /// Exact derivative of [`energy`](Self::energy) with respect to the node
    /// values; zero on Dirichlet nodes.
    pub fn energy_gradient(&self, u: &ScalarField, lambda: f64) -> Result<ScalarField> {
        Ok(self.energy_and_gradient(u, lambda, &self.mask)?.1)
    }

    /// Energy and its gradient with the nodes in `mask` held fixed.
    pub(crate) fn energy_and_gradient(
        &self,
        u: &ScalarField,
        lambda: f64,
        mask: &[bool],
    ) -> Result<(f64, ScalarField)> {
        Self::check_lambda(lambda)?;
        self.check(u)?;
        let st = self.grid.stencil();
        let vol = self.grid.cell_volume();
        let mut g = vec![0.0; self.grid.node_count()];
        let mut energy = 0.0;
        for s in self.cells(u) {
            let power = s.mean.abs().powf(s.q);
            energy += self.yf.Phi(s.slope)? - lambda * power / s.q;
            // a(|G|) G and |ū|^{q-2} ū, both 0 at the origin.
            let a = if s.slope > 0.0 {
                self.yf.phi(s.slope)? / s.slope
            } else {
                0.0
            };
            let source = if s.mean != 0.0 { power / s.mean } else { 0.0 };
            let (fx, fy) = (a * s.grad[0], a * s.grad[1]);
            for k in 0..st.corners {
                g[s.nodes[k]] += vol * (fx * st.dx[k] + fy * st.dy[k] - lambda * source * st.avg[k]);
            }
        }
        for (gi, m) in g.iter_mut().zip(mask) {
            if *m {
                *gi = 0.0;
            }
        }
        Ok((energy * vol, ScalarField::from_values(self.grid, g)?))
    }

    /// `max_i |g_i| / |cell|`.
    pub(crate) fn residual_of(&self, g: &ScalarField) -> f64 {
        g.max_abs() / self.grid.cell_volume()
    }

    /// Sup norm of the discrete weak-form residual, per unit cell volume.
    pub fn residual(&self, u: &ScalarField, lambda: f64) -> Result<f64> {
        Ok(self.residual_of(&self.energy_gradient(u, lambda)?))
    }

    /// `λ` recovered from the weak form tested with `v = u`.
    pub fn lambda_recovered(&self, u: &ScalarField) -> Result<f64> {
        self.check(u)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for s in self.cells(u) {
            num += self.yf.phi(s.slope)? * s.slope;
            den += s.mean.abs().powf(s.q);
        }
        if den == 0.0 {
            return Err(Error::Domain("λ cannot be recovered from the zero field".into()));
        }
        Ok(num / den)
    }

    pub fn gradient_cells(&self, u: &ScalarField) -> CellField {
        crate::field::gradient_magnitude(u)
    }

    /// `∫ Φ(|∇u|/k)`; arguments beyond a tabulated range count as infinite.
    pub fn sobolev_modular(&self, u: &ScalarField, k: f64) -> Result<f64> {
        self.check(u)?;
        let mut sum = 0.0;
        for s in self.cells(u) {
            match self.yf.Phi(s.slope / k) {
                Ok(v) => sum += v,
                Err(Error::ExtrapolationRefused { .. }) => return Ok(f64::INFINITY),
                Err(e) => return Err(e),
            }
        }
        Ok(sum * self.grid.cell_volume())
    }

    /// Luxemburg norm of `|∇u|` under `Φ`.
    pub fn sobolev_norm(&self, u: &ScalarField) -> Result<f64> {
        luxemburg_norm(|k| self.sobolev_modular(u, k))
    }

    /// `‖u‖ < r`, decided by one modular evaluation.
    pub fn norm_below(&self, u: &ScalarField, r: f64) -> Result<bool> {
        Ok(self.sobolev_modular(u, r)? < 1.0)
    }

    /// `‖u‖ ≤ r`, decided by one modular evaluation.
    pub fn norm_at_most(&self, u: &ScalarField, r: f64) -> Result<bool> {
        Ok(self.sobolev_modular(u, r)? <= 1.0)
    }

    pub fn eigen_pair(&self, u: ScalarField, lambda: f64) -> Result<EigenPair> {
        let energy = self.energy(&u, lambda)?;
        let residual = self.residual(&u, lambda)?;
        let lambda_recovered = self.lambda_recovered(&u)?;
        let sobolev_norm = self.sobolev_norm(&u)?;
        Ok(EigenPair {
            lambda,
            u,
            energy,
            residual,
            lambda_recovered,
            sobolev_norm,
        })
    }

    /// Hessian of `J_λ` and a positive definite companion: the Hessian of
    /// the gradient term plus a small multiple of the discrete Laplacian.
    /// Nodes in `mask` are pinned to identity rows in both.
    pub(crate) fn hessians(&self, u: &ScalarField, lambda: f64, mask: &[bool]) -> Result<(BandMatrix, BandMatrix)> {
        let st = self.grid.stencil();
        let vol = self.grid.cell_volume();
        let n = self.grid.node_count();
        let b = self.grid.bandwidth();
        let mut h = BandMatrix::zeros(n, b);
        let mut p = BandMatrix::zeros(n, b);
        let mut lap = BandMatrix::zeros(n, b);
        let mean_scale = u.max_abs();
        let mut max_weight: f64 = 0.0;
        for s in self.cells(u) {
            let t = s.slope.max(SLOPE_FLOOR);
            let dphi = self.yf.dphi(t)?;
            let a = self.yf.phi(t)? / t;
            max_weight = max_weight.max(dphi).max(a);
            // 2×2 block a I + (φ' - a) ĝĝᵀ; in 1D only the xx entry matters.
            let (ex, ey) = if s.slope > 0.0 {
                (s.grad[0] / s.slope, s.grad[1] / s.slope)
            } else {
                (1.0, 0.0)
            };
            let hxx = a + (dphi - a) * ex * ex;
            let hxy = (dphi - a) * ex * ey;
            let hyy = a + (dphi - a) * ey * ey;
            let m = s.mean.abs().max(MEAN_FLOOR * mean_scale);
            let mass = if m > 0.0 {
                lambda * (s.q - 1.0) * m.powf(s.q - 2.0)
            } else {
                0.0
            };
            for k in 0..st.corners {
                for l in 0..st.corners {
                    let stiff = hxx * st.dx[k] * st.dx[l]
                        + hxy * (st.dx[k] * st.dy[l] + st.dy[k] * st.dx[l])
                        + hyy * st.dy[k] * st.dy[l];
                    let (i, j) = (s.nodes[k], s.nodes[l]);
                    p.add(i, j, vol * stiff);
                    h.add(i, j, vol * (stiff - mass * st.avg[k] * st.avg[l]));
                    lap.add(i, j, vol * (st.dx[k] * st.dx[l] + st.dy[k] * st.dy[l]));
                }
            }
        }
        let mut p = p.add_scaled(STIFFNESS_SHIFT * max_weight.max(SLOPE_FLOOR), &lap);
        for (i, m) in mask.iter().enumerate() {
            if *m {
                h.pin(i);
                p.pin(i);
            }
        }
        Ok((h, p))
    }
}
