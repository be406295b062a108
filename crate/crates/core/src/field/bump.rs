//! Smooth cut-off functions and families of bumps with disjoint supports.

use crate::error::{Error, Result};
use crate::field::grid::Grid;
use crate::field::scalar::ScalarField;

/// Minimum number of cells across a bump's outer diameter.
const CELLS_PER_BUMP: f64 = 3.0;
/// Fraction of a slot's half-width used as the outer radius.
const SLOT_FILL: f64 = 0.9;

/// Radial profile: 1 on `|x-c| ≤ r_in`, `exp(1 - 1/(1-s²))` on the annulus with
/// `s = (|x-c| - r_in)/(r_out - r_in)`, and 0 beyond `r_out`.
pub fn bump_profile(dist: f64, inner_radius: f64, outer_radius: f64) -> f64 {
    if dist <= inner_radius {
        1.0
    } else if dist >= outer_radius {
        0.0
    } else {
        let s = (dist - inner_radius) / (outer_radius - inner_radius);
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

pub fn build_bump(grid: &Grid, center: [f64; 2], inner_radius: f64, outer_radius: f64) -> Result<ScalarField> {
    if !(inner_radius >= 0.0 && inner_radius < outer_radius) {
        return Err(Error::Geometry(format!(
            "bump radii must satisfy 0 ≤ inner < outer (got {inner_radius}, {outer_radius})"
        )));
    }
    if !grid.contains_ball(center, outer_radius) {
        return Err(Error::Geometry(format!(
            "ball of radius {outer_radius} around {:?} leaves the domain",
            &center[..grid.dim()]
        )));
    }
    Ok(ScalarField::from_fn(*grid, |x| {
        bump_profile(distance(grid, x, center), inner_radius, outer_radius)
    }))
}

fn distance(grid: &Grid, x: [f64; 2], c: [f64; 2]) -> f64 {
    if grid.dim() == 1 {
        (x[0] - c[0]).abs()
    } else {
        (x[0] - c[0]).hypot(x[1] - c[1])
    }
}

/// Axis-aligned box of the slot lattice, in node indices (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub lo: [usize; 2],
    pub hi: [usize; 2],
}

impl Slot {
    pub fn contains_node(&self, grid: &Grid, node: usize) -> bool {
        let (i, j) = grid.node_ij(node);
        let inside_x = i >= self.lo[0] && i <= self.hi[0];
        inside_x && (grid.dim() == 1 || (j >= self.lo[1] && j <= self.hi[1]))
    }

    pub fn on_edge(&self, grid: &Grid, node: usize) -> bool {
        let (i, j) = grid.node_ij(node);
        let edge_x = i == self.lo[0] || i == self.hi[0];
        if grid.dim() == 1 {
            edge_x
        } else {
            edge_x || j == self.lo[1] || j == self.hi[1]
        }
    }

    fn center(&self, grid: &Grid) -> [f64; 2] {
        let mut c = [0.0; 2];
        for (a, v) in c.iter_mut().enumerate().take(grid.dim()) {
            *v = 0.5 * (self.lo[a] + self.hi[a]) as f64 * grid.spacing(a);
        }
        c
    }

    fn half_width(&self, grid: &Grid) -> f64 {
        (0..grid.dim())
            .map(|a| 0.5 * (self.hi[a] - self.lo[a]) as f64 * grid.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Disjoint bumps together with the node-aligned slots hosting them.
#[derive(Debug, Clone)]
pub struct BumpLayout {
    pub slots: Vec<Slot>,
    pub bumps: Vec<ScalarField>,
    pub outer_radius: f64,
}

/// `k` bumps with pairwise disjoint supports.
///
/// The domain is tiled by a lattice of node-aligned slots and bump `i` sits at
/// the center of slot `i`. All bumps share one outer radius, chosen so that each
/// ball has measure below `|Ω|/(k+1)`: then every new ball also has measure below
/// half of what the previous balls leave free.
pub fn build_disjoint_bumps(grid: &Grid, k: usize) -> Result<Vec<ScalarField>> {
    Ok(disjoint_bump_layout(grid, k)?.bumps)
}

pub fn disjoint_bump_layout(grid: &Grid, k: usize) -> Result<BumpLayout> {
    if k == 0 {
        return Err(Error::Capacity {
            requested: 0,
            max: max_disjoint_bumps(grid),
        });
    }
    let Some((slots, outer_radius)) = plan(grid, k) else {
        return Err(Error::Capacity {
            requested: k,
            max: max_disjoint_bumps(grid),
        });
    };
    let bumps = slots
        .iter()
        .take(k)
        .map(|s| build_bump(grid, s.center(grid), 0.5 * outer_radius, outer_radius))
        .collect::<Result<Vec<_>>>()?;
    Ok(BumpLayout {
        slots: slots.into_iter().take(k).collect(),
        bumps,
        outer_radius,
    })
}

/// Largest `k` accepted by [`build_disjoint_bumps`] on this grid.
pub fn max_disjoint_bumps(grid: &Grid) -> usize {
    let mut k = 0;
    while plan(grid, k + 1).is_some() {
        k += 1;
    }
    k
}

fn plan(grid: &Grid, k: usize) -> Option<(Vec<Slot>, f64)> {
    let (nx, ny) = lattice_shape(grid, k);
    let cuts = |count: usize, axis: usize| -> Vec<usize> {
        let cells = grid.cells_per_axis()[axis];
        (0..=count).map(|i| (i * cells + count / 2) / count).collect()
    };
    let xs = cuts(nx, 0);
    let ys = if grid.dim() == 2 { cuts(ny, 1) } else { vec![0, 0] };
    let mut slots = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            slots.push(Slot {
                lo: [xs[i], ys[j]],
                hi: [xs[i + 1], ys[j + 1]],
            });
        }
    }
    let slots: Vec<Slot> = slots.into_iter().take(k).collect();
    // Measure cap |B| < |Ω|/(k+1), shrunk slightly to keep the inequality strict.
    let cap = 0.95 * grid.measure() / (k as f64 + 1.0);
    let r_measure = if grid.dim() == 1 {
        0.5 * cap
    } else {
        (cap / std::f64::consts::PI).sqrt()
    };
    let r_slot = slots
        .iter()
        .map(|s| SLOT_FILL * s.half_width(grid))
        .fold(f64::INFINITY, f64::min);
    let radius = r_measure.min(r_slot);
    if !(2.0 * radius >= CELLS_PER_BUMP * grid.h()) {
        return None;
    }
    Some((slots, radius))
}

/// Slot lattice with at least `k` slots, as close to square cells as the
/// domain allows.
fn lattice_shape(grid: &Grid, k: usize) -> (usize, usize) {
    if grid.dim() == 1 {
        return (k, 1);
    }
    let (lx, ly) = (grid.extents()[0], grid.extents()[1]);
    (1..=k)
        .map(|nx| (nx, k.div_ceil(nx)))
        .min_by(|a, b| {
            let aspect = |(nx, ny): (usize, usize)| {
                let r = (lx / nx as f64) / (ly / ny as f64);
                (r.ln().abs(), nx * ny)
            };
            aspect(*a).partial_cmp(&aspect(*b)).unwrap()
        })
        .unwrap()
}

/// Measure of the closed support: cells with at least one nonzero corner.
pub fn support_measure(u: &ScalarField) -> f64 {
    let grid = u.grid();
    let st = grid.stencil();
    let cells = (0..grid.cell_count())
        .filter(|&c| {
            let nodes = grid.cell_nodes(c);
            (0..st.corners).any(|k| u.values()[nodes[k]] != 0.0)
        })
        .count();
    cells as f64 * grid.cell_volume()
}
