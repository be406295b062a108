mod bump;
mod grid;
pub mod io;
mod scalar;

pub use bump::{
    build_bump, build_disjoint_bumps, bump_profile, disjoint_bump_layout, max_disjoint_bumps, support_measure,
    BumpLayout, Slot,
};
pub use grid::{Grid, Stencil};
pub use scalar::{gradient_magnitude, integrate, CellField, ScalarField};
