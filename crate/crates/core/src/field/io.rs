//! Field dump as CSV: header `x,value` or `x,y,value`, one row per node in
//! node order, every number at 17 significant digits.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField};

/// Coordinates read back may differ from the grid by this relative amount.
const COORD_TOL: f64 = 1e-12;

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidSpec(format!("field file I/O failed: {e}"))
}

pub fn header(grid: &Grid) -> &'static str {
    if grid.dim() == 2 {
        "x,y,value"
    } else {
        "x,value"
    }
}

pub fn write_field<W: Write>(u: &ScalarField, mut out: W) -> Result<()> {
    let grid = u.grid();
    writeln!(out, "{}", header(grid)).map_err(io_err)?;
    for (n, v) in u.values().iter().enumerate() {
        let x = grid.node_coords(n);
        if grid.dim() == 2 {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", x[0], x[1], v)
        } else {
            writeln!(out, "{:.16e},{:.16e}", x[0], v)
        }
        .map_err(io_err)?;
    }
    Ok(())
}

/// Reads a dump written for `grid`. Rows must come in node order and their
/// coordinates must match the grid nodes.
pub fn read_field<R: BufRead>(grid: Grid, input: R) -> Result<ScalarField> {
    let mut lines = input.lines();
    let first = lines.next().transpose().map_err(io_err)?.unwrap_or_default();
    if first.trim() != header(&grid) {
        return Err(Error::InvalidSpec(format!(
            "expected header `{}`, got `{}`",
            header(&grid),
            first.trim()
        )));
    }
    let cols = grid.dim() + 1;
    let mut values = Vec::with_capacity(grid.node_count());
    for (row, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let nums = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::InvalidSpec(format!("line {}: {e}", row + 2)))?;
        if nums.len() != cols {
            return Err(Error::InvalidSpec(format!(
                "line {}: expected {cols} columns, got {}",
                row + 2,
                nums.len()
            )));
        }
        let n = values.len();
        if n >= grid.node_count() {
            return Err(Error::Shape {
                expected: grid.node_count(),
                got: n + 1,
            });
        }
        let x = grid.node_coords(n);
        for a in 0..grid.dim() {
            let scale = grid.extents()[a].abs().max(1.0);
            if (nums[a] - x[a]).abs() > COORD_TOL * scale {
                return Err(Error::InvalidSpec(format!(
                    "line {}: coordinate {} does not match node {n} at {}",
                    row + 2,
                    nums[a],
                    x[a]
                )));
            }
        }
        values.push(nums[grid.dim()]);
    }
    ScalarField::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        for grid in [
            Grid::new_1d(1.0, 16).unwrap(),
            Grid::new_2d([1.0, 2.0], [5, 7]).unwrap(),
        ] {
            let u = ScalarField::from_fn(grid, |x| (3.0 * x[0]).sin() * (1.0 + x[1]) / 7.0);
            let mut buf = Vec::new();
            write_field(&u, &mut buf).unwrap();
            let back = read_field(grid, buf.as_slice()).unwrap();
            assert_eq!(back, u);
        }
    }

    #[test]
    fn rejects_mismatched_input() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        assert!(read_field(g, "x,y,value\n".as_bytes()).is_err());
        assert!(read_field(g, "x,value\n0.0,1.0\n0.3,1.0\n".as_bytes()).is_err());
        assert!(read_field(g, "x,value\n0.0,0.0\n0.25,1.0\n".as_bytes()).is_err());
        assert!(read_field(g, "x,value\n0.0,abc\n".as_bytes()).is_err());
    }
}
