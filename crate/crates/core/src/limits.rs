//! Hard limits and the configurable lattice-cell budget.

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIMENSION: usize = 8;

/// Cell budget used when `HARM_MAX_CELLS` is unset.
pub const DEFAULT_MAX_CELLS: u128 = 2_000_000;

/// Environment variable overriding [`DEFAULT_MAX_CELLS`].
pub const MAX_CELLS_ENV: &str = "HARM_MAX_CELLS";

pub fn max_cells() -> u128 {
    std::env::var(MAX_CELLS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .unwrap_or(DEFAULT_MAX_CELLS)
}

pub fn check_dimension(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIMENSION {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

/// Number of points `x` in `Z^dim` with `|x|_1 <= radius`.
pub fn ball_cells(dim: usize, radius: usize) -> u128 {
    // cells[r] for the current dimension, built up one coordinate at a time
    let mut cells = vec![1u128; radius + 1];
    for _ in 0..dim {
        let prev = cells.clone();
        for r in 0..=radius {
            let mut total = prev[r];
            for v in 1..=r {
                total = total.saturating_add(prev[r - v].saturating_mul(2));
            }
            cells[r] = total;
        }
    }
    cells[radius]
}

/// Fails with [`Error::ResourceLimit`] if the ball exceeds the cell budget.
pub fn check_cells(dim: usize, radius: usize) -> Result<()> {
    let cells = ball_cells(dim, radius);
    let limit = max_cells();
    if cells > limit {
        return Err(Error::ResourceLimit { cells, limit });
    }
    Ok(())
}
