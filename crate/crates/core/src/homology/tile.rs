use crate::error::{Error, Result};
use crate::types::{Extent, ScalarField};

/// Result of [`tile_field`]: tiles in row-major tile order plus the pixels
/// dropped at the bottom and right when the dimensions do not divide evenly.
#[derive(Debug, Clone, PartialEq)]
pub struct Tiling {
    pub tiles: Vec<ScalarField>,
    pub dropped_rows: usize,
    pub dropped_cols: usize,
}

impl Tiling {
    pub fn truncated(&self) -> bool {
        self.dropped_rows > 0 || self.dropped_cols > 0
    }
}

/// Splits a field into `tiles_r x tiles_c` equal tiles.
pub fn tile_field(field: &ScalarField, tiles_r: usize, tiles_c: usize) -> Result<Tiling> {
    let (rows, cols) = (field.rows(), field.cols());
    if tiles_r == 0 || tiles_c == 0 || tiles_r > rows || tiles_c > cols {
        return Err(Error::BadTiling {
            rows,
            cols,
            tiles_r,
            tiles_c,
        });
    }
    let (th, tw) = (rows / tiles_r, cols / tiles_c);
    let dropped_rows = rows - th * tiles_r;
    let dropped_cols = cols - tw * tiles_c;
    if dropped_rows > 0 || dropped_cols > 0 {
        log::warn!(
            "tiling {rows}x{cols} into {tiles_r}x{tiles_c}: dropping {dropped_rows} rows and {dropped_cols} columns"
        );
    }
    let e = field.extent;
    let dx = (e.x1 - e.x0) / cols as f64;
    let dy = (e.y1 - e.y0) / rows as f64;
    let mut tiles = Vec::with_capacity(tiles_r * tiles_c);
    for a in 0..tiles_r {
        for b in 0..tiles_c {
            let (r0, c0) = (a * th, b * tw);
            let mut values = Vec::with_capacity(th * tw);
            for i in r0..r0 + th {
                values.extend_from_slice(&field.values()[i * cols + c0..i * cols + c0 + tw]);
            }
            let extent = Extent::new(
                e.x0 + c0 as f64 * dx,
                e.y0 + r0 as f64 * dy,
                e.x0 + (c0 + tw) as f64 * dx,
                e.y0 + (r0 + th) as f64 * dy,
            );
            tiles.push(ScalarField::new(th, tw, values, extent)?);
        }
    }
    Ok(Tiling {
        tiles,
        dropped_rows,
        dropped_cols,
    })
}
