use rand::Rng;
use rand_distr::{ChiSquared, Distribution};

use crate::error::{Error, Result};
use crate::rng;
use crate::types::{Extent, ScalarField};

/// Raster width that one unit of stick thickness is measured against: a
/// thickness `w` spans `w * rows / REFERENCE_WIDTH` pixels.
pub const REFERENCE_WIDTH: f64 = 512.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Raster {
    /// Foreground wherever the pixel center is within half a width of the stick.
    #[default]
    Hard,
    /// Intensity proportional to the pixel area covered (4x4 supersampling).
    AntiAliased,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StixConfig {
    pub n_sticks: usize,
    /// Degrees of freedom of the chi-squared thickness.
    pub thickness_df: f64,
    pub rows: usize,
    pub cols: usize,
    pub foreground: f64,
    pub background: f64,
    pub raster: Raster,
    pub seed: u64,
}

impl Default for StixConfig {
    fn default() -> Self {
        StixConfig {
            n_sticks: 60,
            thickness_df: 5.0,
            rows: 64,
            cols: 64,
            foreground: 1.0,
            background: 0.0,
            raster: Raster::Hard,
            seed: 0,
        }
    }
}

impl StixConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.thickness_df > 0.0) || !self.thickness_df.is_finite() {
            return Err(Error::BadConfig(format!("thickness_df must be positive, got {}", self.thickness_df)));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::BadConfig("image must have at least one row and column".into()));
        }
        if !self.foreground.is_finite() || !self.background.is_finite() || self.foreground <= self.background {
            return Err(Error::BadConfig("foreground must exceed background".into()));
        }
        Ok(())
    }
}

/// A segment in the unit box with its thickness in reference units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stick {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub width: f64,
}

/// Draws the sticks of an image: per stick, `x1, y1, x2, y2` uniform on
/// `[0, 1)` then the chi-squared width, all from stream 0 of the seed.
pub fn stix_sticks(config: &StixConfig) -> Result<Vec<Stick>> {
    config.validate()?;
    let chi = ChiSquared::new(config.thickness_df).map_err(|e| Error::BadConfig(e.to_string()))?;
    let mut r = rng::stream(config.seed, 0);
    Ok((0..config.n_sticks)
        .map(|_| {
            let (x1, y1, x2, y2) = (r.random(), r.random(), r.random(), r.random());
            Stick {
                x1,
                y1,
                x2,
                y2,
                width: chi.sample(&mut r),
            }
        })
        .collect())
}

/// Distance from `(px, py)` to the segment `a`-`b`.
pub(crate) fn segment_distance(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (ax + s * dx - px, ay + s * dy - py);
    (qx * qx + qy * qy).sqrt()
}

/// Renders a STIX image: each stick is a capsule of its pixel width,
/// overlapping sticks combine by maximum.
pub fn stix(config: &StixConfig) -> Result<ScalarField> {
    let sticks = stix_sticks(config)?;
    let (rows, cols) = (config.rows, config.cols);
    let (fg, bg) = (config.foreground, config.background);
    let mut cover = vec![0.0f64; rows * cols];
    let px_per_unit = rows as f64 / REFERENCE_WIDTH;
    const SUB: usize = 4;
    for s in &sticks {
        // pixel coordinates: column j spans [j, j + 1), row i spans [i, i + 1)
        let (ax, ay, bx, by) = (s.x1 * cols as f64, s.y1 * rows as f64, s.x2 * cols as f64, s.y2 * rows as f64);
        let half = 0.5 * s.width * px_per_unit;
        let lo_j = ((ax.min(bx) - half - 1.0).floor().max(0.0)) as usize;
        let hi_j = ((ax.max(bx) + half + 1.0).ceil() as usize).min(cols);
        let lo_i = ((ay.min(by) - half - 1.0).floor().max(0.0)) as usize;
        let hi_i = ((ay.max(by) + half + 1.0).ceil() as usize).min(rows);
        for i in lo_i..hi_i {
            for j in lo_j..hi_j {
                let c = match config.raster {
                    Raster::Hard => {
                        let d = segment_distance(j as f64 + 0.5, i as f64 + 0.5, ax, ay, bx, by);
                        if d <= half {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    Raster::AntiAliased => {
                        let mut hits = 0;
                        for si in 0..SUB {
                            for sj in 0..SUB {
                                let px = j as f64 + (sj as f64 + 0.5) / SUB as f64;
                                let py = i as f64 + (si as f64 + 0.5) / SUB as f64;
                                if segment_distance(px, py, ax, ay, bx, by) <= half {
                                    hits += 1;
                                }
                            }
                        }
                        hits as f64 / (SUB * SUB) as f64
                    }
                };
                let cell = &mut cover[i * cols + j];
                *cell = cell.max(c);
            }
        }
    }
    let values = cover.into_iter().map(|c| if c >= 1.0 { fg } else { bg + c * (fg - bg) }).collect();
    ScalarField::new(rows, cols, values, Extent::unit())
}
