use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;
use crate::types::PointCloud;

/// Gland stand-in: each point lies on a circle around `(0.5, 0.5)` with
/// probability `1 - irregularity` (radial Gaussian jitter, clamped at 4 sd),
/// and is uniform in the unit box otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlandConfig {
    pub n_points: usize,
    pub radius: f64,
    pub irregularity: f64,
    /// Standard deviation of the radial jitter.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for GlandConfig {
    fn default() -> Self {
        GlandConfig {
            n_points: 150,
            radius: 0.3,
            irregularity: 0.0,
            jitter: 0.02,
            seed: 0,
        }
    }
}

impl GlandConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::BadConfig("n_points must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.irregularity) {
            return Err(Error::BadConfig(format!("irregularity must be in [0, 1], got {}", self.irregularity)));
        }
        if !(self.jitter >= 0.0) || !self.jitter.is_finite() {
            return Err(Error::BadConfig(format!("jitter must be non-negative, got {}", self.jitter)));
        }
        if !(self.radius > 0.0) || self.radius + 4.0 * self.jitter >= 0.5 {
            return Err(Error::BadConfig(format!(
                "radius {} with jitter {} does not fit the unit box",
                self.radius, self.jitter
            )));
        }
        Ok(())
    }
}

/// Per point: the mixture draw, then either `(x, y)` or `(angle, jitter)`.
pub fn gland(config: &GlandConfig) -> Result<PointCloud> {
    config.validate()?;
    let mut r = rng::stream(config.seed, 0);
    let mut coords = Vec::with_capacity(2 * config.n_points);
    for _ in 0..config.n_points {
        let u: f64 = r.random();
        if u < config.irregularity {
            coords.push(r.random::<f64>());
            coords.push(r.random::<f64>());
        } else {
            let theta = TAU * r.random::<f64>();
            let z: f64 = StandardNormal.sample(&mut r);
            let rad = config.radius + config.jitter * z.clamp(-4.0, 4.0);
            coords.push(0.5 + rad * theta.cos());
            coords.push(0.5 + rad * theta.sin());
        }
    }
    PointCloud::new(2, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_points_stay_near_circle() {
        let c = GlandConfig {
            n_points: 500,
            seed: 5,
            ..Default::default()
        };
        let cloud = gland(&c).unwrap();
        for p in cloud.iter() {
            let r = ((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2)).sqrt();
            assert!((r - c.radius).abs() <= 4.0 * c.jitter + 1e-12);
        }
        assert_eq!(cloud, gland(&c).unwrap());
    }

    #[test]
    fn uniform_points_pass_binned_chi_squared() {
        let cloud = gland(&GlandConfig {
            n_points: 1000,
            irregularity: 1.0,
            seed: 8,
            ..Default::default()
        })
        .unwrap();
        let mut bins = [0usize; 16];
        for p in cloud.iter() {
            let (a, b) = ((p[0] * 4.0) as usize, (p[1] * 4.0) as usize);
            bins[a.min(3) * 4 + b.min(3)] += 1;
        }
        let expect = 1000.0 / 16.0;
        let chi2: f64 = bins.iter().map(|&o| (o as f64 - expect).powi(2) / expect).sum();
        // 99th percentile of chi-squared with 15 degrees of freedom
        assert!(chi2 < 30.578, "{chi2}");
    }

    #[test]
    fn rejects_bad_configs() {
        for c in [
            GlandConfig {
                n_points: 0,
                ..Default::default()
            },
            GlandConfig {
                irregularity: 1.5,
                ..Default::default()
            },
            GlandConfig {
                radius: 0.49,
                ..Default::default()
            },
        ] {
            assert!(matches!(gland(&c), Err(Error::BadConfig(_))));
        }
    }
}
