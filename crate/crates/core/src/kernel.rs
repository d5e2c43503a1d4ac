//! Compactly supported smoothing kernels.
//!
//! Every kernel is a symmetric profile `K(u)` on `|u| <= 1` with its maximum
//! `K(0) = 1`. The truncated Gaussian is `exp(-8 u^2)`, a Gaussian with
//! standard deviation `1/4` cut at four standard deviations.
//!
//! Density estimation in the plane needs a normalised radial version of the
//! same profile; see [`Kernel::radial_density`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Triangle,
    Epanechnikov,
    Tricube,
    TruncatedGaussian,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [
        Kernel::Triangle,
        Kernel::Epanechnikov,
        Kernel::Tricube,
        Kernel::TruncatedGaussian,
    ];

    /// Profile value at `u`; zero outside `[-1, 1]`.
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        let a = u.abs();
        if a > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Triangle => 1.0 - a,
            Kernel::Epanechnikov => 1.0 - a * a,
            Kernel::Tricube => {
                let c = 1.0 - a * a * a;
                c * c * c
            }
            Kernel::TruncatedGaussian => (-8.0 * a * a).exp(),
        }
    }

    /// Radius of the support of the planar density kernel, in bandwidth units.
    ///
    /// For the truncated Gaussian the bandwidth is the standard deviation, so
    /// the support reaches `4h`.
    pub fn density_support(self) -> f64 {
        match self {
            Kernel::TruncatedGaussian => 4.0,
            _ => 1.0,
        }
    }

    /// Planar radial density `K(r)` with `r = |x| / h`, integrating to one
    /// over the plane.
    #[inline]
    pub fn radial_density(self, r: f64) -> f64 {
        let s = self.density_support();
        if r > s {
            return 0.0;
        }
        self.density_constant() * self.eval(r / s)
    }

    /// `1 / (2 pi int_0^R K(r/R) r dr)`.
    fn density_constant(self) -> f64 {
        match self {
            Kernel::Triangle => 3.0 / PI,
            Kernel::Epanechnikov => 2.0 / PI,
            Kernel::Tricube => 220.0 / (81.0 * PI),
            Kernel::TruncatedGaussian => 1.0 / (2.0 * PI * (1.0 - (-8.0f64).exp())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Triangle => "triangle",
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Tricube => "tricube",
            Kernel::TruncatedGaussian => "gaussian",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "triangle" => Ok(Kernel::Triangle),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "tricube" => Ok(Kernel::Tricube),
            "gaussian" | "truncated-gaussian" | "truncated_gaussian" => {
                Ok(Kernel::TruncatedGaussian)
            }
            other => Err(Error::InvalidValue(format!("unknown kernel '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_symmetric_and_peak_at_zero() {
        for k in Kernel::ALL {
            assert_eq!(k.eval(0.0), 1.0);
            for i in 0..=100 {
                let u = i as f64 / 100.0;
                assert_eq!(k.eval(u), k.eval(-u));
                assert!(k.eval(u) >= 0.0 && k.eval(u) <= 1.0);
            }
            assert_eq!(k.eval(1.000_001), 0.0);
        }
    }

    #[test]
    fn radial_densities_integrate_to_one() {
        // Polar midpoint rule: 2 pi int_0^R K(r) r dr.
        for k in Kernel::ALL {
            let s = k.density_support();
            let n = 200_000;
            let dr = s / n as f64;
            let mass: f64 = (0..n)
                .map(|i| {
                    let r = (i as f64 + 0.5) * dr;
                    k.radial_density(r) * r * dr
                })
                .sum::<f64>()
                * 2.0
                * PI;
            assert!((mass - 1.0).abs() < 1e-8, "{k}: {mass}");
        }
    }

    #[test]
    fn names_round_trip() {
        for k in Kernel::ALL {
            assert_eq!(k.name().parse::<Kernel>().unwrap(), k);
        }
        assert!("boxcar".parse::<Kernel>().is_err());
    }
}
