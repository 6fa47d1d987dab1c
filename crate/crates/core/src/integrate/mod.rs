//! Monte Carlo and quadrature engines: volumes, central sections, parallel
//! section functions and their (fractional) derivatives at the origin.
//!
//! Every estimator is a deterministic function of its inputs and a seed. Work
//! is split into fixed chunks with derived sub-seeds (see
//! [`crate::numeric::par_chunks`]), so results do not depend on thread count.

mod action;
mod laplacian;
mod minimize;
mod slice;
mod sphere;
mod volume;

pub use action::frac_action;
pub use laplacian::laplacian_A_at_zero;
pub use slice::{parallel_section_function, slice_center, SliceSampler};
pub use sphere::{quasi_uniform_sphere, sample_sphere};
pub use volume::{body_volume_polar, paired_difference, section_volume, section_volume_samples, volume_samples};

pub(crate) use minimize::minimize_convex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::slice_moments;

/// A numerical result with its one-sigma uncertainty.
///
/// For Monte Carlo estimates `std_error` is the sample standard deviation over
/// sqrt(n_samples); where a deterministic discretization error is also
/// estimated it is added in quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Set when the estimated error exceeds |value| for a quantity whose sign matters.
    #[serde(default)]
    pub inconclusive: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0, n_samples: 0, seed: 0, inconclusive: false }
    }

    /// Mean of per-sample values times `scale`.
    pub fn from_samples(samples: &[f64], scale: f64, seed: u64) -> Self {
        let (mean, se) = slice_moments(samples);
        Estimate { value: scale * mean, std_error: scale.abs() * se, n_samples: samples.len(), seed, inconclusive: false }
    }

    /// Multiplies value and error by a constant.
    pub fn scaled(self, c: f64) -> Self {
        Estimate { value: c * self.value, std_error: c.abs() * self.std_error, ..self }
    }

    /// Adds an independent error component in quadrature.
    pub fn with_extra_error(self, extra: f64) -> Self {
        Estimate { std_error: self.std_error.hypot(extra), ..self }
    }

    /// |a - b| in units of the combined (independent) standard error.
    /// Differences at round-off level count as zero.
    pub fn z_distance(&self, other: &Estimate) -> f64 {
        let s = self.std_error.hypot(other.std_error);
        let d = (self.value - other.value).abs();
        if d <= 1e-12 * self.value.abs().max(other.value.abs()) {
            0.0
        } else if s == 0.0 {
            f64::INFINITY
        } else {
            d / s
        }
    }

    /// |value - target| in units of this estimate's standard error.
    pub fn z_to(&self, target: f64) -> f64 {
        self.z_distance(&Estimate::exact(target))
    }
}

/// Radial grid for the fractional action, in units of the slice extent T
/// along each direction: log-spaced on [t_min*T, 0.1*T], uniform on
/// [0.1*T, t_max*T]. Slices beyond T are empty, so t_max >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

/// Sampling and discretization controls shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureParams {
    pub n_samples: usize,
    pub t_grid: TGrid,
    /// Relative finite-difference step; the absolute step is
    /// `fd_step / max_m gauge(e_perp[m])`.
    pub fd_step: f64,
    /// Relative root tolerance along rays.
    pub bisect_tol: f64,
    /// Angles on the half circle for the kappa = 2 orbit-sphere quadrature.
    pub perp_sphere_points: usize,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        QuadratureParams {
            n_samples: 20_000,
            t_grid: TGrid { t_min: 0.02, t_max: 1.0, points: 128 },
            fd_step: 0.05,
            bisect_tol: 1e-13,
            perp_sphere_points: 4,
        }
    }
}

impl QuadratureParams {
    pub fn with_samples(n_samples: usize) -> Self {
        QuadratureParams { n_samples, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_samples < 2 {
            return bad(format!("n_samples must be at least 2, got {}", self.n_samples));
        }
        let g = &self.t_grid;
        if !(g.t_min > 0.0 && g.t_min < 0.1) {
            return bad(format!("t_grid.t_min must lie in (0, 0.1), got {}", g.t_min));
        }
        if !(1.0..=2.0).contains(&g.t_max) {
            return bad(format!("t_grid.t_max must lie in [1, 2], got {}", g.t_max));
        }
        if g.points < 8 {
            return bad(format!("t_grid.points must be at least 8, got {}", g.points));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.5) {
            return bad(format!("fd_step must lie in (0, 0.5), got {}", self.fd_step));
        }
        if !(self.bisect_tol > 0.0 && self.bisect_tol <= 1e-10) {
            return bad(format!("bisect_tol must lie in (0, 1e-10], got {}", self.bisect_tol));
        }
        if self.perp_sphere_points == 0 {
            return bad("perp_sphere_points must be positive".into());
        }
        Ok(())
    }
}
