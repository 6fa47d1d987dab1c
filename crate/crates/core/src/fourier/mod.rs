//! Fourier transforms of negative powers of invariant norms on the sphere,
//! computed from section data, and the positivity scans built on them.
//!
//! For a body D in R^N (N = kappa n) and exponent p = N - q - kappa, the
//! transform of |x|_D^{-p} at xi is recovered from the parallel section
//! function A of D over the orbit plane of xi:
//!
//! * q = 0: a multiple of the central section volume,
//! * q = 2m: a multiple of Delta^m A(0),
//! * 0 < q < 4, q != 2: a multiple of the regularized fractional action.
//!
//! These identities integrate the transform over the unit sphere of the orbit
//! plane; collapsing that integral to a single value assumes the transform is
//! constant there. This holds for kappa <= 2 and is probed numerically for
//! larger kappa (see [`ConstancyProbe`]).

mod constancy;
mod parseval;
mod routes;
mod scan;

pub use constancy::{constancy_probe, Constancy, ConstancyProbe, ConstancyRecord};
pub use parseval::{parseval_check, ParsevalReport};
pub use routes::{ball_ft_oracle, ft_even_integer, ft_fractional, ft_via_sections, route_for_exponent, FtValue, Route};
pub use scan::{kappa_intersection_scan, FtEvaluator, ScanRecord, ScanReport};
