use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, Gauge, Layout};
use crate::error::{Error, Result};
use crate::integrate::{frac_action, laplacian_A_at_zero, section_volume, Estimate, QuadratureParams};
use crate::numeric::{gamma, sphere_area};

/// Which section identity produced a transform value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Route {
    SectionVolume,
    EvenInteger { m: usize },
    Fractional { q: f64 },
}

impl Route {
    /// The q parameter of the route (exponent p = N - q - kappa).
    pub fn q(&self) -> f64 {
        match *self {
            Route::SectionVolume => 0.0,
            Route::EvenInteger { m } => 2.0 * m as f64,
            Route::Fractional { q } => q,
        }
    }
}

/// (|x|_D^{-p})^(xi) with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtValue {
    pub xi: Vec<f64>,
    pub exponent: f64,
    pub value: Estimate,
    pub route: Route,
}

/// The route computing the transform of |x|^{-p}, if implemented:
/// q = N - p - kappa must be 0, 2, 4 or lie in (0, 2) ∪ (2, 4).
pub fn route_for_exponent(layout: Layout, p: f64) -> Result<Route> {
    let (kappa, n) = (layout.kappa, layout.n);
    let q = layout.dim() as f64 - p - kappa as f64;
    let unsupported = |reason: String| Error::UnsupportedCase { kappa, n, reason };
    if layout.dim() > 16 {
        return Err(unsupported(format!("dimension {} exceeds 16", layout.dim())));
    }
    if !(p > 0.0 && p < layout.dim() as f64) {
        return Err(unsupported(format!("exponent {p} outside (0, {})", layout.dim())));
    }
    let near = |t: f64| (q - t).abs() < 1e-9;
    if near(0.0) {
        Ok(Route::SectionVolume)
    } else if near(2.0) {
        Ok(Route::EvenInteger { m: 1 })
    } else if near(4.0) {
        Ok(Route::EvenInteger { m: 2 })
    } else if q > 0.0 && q < 4.0 {
        if (q - 2.0).abs() < 1e-3 || q < 1e-3 || q > 4.0 - 1e-3 {
            return Err(Error::NearEvenInteger(q));
        }
        Ok(Route::Fractional { q })
    } else {
        Err(unsupported(format!("needs regularization order q = {q}, implemented only for 0 <= q <= 4")))
    }
}

/// (|x|^{-p})^ = c |xi|^{-N+p} on R^N with c = 2^{N-p} pi^{N/2} Gamma((N-p)/2) / Gamma(p/2).
pub fn ball_ft_oracle(p: f64, dim: usize) -> Result<f64> {
    let nf = dim as f64;
    if !(p > 0.0 && p < nf) {
        return Err(Error::InvalidParameter(format!("oracle exponent must lie in (0, {dim}), got {p}")));
    }
    Ok(2f64.powf(nf - p) * PI.powf(nf / 2.0) * gamma((nf - p) / 2.0) / gamma(p / 2.0))
}

fn frame_for<G: Gauge + ?Sized>(body: &G, xi: &BlockVector) -> Result<crate::blockgeom::SubspaceFrame> {
    let layout = body.layout();
    if xi.layout() != layout {
        return Err(Error::DimensionMismatch { expected: layout.dim(), got: xi.coords().len() });
    }
    section_frame(xi, &hurwitz_radon_family(layout.kappa)?)
}

/// Exponent N - kappa: Vol(D ∩ H_xi) (N - kappa) Gamma(kappa/2) 2^{kappa-1} pi^{kappa/2}.
pub fn ft_via_sections<G: Gauge + ?Sized>(
    body: &G,
    xi: &BlockVector,
    params: &QuadratureParams,
    seed: u64,
) -> Result<FtValue> {
    let frame = frame_for(body, xi)?;
    let layout = body.layout();
    let k = layout.kappa as f64;
    let d = layout.section_dim() as f64;
    let c = d * gamma(k / 2.0) * 2f64.powf(k - 1.0) * PI.powf(k / 2.0);
    let v = section_volume(body, &frame, params, seed)?;
    Ok(FtValue { xi: xi.coords().to_vec(), exponent: d, value: v.scaled(c), route: Route::SectionVolume })
}

/// Exponent N - 2m - kappa: (-1)^m (2 pi)^kappa (N - 2m - kappa) Delta^m A(0) / |S^{kappa-1}|.
pub fn ft_even_integer<G: Gauge + ?Sized>(
    body: &G,
    xi: &BlockVector,
    m: usize,
    params: &QuadratureParams,
    seed: u64,
) -> Result<FtValue> {
    let layout = body.layout();
    let p = layout.dim() as isize - 2 * m as isize - layout.kappa as isize;
    if m == 0 {
        return ft_via_sections(body, xi, params, seed);
    }
    if p <= 0 {
        return Err(Error::InvalidParameter(format!("m = {m} leaves no positive exponent in dimension {}", layout.dim())));
    }
    let frame = frame_for(body, xi)?;
    let k = layout.kappa as f64;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let c = sign * (2.0 * PI).powf(k) * p as f64 / sphere_area(layout.kappa);
    let lap = laplacian_A_at_zero(body, &frame, m, params, seed)?;
    let mut value = lap.scaled(c);
    value.inconclusive = lap.inconclusive;
    Ok(FtValue { xi: xi.coords().to_vec(), exponent: p as f64, value, route: Route::EvenInteger { m } })
}

/// Exponent N - q - kappa for q in (0, 2) ∪ (2, 4):
/// action(q) Gamma((q + kappa)/2) (N - q - kappa) 2^{q+kappa} pi^{kappa/2} / |S^{kappa-1}|.
pub fn ft_fractional<G: Gauge + ?Sized>(
    body: &G,
    xi: &BlockVector,
    q: f64,
    params: &QuadratureParams,
    seed: u64,
) -> Result<FtValue> {
    let layout = body.layout();
    let k = layout.kappa as f64;
    let p = layout.dim() as f64 - q - k;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("q = {q} leaves no positive exponent in dimension {}", layout.dim())));
    }
    let frame = frame_for(body, xi)?;
    let c = gamma((q + k) / 2.0) * p * 2f64.powf(q + k) * PI.powf(k / 2.0) / sphere_area(layout.kappa);
    let action = frac_action(body, &frame, q, params, seed)?;
    Ok(FtValue { xi: xi.coords().to_vec(), exponent: p, value: action.scaled(c), route: Route::Fractional { q } })
}

/// Dispatches on the route.
pub(crate) fn ft_by_route<G: Gauge + ?Sized>(
    body: &G,
    xi: &BlockVector,
    route: Route,
    params: &QuadratureParams,
    seed: u64,
) -> Result<FtValue> {
    match route {
        Route::SectionVolume => ft_via_sections(body, xi, params, seed),
        Route::EvenInteger { m } => ft_even_integer(body, xi, m, params, seed),
        Route::Fractional { q } => ft_fractional(body, xi, q, params, seed),
    }
}
