use serde::{Deserialize, Serialize};

use super::scan::FtEvaluator;
use crate::blockgeom::{BlockVector, Gauge};
use crate::error::{Error, Result};
use crate::integrate::{quasi_uniform_sphere, sample_sphere, Estimate, QuadratureParams};
use crate::numeric::{par_chunks, slice_moments, sphere_area, sub_seed};

/// Both sides of ∫ (|x|_K^{-p})^ (|x|_L^{-N+p})^ = (2 pi)^N ∫ |x|_K^{-p} |x|_L^{-N+p}
/// over the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub exponent: f64,
    pub n_dirs: usize,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub relative_error: f64,
}

/// The left side averages products of transform values over `n_dirs`
/// quasi-uniform directions; the right side is a direct Monte Carlo integral
/// with `params.n_samples` points.
pub fn parseval_check<G: Gauge + ?Sized>(
    k: &G,
    l: &G,
    p: f64,
    n_dirs: usize,
    params: &QuadratureParams,
    seed: u64,
) -> Result<ParsevalReport> {
    let layout = k.layout();
    if l.layout() != layout {
        return Err(Error::DimensionMismatch { expected: layout.dim(), got: l.layout().dim() });
    }
    let dim = layout.dim();
    let nf = dim as f64;
    let ek = FtEvaluator::new(k, params, sub_seed(seed, 1 << 40))?;
    let el = FtEvaluator::new(l, params, sub_seed(seed, 1 << 41))?;
    let dirs = quasi_uniform_sphere(dim, n_dirs, seed);
    let mut products = Vec::with_capacity(n_dirs);
    let mut eval_var = 0.0;
    for (i, d) in dirs.into_iter().enumerate() {
        let xi = BlockVector::from_layout(d, layout)?;
        let s = sub_seed(seed, i as u64);
        let a = ek.evaluate(&xi, p, s)?.value;
        let b = el.evaluate(&xi, nf - p, sub_seed(s, 1))?.value;
        products.push(a.value * b.value);
        eval_var += (a.std_error * b.value).powi(2) + (a.value * b.std_error).powi(2);
    }
    let area = sphere_area(dim);
    let (mean, se) = slice_moments(&products);
    let lhs = Estimate {
        value: area * mean,
        std_error: area * se.hypot(eval_var.sqrt() / n_dirs as f64),
        n_samples: n_dirs,
        seed,
        inconclusive: false,
    };
    let samples: Vec<f64> = par_chunks(params.n_samples, sub_seed(seed, 1 << 42), |rng, _, len| {
        (0..len)
            .map(|_| {
                let x = sample_sphere(dim, rng);
                k.eval(&x).powf(-p) * l.eval(&x).powf(p - nf)
            })
            .collect::<Vec<f64>>()
    })
    .concat();
    let rhs = Estimate::from_samples(&samples, (2.0 * std::f64::consts::PI).powf(nf) * area, seed);
    let relative_error = (lhs.value - rhs.value).abs() / rhs.value.abs();
    Ok(ParsevalReport { exponent: p, n_dirs, lhs, rhs, relative_error })
}
