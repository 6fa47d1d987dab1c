use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::design::block_representative;
use super::profile::PerturbationProfile;
use crate::blockgeom::{check_convexity, BodySpec, ConvexityReport, Gauge, Shape};
use crate::error::{Error, Result};
use crate::integrate::sample_sphere;

/// Largest epsilon for which rho_L^m - eps * h stays positive on the sphere,
/// sampled on a share grid and on `n_random` seeded sphere points. Infinite
/// when h is nowhere positive.
pub fn star_bound(l: &BodySpec, profile: &PerturbationProfile, n_random: usize, seed: u64) -> f64 {
    let layout = l.layout();
    let m = (layout.kappa * (layout.n - 1)) as i32;
    let ratio = |x: &[f64]| -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let s: Vec<f64> = layout.block_sq_norms(x).into_iter().map(|v| v / r2).collect();
        let h = profile.eval_profile(&s);
        let rho_m = (l.eval(x) / r2.sqrt()).powi(-m);
        if h > 0.0 {
            rho_m / h
        } else {
            f64::INFINITY
        }
    };
    let mut best = f64::INFINITY;
    let grid = 24usize;
    let mut counts = vec![0usize; layout.n];
    // all compositions of `grid` into n parts
    loop {
        if counts.iter().sum::<usize>() == grid {
            let s: Vec<f64> = counts.iter().map(|&c| c as f64 / grid as f64).collect();
            best = best.min(ratio(&block_representative(layout, &s)));
        }
        let mut j = 0;
        while j < layout.n {
            counts[j] += 1;
            if counts.iter().sum::<usize>() <= grid {
                break;
            }
            counts[j] = 0;
            j += 1;
        }
        if j == layout.n {
            break;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        best = best.min(ratio(&sample_sphere(layout.dim(), &mut rng)));
    }
    best
}

/// K with rho_K^m = rho_L^m - eps * h, m = kappa (n - 1).
pub fn build_perturbed_pair(l: &BodySpec, profile: &PerturbationProfile, epsilon: f64) -> Result<BodySpec> {
    let k = BodySpec::new(
        l.kappa,
        l.n,
        Shape::Perturbed { base: Box::new(l.clone()), profile: profile.clone(), epsilon },
    )?;
    if epsilon > 0.0 {
        let bound = star_bound(l, profile, 20_000, 0x5eed);
        if epsilon >= bound {
            // the bracket vanishes somewhere; report a safe value just inside
            return Err(Error::StarPropertyViolated { max_epsilon: bound * (1.0 - 1e-9) });
        }
    }
    Ok(k)
}

/// One bisection step of the convexity search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityStep {
    pub epsilon: f64,
    pub violations: usize,
    pub worst_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexitySearch {
    /// Largest epsilon whose sampled midpoint test passed.
    pub epsilon: f64,
    pub epsilon_star: f64,
    pub pairs: usize,
    /// Seed of the convexity sample certifying `epsilon`.
    pub certificate_seed: u64,
    pub trail: Vec<ConvexityStep>,
}

/// Smallest epsilon the search is willing to return.
pub const MIN_EPSILON: f64 = 1e-6;

/// Bisection (in log epsilon) for the largest epsilon in (0, epsilon_star)
/// for which `check_convexity` finds no violation among `pairs` pairs. All
/// steps share one seed, so they test the same point pairs.
pub fn convexity_search(
    l: &BodySpec,
    profile: &PerturbationProfile,
    epsilon_star: f64,
    pairs: usize,
    steps: usize,
    seed: u64,
) -> Result<ConvexitySearch> {
    let mut trail = Vec::new();
    let mut test = |eps: f64| -> Result<bool> {
        let k = build_perturbed_pair(l, profile, eps)?;
        let r: ConvexityReport = check_convexity(&k, pairs, seed);
        trail.push(ConvexityStep { epsilon: eps, violations: r.violations, worst_margin: r.worst_margin });
        Ok(r.passed())
    };
    let top = if epsilon_star.is_finite() { epsilon_star * 0.999 } else { 1.0 };
    let eps = if test(top)? {
        top
    } else {
        if top <= MIN_EPSILON || !test(MIN_EPSILON)? {
            return Err(Error::DegenerateProfile(MIN_EPSILON));
        }
        let (mut lo, mut hi) = (MIN_EPSILON.ln(), top.ln());
        for _ in 0..steps {
            let mid = 0.5 * (lo + hi);
            if test(mid.exp())? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.exp()
    };
    Ok(ConvexitySearch { epsilon: eps, epsilon_star, pairs, certificate_seed: seed, trail })
}
