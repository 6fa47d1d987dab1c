use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rotation::{random_rotation, rotate_blocks};
use super::Gauge;
use crate::numeric::par_chunks;

/// Largest relative change of the gauge under a common random rotation of all
/// blocks, over `n_samples` Gaussian points. Deterministic in `seed`.
pub fn check_invariance<G: Gauge + ?Sized>(body: &G, n_samples: usize, seed: u64) -> f64 {
    let layout = body.layout();
    let dim = layout.dim();
    par_chunks(n_samples.max(1), seed, |rng, _, len| {
        let mut worst = 0.0f64;
        for _ in 0..len {
            let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let sigma = random_rotation(layout.kappa, rng);
            let g = body.eval(&x);
            let gr = body.eval(&rotate_blocks(&sigma, &x));
            let dev = (gr - g).abs() / g;
            worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
        }
        worst
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Outcome of a sampled midpoint-convexity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub pairs: usize,
    pub violations: usize,
    /// max over pairs of gauge(midpoint) - 1; negative when every midpoint is interior.
    pub worst_margin: f64,
    pub seed: u64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

const MIDPOINT_TOL: f64 = 1e-9;

/// Samples pairs of boundary points and counts midpoints outside the body.
///
/// A quarter of the pairs are independent uniform directions, the rest are
/// nearby pairs at log-uniform separations in [1e-3, 1], since non-convexity of
/// a smooth perturbation shows up locally first. Half of all base points have
/// one block shrunk by a log-uniform factor in [1e-4, 1], to reach the
/// low-curvature region near block-vanishing directions. A gauge value that is
/// not finite counts as a violation with infinite margin.
pub fn check_convexity<G: Gauge + ?Sized>(body: &G, n_pairs: usize, seed: u64) -> ConvexityReport {
    let layout = body.layout();
    let dim = layout.dim();
    let kappa = layout.kappa;
    let parts = par_chunks(n_pairs.max(1), seed, |rng, _, len| {
        let mut violations = 0usize;
        let mut worst = f64::NEG_INFINITY;
        let gaussian = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            let mut x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            if layout.n > 1 && rng.gen_bool(0.5) {
                let b = rng.gen_range(0..layout.n);
                let f = 10f64.powf(-4.0 * rng.gen::<f64>());
                x[b * kappa..(b + 1) * kappa].iter_mut().for_each(|v| *v *= f);
            }
            x
        };
        for _ in 0..len {
            let a = gaussian(rng);
            let b: Vec<f64> = if rng.gen_bool(0.25) {
                gaussian(rng)
            } else {
                let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                let delta = 10f64.powf(-3.0 * rng.gen::<f64>()) * na;
                a.iter().map(|v| v + delta * rng.sample::<f64, _>(StandardNormal) / (dim as f64).sqrt()).collect()
            };
            let ga = body.eval(&a);
            let gb = body.eval(&b);
            let margin = if ga > 0.0 && gb > 0.0 && ga.is_finite() && gb.is_finite() {
                let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x / ga + y / gb)).collect();
                let gm = body.eval(&mid);
                if gm.is_nan() {
                    f64::INFINITY
                } else {
                    gm - 1.0
                }
            } else {
                f64::INFINITY
            };
            if margin > MIDPOINT_TOL {
                violations += 1;
            }
            worst = worst.max(margin);
        }
        (violations, worst)
    });
    let (violations, worst_margin) =
        parts.into_iter().fold((0, f64::NEG_INFINITY), |(v, w), (pv, pw)| (v + pv, w.max(pw)));
    ConvexityReport { pairs: n_pairs.max(1), violations, worst_margin, seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockgeom::{BodySpec, Layout, NormTerm, Shape};

    /// q-ball weighted per coordinate rather than per block: not rotation invariant.
    struct AxisWeighted;
    impl Gauge for AxisWeighted {
        fn layout(&self) -> Layout {
            Layout { kappa: 2, n: 3 }
        }
        fn eval(&self, x: &[f64]) -> f64 {
            x.iter().enumerate().map(|(i, v)| (1.0 + i as f64) * v.powi(4)).sum::<f64>().powf(0.25)
        }
    }

    #[test]
    fn invariance() {
        let b = BodySpec::block_q_ball(2, 4, 4.0).unwrap();
        assert!(check_invariance(&b, 2000, 1) <= 1e-12);
        let b = BodySpec::block_q_ball(4, 2, 3.0).unwrap();
        assert!(check_invariance(&b, 2000, 1) <= 1e-12);
        assert!(check_invariance(&AxisWeighted, 2000, 1) > 0.01);
    }

    #[test]
    fn convexity_of_standard_bodies() {
        let ball = BodySpec::ball(2, 3, 1.0).unwrap();
        assert!(check_convexity(&ball, 5000, 3).passed());
        let q4 = BodySpec::block_q_ball(2, 4, 4.0).unwrap();
        assert!(check_convexity(&q4, 5000, 3).passed());
        let mixed = BodySpec::new(
            2,
            3,
            Shape::BlockNormBody {
                terms: vec![
                    NormTerm { weight: 1.0, q: 4.0, scales: vec![1.0, 2.0, 0.5] },
                    NormTerm { weight: 0.3, q: 1.0, scales: vec![1.0; 3] },
                ],
            },
        )
        .unwrap();
        assert!(check_convexity(&mixed, 5000, 3).passed());
    }

    #[test]
    fn non_convex_q_ball_detected() {
        let b = BodySpec::block_q_ball(2, 4, 0.5).unwrap();
        let r = check_convexity(&b, 5000, 3);
        assert!(r.violations > 0 && r.worst_margin > 0.0);
    }

    #[test]
    fn deterministic() {
        let b = BodySpec::block_q_ball(2, 4, 0.5).unwrap();
        assert_eq!(check_convexity(&b, 9000, 5), check_convexity(&b, 9000, 5));
    }
}
