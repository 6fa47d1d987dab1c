use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockgeom::{BodySpec, NormTerm, Shape};
use crate::counterexample::PerturbationProfile;
use crate::error::Result;

/// A named body of the fixture gallery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub body: BodySpec,
}

/// Exponents of the block q-balls in the gallery.
pub const GALLERY_Q: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];

/// Perturbation size of the gallery's perturbed ball.
pub const GALLERY_EPSILON: f64 = 1e-3;

/// Convex invariant fixtures for one layout: the Euclidean ball, block
/// q-balls, one random sum of weighted block norms (drawn from `seed`) and a
/// slightly perturbed ball.
pub fn gallery(kappa: usize, n: usize, seed: u64) -> Result<Vec<Fixture>> {
    let mut out = vec![Fixture { name: "ball".into(), body: BodySpec::ball(kappa, n, 1.0)? }];
    for q in GALLERY_Q {
        out.push(Fixture { name: format!("bq{q}"), body: BodySpec::block_q_ball(kappa, n, q)? });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = (0..2)
        .map(|_| NormTerm {
            weight: rng.gen_range(0.5..1.5),
            q: rng.gen_range(1.0..4.0),
            scales: (0..n).map(|_| rng.gen_range(0.5..2.0)).collect(),
        })
        .collect();
    out.push(Fixture { name: "random_norm".into(), body: BodySpec::new(kappa, n, Shape::BlockNormBody { terms })? });
    let center = {
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        c
    };
    let perturbed = Shape::Perturbed {
        base: Box::new(BodySpec::ball(kappa, n, 1.0)?),
        profile: PerturbationProfile::BlockNormBump { center, width: 0.8 },
        epsilon: GALLERY_EPSILON,
    };
    out.push(Fixture { name: "perturbed_ball".into(), body: BodySpec::new(kappa, n, perturbed)? });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockgeom::check_convexity;

    #[test]
    fn gallery_bodies_are_convex() {
        for (kappa, n) in [(1, 3), (2, 3), (4, 2)] {
            for f in gallery(kappa, n, 11).unwrap() {
                let r = check_convexity(&f.body, 20_000, 5);
                assert!(r.passed(), "{} in ({kappa},{n}): {r:?}", f.name);
            }
        }
    }
}
