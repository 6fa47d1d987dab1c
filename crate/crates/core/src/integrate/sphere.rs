use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

/// Uniform point on S^{dim-1} by normalizing a standard Gaussian vector.
pub fn sample_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-150 {
            return x.into_iter().map(|v| v / r).collect();
        }
    }
}

const PRIMES: [u64; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

/// `count` quasi-uniform points on S^{dim-1}: a Halton sequence with a seeded
/// Cranley-Patterson shift, pushed through the inverse normal CDF and
/// normalized. Deterministic in `seed`; works for dim <= 20.
pub fn quasi_uniform_sphere(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim >= 1 && dim <= PRIMES.len(), "quasi-uniform points supported up to dimension {}", PRIMES.len());
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (0..count)
        .map(|i| {
            let x: Vec<f64> = (0..dim)
                .map(|j| {
                    let u = (radical_inverse(i as u64 + 1, PRIMES[j]) + shift[j]).fract();
                    normal.inverse_cdf(u.clamp(1e-15, 1.0 - 1e-15))
                })
                .collect();
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.into_iter().map(|v| v / r).collect()
        })
        .collect()
}
