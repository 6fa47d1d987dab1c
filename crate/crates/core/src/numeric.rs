//! Small numerical helpers shared by the estimators.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use statrs::function::gamma::gamma;

/// Surface area of the unit sphere S^{dim-1} in R^dim.
pub fn sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the unit Euclidean ball in R^dim.
pub fn ball_volume(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// First and second moments of a sample stream, compensated.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    count: usize,
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum.value() / self.count as f64
    }

    /// Standard error of the mean (sample standard deviation / sqrt(count)).
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = ((self.sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Moments of an explicit slice of per-sample values (two-pass, compensated).
pub fn slice_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut s = CompensatedSum::default();
    for &v in values {
        s.add(v);
    }
    let mean = s.value() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let mut ss = CompensatedSum::default();
    for &v in values {
        ss.add((v - mean) * (v - mean));
    }
    let var = ss.value() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for partition `index` of a computation seeded with `seed`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Samples per independently seeded chunk in parallel loops.
pub const CHUNK: usize = 4096;

/// Runs `f(rng, start, len)` over fixed-size chunks of `0..total` in parallel.
/// Each chunk gets its own generator seeded from `(seed, chunk index)`, and
/// results come back in chunk order, so the outcome does not depend on the
/// thread count.
pub fn par_chunks<T, F>(total: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize, usize) -> T + Sync,
{
    use rayon::prelude::*;
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, c as u64));
            let start = c * CHUNK;
            f(&mut rng, start, CHUNK.min(total - start))
        })
        .collect()
}

/// Gauss-Hermite nodes and weights for the standard normal weight
/// (probabilists' convention: sum_i w_i f(x_i) ~ E[f(Z)], Z ~ N(0,1)).
pub fn gauss_hermite_normal(points: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on orthonormal physicists' Hermite polynomials, then rescale.
    let n = points;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = (n + 1) / 2;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2 - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    // exp(-t^2) weight -> N(0,1): x = sqrt(2) t, w / sqrt(pi)
    let xs = x.iter().rev().map(|t| t * std::f64::consts::SQRT_2).collect();
    let ws = w.iter().rev().map(|v| v / PI.sqrt()).collect();
    (xs, ws)
}

/// Gauss rule for the Beta(a, b) probability measure on [0, 1]
/// (Golub-Welsch on the Jacobi recurrence). Exact up to degree 2*points - 1.
pub fn gauss_beta(points: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    // Jacobi weight (1 - x)^al (1 + x)^be on [-1, 1] with u = (1 + x) / 2.
    let (al, be) = (b - 1.0, a - 1.0);
    let n = points;
    let ab = al + be;
    let diag = |j: usize| -> f64 {
        let t = 2.0 * j as f64 + ab;
        if j == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / (t * (t + 2.0))
        }
    };
    let off = |j: usize| -> f64 {
        let jf = j as f64;
        let t = 2.0 * jf + ab;
        if j == 1 {
            (4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
        } else {
            (4.0 * jf * (jf + al) * (jf + be) * (jf + ab) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
        }
    };
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag(i)
        } else if i + 1 == j {
            off(j)
        } else if j + 1 == i {
            off(i)
        } else {
            0.0
        }
    });
    let eig = m.symmetric_eigen();
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| ((1.0 + eig.eigenvalues[i]) / 2.0, eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    nodes.sort_by(|x, y| x.0.total_cmp(&y.0));
    nodes.into_iter().unzip()
}

/// Product rule for the Dirichlet(alpha, ..., alpha) law of `parts` shares,
/// built by stick breaking. Each node is a point of the simplex.
///
/// With alpha = kappa / 2 this is the law of the squared block norms of a
/// uniform point on the unit sphere of R^{kappa * parts}.
pub fn dirichlet_rule(parts: usize, alpha: f64, points: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::with_capacity(parts), 1.0, 1.0)];
    for j in 0..parts.saturating_sub(1) {
        let rest = alpha * (parts - j - 1) as f64;
        let (u, w) = gauss_beta(points, alpha, rest);
        let mut next = Vec::with_capacity(out.len() * points);
        for (s, weight, remaining) in &out {
            for (ui, wi) in u.iter().zip(&w) {
                let mut s2 = s.clone();
                s2.push(remaining * ui);
                next.push((s2, weight * wi, remaining * (1.0 - ui)));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(mut s, w, remaining)| {
            s.push(remaining);
            (s, w)
        })
        .collect()
}

/// Composite Simpson weights on `points` equispaced nodes with unit spacing.
/// `points` must be odd and at least 3.
pub fn simpson_weights(points: usize) -> Vec<f64> {
    assert!(points >= 3 && points % 2 == 1, "Simpson rule needs an odd node count");
    let mut w = vec![0.0; points];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == points - 1 {
            1.0 / 3.0
        } else if i % 2 == 1 {
            4.0 / 3.0
        } else {
            2.0 / 3.0
        };
    }
    w
}
