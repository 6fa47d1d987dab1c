use rayon::prelude::*;

use super::{minimize_convex, sample_sphere, Estimate, QuadratureParams};
use crate::blockgeom::{Gauge, SubspaceFrame};
use crate::error::{Error, Result};
use crate::numeric::{sphere_area, CHUNK};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Crossing parameter t > 0 with gauge(c + t theta) = 1, for interior `c`.
///
/// For an origin-symmetric convex gauge the triangle inequality brackets the
/// root in [(1 - g_c)/g_theta, (1 + g_c)/g_theta]; the bracket is checked and
/// widened if the body is merely star-shaped. Illinois iteration, at most 200 steps.
fn ray_root<G: Gauge + ?Sized>(body: &G, c: &[f64], theta: &[f64], g_c: f64, g_theta: f64, tol: f64) -> Result<f64> {
    let mut x = vec![0.0; c.len()];
    let mut f = |t: f64| {
        for ((xi, ci), ti) in x.iter_mut().zip(c).zip(theta) {
            *xi = ci + t * ti;
        }
        body.eval(&x) - 1.0
    };
    let fail = || Error::RayNotConverged { origin: c.to_vec(), direction: theta.to_vec() };
    let mut a = (1.0 - g_c) / g_theta;
    let mut fa = f(a);
    if !(fa <= 0.0) {
        a = 0.0;
        fa = g_c - 1.0;
    }
    let mut b = (1.0 + g_c) / g_theta;
    let mut fb = f(b);
    let mut widen = 0;
    while !(fb >= 0.0) {
        if fb.is_nan() || widen > 60 {
            return Err(fail());
        }
        a = b;
        fa = fb;
        b *= 2.0;
        fb = f(b);
        widen += 1;
    }
    if fa == 0.0 {
        return Ok(a);
    }
    let scale_tol = tol * b;
    let mut side = 0i8;
    for _ in 0..200 {
        if fb == 0.0 || (b - a) <= scale_tol {
            // final secant step on the converged bracket
            return Ok(if fb != fa { b - fb * (b - a) / (fb - fa) } else { 0.5 * (a + b) }.clamp(a, b));
        }
        let mut t = (a * fb - b * fa) / (fb - fa);
        if !(t > a && t < b) {
            t = 0.5 * (a + b);
        }
        let ft = f(t);
        if ft.is_nan() {
            return Err(fail());
        }
        if ft < 0.0 {
            a = t;
            fa = ft;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = t;
            fb = ft;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Err(fail())
}

/// A fixed bundle of directions in H, reused for every slice so that slice
/// volumes at nearby offsets share their Monte Carlo noise.
pub struct SliceSampler<'a, G: Gauge + ?Sized> {
    body: &'a G,
    frame: &'a SubspaceFrame,
    dirs: Vec<Vec<f64>>,
    g_dirs: Vec<f64>,
    tol: f64,
    seed: u64,
}

impl<'a, G: Gauge + ?Sized> SliceSampler<'a, G> {
    pub fn new(body: &'a G, frame: &'a SubspaceFrame, n: usize, seed: u64, tol: f64) -> Result<Self> {
        body.layout().check(frame.dim())?;
        let d = frame.e_in.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs: Vec<Vec<f64>> = (0..n).map(|_| frame.in_point(&sample_sphere(d, &mut rng))).collect();
        let g_dirs = dirs
            .iter()
            .map(|t| {
                let g = body.eval(t);
                if g > 0.0 && g.is_finite() {
                    Ok(g)
                } else {
                    Err(Error::DegenerateGauge { point: t.clone(), value: g })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(SliceSampler { body, frame, dirs, g_dirs, tol, seed })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frame(&self) -> &SubspaceFrame {
        self.frame
    }

    /// |S^{d-1}|/d: multiply the mean of per-sample values by this to get a volume.
    pub fn scale(&self) -> f64 {
        let d = self.frame.e_in.len();
        sphere_area(d) / d as f64
    }

    /// Per-direction values (r_+^d + r_-^d)/2 of the shifted polar formula for
    /// the slice through the interior point `center`, where r_± are the
    /// boundary distances along ±theta.
    pub fn samples_from(&self, center: &[f64]) -> Result<Vec<f64>> {
        let d = self.frame.e_in.len() as i32;
        let g_c = self.body.eval(center);
        if !(g_c < 1.0) {
            return Err(Error::InvalidParameter(format!("slice center is not interior (gauge {g_c})")));
        }
        if g_c == 0.0 {
            return Ok(self.g_dirs.iter().map(|g| g.powi(-d)).collect());
        }
        let parts: Vec<Result<Vec<f64>>> = self
            .dirs
            .par_chunks(CHUNK)
            .zip(self.g_dirs.par_chunks(CHUNK))
            .map(|(dirs, gs)| {
                let mut back = vec![0.0; center.len()];
                dirs.iter()
                    .zip(gs)
                    .map(|(theta, &g)| {
                        let rp = ray_root(self.body, center, theta, g_c, g, self.tol)?;
                        back.iter_mut().zip(theta).for_each(|(b, t)| *b = -t);
                        let rm = ray_root(self.body, center, &back, g_c, g, self.tol)?;
                        Ok(0.5 * (rp.powi(d) + rm.powi(d)))
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(self.dirs.len());
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }

    /// Slice volume through `center` as an estimate.
    pub fn volume_from(&self, center: &[f64]) -> Result<Estimate> {
        Ok(Estimate::from_samples(&self.samples_from(center)?, self.scale(), self.seed))
    }
}

/// Point of the affine slice `x0 + H` with the smallest gauge, and that gauge.
/// The slice meets the interior of the body iff the returned gauge is < 1.
pub fn slice_center<G: Gauge + ?Sized>(body: &G, frame: &SubspaceFrame, x0: &[f64]) -> (Vec<f64>, f64) {
    let d = frame.e_in.len();
    let point = |y: &[f64]| {
        let mut p = frame.in_point(y);
        p.iter_mut().zip(x0).for_each(|(a, b)| *a += b);
        p
    };
    let (y, g) = minimize_convex(|y| body.eval(&point(y)), vec![0.0; d], 1.0);
    let g0 = body.eval(x0);
    if g0 <= g {
        (x0.to_vec(), g0)
    } else {
        (point(&y), g)
    }
}

/// A_{D,H}(u): volume of the slice of the body by H + sum_m u_m e_perp[m].
///
/// Emptiness is decided by minimizing the gauge over the slice rather than by
/// the gauge at the foot point, which can exceed 1 while the slice still
/// meets the body. Empty slices return exactly 0.
pub fn parallel_section_function<G: Gauge + ?Sized>(
    body: &G,
    frame: &SubspaceFrame,
    u: &[f64],
    params: &QuadratureParams,
    seed: u64,
) -> Result<Estimate> {
    params.validate()?;
    if u.len() != frame.kappa() {
        return Err(Error::DimensionMismatch { expected: frame.kappa(), got: u.len() });
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("offset must be finite".into()));
    }
    let x0 = frame.perp_point(u);
    let (center, g) = if body.eval(&x0) <= 0.5 { (x0.clone(), body.eval(&x0)) } else { slice_center(body, frame, &x0) };
    if !(g < 1.0 - 1e-12) {
        return Ok(Estimate { value: 0.0, std_error: 0.0, n_samples: params.n_samples, seed, inconclusive: false });
    }
    SliceSampler::new(body, frame, params.n_samples, seed, params.bisect_tol)?.volume_from(&center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, BodySpec};
    use crate::numeric::ball_volume;

    fn frame(k: usize, n: usize) -> SubspaceFrame {
        let xi = BlockVector::new((0..k * n).map(|i| 1.0 + i as f64).collect(), k, n).unwrap().normalized().unwrap();
        section_frame(&xi, &hurwitz_radon_family(k).unwrap()).unwrap()
    }

    #[test]
    fn ball_slices() {
        let b = BodySpec::ball(2, 3, 1.0).unwrap();
        let f = frame(2, 3);
        let p = QuadratureParams::with_samples(4000);
        let v4 = ball_volume(4);
        let a0 = parallel_section_function(&b, &f, &[0.0, 0.0], &p, 1).unwrap();
        assert!((a0.value - v4).abs() < 1e-12);
        let u = [0.3, -0.4];
        let a = parallel_section_function(&b, &f, &u, &p, 1).unwrap();
        let exact = v4 * (1.0f64 - 0.25).powi(2);
        assert!(a.z_to(exact) < 4.0 || (a.value - exact).abs() < 1e-10, "{a:?} vs {exact}");
        let e = parallel_section_function(&b, &f, &[0.8, 0.6], &p, 1).unwrap();
        assert_eq!(e.value, 0.0);
        let e = parallel_section_function(&b, &f, &[2.0, 0.0], &p, 1).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn slice_nonempty_although_foot_point_is_outside() {
        // l_4 ball in R^2 cut by lines <x, xi> = u: between 1/gauge(xi) and the
        // support value |xi|_{4/3} the foot point u xi is outside but the chord is not empty.
        let b = BodySpec::block_q_ball(1, 2, 4.0).unwrap();
        let xi = BlockVector::new(vec![1.0, 0.3], 1, 2).unwrap().normalized().unwrap();
        let (c0, c1) = (xi.coords()[0], xi.coords()[1]);
        let f = section_frame(&xi, &hurwitz_radon_family(1).unwrap()).unwrap();
        let support = (c0.powf(4.0 / 3.0) + c1.powf(4.0 / 3.0)).powf(0.75);
        let u = 0.5 * (1.0 / b.eval(xi.coords()) + support);
        assert!(b.eval(&f.perp_point(&[u])) > 1.0);
        let a = parallel_section_function(&b, &f, &[u], &QuadratureParams::with_samples(100), 2).unwrap();
        // chord endpoints: roots of (u c0 - s c1)^4 + (u c1 + s c0)^4 = 1 around the minimizer
        let g = |s: f64| (u * c0 - s * c1).powi(4) + (u * c1 + s * c0).powi(4) - 1.0;
        let mid = {
            let (mut lo, mut hi) = (-2.0, 2.0);
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if g(m1) < g(m2) {
                    hi = m2
                } else {
                    lo = m1
                }
            }
            0.5 * (lo + hi)
        };
        assert!(g(mid) < 0.0);
        let root = |mut inside: f64, mut outside: f64| {
            for _ in 0..200 {
                let m = 0.5 * (inside + outside);
                if g(m) < 0.0 {
                    inside = m
                } else {
                    outside = m
                }
            }
            inside
        };
        let chord = root(mid, 3.0) - root(mid, -3.0);
        assert!((a.value - chord).abs() < 1e-9, "{} vs {}", a.value, chord);
    }

    #[test]
    fn brunn_and_symmetry_on_block_ball() {
        let b = BodySpec::block_q_ball(2, 3, 4.0).unwrap();
        let f = frame(2, 3);
        let p = QuadratureParams::with_samples(3000);
        let a0 = parallel_section_function(&b, &f, &[0.0, 0.0], &p, 5).unwrap();
        let ap = parallel_section_function(&b, &f, &[0.2, 0.1], &p, 5).unwrap();
        let am = parallel_section_function(&b, &f, &[-0.2, -0.1], &p, 5).unwrap();
        assert!(ap.value <= a0.value + 3.0 * a0.std_error.hypot(ap.std_error));
        assert!(ap.z_distance(&am) < 4.0);
    }
}
