use super::{sample_sphere, Estimate, QuadratureParams};
use crate::blockgeom::{Gauge, SubspaceFrame};
use crate::error::{Error, Result};
use crate::numeric::{par_chunks, sphere_area};

fn check_gauge(g: f64, point: &[f64]) -> Result<f64> {
    if g > 0.0 && g.is_finite() {
        Ok(g)
    } else {
        Err(Error::DegenerateGauge { point: point.to_vec(), value: g })
    }
}

fn flatten(parts: Vec<Result<Vec<f64>>>) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Per-direction values gauge(theta)^{-N} for `n` uniform theta on S^{N-1}.
/// Two bodies of the same dimension see identical directions for the same seed.
pub fn volume_samples<G: Gauge + ?Sized>(body: &G, n: usize, seed: u64) -> Result<Vec<f64>> {
    let dim = body.layout().dim();
    flatten(par_chunks(n, seed, |rng, _, len| {
        (0..len)
            .map(|_| {
                let theta = sample_sphere(dim, rng);
                let g = check_gauge(body.eval(&theta), &theta)?;
                Ok(g.powi(-(dim as i32)))
            })
            .collect()
    }))
}

/// Vol(K) = (|S^{N-1}|/N) E[gauge(theta)^{-N}].
pub fn body_volume_polar<G: Gauge + ?Sized>(body: &G, params: &QuadratureParams, seed: u64) -> Result<Estimate> {
    params.validate()?;
    let dim = body.layout().dim();
    let s = volume_samples(body, params.n_samples, seed)?;
    Ok(Estimate::from_samples(&s, sphere_area(dim) / dim as f64, seed))
}

/// Per-direction values gauge(theta)^{-d}, theta uniform on the unit sphere of
/// H = span(e_in), d = dim H. Directions are drawn as coefficient vectors in
/// the e_in basis, so equal seeds give corresponding directions across frames.
pub fn section_volume_samples<G: Gauge + ?Sized>(
    body: &G,
    frame: &SubspaceFrame,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    body.layout().check(frame.dim())?;
    let d = frame.e_in.len();
    flatten(par_chunks(n, seed, |rng, _, len| {
        (0..len)
            .map(|_| {
                let z = sample_sphere(d, rng);
                let theta = frame.in_point(&z);
                let g = check_gauge(body.eval(&theta), &theta)?;
                Ok(g.powi(-(d as i32)))
            })
            .collect()
    }))
}

/// Vol_d(K ∩ H) = (|S^{d-1}|/d) E[gauge(theta)^{-d}] over the unit sphere of H.
pub fn section_volume<G: Gauge + ?Sized>(
    body: &G,
    frame: &SubspaceFrame,
    params: &QuadratureParams,
    seed: u64,
) -> Result<Estimate> {
    params.validate()?;
    let d = frame.e_in.len();
    let s = section_volume_samples(body, frame, params.n_samples, seed)?;
    Ok(Estimate::from_samples(&s, sphere_area(d) / d as f64, seed))
}

/// Estimate of scale * E[a_i - b_i] from paired (common random number) samples.
pub fn paired_difference(a: &[f64], b: &[f64], scale: f64, seed: u64) -> Estimate {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Estimate::from_samples(&diff, scale, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, BodySpec};
    use std::f64::consts::PI;

    #[test]
    fn ball_volume_in_r4() {
        let b = BodySpec::ball(2, 2, 1.0).unwrap();
        let e = body_volume_polar(&b, &QuadratureParams::with_samples(10_000), 1).unwrap();
        // gauge is constant on the sphere, so the estimate is exact
        assert!((e.value - PI * PI / 2.0).abs() < 1e-12);
        let b2 = BodySpec::ball(2, 2, 2.0).unwrap();
        let e2 = body_volume_polar(&b2, &QuadratureParams::with_samples(10_000), 1).unwrap();
        assert!((e2.value - 8.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn ball_sections() {
        let b = BodySpec::ball(2, 4, 1.0).unwrap();
        let xi = BlockVector::new(vec![0.5; 8], 2, 4).unwrap().normalized().unwrap();
        let f = section_frame(&xi, &hurwitz_radon_family(2).unwrap()).unwrap();
        let e = section_volume(&b, &f, &QuadratureParams::with_samples(1000), 4).unwrap();
        assert!((e.value - PI.powi(3) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_gauge_is_an_error() {
        let b = BodySpec::block_q_ball(2, 3, 4.0).unwrap();
        let mut bad = b.clone();
        bad.shape = crate::blockgeom::Shape::BlockQBall { q: f64::NAN };
        assert!(matches!(volume_samples(&bad, 10, 0), Err(Error::DegenerateGauge { .. })));
    }

    #[test]
    fn paired_difference_of_identical_bodies_is_zero() {
        let b = BodySpec::block_q_ball(2, 3, 4.0).unwrap();
        let a = volume_samples(&b, 5000, 3).unwrap();
        let c = volume_samples(&b, 5000, 3).unwrap();
        let e = paired_difference(&a, &c, 1.0, 3);
        assert_eq!((e.value, e.std_error), (0.0, 0.0));
    }
}
