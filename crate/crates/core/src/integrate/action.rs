use std::f64::consts::PI;

use super::{slice_center, Estimate, QuadratureParams, SliceSampler};
use crate::blockgeom::{Gauge, SubspaceFrame};
use crate::error::{Error, Result};
use crate::numeric::{gamma, simpson_weights, sphere_area};

/// Quadrature on S^{kappa-1} using only one point of each antipodal pair
/// (the integrands here are even), weights summing to |S^{kappa-1}|.
pub(crate) fn orbit_sphere_rule(kappa: usize, circle_points: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let reps: Vec<Vec<f64>> = match kappa {
        1 => vec![vec![1.0]],
        2 => (0..circle_points)
            .map(|j| {
                let a = PI * j as f64 / circle_points as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        // 24-cell vertices (a spherical 5-design)
        4 => {
            let mut v = Vec::new();
            for i in 0..4 {
                let mut e = vec![0.0; 4];
                e[i] = 1.0;
                v.push(e);
            }
            for signs in 0..8u32 {
                let mut e = vec![0.5; 4];
                for (k, x) in e.iter_mut().enumerate().skip(1) {
                    if signs >> (k - 1) & 1 == 1 {
                        *x = -0.5;
                    }
                }
                v.push(e);
            }
            v
        }
        // normalized E8 roots (a spherical 7-design): e_i ± e_j and the
        // half-integer vectors with an even number of minus signs, first coordinate positive
        8 => {
            let mut v = Vec::new();
            for i in 0..8 {
                for j in i + 1..8 {
                    for s in [1.0, -1.0] {
                        let mut e = vec![0.0; 8];
                        e[i] = 1.0;
                        e[j] = s;
                        v.push(e);
                    }
                }
            }
            for signs in 0..128u32 {
                if signs.count_ones() % 2 == 1 {
                    continue;
                }
                let mut e = vec![0.5; 8];
                for (k, x) in e.iter_mut().enumerate().skip(1) {
                    if signs >> (k - 1) & 1 == 1 {
                        *x = -0.5;
                    }
                }
                v.push(e);
            }
            v.into_iter()
                .map(|e| {
                    let r = e.iter().map(|x| x * x).sum::<f64>().sqrt();
                    e.into_iter().map(|x| x / r).collect()
                })
                .collect()
        }
        k => return Err(Error::UnsupportedKappa(k)),
    };
    let w = sphere_area(kappa) / reps.len() as f64;
    Ok(reps.into_iter().map(|p| (p, w)).collect())
}

fn check_exponent(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 4.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("fractional exponent must lie in (0, 4), got {q}")));
    }
    if [0.0, 2.0, 4.0].iter().any(|e| (q - e).abs() < 1e-3) {
        return Err(Error::NearEvenInteger(q));
    }
    Ok(())
}

/// Odd node count congruent to 1 mod 4, so the half grid is again a Simpson grid.
fn simpson_count(n: usize) -> usize {
    let n = n.max(9);
    n - (n - 1) % 4
}

/// Regularized action <|u|^{-q-kappa} / Gamma(-q/2), A_{D,H}(u)> for
/// q in (0, 2) or (2, 4):
///
/// (1/Gamma(-q/2)) ∫_{S^{kappa-1}} ∫_0^∞ (A(t w) - A(0) - [q>2] t^2/2 w^T ∇²A(0) w) t^{-1-q} dt dw.
///
/// Per orbit direction w the slice extent T = 1/min_{y in H} gauge(w + y) is
/// found first; the slices at t w are then centered on t (w + y*), which are
/// interior for t < T and vary linearly in t, keeping every per-sample slice
/// volume smooth in t. The radial integral splits into a Taylor model on
/// (0, t_min T), Simpson in log t up to T/10, Simpson in t up to T, and a
/// closed-form tail of the subtracted terms. The result is linear in the
/// per-direction slice data, so the Monte Carlo error is exact; the
/// discretization error (half-grid Simpson and Richardson level differences)
/// is added in quadrature.
pub fn frac_action<G: Gauge + ?Sized>(
    body: &G,
    frame: &SubspaceFrame,
    q: f64,
    params: &QuadratureParams,
    seed: u64,
) -> Result<Estimate> {
    params.validate()?;
    check_exponent(q)?;
    let high = q > 2.0;
    let rule = orbit_sphere_rule(frame.kappa(), params.perp_sphere_points)?;
    let sampler = SliceSampler::new(body, frame, params.n_samples, seed, params.bisect_tol)?;
    let n = sampler.len();
    let zero = vec![0.0; frame.dim()];
    let a0 = sampler.samples_from(&zero)?;

    let n_log = simpson_count(params.t_grid.points / 2);
    let n_uni = simpson_count(params.t_grid.points - params.t_grid.points / 2);
    let w_log = simpson_weights(n_log);
    let w_uni = simpson_weights(n_uni);

    let mut total = vec![0.0; n];
    let mut disc = 0.0;

    for (dir, weight) in &rule {
        let v = frame.perp_point(dir);
        let (w, phi) = slice_center(body, frame, &v);
        if !(phi > 0.0 && phi.is_finite()) {
            return Err(Error::DegenerateGauge { point: v, value: phi });
        }
        let extent = 1.0 / phi;
        let at = |t: f64| -> Result<Vec<f64>> {
            if t >= extent * (1.0 - 1e-12) {
                return Ok(vec![0.0; n]);
            }
            let c: Vec<f64> = w.iter().map(|x| t * x).collect();
            sampler.samples_from(&c)
        };

        // second derivative along w at 0, Richardson over three steps
        let h0 = params.fd_step * extent;
        let second = |h: f64| -> Result<Vec<f64>> {
            let p = at(h)?;
            let m = at(-h)?;
            Ok((0..n).map(|i| (p[i] - 2.0 * a0[i] + m[i]) / (h * h)).collect())
        };
        let d: Vec<Vec<f64>> = [h0, h0 / 2.0, h0 / 4.0].iter().map(|&h| second(h)).collect::<Result<_>>()?;
        let half_curv: Vec<f64> = (0..n).map(|i| 0.5 * (4.0 * d[2][i] - d[1][i]) / 3.0).collect();
        let half_curv_coarse: f64 = (0..n).map(|i| 0.5 * (4.0 * d[1][i] - d[0][i]) / 3.0).sum::<f64>() / n as f64;
        let curv_mean = half_curv.iter().sum::<f64>() / n as f64;

        let t_s = params.t_grid.t_min * extent;
        let t_b = 0.1 * extent;
        let t_e = params.t_grid.t_max * extent;

        // per-sample coefficients: contribution = sum_nodes c_k F(t_k) + c_a * a + c_0 * A(0)
        let mut contrib = vec![0.0; n];
        let mut coef_a = 0.0;
        let mut coef_0 = 0.0;
        let mut mean_full = 0.0;
        let mut mean_half = 0.0;
        let a0_mean = a0.iter().sum::<f64>() / n as f64;

        let mut node = |t: f64, c_full: f64, c_half: f64, f: &[f64]| {
            // integrand weight already includes the t-power and measure
            for i in 0..n {
                contrib[i] += c_full * f[i];
            }
            coef_0 -= c_full;
            if high {
                coef_a -= c_full * t * t;
            }
            let fm = f.iter().sum::<f64>() / n as f64;
            let g = fm - a0_mean - if high { curv_mean * t * t } else { 0.0 };
            mean_full += c_full * g;
            mean_half += c_half * g;
        };

        let ds = (t_b / t_s).ln() / (n_log - 1) as f64;
        let mut f_s = Vec::new();
        let half_log = simpson_weights((n_log + 1) / 2);
        for k in 0..n_log {
            let t = t_s * (k as f64 * ds).exp();
            let f = at(t)?;
            let c = w_log[k] * ds * t.powf(-q);
            let ch = if k % 2 == 0 { half_log[k / 2] * 2.0 * ds * t.powf(-q) } else { 0.0 };
            node(t, c, ch, &f);
            if k == 0 {
                f_s = f;
            }
        }
        let dt = (t_e - t_b) / (n_uni - 1) as f64;
        let half_uni = simpson_weights((n_uni + 1) / 2);
        for k in 0..n_uni {
            let t = t_b + k as f64 * dt;
            let f = at(t)?;
            let c = w_uni[k] * dt * t.powf(-1.0 - q);
            let ch = if k % 2 == 0 { half_uni[k / 2] * 2.0 * dt * t.powf(-1.0 - q) } else { 0.0 };
            node(t, c, ch, &f);
        }

        // inner piece: G(t) = F(t) - A(0) ~ a t^2 + b t^4 on (0, t_s)
        let inner_b = t_s.powf(-q) / (4.0 - q);
        for i in 0..n {
            contrib[i] += inner_b * f_s[i];
        }
        coef_0 -= inner_b;
        coef_a -= inner_b * t_s * t_s;
        if !high {
            coef_a += t_s.powf(2.0 - q) / (2.0 - q);
        }
        // tail beyond t_e where F = 0
        coef_0 -= t_e.powf(-q) / q;
        if high {
            coef_a -= t_e.powf(2.0 - q) / (q - 2.0);
        }

        for i in 0..n {
            total[i] += weight * (contrib[i] + coef_a * half_curv[i] + coef_0 * a0[i]);
        }
        disc += weight * ((mean_full - mean_half).abs() / 15.0 + coef_a.abs() * (curv_mean - half_curv_coarse).abs());
    }

    let factor = sampler.scale() / gamma(-q / 2.0);
    Ok(Estimate::from_samples(&total, factor, seed).with_extra_error(factor.abs() * disc))
}
