//! Unconstrained minimization of a convex function of a few variables.

fn gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64], scale: f64) -> Vec<f64> {
    let h = 1e-6 * scale.max(1e-3);
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// BFGS with a central-difference gradient and backtracking line search,
/// followed by a shrinking compass search, which also copes with kinks where
/// the gradient is unreliable. `scale` is the expected size of x.
pub(crate) fn minimize_convex(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, scale: f64) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    if n == 0 {
        return (x, fx);
    }
    let mut hinv: Vec<f64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut g = gradient(&f, &x, scale);
    for _ in 0..200 {
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < 1e-11 {
            break;
        }
        let p: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<f64>()).collect();
        let slope: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        let (p, slope) = if slope < 0.0 {
            (p, slope)
        } else {
            hinv.iter_mut().enumerate().for_each(|(k, v)| *v = if k % (n + 1) == 0 { 1.0 } else { 0.0 });
            (g.iter().map(|v| -v).collect(), -gn * gn)
        };
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let fnew = f(&xn);
            if fnew <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let gnew = gradient(&f, &xn, scale);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i * n + j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let improvement = fx - fnew;
        x = xn;
        fx = fnew;
        g = gnew;
        if improvement <= 1e-15 * fx.abs() {
            break;
        }
    }
    // compass polish
    let mut delta = 0.1 * scale.max(1e-3);
    let mut y = x.clone();
    while delta > 1e-10 * scale.max(1e-3) {
        let mut improved = false;
        for i in 0..n {
            for sgn in [1.0, -1.0] {
                y[i] = x[i] + sgn * delta;
                let fy = f(&y);
                if fy < fx {
                    x[i] = y[i];
                    fx = fy;
                    improved = true;
                } else {
                    y[i] = x[i];
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let (x, fx) = minimize_convex(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5, vec![0.0, 0.0], 1.0);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6);
        assert!((fx - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kinked_norm() {
        // l1 distance from (0.3, -0.2) in the first two coordinates plus a smooth term
        let f = |x: &[f64]| (x[0] - 0.3).abs() + (x[1] + 0.2).abs() + x[2] * x[2];
        let (_, fx) = minimize_convex(f, vec![1.0, 1.0, 1.0], 1.0);
        assert!(fx < 1e-8);
    }
}
