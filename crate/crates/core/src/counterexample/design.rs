//! Perturbation profiles with an exactly known section change.
//!
//! Write the perturbed body through its radial function,
//! rho_K^m = rho_L^m - eps * h with m = kappa (n - 1). Every central section
//! then changes by -(eps/m) |S^{m-1}| (Rh)(xi), where R is the mean over the
//! unit sphere of H_xi. Choosing h = R^{-1} g for a polynomial g >= 0 makes
//! every section of K smaller than that of L, while to first order the
//! volume moves by -(eps/m) |S^{N-1}| E[rho_L^kappa h]. The design is a linear
//! program over the nonnegative coefficients of g in the monomial symmetric
//! basis that makes this expectation as negative as possible.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::profile::{PerturbationProfile, SymmetricTerm};
use super::radon::{RadonTransform, SymmetricBasis};
use crate::blockgeom::{BodySpec, Gauge, Layout, Shape};
use crate::error::{Error, Result};
use crate::numeric::dirichlet_rule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignParams {
    /// Degree of g and h in the block shares.
    pub degree: u32,
    /// Lower bound for the boundary curvature gain on faces where L is flat.
    pub face_margin: f64,
    /// Lower bound for g on the sphere, relative to its mean.
    pub floor: f64,
    /// Resolution of the simplex grids carrying the linear constraints.
    pub grid: usize,
    /// Gauss points per stick-breaking step for sphere means.
    pub quad_points: usize,
    pub seed: u64,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams { degree: 12, face_margin: 0.2, floor: 0.3, grid: 30, quad_points: 20, seed: 0 }
    }
}

/// Outcome of the profile design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadonDesign {
    pub layout: Layout,
    pub degree: u32,
    /// g = R h, nonnegative by construction; normalized to sphere mean 1.
    pub section_profile: PerturbationProfile,
    /// h, the radial perturbation of rho_L^m.
    pub profile: PerturbationProfile,
    /// E[rho_L^kappa h] over the unit sphere; negative means the volume grows.
    pub volume_functional: f64,
    /// The same for g = 1, the best case without the sign pattern.
    pub uniform_functional: f64,
    pub flat_faces: bool,
    pub min_face_gain: f64,
    pub min_section_profile: f64,
    /// Block-norm profile where g is largest on the constraint grid.
    pub section_profile_peak: Vec<f64>,
    pub transform_residual: f64,
    pub params: DesignParams,
}

/// Bodies whose boundary is flat to second order where a block vanishes.
fn flat_at_faces(body: &BodySpec) -> bool {
    match &body.shape {
        Shape::BlockQBall { q } => *q > 2.0,
        Shape::BlockNormBody { terms } => terms.iter().all(|t| t.q > 2.0),
        _ => false,
    }
}

/// A point of the layout with squared block norms `s`.
pub(crate) fn block_representative(layout: Layout, s: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; layout.dim()];
    for (i, si) in s.iter().enumerate() {
        x[i * layout.kappa] = si.max(0.0).sqrt();
    }
    x
}

/// Grid points of the simplex {s >= 0, sum s = 1} in `parts` coordinates with
/// nonincreasing entries.
fn sorted_simplex_grid(parts: usize, grid: usize) -> Vec<Vec<f64>> {
    fn rec(rem: usize, cap: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in (0..=cap.min(rem)).rev() {
            cur.push(v);
            rec(rem - v, v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(grid, grid, parts, &mut Vec::new(), &mut raw);
    raw.into_iter().map(|v| v.into_iter().map(|a| a as f64 / grid as f64).collect()).collect()
}

fn symmetric_profile(basis: &SymmetricBasis, coef: &[f64]) -> PerturbationProfile {
    PerturbationProfile::symmetric(
        basis
            .partitions
            .iter()
            .zip(coef)
            .filter(|(_, c)| **c != 0.0)
            .map(|(p, c)| SymmetricTerm { partition: p.clone(), coefficient: *c })
            .collect(),
    )
}

/// Solves the design program for the body `l`.
pub fn design_radon_profile(l: &BodySpec, params: &DesignParams) -> Result<RadonDesign> {
    if !l.is_block_invariant() {
        return Err(Error::InvalidBody("profile design needs a body depending on block norms only".into()));
    }
    if params.degree == 0 || params.grid < 2 || params.quad_points < 2 {
        return Err(Error::InvalidParameter("design needs degree >= 1, grid >= 2, quad_points >= 2".into()));
    }
    let layout = l.layout();
    let (kappa, n) = (layout.kappa, layout.n);
    let m = (kappa * (n - 1)) as f64;
    let k = params.degree;
    let transform = RadonTransform::compute(layout, k, params.seed)?;
    let tinv = transform.inverse()?;
    let basis = transform.basis();
    let b = basis.len();

    // Sphere means of m_mu and of rho_L^kappa m_mu via the block-share law.
    let mut mean_m = vec![0.0; b];
    let mut weighted = vec![0.0; b];
    let mut vals = vec![0.0; b];
    for (s, w) in dirichlet_rule(n, kappa as f64 / 2.0, params.quad_points) {
        basis.eval(&s, &mut vals);
        let rho = l.eval(&block_representative(layout, &s)).powi(-(kappa as i32));
        for j in 0..b {
            mean_m[j] += w * vals[j];
            weighted[j] += w * rho * vals[j];
        }
    }
    // F(w) = sum_lambda weighted_lambda (Tinv w)_lambda
    let objective: Vec<f64> = (0..b).map(|mu| (0..b).map(|la| weighted[la] * tinv[la][mu]).sum()).collect();
    let uniform_functional: f64 = dirichlet_rule(n, kappa as f64 / 2.0, params.quad_points)
        .iter()
        .map(|(s, w)| w * l.eval(&block_representative(layout, s)).powi(-(kappa as i32)))
        .sum();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = objective.iter().map(|&c| lp.add_var(c, (0.0, f64::INFINITY))).collect();
    let row = |coefs: &[f64]| -> Vec<(microlp::Variable, f64)> { vars.iter().copied().zip(coefs.iter().copied()).collect() };
    lp.add_constraint(row(&mean_m), ComparisonOp::Eq, 1.0);

    let flat = flat_at_faces(l) && n >= 2;
    let gain_rows: Vec<Vec<f64>> = if flat {
        let mut d = vec![0.0; b];
        sorted_simplex_grid(n - 1, params.grid)
            .into_iter()
            .map(|rest| {
                let mut s = vec![0.0];
                s.extend(rest);
                basis.partial(&s, 0, &mut d);
                basis.eval(&s, &mut vals);
                let per_lambda: Vec<f64> = (0..b).map(|la| d[la] - (k as f64 + m / 2.0) * vals[la]).collect();
                (0..b).map(|mu| (0..b).map(|la| per_lambda[la] * tinv[la][mu]).sum()).collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    for r in &gain_rows {
        lp.add_constraint(row(r), ComparisonOp::Ge, params.face_margin);
    }
    let floor_points = sorted_simplex_grid(n, params.grid);
    let floor_rows: Vec<Vec<f64>> = floor_points
        .iter()
        .map(|s| {
            basis.eval(s, &mut vals);
            vals.clone()
        })
        .collect();
    for r in &floor_rows {
        lp.add_constraint(row(r), ComparisonOp::Ge, params.floor);
    }

    let solution = lp
        .solve()
        .map_err(|e| Error::Construction(format!("profile design program has no solution: {e}")))?
        .into_solution()
        .map_err(|_| Error::Construction("profile design program was interrupted".into()))?;
    let w: Vec<f64> = vars.iter().map(|v| solution.var_value(*v).max(0.0)).collect();
    let h: Vec<f64> = (0..b).map(|la| (0..b).map(|mu| tinv[la][mu] * w[mu]).sum()).collect();
    let dotp = |r: &Vec<f64>| -> f64 { r.iter().zip(&w).map(|(a, c)| a * c).sum() };
    let min_face_gain = gain_rows.iter().map(dotp).fold(f64::INFINITY, f64::min);
    let g_grid: Vec<f64> = floor_rows.iter().map(dotp).collect();
    let min_section_profile = g_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let peak = (0..g_grid.len()).fold(0, |best, i| if g_grid[i] > g_grid[best] { i } else { best });
    let section_profile_peak = floor_points[peak].iter().map(|s| s.sqrt()).collect();
    Ok(RadonDesign {
        layout,
        degree: k,
        section_profile: symmetric_profile(&basis, &w),
        profile: symmetric_profile(&basis, &h),
        volume_functional: objective.iter().zip(&w).map(|(a, c)| a * c).sum(),
        uniform_functional,
        flat_faces: flat,
        min_face_gain,
        min_section_profile,
        section_profile_peak,
        transform_residual: transform.fit_residual,
        params: params.clone(),
    })
}

/// Runs the design with `params` and, while it promises no volume gain,
/// retries with the face margin and floor relaxed to at most 0.05 and 0.1 at
/// the same degree and at degree + 2 and + 4. Higher degrees are avoided: the
/// inverse transform loses accuracy quickly beyond that. Returns the first
/// design with a negative volume functional, or the last one tried.
pub fn design_with_fallback(l: &BodySpec, params: &DesignParams) -> Result<RadonDesign> {
    let mut design = design_radon_profile(l, params)?;
    let relaxed = DesignParams { face_margin: params.face_margin.min(0.05), floor: params.floor.min(0.1), ..params.clone() };
    for extra in [0, 2, 4] {
        if design.volume_functional < 0.0 {
            break;
        }
        let next = DesignParams { degree: params.degree + extra, ..relaxed.clone() };
        if next == design.params {
            continue;
        }
        match design_radon_profile(l, &next) {
            Ok(d) => design = d,
            Err(Error::Construction(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(design)
}
