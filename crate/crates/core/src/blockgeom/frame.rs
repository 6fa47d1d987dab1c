use super::{dot, BlockVector, RotationFamily};
use crate::blockgeom::rotation::rotate_blocks;
use crate::error::{Error, Result};

/// Orthonormal frame adapted to a direction `xi`: `e_perp` spans the
/// kappa-dimensional orbit plane {R_J xi}, `e_in` spans its complement H.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceFrame {
    pub xi: BlockVector,
    pub e_perp: Vec<Vec<f64>>,
    pub e_in: Vec<Vec<f64>>,
}

impl SubspaceFrame {
    pub fn kappa(&self) -> usize {
        self.e_perp.len()
    }

    pub fn dim(&self) -> usize {
        self.xi.coords().len()
    }

    /// sum_m u_m e_perp[m]
    pub fn perp_point(&self, u: &[f64]) -> Vec<f64> {
        combine(&self.e_perp, u, self.dim())
    }

    /// sum_j z_j e_in[j]
    pub fn in_point(&self, z: &[f64]) -> Vec<f64> {
        combine(&self.e_in, z, self.dim())
    }

    /// max |G - I| over the Gram matrix of all frame vectors.
    pub fn gram_defect(&self) -> f64 {
        let all: Vec<&Vec<f64>> = self.e_perp.iter().chain(&self.e_in).collect();
        let mut worst = 0.0f64;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

fn combine(basis: &[Vec<f64>], coeffs: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (c, v) in coeffs.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// Builds the frame for unit `xi`. The complement is completed by modified
/// Gram-Schmidt over the standard basis, always taking the candidate with the
/// largest residual next, so the result is a deterministic function of `xi`.
pub fn section_frame(xi: &BlockVector, family: &RotationFamily) -> Result<SubspaceFrame> {
    let kappa = xi.kappa();
    if family.kappa() != kappa {
        return Err(Error::DimensionMismatch { expected: kappa, got: family.kappa() });
    }
    let len = xi.norm();
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("section direction must be a unit vector, |xi| = {len}")));
    }
    let dim = xi.coords().len();
    let e_perp: Vec<Vec<f64>> = family.matrices().iter().map(|j| rotate_blocks(j, xi.coords())).collect();

    let mut basis: Vec<Vec<f64>> = e_perp.clone();
    let mut candidates: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    for c in candidates.iter_mut() {
        project_out(c, &basis);
    }
    let mut e_in = Vec::with_capacity(dim - kappa);
    while e_in.len() < dim - kappa {
        let (best, _) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, dot(c, c)))
            .fold((usize::MAX, -1.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
        let mut v = candidates.swap_remove(best);
        // second pass restores orthogonality lost to cancellation
        project_out(&mut v, &basis);
        let r = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= r);
        for c in candidates.iter_mut() {
            project_out(c, std::slice::from_ref(&v));
        }
        basis.push(v.clone());
        e_in.push(v);
    }
    Ok(SubspaceFrame { xi: xi.clone(), e_perp, e_in })
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
}
