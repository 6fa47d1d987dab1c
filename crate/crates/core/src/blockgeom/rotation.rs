use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::BlockVector;
use crate::error::{Error, Result};

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn identity(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        SquareMatrix { size, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for r in rows {
            if r.len() != size {
                return Err(Error::DimensionMismatch { expected: size, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(SquareMatrix { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        SquareMatrix { size: n, data }
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        let n = self.size;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        SquareMatrix { size: n, data }
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        SquareMatrix {
            size: self.size,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// y = M x for a single block.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.size;
        for i in 0..n {
            out[i] = (0..n).map(|j| self.data[i * n + j] * x[j]).sum();
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |M^T M - I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose().mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - e).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let n = self.size;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for i in c + 1..n {
                let f = a[i * n + c] / piv;
                for j in c..n {
                    a[i * n + j] -= f * a[c * n + j];
                }
            }
        }
        det
    }
}

/// The family J_0 = I, J_1, .., J_{kappa-1} of orthogonal kappa x kappa matrices
/// with J_m skew for m >= 1 and J_m, J_l anticommuting for m != l.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationFamily {
    kappa: usize,
    matrices: Vec<SquareMatrix>,
}

impl RotationFamily {
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn matrices(&self) -> &[SquareMatrix] {
        &self.matrices
    }

    /// Applies R_{J_m} to every block of `x`.
    pub fn apply(&self, m: usize, x: &[f64]) -> Vec<f64> {
        let k = self.kappa;
        let mut out = vec![0.0; x.len()];
        for (src, dst) in x.chunks_exact(k).zip(out.chunks_exact_mut(k)) {
            self.matrices[m].apply(src, dst);
        }
        out
    }
}

// Octonion products e_a e_b = e_c on the oriented lines of the Fano plane.
const FANO_LINES: [(usize, usize, usize); 7] =
    [(1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5)];

/// Product table of the unit basis elements: (sign, index) of e_a e_b.
fn octonion_product(a: usize, b: usize) -> (f64, usize) {
    if a == 0 {
        return (1.0, b);
    }
    if b == 0 {
        return (1.0, a);
    }
    if a == b {
        return (-1.0, 0);
    }
    for &(i, j, k) in &FANO_LINES {
        for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
            if (a, b) == (x, y) {
                return (1.0, z);
            }
            if (a, b) == (y, x) {
                return (-1.0, z);
            }
        }
    }
    unreachable!("every pair of distinct imaginary units lies on one Fano line")
}

/// Left multiplication by a unit of an algebra with `size` basis elements,
/// described by its basis product table.
fn left_multiplication(size: usize, unit: usize, product: impl Fn(usize, usize) -> (f64, usize)) -> SquareMatrix {
    let mut m = SquareMatrix { size, data: vec![0.0; size * size] };
    for col in 0..size {
        let (sign, row) = product(unit, col);
        m.data[row * size + col] = sign;
    }
    m
}

fn quaternion_product(a: usize, b: usize) -> (f64, usize) {
    // 1, i, j, k with ij = k, jk = i, ki = j.
    match (a, b) {
        (0, x) | (x, 0) => (1.0, x),
        (x, y) if x == y => (-1.0, 0),
        (1, 2) => (1.0, 3),
        (2, 1) => (-1.0, 3),
        (2, 3) => (1.0, 1),
        (3, 2) => (-1.0, 1),
        (3, 1) => (1.0, 2),
        (1, 3) => (-1.0, 2),
        _ => unreachable!(),
    }
}

/// Hurwitz-Radon family for kappa in {1, 2, 4, 8}: real, complex, quaternion and
/// octonion left multiplications by the imaginary units.
///
/// Sign convention: J_m maps the first standard basis vector of a block to the
/// (m+1)-th one, e.g. for kappa = 4, J_1 e_1 = e_2 (left multiplication by i).
pub fn hurwitz_radon_family(kappa: usize) -> Result<RotationFamily> {
    let matrices = match kappa {
        1 => vec![SquareMatrix::identity(1)],
        2 => vec![
            SquareMatrix::identity(2),
            SquareMatrix { size: 2, data: vec![0.0, -1.0, 1.0, 0.0] },
        ],
        4 => (0..4).map(|u| left_multiplication(4, u, quaternion_product)).collect(),
        8 => (0..8).map(|u| left_multiplication(8, u, octonion_product)).collect(),
        other => return Err(Error::UnsupportedKappa(other)),
    };
    Ok(RotationFamily { kappa, matrices })
}

/// R_sigma: rotates every block of `x` by the same orthogonal matrix.
pub fn block_rotate(sigma: &SquareMatrix, x: &BlockVector) -> Result<BlockVector> {
    if sigma.size() != x.kappa() {
        return Err(Error::DimensionMismatch { expected: x.kappa(), got: sigma.size() });
    }
    let defect = sigma.orthogonality_defect();
    if defect > 1e-8 {
        return Err(Error::NotOrthogonal(defect));
    }
    BlockVector::from_layout(rotate_blocks(sigma, x.coords()), x.layout())
}

pub(crate) fn rotate_blocks(sigma: &SquareMatrix, x: &[f64]) -> Vec<f64> {
    let k = sigma.size();
    let mut out = vec![0.0; x.len()];
    for (src, dst) in x.chunks_exact(k).zip(out.chunks_exact_mut(k)) {
        sigma.apply(src, dst);
    }
    out
}

/// Haar-random element of SO(size) (Gram-Schmidt on a Gaussian matrix,
/// first column flipped when the determinant is negative).
pub fn random_rotation<R: Rng + ?Sized>(size: usize, rng: &mut R) -> SquareMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(size);
    while cols.len() < size {
        let mut v: Vec<f64> = (0..size).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p = super::dot(&v, c);
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
            }
        }
        let r = super::norm(&v);
        if r > 1e-8 {
            cols.push(v.into_iter().map(|a| a / r).collect());
        }
    }
    let mut m = SquareMatrix { size, data: vec![0.0; size * size] };
    for (j, c) in cols.iter().enumerate() {
        for i in 0..size {
            m.data[i * size + j] = c[i];
        }
    }
    if m.determinant() < 0.0 {
        for i in 0..size {
            m.data[i * size] = -m.data[i * size];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn families_satisfy_hurwitz_radon_identities_exactly() {
        for kappa in [1, 2, 4, 8] {
            let fam = hurwitz_radon_family(kappa).unwrap();
            let ms = fam.matrices();
            assert_eq!(ms.len(), kappa);
            assert_eq!(ms[0], SquareMatrix::identity(kappa));
            for (m, jm) in ms.iter().enumerate() {
                assert_eq!(jm.orthogonality_defect(), 0.0, "kappa {kappa} J_{m}");
                if m >= 1 {
                    assert_eq!(jm.add(&jm.transpose()).max_abs(), 0.0);
                }
                for jl in ms.iter().skip(m + 1) {
                    let s = jm.transpose().mul(jl).add(&jl.transpose().mul(jm));
                    assert_eq!(s.max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn complex_structure_matrix() {
        let fam = hurwitz_radon_family(2).unwrap();
        assert_eq!(fam.matrices()[1].rows(), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn quaternion_i_maps_first_basis_vector_to_second() {
        let fam = hurwitz_radon_family(4).unwrap();
        let x = BlockVector::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 4, 2).unwrap();
        let y = block_rotate(&fam.matrices()[1], &x).unwrap();
        assert_eq!(y.coords(), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn other_kappas_are_rejected() {
        for k in [3, 5, 6, 7, 9, 16] {
            assert!(matches!(hurwitz_radon_family(k), Err(Error::UnsupportedKappa(x)) if x == k));
        }
    }

    #[test]
    fn quarter_turn_on_each_block() {
        let sigma = SquareMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let x = BlockVector::new(vec![1.0, 0.0, 0.0, 1.0], 2, 2).unwrap();
        let y = block_rotate(&sigma, &x).unwrap();
        assert_eq!(y.coords(), &[0.0, 1.0, -1.0, 0.0]);
        let id = SquareMatrix::identity(2);
        assert_eq!(block_rotate(&id, &x).unwrap(), x);
    }

    #[test]
    fn non_orthogonal_sigma_is_rejected() {
        let sigma = SquareMatrix::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).unwrap();
        let x = BlockVector::new(vec![1.0, 0.0, 0.0, 1.0], 2, 2).unwrap();
        assert!(matches!(block_rotate(&sigma, &x), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn random_rotations_are_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for size in 1..=8 {
            let r = random_rotation(size, &mut rng);
            assert!(r.orthogonality_defect() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn block_rotation_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = random_rotation(4, &mut rng);
        let x = BlockVector::new((0..12).map(|i| (i as f64).sin()).collect(), 4, 3).unwrap();
        let y = block_rotate(&sigma, &x).unwrap();
        assert!((y.norm() - x.norm()).abs() < 1e-12);
    }
}
