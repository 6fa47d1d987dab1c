//! Exact section transforms of symmetric polynomials in the block shares.
//!
//! For a function h(theta) = P(s(theta)) with s_i = |theta_i|^2 and P a
//! symmetric form of degree k, the mean of h over the unit sphere of H_xi is
//! again such a form in s(xi). The map P -> RP is therefore a k-independent
//! square matrix on the monomial symmetric basis, which this module computes
//! from exact Gaussian moments of quadratic forms and a least-squares fit
//! over a few directions.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::distinct_permutations;
use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, Layout};
use crate::error::{Error, Result};
use crate::integrate::sample_sphere;
use crate::numeric::{gamma, gauss_hermite_normal};

/// Partitions of `k` into at most `max_parts` positive parts, parts descending.
pub fn partitions(k: u32, max_parts: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, cap: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        if parts == 0 {
            return;
        }
        for p in (1..=cap.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Monomial symmetric functions m_lambda(s) of one degree in n variables.
#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    pub n: usize,
    pub degree: u32,
    pub partitions: Vec<Vec<u32>>,
    exponents: Vec<Vec<Vec<u32>>>,
}

impl SymmetricBasis {
    pub fn new(n: usize, degree: u32) -> Self {
        let partitions = partitions(degree, n);
        let exponents = partitions
            .iter()
            .map(|p| {
                let mut e = p.clone();
                e.resize(n, 0);
                distinct_permutations(&e)
            })
            .collect();
        SymmetricBasis { n, degree, partitions, exponents }
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    /// Exponent vectors of every monomial in m_lambda.
    pub fn monomials(&self, index: usize) -> &[Vec<u32>] {
        &self.exponents[index]
    }

    fn powers(&self, s: &[f64]) -> Vec<f64> {
        let k = self.degree as usize + 1;
        let mut pw = vec![1.0; self.n * k];
        for (i, &v) in s.iter().enumerate() {
            for e in 1..k {
                pw[i * k + e] = pw[i * k + e - 1] * v;
            }
        }
        pw
    }

    /// m_lambda(s) for every basis element.
    pub fn eval(&self, s: &[f64], out: &mut [f64]) {
        let k = self.degree as usize + 1;
        let pw = self.powers(s);
        for (o, exps) in out.iter_mut().zip(&self.exponents) {
            *o = exps
                .iter()
                .map(|e| e.iter().enumerate().map(|(i, &a)| pw[i * k + a as usize]).product::<f64>())
                .sum();
        }
    }

    /// d m_lambda / d s_j for every basis element.
    pub fn partial(&self, s: &[f64], j: usize, out: &mut [f64]) {
        let k = self.degree as usize + 1;
        let pw = self.powers(s);
        for (o, exps) in out.iter_mut().zip(&self.exponents) {
            *o = exps
                .iter()
                .filter(|e| e[j] > 0)
                .map(|e| {
                    e.iter()
                        .enumerate()
                        .map(|(i, &a)| if i == j { a as f64 * pw[i * k + a as usize - 1] } else { pw[i * k + a as usize] })
                        .product::<f64>()
                })
                .sum();
        }
    }
}

/// Sparse-grid (Smolyak) Gauss-Hermite rule for N(0, I_d), exact for
/// polynomials of total degree <= 2k + 1. Coinciding nodes are merged and the
/// node list is sorted, so the rule is deterministic.
pub fn smolyak_hermite(d: usize, k: usize) -> Vec<(Vec<f64>, f64)> {
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..=k + 1).map(|i| if i == 0 { (vec![], vec![]) } else { gauss_hermite_normal(i) }).collect();
    let q = d + k;
    let binom = |n: usize, r: usize| -> f64 { (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let mut acc: BTreeMap<Vec<u64>, (Vec<f64>, f64)> = BTreeMap::new();
    let mut idx = vec![1usize; d];
    loop {
        let total: usize = idx.iter().sum();
        if total + d > q {
            let c = binom(d - 1, q - total) * if (q - total) % 2 == 0 { 1.0 } else { -1.0 };
            // tensor grid over idx
            let mut pos = vec![0usize; d];
            loop {
                let mut node = Vec::with_capacity(d);
                let mut w = c;
                for (j, &p) in pos.iter().enumerate() {
                    let (x, wt) = &rules[idx[j]];
                    node.push(x[p]);
                    w *= wt[p];
                }
                let key: Vec<u64> = node.iter().map(|v| (v + 0.0).to_bits()).collect();
                acc.entry(key).or_insert_with(|| (node, 0.0)).1 += w;
                let mut j = 0;
                while j < d {
                    pos[j] += 1;
                    if pos[j] < idx[j] {
                        break;
                    }
                    pos[j] = 0;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
        }
        // next multi-index with entries >= 1 and sum <= q
        let mut j = 0;
        loop {
            if j == d {
                return acc.into_values().filter(|(_, w)| *w != 0.0).collect();
            }
            idx[j] += 1;
            if idx.iter().sum::<usize>() <= q {
                break;
            }
            idx[j] = 1;
            j += 1;
        }
    }
}

/// Matrix of the section transform on symmetric forms of one degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadonTransform {
    pub layout: Layout,
    pub degree: u32,
    pub partitions: Vec<Vec<u32>>,
    /// `matrix[mu][lambda]`: coefficient of m_mu in the transform of m_lambda,
    /// where the transform is the mean over the unit sphere of H_xi.
    pub matrix: Vec<Vec<f64>>,
    /// Max |fit - exact| / max |exact| over the fitting directions.
    pub fit_residual: f64,
    pub fit_directions: usize,
    pub seed: u64,
}

/// Weak compositions of every degree 0..=k into n parts, with index tables
/// for products of monomials. Shared by all directions of one transform.
struct Graded {
    monomials: Vec<Vec<Vec<u32>>>,
    /// `product[j1][j2][a * |H_j2| + b]`: index in degree j1 + j2 of the
    /// product of monomial a of degree j1 and monomial b of degree j2.
    product: Vec<Vec<Vec<u32>>>,
    top: HashMap<Vec<u32>, usize>,
}

impl Graded {
    fn new(n: usize, k: usize) -> Self {
        fn rec(rem: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == cur.len() {
                cur[i] = rem;
                out.push(cur.clone());
                return;
            }
            for v in 0..=rem {
                cur[i] = v;
                rec(rem - v, i + 1, cur, out);
            }
        }
        let monomials: Vec<Vec<Vec<u32>>> = (0..=k as u32)
            .map(|j| {
                let mut out = Vec::new();
                rec(j, 0, &mut vec![0; n], &mut out);
                out
            })
            .collect();
        let index: Vec<HashMap<&[u32], u32>> = monomials
            .iter()
            .map(|ms| ms.iter().enumerate().map(|(i, m)| (m.as_slice(), i as u32)).collect())
            .collect();
        let product = (0..=k)
            .map(|j1| {
                (0..=k - j1)
                    .map(|j2| {
                        if j1 == 0 {
                            return Vec::new();
                        }
                        let mut sum = vec![0u32; n];
                        let mut table = Vec::with_capacity(monomials[j1].len() * monomials[j2].len());
                        for a in &monomials[j1] {
                            for b in &monomials[j2] {
                                for (s, (x, y)) in sum.iter_mut().zip(a.iter().zip(b)) {
                                    *s = x + y;
                                }
                                table.push(index[j1 + j2][sum.as_slice()]);
                            }
                        }
                        table
                    })
                    .collect()
            })
            .collect();
        let top = monomials[k].iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Graded { monomials, product, top }
    }
}

/// Exact means of every m_lambda(s(theta)) over the unit sphere of H_xi.
///
/// With z ~ N(0, I_d) in coordinates of an orthonormal frame of H_xi, each
/// block share is a quadratic form q_i = z^T Q_i z, and
/// log E exp(sum t_i q_i) = sum_j 2^(j-1)/j tr(A(t)^j), A(t) = sum t_i Q_i.
/// Exponentiating this series degree by degree gives all Gaussian moments of
/// q of total degree k, and dividing by E|z|^{2k} gives the sphere means.
fn section_means(basis: &SymmetricBasis, graded: &Graded, layout: Layout, xi: &[f64]) -> Result<Vec<f64>> {
    let n = layout.n;
    let k = basis.degree as usize;
    let xi = BlockVector::from_layout(xi.to_vec(), layout)?;
    let frame = section_frame(&xi, &hurwitz_radon_family(layout.kappa)?)?;
    let d = frame.e_in.len();
    let gram: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let block = |a: usize| &frame.e_in[a][i * layout.kappa..(i + 1) * layout.kappa];
            DMatrix::from_fn(d, d, |a, b| block(a).iter().zip(block(b)).map(|(x, y)| x * y).sum())
        })
        .collect();
    let q1: Vec<&DMatrix<f64>> = graded.monomials[1].iter().map(|m| &gram[m.iter().position(|&e| e == 1).unwrap()]).collect();

    // log-series components L_j, via the polynomial matrix powers A(t)^j
    let mut log = vec![vec![0.0]; k + 1];
    let mut power: Vec<DMatrix<f64>> = q1.iter().map(|q| (*q).clone()).collect();
    for j in 1..=k {
        if j > 1 {
            let mut next = vec![DMatrix::zeros(d, d); graded.monomials[j].len()];
            let table = &graded.product[j - 1][1];
            for (a, c) in power.iter().enumerate() {
                for (b, q) in q1.iter().enumerate() {
                    next[table[a * q1.len() + b] as usize] += c * *q;
                }
            }
            power = next;
        }
        let f = 2f64.powi(j as i32 - 1) / j as f64;
        log[j] = power.iter().map(|c| f * c.trace()).collect();
    }

    // exp of the series: m E_m = sum_j j L_j E_{m-j}
    let mut exp: Vec<Vec<f64>> = vec![vec![1.0]];
    for m in 1..=k {
        let mut e = vec![0.0; graded.monomials[m].len()];
        for j in 1..=m {
            let table = &graded.product[j][m - j];
            let rhs = &exp[m - j];
            for (a, l) in log[j].iter().enumerate() {
                let w = j as f64 * l;
                for (b, r) in rhs.iter().enumerate() {
                    e[table[a * rhs.len() + b] as usize] += w * r;
                }
            }
        }
        e.iter_mut().for_each(|v| *v /= m as f64);
        exp.push(e);
    }

    // E|z|^{2k} for z ~ N(0, I_d)
    let norm = 2f64.powi(k as i32) * gamma(d as f64 / 2.0 + k as f64) / gamma(d as f64 / 2.0);
    let factorial = |a: u32| (1..=a).map(f64::from).product::<f64>();
    Ok((0..basis.len())
        .map(|l| {
            basis
                .monomials(l)
                .iter()
                .map(|a| exp[k][graded.top[a]] * a.iter().map(|&e| factorial(e)).product::<f64>())
                .sum::<f64>()
                / norm
        })
        .collect())
}

impl RadonTransform {
    /// Computes the matrix from `2B + 4` seeded directions (B = basis size).
    pub fn compute(layout: Layout, degree: u32, seed: u64) -> Result<Self> {
        let basis = SymmetricBasis::new(layout.n, degree);
        let b = basis.len();
        let graded = Graded::new(layout.n, degree as usize);
        let m = 2 * b + 4;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs: Vec<Vec<f64>> = (0..m).map(|_| sample_sphere(layout.dim(), &mut rng)).collect();
        let means = dirs
            .par_iter()
            .map(|xi| section_means(&basis, &graded, layout, xi))
            .collect::<Result<Vec<_>>>()?;
        let mut s_rows = Vec::with_capacity(m * b);
        let mut vals = vec![0.0; b];
        for xi in &dirs {
            basis.eval(&layout.block_sq_norms(xi), &mut vals);
            s_rows.extend_from_slice(&vals);
        }
        let r_rows = means.concat();
        let s = DMatrix::from_row_slice(m, b, &s_rows);
        let r = DMatrix::from_row_slice(m, b, &r_rows);
        let t = s
            .clone()
            .svd(true, true)
            .solve(&r, 1e-14)
            .map_err(|e| Error::Construction(format!("least-squares fit of the section transform failed: {e}")))?;
        let fit = &s * &t;
        let scale = r.amax();
        let fit_residual = (&fit - &r).amax() / scale;
        let matrix = (0..b).map(|i| (0..b).map(|j| t[(i, j)]).collect()).collect();
        Ok(RadonTransform {
            layout,
            degree,
            partitions: basis.partitions.clone(),
            matrix,
            fit_residual,
            fit_directions: m,
            seed,
        })
    }

    pub fn basis(&self) -> SymmetricBasis {
        SymmetricBasis::new(self.layout.n, self.degree)
    }

    /// Inverse matrix: column lambda holds the coefficients of the form whose
    /// transform is m_lambda.
    pub fn inverse(&self) -> Result<Vec<Vec<f64>>> {
        let b = self.matrix.len();
        let t = DMatrix::from_fn(b, b, |i, j| self.matrix[i][j]);
        let inv = t
            .try_inverse()
            .ok_or_else(|| Error::Construction("section transform matrix is singular".into()))?;
        Ok((0..b).map(|i| (0..b).map(|j| inv[(i, j)]).collect()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{dirichlet_rule, CHUNK};
    use nalgebra::Complex;

    // Independent cubature oracles for the section means.

    /// Exact rule for the uniform measure on the unit sphere of C^d, valid for
    /// integrands that are polynomials of degree <= k in the |z_i|^2 of a
    /// complex-linear image of z. Nodes are (re, im) pairs per coordinate.
    fn complex_sphere_rule(d: usize, k: usize) -> Vec<(Vec<Complex<f64>>, f64)> {
        let shares = dirichlet_rule(d, 1.0, k / 2 + 1);
        let p = k + 1;
        let phases = p.pow(d.saturating_sub(1) as u32);
        let mut out = Vec::with_capacity(shares.len() * phases);
        for (r, w) in &shares {
            for code in 0..phases {
                let mut c = code;
                let z = r
                    .iter()
                    .enumerate()
                    .map(|(j, rj)| {
                        let phase = if j == 0 {
                            0.0
                        } else {
                            let a = c % p;
                            c /= p;
                            std::f64::consts::TAU * a as f64 / p as f64
                        };
                        Complex::from_polar(rj.sqrt(), phase)
                    })
                    .collect();
                out.push((z, w / phases as f64));
            }
        }
        out
    }

    /// Orthonormal basis of the Hermitian complement of `xi` in C^n.
    fn complex_complement(xi: &[Complex<f64>]) -> Vec<Vec<Complex<f64>>> {
        let n = xi.len();
        let inner = |a: &[Complex<f64>], b: &[Complex<f64>]| -> Complex<f64> { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
        let mut basis: Vec<Vec<Complex<f64>>> = vec![xi.to_vec()];
        let mut unused: Vec<usize> = (0..n).collect();
        while basis.len() < n {
            let mut best: Option<(usize, Vec<Complex<f64>>, f64)> = None;
            for (pos, &i) in unused.iter().enumerate() {
                let mut v = vec![Complex::new(0.0, 0.0); n];
                v[i] = Complex::new(1.0, 0.0);
                for _ in 0..2 {
                    for u in &basis {
                        let c = inner(u, &v);
                        for (vj, uj) in v.iter_mut().zip(u) {
                            *vj -= c * uj;
                        }
                    }
                }
                let norm = inner(&v, &v).re.sqrt();
                if best.as_ref().map_or(true, |b| norm > b.2) {
                    best = Some((pos, v, norm));
                }
            }
            let (pos, v, norm) = best.expect("candidates remain while the basis is incomplete");
            unused.remove(pos);
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
        basis.split_off(1)
    }

    fn accumulate<I: Iterator<Item = (Vec<f64>, f64)>>(basis: &SymmetricBasis, nodes: I, sum: &mut [f64]) {
        let mut vals = vec![0.0; basis.len()];
        for (s, w) in nodes {
            basis.eval(&s, &mut vals);
            for (a, v) in sum.iter_mut().zip(&vals) {
                *a += w * v;
            }
        }
    }

    fn reduce(parts: Vec<Vec<f64>>, b: usize) -> Vec<f64> {
        let mut total = vec![0.0; b];
        for p in parts {
            for (a, v) in total.iter_mut().zip(p) {
                *a += v;
            }
        }
        total
    }

    /// Cubature used for section means: the complex rule for kappa = 2, otherwise
    /// a Gaussian sparse grid on H_xi.
    enum SectionRule {
        Complex(Vec<(Vec<Complex<f64>>, f64)>),
        Gaussian(Vec<(Vec<f64>, f64)>),
    }

    impl SectionRule {
        fn new(layout: Layout, degree: u32) -> Self {
            if layout.kappa == 2 && layout.n >= 2 {
                SectionRule::Complex(complex_sphere_rule(layout.n - 1, degree as usize))
            } else {
                SectionRule::Gaussian(smolyak_hermite(layout.section_dim(), degree as usize))
            }
        }
    }

    /// Exact means of every m_lambda(s(theta)) over the unit sphere of H_xi.
    fn cubature_means(basis: &SymmetricBasis, layout: Layout, xi: &[f64], rule: &SectionRule) -> Result<Vec<f64>> {
        let b = basis.len();
        match rule {
            SectionRule::Complex(nodes) => {
                let xc: Vec<Complex<f64>> = xi.chunks(2).map(|c| Complex::new(c[0], c[1])).collect();
                let frame = complex_complement(&xc);
                let parts = nodes
                    .par_chunks(CHUNK)
                    .map(|chunk| {
                        let mut sum = vec![0.0; b];
                        let it = chunk.iter().map(|(z, w)| {
                            let s = (0..layout.n)
                                .map(|i| frame.iter().zip(z).map(|(u, zj)| u[i] * zj).sum::<Complex<f64>>().norm_sqr())
                                .collect();
                            (s, *w)
                        });
                        accumulate(basis, it, &mut sum);
                        sum
                    })
                    .collect();
                Ok(reduce(parts, b))
            }
            SectionRule::Gaussian(nodes) => {
                let xi = BlockVector::from_layout(xi.to_vec(), layout)?;
                let frame = section_frame(&xi, &hurwitz_radon_family(layout.kappa)?)?;
                let parts = nodes
                    .par_chunks(CHUNK)
                    .map(|chunk| {
                        let mut sum = vec![0.0; b];
                        let it = chunk.iter().map(|(z, w)| (layout.block_sq_norms(&frame.in_point(z)), *w));
                        accumulate(basis, it, &mut sum);
                        sum
                    })
                    .collect();
                // E|z|^{2k} for z ~ N(0, I_d)
                let d = frame.e_in.len() as f64;
                let k = basis.degree as f64;
                let norm = 2f64.powf(k) * gamma(d / 2.0 + k) / gamma(d / 2.0);
                Ok(reduce(parts, b).into_iter().map(|v| v / norm).collect())
            }
        }
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(4, 4).len(), 5);
        assert_eq!(partitions(6, 4).len(), 9);
        assert_eq!(partitions(6, 2).len(), 4);
        assert_eq!(partitions(5, 3)[0], vec![5]);
    }

    #[test]
    fn smolyak_is_exact_for_gaussian_moments() {
        let rule = smolyak_hermite(3, 3);
        let moment = |a: [i32; 3]| -> f64 { rule.iter().map(|(z, w)| w * z[0].powi(a[0]) * z[1].powi(a[1]) * z[2].powi(a[2])).sum() };
        assert!((moment([0, 0, 0]) - 1.0).abs() < 1e-12);
        assert!((moment([2, 2, 2]) - 1.0).abs() < 1e-12);
        assert!((moment([4, 2, 0]) - 3.0).abs() < 1e-12);
        assert!((moment([6, 0, 0]) - 15.0).abs() < 1e-11);
        assert!(moment([3, 1, 2]).abs() < 1e-12);
        // degree 7 odd moment vanishes, degree 8 is beyond exactness in general
        assert!((moment([2, 2, 0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sum_of_shares_is_fixed() {
        // m_(1) = sum s_i = 1 on the sphere, so its transform is m_(1) itself
        let t = RadonTransform::compute(Layout { kappa: 2, n: 3 }, 1, 1).unwrap();
        assert_eq!(t.matrix.len(), 1);
        assert!((t.matrix[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_transform_is_polynomial() {
        let t = RadonTransform::compute(Layout { kappa: 2, n: 4 }, 3, 2).unwrap();
        assert!(t.fit_residual < 1e-10, "residual {}", t.fit_residual);
        let inv = t.inverse().unwrap();
        assert_eq!(inv.len(), 3);
    }

    #[test]
    fn partial_derivatives() {
        let basis = SymmetricBasis::new(3, 3);
        let s = [0.2, 0.3, 0.5];
        let mut d = vec![0.0; basis.len()];
        basis.partial(&s, 1, &mut d);
        let mut p = vec![0.0; basis.len()];
        let mut m = vec![0.0; basis.len()];
        basis.eval(&[0.2, 0.3 + 1e-6, 0.5], &mut p);
        basis.eval(&[0.2, 0.3 - 1e-6, 0.5], &mut m);
        for i in 0..basis.len() {
            assert!((d[i] - (p[i] - m[i]) / 2e-6).abs() < 1e-7);
        }
    }

    #[test]
    fn moments_agree_with_cubature() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (kappa, n, degree) in [(2, 4, 4), (1, 4, 3), (4, 2, 3), (2, 3, 5)] {
            let layout = Layout { kappa, n };
            let basis = SymmetricBasis::new(n, degree);
            let graded = Graded::new(n, degree as usize);
            let xi = sample_sphere(layout.dim(), &mut rng);
            let exact = section_means(&basis, &graded, layout, &xi).unwrap();
            let mut rules = vec![SectionRule::Gaussian(smolyak_hermite(layout.section_dim(), degree as usize))];
            if kappa == 2 {
                rules.push(SectionRule::new(layout, degree));
            }
            for rule in &rules {
                let c = cubature_means(&basis, layout, &xi, rule).unwrap();
                for (x, y) in exact.iter().zip(&c) {
                    assert!((x - y).abs() < 1e-11 * x.abs().max(1e-3), "({kappa},{n}) deg {degree}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn complex_rule_agrees_with_sparse_grid() {
        let layout = Layout { kappa: 2, n: 4 };
        let basis = SymmetricBasis::new(4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xi = sample_sphere(8, &mut rng);
        let a = cubature_means(&basis, layout, &xi, &SectionRule::new(layout, 4)).unwrap();
        let b = cubature_means(&basis, layout, &xi, &SectionRule::Gaussian(smolyak_hermite(6, 4))).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12 * x.abs().max(1e-3), "{x} vs {y}");
        }
    }
}
