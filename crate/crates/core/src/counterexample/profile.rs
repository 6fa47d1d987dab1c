use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::blockgeom::Layout;
use crate::error::{Error, Result};

/// One monomial coefficient * prod_i s_i^{exponents[i]} in the squared block
/// shares s_i = |x_i|^2 / |x|^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

/// A perturbation h on the unit sphere that depends on block norms only,
/// hence is even and invariant under common block rotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PerturbationProfile {
    /// Smooth nonnegative bump in the geodesic distance between the block-norm
    /// profile (|x_1|, .., |x_n|)/|x| and `center`, supported within `width`.
    BlockNormBump { center: Vec<f64>, width: f64 },
    /// Polynomial in the block shares; may change sign.
    BlockPolynomial { terms: Vec<PolyTerm> },
    /// Symmetric polynomial in the block shares, one coefficient per monomial
    /// symmetric function m_partition(s).
    SymmetricPolynomial {
        terms: Vec<SymmetricTerm>,
        #[serde(skip)]
        expansion: Expansion,
    },
}

/// Monomial expansion of a symmetric profile, built on first evaluation.
#[derive(Clone, Default)]
pub struct Expansion(OnceLock<Expanded>);

#[derive(Clone)]
struct Expanded {
    n: usize,
    top: usize,
    exponents: Vec<u8>,
    coefficients: Vec<f64>,
}

impl PartialEq for Expansion {
    /// A cache; profiles compare by their terms only.
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl std::fmt::Debug for Expansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if self.0.get().is_some() { "Expansion(ready)" } else { "Expansion(empty)" })
    }
}

fn expand(terms: &[SymmetricTerm], n: usize) -> Expanded {
    let top = terms.iter().flat_map(|t| t.partition.iter()).copied().max().unwrap_or(0) as usize;
    let mut exponents = Vec::new();
    let mut coefficients = Vec::new();
    for t in terms {
        let mut e = t.partition.clone();
        e.resize(n, 0);
        for p in distinct_permutations(&e) {
            exponents.extend(p.iter().map(|&v| v as u8));
            coefficients.push(t.coefficient);
        }
    }
    Expanded { n, top, exponents, coefficients }
}

/// coefficient * m_partition(s): the sum of prod_i s_i^{e_i} over all distinct
/// orderings e of the partition padded with zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTerm {
    pub partition: Vec<u32>,
    pub coefficient: f64,
}

impl PerturbationProfile {
    pub fn validate(&self, layout: Layout) -> Result<()> {
        let n = layout.n;
        match self {
            PerturbationProfile::BlockNormBump { center, width } => {
                if center.len() != n {
                    return Err(Error::InvalidBody(format!("bump center needs {n} block norms, got {}", center.len())));
                }
                if center.iter().any(|b| !(*b >= 0.0)) {
                    return Err(Error::InvalidBody("bump center block norms must be nonnegative".into()));
                }
                let s: f64 = center.iter().map(|b| b * b).sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidBody(format!("bump center must have unit length, |b|^2 = {s}")));
                }
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidBody(format!("bump width must be positive, got {width}")));
                }
            }
            PerturbationProfile::SymmetricPolynomial { terms, .. } => {
                if terms.iter().flat_map(|t| t.partition.iter()).any(|&e| e > u8::MAX as u32) {
                    return Err(Error::InvalidBody("symmetric term exponents must be at most 255".into()));
                }
                for t in terms {
                    if t.partition.len() > n || t.partition.contains(&0) || !t.coefficient.is_finite() {
                        return Err(Error::InvalidBody(format!(
                            "symmetric term needs at most {n} positive parts and a finite coefficient"
                        )));
                    }
                }
            }
            PerturbationProfile::BlockPolynomial { terms } => {
                for t in terms {
                    if t.exponents.len() != n || !t.coefficient.is_finite() {
                        return Err(Error::InvalidBody(format!(
                            "polynomial term needs {n} exponents and a finite coefficient"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// h at a unit vector with squared block norms `shares` (summing to 1).
    pub fn eval_profile(&self, shares: &[f64]) -> f64 {
        match self {
            PerturbationProfile::BlockNormBump { center, width } => {
                let c: f64 = shares.iter().zip(center).map(|(s, b)| s.max(0.0).sqrt() * b).sum();
                let dist = c.clamp(-1.0, 1.0).acos();
                if dist >= *width {
                    0.0
                } else {
                    let r = dist / width;
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
            PerturbationProfile::BlockPolynomial { terms } => terms
                .iter()
                .map(|t| t.coefficient * t.exponents.iter().zip(shares).map(|(&e, s)| s.powi(e as i32)).product::<f64>())
                .sum(),
            PerturbationProfile::SymmetricPolynomial { terms, expansion } => {
                let n = shares.len();
                let ex = expansion.0.get_or_init(|| expand(terms, n));
                let fresh;
                let ex = if ex.n == n {
                    ex
                } else {
                    fresh = expand(terms, n);
                    &fresh
                };
                let stride = ex.top + 1;
                let mut stack = [0.0f64; 256];
                let mut heap = Vec::new();
                let pw: &mut [f64] = if n * stride <= stack.len() {
                    &mut stack[..n * stride]
                } else {
                    heap.resize(n * stride, 0.0);
                    &mut heap
                };
                for (i, s) in shares.iter().enumerate() {
                    pw[i * stride] = 1.0;
                    for e in 1..stride {
                        pw[i * stride + e] = pw[i * stride + e - 1] * s;
                    }
                }
                ex.coefficients
                    .iter()
                    .zip(ex.exponents.chunks_exact(n.max(1)))
                    .map(|(c, e)| c * e.iter().enumerate().map(|(i, &a)| pw[i * stride + a as usize]).product::<f64>())
                    .sum()
            }
        }
    }

    /// h at an arbitrary nonzero point of the layout, through its direction.
    pub fn eval_at(&self, layout: Layout, x: &[f64]) -> f64 {
        let sq = layout.block_sq_norms(x);
        let r2: f64 = sq.iter().sum();
        let shares: Vec<f64> = sq.into_iter().map(|s| s / r2).collect();
        self.eval_profile(&shares)
    }

    /// Profile of a whole symmetric polynomial: sum over all distinct
    /// permutations of each exponent pattern.
    pub fn symmetric_polynomial(n: usize, patterns: &[(Vec<u32>, f64)]) -> Self {
        let mut terms = Vec::new();
        for (pattern, coef) in patterns {
            let mut exps = pattern.clone();
            exps.resize(n, 0);
            for p in distinct_permutations(&exps) {
                terms.push(PolyTerm { exponents: p, coefficient: *coef });
            }
        }
        PerturbationProfile::BlockPolynomial { terms }
    }

    /// Compact symmetric profile sum_j coefficient_j m_{partition_j}(s).
    pub fn symmetric(terms: Vec<SymmetricTerm>) -> Self {
        PerturbationProfile::SymmetricPolynomial { terms, expansion: Expansion::default() }
    }
}


/// All distinct orderings of `v`, in lexicographic order.
pub(crate) fn distinct_permutations(v: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = v.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    // next lexicographic permutation
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}
