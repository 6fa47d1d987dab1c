use serde::{Deserialize, Serialize};

use super::{norm, BlockVector, Layout};
use crate::counterexample::PerturbationProfile;
use crate::error::{Error, Result};

/// Anything with a Minkowski functional on a block layout.
pub trait Gauge: Sync {
    fn layout(&self) -> Layout;

    /// Gauge value at `x`; `x.len()` must equal `layout().dim()`. Returns NaN
    /// where the functional is undefined (e.g. an over-perturbed body).
    fn eval(&self, x: &[f64]) -> f64;
}

/// One weighted l_q norm of the scaled block-norm vector, `weight * |scales . b|_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTerm {
    pub weight: f64,
    pub q: f64,
    pub scales: Vec<f64>,
}

/// Body families, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    EuclideanBall {
        radius: f64,
    },
    /// Unit ball of (sum_i |x_i|_2^q)^(1/q).
    BlockQBall {
        q: f64,
    },
    /// Gauge F(|x_1|, .., |x_n|) with F a positive sum of monotone l_q norms.
    BlockNormBody {
        terms: Vec<NormTerm>,
    },
    /// |x|_K^{-m} = |x|_base^{-m} - epsilon |x|_2^{-m} h(x/|x|_2), m = kappa n - kappa.
    Perturbed {
        base: Box<BodySpec>,
        profile: PerturbationProfile,
        epsilon: f64,
    },
}

/// An origin-symmetric star body in R^{kappa n} given by its gauge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub kappa: usize,
    pub n: usize,
    #[serde(flatten)]
    pub shape: Shape,
}

impl BodySpec {
    pub fn new(kappa: usize, n: usize, shape: Shape) -> Result<Self> {
        let body = BodySpec { kappa, n, shape };
        body.validate()?;
        Ok(body)
    }

    pub fn ball(kappa: usize, n: usize, radius: f64) -> Result<Self> {
        Self::new(kappa, n, Shape::EuclideanBall { radius })
    }

    pub fn block_q_ball(kappa: usize, n: usize, q: f64) -> Result<Self> {
        Self::new(kappa, n, Shape::BlockQBall { q })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let body: BodySpec = serde_json::from_str(text)?;
        body.validate()?;
        Ok(body)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.kappa, 1 | 2 | 4 | 8) {
            return Err(Error::UnsupportedKappa(self.kappa));
        }
        let layout = Layout::new(self.kappa, self.n)?;
        match &self.shape {
            Shape::EuclideanBall { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
                }
            }
            Shape::BlockQBall { q } => {
                if !(*q > 0.0 && q.is_finite()) {
                    return Err(Error::InvalidBody(format!("block q-ball needs q > 0, got {q}")));
                }
            }
            Shape::BlockNormBody { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidBody("block-norm body needs at least one term".into()));
                }
                for (i, t) in terms.iter().enumerate() {
                    if !(t.weight > 0.0 && t.weight.is_finite()) || !(t.q >= 1.0 && t.q.is_finite()) {
                        return Err(Error::InvalidBody(format!(
                            "term {i}: weight must be positive and q >= 1 (got weight {}, q {})",
                            t.weight, t.q
                        )));
                    }
                    if t.scales.len() != self.n || t.scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                        return Err(Error::InvalidBody(format!(
                            "term {i}: expected {} positive scales",
                            self.n
                        )));
                    }
                }
            }
            Shape::Perturbed { base, profile, epsilon } => {
                base.validate()?;
                if (base.kappa, base.n) != (self.kappa, self.n) {
                    return Err(Error::InvalidBody(format!(
                        "perturbation base lives in layout ({}, {}), expected ({}, {})",
                        base.kappa, base.n, self.kappa, self.n
                    )));
                }
                if !(*epsilon >= 0.0 && epsilon.is_finite()) {
                    return Err(Error::InvalidBody(format!("epsilon must be nonnegative, got {epsilon}")));
                }
                profile.validate(layout)?;
            }
        }
        Ok(())
    }

    /// Gauge at a block vector, checking the dimension.
    pub fn gauge(&self, x: &BlockVector) -> Result<f64> {
        if x.kappa() != self.kappa || x.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.kappa * self.n, got: x.coords().len() });
        }
        Ok(self.eval(x.coords()))
    }

    /// Short human-readable identifier used in reports.
    pub fn id(&self) -> String {
        match &self.shape {
            Shape::EuclideanBall { radius } => format!("ball(r={radius})[k={},n={}]", self.kappa, self.n),
            Shape::BlockQBall { q } => format!("block_q_ball(q={q})[k={},n={}]", self.kappa, self.n),
            Shape::BlockNormBody { terms } => {
                format!("block_norm_body({} terms)[k={},n={}]", terms.len(), self.kappa, self.n)
            }
            Shape::Perturbed { base, epsilon, .. } => format!("perturbed({}, eps={epsilon:e})", base.id()),
        }
    }

    /// True for the families whose gauge depends on block norms only.
    pub fn is_block_invariant(&self) -> bool {
        match &self.shape {
            Shape::Perturbed { base, .. } => base.is_block_invariant(),
            _ => true,
        }
    }
}

fn lq_norm(values: impl Iterator<Item = f64> + Clone, q: f64) -> f64 {
    let m = values.clone().fold(0.0f64, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if q == 2.0 {
        return values.map(|v| v * v).sum::<f64>().sqrt();
    }
    m * values.map(|v| (v / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

impl Gauge for BodySpec {
    fn layout(&self) -> Layout {
        Layout { kappa: self.kappa, n: self.n }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let k = self.kappa;
        match &self.shape {
            Shape::EuclideanBall { radius } => norm(x) / radius,
            Shape::BlockQBall { q } => {
                if *q == 4.0 {
                    let s: f64 = x
                        .chunks_exact(k)
                        .map(|b| {
                            let t: f64 = b.iter().map(|v| v * v).sum();
                            t * t
                        })
                        .sum();
                    s.sqrt().sqrt()
                } else {
                    let norms = x.chunks_exact(k).map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt());
                    lq_norm(norms, *q)
                }
            }
            Shape::BlockNormBody { terms } => {
                let b: Vec<f64> = x.chunks_exact(k).map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
                terms
                    .iter()
                    .map(|t| t.weight * lq_norm(b.iter().zip(&t.scales).map(|(v, s)| v * s), t.q))
                    .sum()
            }
            Shape::Perturbed { base, profile, epsilon } => {
                let m = (self.kappa * (self.n - 1)) as i32;
                let gb = base.eval(x);
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 == 0.0 {
                    return 0.0;
                }
                let s: Vec<f64> = x.chunks_exact(k).map(|c| c.iter().map(|v| v * v).sum::<f64>() / r2).collect();
                let h = profile.eval_profile(&s);
                let bracket = gb.powi(-m) - epsilon * r2.powf(-0.5 * m as f64) * h;
                if bracket > 0.0 && bracket.is_finite() {
                    bracket.powf(-1.0 / m as f64)
                } else {
                    f64::NAN
                }
            }
        }
    }
}
