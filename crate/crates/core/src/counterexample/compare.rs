use serde::{Deserialize, Serialize};

use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, BodySpec, Gauge};
use crate::error::{Error, Result};
use crate::integrate::{paired_difference, quasi_uniform_sphere, section_volume_samples, volume_samples, Estimate, QuadratureParams};
use crate::numeric::{sphere_area, sub_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reversal,
    NoReversal,
    Inconclusive,
}

/// Section comparison at one direction. Both bodies are sampled along the
/// same directions of H_xi, so `difference` carries the paired error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionComparison {
    pub xi: Vec<f64>,
    /// Low-discrepancy direction, or one supplied by the caller.
    pub adversarial: bool,
    pub section_k: Estimate,
    pub section_l: Estimate,
    /// section_k - section_l.
    pub difference: Estimate,
    /// difference <= 3 std_error.
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpComparisonReport {
    pub n_directions: usize,
    pub fraction_sections_leq: f64,
    pub vol_k: Estimate,
    pub vol_l: Estimate,
    /// vol_k - vol_l from paired samples.
    pub volume_difference: Estimate,
    pub verdict: Verdict,
    pub sections: Vec<SectionComparison>,
}

/// Sign gate used throughout the comparison.
pub const SIGMA_GATE: f64 = 3.0;

fn verdict(fraction: f64, diff: &Estimate) -> Verdict {
    if fraction == 1.0 && diff.value > SIGMA_GATE * diff.std_error {
        Verdict::Reversal
    } else if fraction < 1.0 || diff.value < -SIGMA_GATE * diff.std_error || (diff.value == 0.0 && diff.std_error == 0.0) {
        Verdict::NoReversal
    } else {
        Verdict::Inconclusive
    }
}

/// Compares central sections of K and L at `n_dirs` seeded low-discrepancy
/// directions plus the `adversarial` ones, then the volumes. Each section
/// uses `params.n_samples` paired samples; the volumes use as many samples as
/// all sections together.
pub fn bp_compare(
    k: &BodySpec,
    l: &BodySpec,
    n_dirs: usize,
    adversarial: &[Vec<f64>],
    params: &QuadratureParams,
    seed: u64,
) -> Result<BpComparisonReport> {
    params.validate()?;
    let layout = l.layout();
    if k.layout() != layout {
        return Err(Error::DimensionMismatch { expected: layout.dim(), got: k.layout().dim() });
    }
    let family = hurwitz_radon_family(layout.kappa)?;
    let dim = layout.dim();
    let d = layout.section_dim();
    let sec_scale = sphere_area(d) / d as f64;
    let mut dirs: Vec<(Vec<f64>, bool)> = quasi_uniform_sphere(dim, n_dirs, seed).into_iter().map(|x| (x, false)).collect();
    dirs.extend(adversarial.iter().map(|x| (x.clone(), true)));

    let mut sections = Vec::with_capacity(dirs.len());
    for (i, (x, adv)) in dirs.into_iter().enumerate() {
        let xi = BlockVector::from_layout(x, layout)?.normalized()?;
        let frame = section_frame(&xi, &family)?;
        let s = sub_seed(seed, i as u64);
        let a = section_volume_samples(k, &frame, params.n_samples, s)?;
        let b = section_volume_samples(l, &frame, params.n_samples, s)?;
        let difference = paired_difference(&a, &b, sec_scale, s);
        sections.push(SectionComparison {
            xi: xi.into_coords(),
            adversarial: adv,
            section_k: Estimate::from_samples(&a, sec_scale, s),
            section_l: Estimate::from_samples(&b, sec_scale, s),
            dominated: difference.value <= SIGMA_GATE * difference.std_error,
            difference,
        });
    }
    let n_directions = sections.len();
    let fraction = sections.iter().filter(|s| s.dominated).count() as f64 / n_directions.max(1) as f64;

    let vs = sub_seed(seed, u64::MAX);
    let total = params.n_samples * n_directions.max(1);
    let a = volume_samples(k, total, vs)?;
    let b = volume_samples(l, total, vs)?;
    let vol_scale = sphere_area(dim) / dim as f64;
    let volume_difference = paired_difference(&a, &b, vol_scale, vs);
    Ok(BpComparisonReport {
        n_directions,
        fraction_sections_leq: fraction,
        vol_k: Estimate::from_samples(&a, vol_scale, vs),
        vol_l: Estimate::from_samples(&b, vol_scale, vs),
        verdict: verdict(fraction, &volume_difference),
        volume_difference,
        sections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_bodies_give_no_reversal() {
        let l = BodySpec::block_q_ball(2, 3, 4.0).unwrap();
        let r = bp_compare(&l, &l, 8, &[], &QuadratureParams::with_samples(500), 3).unwrap();
        assert_eq!(r.fraction_sections_leq, 1.0);
        assert_eq!(r.volume_difference.value, 0.0);
        assert_eq!(r.verdict, Verdict::NoReversal);
    }

    #[test]
    fn smaller_ball_gives_no_reversal() {
        let k = BodySpec::ball(2, 3, 0.9).unwrap();
        let l = BodySpec::ball(2, 3, 1.0).unwrap();
        let r = bp_compare(&k, &l, 8, &[], &QuadratureParams::with_samples(500), 4).unwrap();
        assert_eq!(r.fraction_sections_leq, 1.0);
        assert!(r.volume_difference.value < 0.0);
        assert_eq!(r.verdict, Verdict::NoReversal);
    }

    #[test]
    fn verdict_rules() {
        let e = |v: f64, s: f64| Estimate { value: v, std_error: s, n_samples: 10, seed: 0, inconclusive: false };
        assert_eq!(verdict(1.0, &e(1.0, 0.1)), Verdict::Reversal);
        assert_eq!(verdict(0.99, &e(1.0, 0.1)), Verdict::NoReversal);
        assert_eq!(verdict(1.0, &e(0.1, 0.1)), Verdict::Inconclusive);
        assert_eq!(verdict(1.0, &e(-1.0, 0.1)), Verdict::NoReversal);
    }
}
