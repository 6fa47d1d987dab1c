use serde::{Deserialize, Serialize};

use super::compare::{bp_compare, BpComparisonReport, Verdict};
use super::design::{design_with_fallback, DesignParams, RadonDesign};
use super::perturb::{build_perturbed_pair, convexity_search, star_bound, ConvexitySearch};
use super::witness::{build_bq_ball, negativity_witness, WitnessRegion};
use crate::blockgeom::{check_convexity, check_invariance, BodySpec, ConvexityReport};
use crate::error::{Error, Result};
use crate::fourier::kappa_intersection_scan;
use crate::integrate::QuadratureParams;
use crate::numeric::sub_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleConfig {
    pub kappa: usize,
    pub n: usize,
    pub q: f64,
    pub scan_dirs: usize,
    pub scan_params: QuadratureParams,
    pub design: DesignParams,
    pub convexity_pairs: usize,
    pub convexity_steps: usize,
    /// The perturbation uses this fraction of the largest convex epsilon.
    pub safety: f64,
    pub compare_dirs: usize,
    pub compare_params: QuadratureParams,
    pub seed: u64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            kappa: 2,
            n: 4,
            q: 4.0,
            scan_dirs: 256,
            scan_params: QuadratureParams::with_samples(8000),
            design: DesignParams::default(),
            convexity_pairs: 100_000,
            convexity_steps: 12,
            safety: 0.5,
            compare_dirs: 256,
            compare_params: QuadratureParams::with_samples(50_000),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub n_dirs: usize,
    pub n_witnesses: usize,
    pub min_value: f64,
    pub min_margin: f64,
}

/// Everything needed to re-check a counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub config: CounterexampleConfig,
    pub body_l: BodySpec,
    pub scan: ScanSummary,
    pub region: WitnessRegion,
    pub design: RadonDesign,
    pub epsilon_star: f64,
    pub convexity_search: ConvexitySearch,
    pub epsilon: f64,
    pub body_k: BodySpec,
    pub invariance_defect: f64,
    pub convexity: ConvexityReport,
    pub comparison: BpComparisonReport,
    pub verdict: Verdict,
}

/// Block q-ball L, negativity scan, section-domain profile design, epsilon
/// from the star and convexity bounds, and the final comparison of K and L.
pub fn run_counterexample(config: &CounterexampleConfig) -> Result<Certificate> {
    if !(config.safety > 0.0 && config.safety <= 1.0) {
        return Err(Error::InvalidParameter(format!("safety factor must lie in (0, 1], got {}", config.safety)));
    }
    let seed = config.seed;
    let l = build_bq_ball(config.kappa, config.n, config.q)?;
    let scan = kappa_intersection_scan(&l, config.scan_dirs, &config.scan_params, sub_seed(seed, 1))?;
    let region = negativity_witness(&scan)?;

    let design = design_with_fallback(&l, &DesignParams { seed: sub_seed(seed, 2), ..config.design.clone() })?;
    let epsilon_star = star_bound(&l, &design.profile, 200_000, sub_seed(seed, 3));
    let search = convexity_search(
        &l,
        &design.profile,
        epsilon_star,
        config.convexity_pairs,
        config.convexity_steps,
        sub_seed(seed, 4),
    )?;
    let epsilon = config.safety * search.epsilon;
    let k = build_perturbed_pair(&l, &design.profile, epsilon)?;
    let convexity = check_convexity(&k, config.convexity_pairs, sub_seed(seed, 5));
    let invariance_defect = check_invariance(&k, 1000, sub_seed(seed, 6));

    let mut adversarial = region.representatives(config.kappa);
    adversarial.extend(scan.witnesses().map(|r| r.ft.xi.clone()));
    let comparison = bp_compare(&k, &l, config.compare_dirs, &adversarial, &config.compare_params, sub_seed(seed, 7))?;
    let verdict = if convexity.passed() { comparison.verdict } else { Verdict::Inconclusive };
    Ok(Certificate {
        config: config.clone(),
        body_l: l,
        scan: ScanSummary {
            n_dirs: scan.records.len(),
            n_witnesses: scan.negative_witnesses.len(),
            min_value: scan.min_value,
            min_margin: scan.min_margin,
        },
        region,
        design,
        epsilon_star,
        convexity_search: search,
        epsilon,
        body_k: k,
        invariance_defect,
        convexity,
        comparison,
        verdict,
    })
}
