use serde::{Deserialize, Serialize};

use super::gallery::gallery;
use crate::blockgeom::Layout;
use crate::counterexample::{run_counterexample, CounterexampleConfig, Verdict};
use crate::fourier::{kappa_intersection_scan, route_for_exponent};
use crate::integrate::QuadratureParams;
use crate::numeric::sub_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Affirmative,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    PositivityScanPassed,
    PositivityScanFailed,
    CounterexampleFound,
    CounterexampleNotFound,
    NotRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub kappa: usize,
    pub n: usize,
    pub answer: Answer,
    pub evidence: Evidence,
    /// Why evidence is missing, or a short account of what was found.
    pub details: String,
}

/// The known answer for block-rotation-invariant bodies: affirmative exactly
/// for n = 2, for n = 3 with kappa <= 2 and for n = 4 with kappa = 1.
pub fn answer(kappa: usize, n: usize) -> Answer {
    if n <= 2 || (n == 3 && kappa <= 2) || (n == 4 && kappa == 1) {
        Answer::Affirmative
    } else {
        Answer::Negative
    }
}

/// Settings for `classify` with verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    /// Directions per gallery body in the positivity scans.
    pub scan_dirs: usize,
    pub scan_params: QuadratureParams,
    pub counterexample: CounterexampleConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { scan_dirs: 24, scan_params: QuadratureParams::with_samples(8000), counterexample: CounterexampleConfig::default() }
    }
}

/// Why a pair cannot be run, if it cannot.
pub fn unsupported_reason(kappa: usize, n: usize) -> Option<String> {
    if !matches!(kappa, 1 | 2 | 4 | 8) {
        return Some(format!(
            "no Hurwitz-Radon family of kappa - 1 anticommuting skew orthogonal matrices exists in dimension {kappa}"
        ));
    }
    let layout = match Layout::new(kappa, n) {
        Ok(l) => l,
        Err(e) => return Some(e.to_string()),
    };
    route_for_exponent(layout, kappa as f64).err().map(|e| e.to_string())
}

/// Positivity scan of the whole gallery for one layout.
pub fn verify_positivity(kappa: usize, n: usize, options: &VerifyOptions, seed: u64) -> (Evidence, String) {
    let fixtures = match gallery(kappa, n, seed) {
        Ok(f) => f,
        Err(e) => return (Evidence::NotRun, e.to_string()),
    };
    let mut notes = Vec::new();
    let mut failed = false;
    for (i, f) in fixtures.iter().enumerate() {
        match kappa_intersection_scan(&f.body, options.scan_dirs, &options.scan_params, sub_seed(seed, i as u64)) {
            Ok(scan) => {
                if !scan.negative_witnesses.is_empty() {
                    failed = true;
                    notes.push(format!("{}: {} negative witnesses", f.name, scan.negative_witnesses.len()));
                }
            }
            Err(e) => return (Evidence::NotRun, format!("{}: {e}", f.name)),
        }
    }
    if failed {
        (Evidence::PositivityScanFailed, notes.join("; "))
    } else {
        (
            Evidence::PositivityScanPassed,
            format!("{} gallery bodies x {} directions, no value below -3 sigma", fixtures.len(), options.scan_dirs),
        )
    }
}

/// Counterexample pipeline for one layout with L the block 4-ball.
pub fn verify_negative(kappa: usize, n: usize, options: &VerifyOptions, seed: u64) -> (Evidence, String) {
    let config = CounterexampleConfig { kappa, n, seed, ..options.counterexample.clone() };
    match run_counterexample(&config) {
        Ok(c) if c.verdict == Verdict::Reversal => (
            Evidence::CounterexampleFound,
            format!(
                "epsilon {:.3e}; sections dominated at {} directions; vol K - vol L = {:.3e} +- {:.1e}",
                c.epsilon,
                c.comparison.n_directions,
                c.comparison.volume_difference.value,
                c.comparison.volume_difference.std_error
            ),
        ),
        Ok(c) => (
            Evidence::CounterexampleNotFound,
            format!(
                "verdict {:?}; fraction dominated {}; vol K - vol L = {:.3e} +- {:.1e}",
                c.verdict,
                c.comparison.fraction_sections_leq,
                c.comparison.volume_difference.value,
                c.comparison.volume_difference.std_error
            ),
        ),
        Err(e) => (Evidence::CounterexampleNotFound, e.to_string()),
    }
}

/// One row per (kappa, n) with n in 2..=max_n. With `verify`, supported rows
/// get numerical evidence: gallery positivity scans for affirmative rows and
/// the counterexample pipeline for negative ones.
pub fn classify(kappas: &[usize], max_n: usize, verify: Option<&VerifyOptions>, seed: u64) -> Vec<ClassificationRow> {
    let mut rows = Vec::new();
    for &kappa in kappas {
        for n in 2..=max_n {
            let answer = answer(kappa, n);
            let (evidence, details) = match (unsupported_reason(kappa, n), verify) {
                (Some(reason), _) => (Evidence::NotRun, reason),
                (None, None) => (Evidence::NotRun, "verification not requested".to_string()),
                (None, Some(opts)) => {
                    let s = sub_seed(seed, (kappa * 1000 + n) as u64);
                    match answer {
                        Answer::Affirmative => verify_positivity(kappa, n, opts, s),
                        Answer::Negative => verify_negative(kappa, n, opts, s),
                    }
                }
            };
            rows.push(ClassificationRow { kappa, n, answer, evidence, details });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answers_follow_the_classification() {
        assert_eq!(answer(1, 4), Answer::Affirmative);
        assert_eq!(answer(2, 4), Answer::Negative);
        assert_eq!(answer(2, 2), Answer::Affirmative);
        assert_eq!(answer(2, 3), Answer::Affirmative);
        assert_eq!(answer(4, 3), Answer::Negative);
        assert_eq!(answer(1, 5), Answer::Negative);
        assert_eq!(answer(8, 2), Answer::Affirmative);
    }

    #[test]
    fn unsupported_pairs_are_not_run() {
        let rows = classify(&[1, 2, 3, 4], 5, None, 0);
        let row = |k: usize, n: usize| rows.iter().find(|r| r.kappa == k && r.n == n).unwrap().clone();
        assert_eq!(row(3, 2).evidence, Evidence::NotRun);
        assert!(row(3, 2).details.contains("Hurwitz-Radon"));
        assert!(unsupported_reason(2, 5).is_some());
        assert!(unsupported_reason(4, 3).is_none());
        assert!(unsupported_reason(1, 5).is_none());
        assert_eq!(rows.len(), 16);
    }
}
