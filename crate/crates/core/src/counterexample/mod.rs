//! Negative-answer witnesses: block q-balls whose transform changes sign, and
//! a perturbed body K whose central sections are all smaller than those of
//! L while its volume is larger.
//!
//! The perturbation is designed in the section domain ([`design_radon_profile`],
//! with relaxed retries in [`design_with_fallback`]), so the section inequality
//! holds by construction rather than by inclusion; the comparison then
//! re-measures both sides numerically.

mod certificate;
mod compare;
mod design;
mod perturb;
mod profile;
mod radon;
mod witness;

pub use certificate::{run_counterexample, Certificate, CounterexampleConfig};
pub use compare::{bp_compare, BpComparisonReport, SectionComparison, Verdict, SIGMA_GATE};
pub use design::{design_radon_profile, design_with_fallback, DesignParams, RadonDesign};
pub use perturb::{build_perturbed_pair, convexity_search, star_bound, ConvexitySearch, ConvexityStep, MIN_EPSILON};
pub use profile::{Expansion, PerturbationProfile, PolyTerm, SymmetricTerm};
pub use radon::{partitions, smolyak_hermite, RadonTransform, SymmetricBasis};
pub use witness::{build_bq_ball, negativity_witness, WitnessCluster, WitnessRegion, CLUSTER_RADIUS};
