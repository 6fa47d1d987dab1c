//! Experiment orchestration behind the `bp` command: configs, the fixture
//! gallery, the classification table and report files.
//!
//! Reports contain no timestamps or timings, so a config and seed determine
//! every written byte.

mod classify;
mod config;
mod gallery;
mod suites;

pub use classify::{
    answer, classify, unsupported_reason, verify_negative, verify_positivity, Answer, ClassificationRow, Evidence, VerifyOptions,
};
pub use config::{BodyRef, ExperimentConfig, OutputPaths, Suite, SuiteOptions};
pub use gallery::{gallery, Fixture, GALLERY_EPSILON, GALLERY_Q};
pub use suites::{run_suite, write_report, Check, Status, SuiteReport};
