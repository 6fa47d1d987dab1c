use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::classify::VerifyOptions;
use crate::blockgeom::{BodySpec, Layout};
use crate::counterexample::CounterexampleConfig;
use crate::error::{Error, Result};
use crate::fourier::route_for_exponent;
use crate::integrate::QuadratureParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Volume,
    Section,
    FtScan,
    Parseval,
    Brunn,
    Counterexample,
    Classify,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Volume => "volume",
            Suite::Section => "section",
            Suite::FtScan => "ft-scan",
            Suite::Parseval => "parseval",
            Suite::Brunn => "brunn",
            Suite::Counterexample => "counterexample",
            Suite::Classify => "classify",
        }
    }
}

/// A body given inline or by a JSON file path (relative to the config file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodyRef {
    File { file: PathBuf },
    Inline(BodySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: PathBuf,
    /// File name stem; the suite name when absent.
    pub stem: Option<String>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths { dir: PathBuf::from("out"), stem: None }
    }
}

/// Suite-specific knobs; each suite reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    /// Directions per body (section, ft-scan, parseval, brunn).
    pub dirs: usize,
    /// Statistical gate in standard errors.
    pub sigma: f64,
    /// Parseval exponent p; kappa when absent.
    pub exponent: Option<f64>,
    pub parseval_tolerance: f64,
    /// Fractional exponents tested by the brunn suite.
    pub brunn_q: Vec<f64>,
    /// Whether ft-scan must find no negative value; by default this follows
    /// the classification of (kappa, n).
    pub expect_positive: Option<bool>,
    /// Exponent of the block q-ball in the counterexample suite.
    pub q: f64,
    pub counterexample: CounterexampleConfig,
    pub kappas: Vec<usize>,
    pub max_n: usize,
    pub verify: bool,
    pub verify_options: VerifyOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            dirs: 16,
            sigma: 3.0,
            exponent: None,
            parseval_tolerance: 0.05,
            brunn_q: vec![0.5, 1.0, 1.5],
            expect_positive: None,
            q: 4.0,
            counterexample: CounterexampleConfig::default(),
            kappas: vec![1, 2, 4],
            max_n: 5,
            verify: false,
            verify_options: VerifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kappa: usize,
    pub n: usize,
    #[serde(default)]
    pub bodies: Vec<BodyRef>,
    pub suite: Suite,
    #[serde(default)]
    pub params: QuadratureParams,
    pub seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub options: SuiteOptions,
}

fn config_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { location: location.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn new(kappa: usize, n: usize, suite: Suite, seed: u64) -> Self {
        ExperimentConfig {
            kappa,
            n,
            bodies: Vec::new(),
            suite,
            params: QuadratureParams::default(),
            seed,
            output: OutputPaths::default(),
            options: SuiteOptions::default(),
        }
    }

    /// Parses a config file; errors carry `path:line:column`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(path.display().to_string(), format!("cannot read config: {e}")))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_error(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string()))
    }

    /// Checks the layout, parameters and inline bodies.
    pub fn validate(&self) -> Result<()> {
        let layout = Layout::new(self.kappa, self.n).map_err(|e| config_error("kappa/n", e.to_string()))?;
        if self.suite != Suite::Classify {
            route_for_exponent(layout, self.kappa as f64).map_err(|e| config_error("kappa/n", e.to_string()))?;
        }
        self.params.validate().map_err(|e| config_error("params", e.to_string()))?;
        let o = &self.options;
        if o.dirs == 0 {
            return Err(config_error("options.dirs", "need at least one direction"));
        }
        if !(o.sigma > 0.0) {
            return Err(config_error("options.sigma", "gate must be positive"));
        }
        if !(o.parseval_tolerance > 0.0) {
            return Err(config_error("options.parseval_tolerance", "tolerance must be positive"));
        }
        for (i, b) in self.bodies.iter().enumerate() {
            if let BodyRef::Inline(body) = b {
                check_body(body, layout).map_err(|e| config_error(format!("bodies[{i}]"), e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Inline bodies plus those read from files relative to `base`.
    pub fn resolve_bodies(&self, base: &Path) -> Result<Vec<(String, BodySpec)>> {
        let layout = Layout::new(self.kappa, self.n)?;
        self.bodies
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let body = match b {
                    BodyRef::Inline(body) => body.clone(),
                    BodyRef::File { file } => {
                        let path = base.join(file);
                        let text = std::fs::read_to_string(&path)
                            .map_err(|e| config_error(format!("bodies[{i}]"), format!("cannot read {}: {e}", path.display())))?;
                        BodySpec::from_json(&text).map_err(|e| config_error(format!("bodies[{i}] ({})", path.display()), e.to_string()))?
                    }
                };
                check_body(&body, layout).map_err(|e| config_error(format!("bodies[{i}]"), e.to_string()))?;
                Ok((format!("body{i}"), body))
            })
            .collect()
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.suite.name().to_string())
    }
}

fn check_body(body: &BodySpec, layout: Layout) -> Result<()> {
    body.validate()?;
    if (body.kappa, body.n) != (layout.kappa, layout.n) {
        return Err(Error::InvalidBody(format!(
            "body lives in layout ({}, {}), config expects ({}, {})",
            body.kappa, body.n, layout.kappa, layout.n
        )));
    }
    if !body.is_block_invariant() {
        return Err(Error::InvalidBody("body must depend on block norms only".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = ExperimentConfig::from_json(r#"{"kappa": 2, "n": 2, "suite": "volume", "seed": 7}"#, "inline").unwrap();
        c.validate().unwrap();
        assert_eq!(c.stem(), "volume");
        assert_eq!(c.options.dirs, 16);
    }

    #[test]
    fn errors_carry_locations() {
        let e = ExperimentConfig::from_json("{\"kappa\": 2,\n \"n\": 2, \"suite\": \"volume\"}", "cfg.json").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("cfg.json:2:"), "{msg}");
        assert!(msg.contains("seed"), "{msg}");
        let e = ExperimentConfig::from_json(r#"{"kappa": 2, "n": 5, "suite": "ft-scan", "seed": 1}"#, "x").unwrap().validate().unwrap_err();
        assert!(e.to_string().contains("kappa/n"));
        let bad_body = r#"{"kappa": 2, "n": 2, "suite": "volume", "seed": 1,
            "bodies": [{"kappa": 2, "n": 3, "kind": "euclidean_ball", "radius": 1.0}]}"#;
        let e = ExperimentConfig::from_json(bad_body, "x").unwrap().validate().unwrap_err();
        assert!(e.to_string().contains("bodies[0]"), "{e}");
    }

    #[test]
    fn body_refs_accept_files_and_inline_specs() {
        let c = ExperimentConfig::from_json(
            r#"{"kappa": 1, "n": 4, "suite": "volume", "seed": 1,
                "bodies": [{"file": "b.json"}, {"kappa": 1, "n": 4, "kind": "block_q_ball", "q": 3.0}]}"#,
            "x",
        )
        .unwrap();
        assert!(matches!(c.bodies[0], BodyRef::File { .. }));
        assert!(matches!(c.bodies[1], BodyRef::Inline(_)));
    }
}
