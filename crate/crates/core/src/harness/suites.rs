use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::classify::{answer, classify, Answer, ClassificationRow, Evidence};
use super::config::{ExperimentConfig, Suite};
use super::gallery::gallery;
use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, BodySpec, Gauge, Shape};
use crate::counterexample::{run_counterexample, Certificate, CounterexampleConfig, Verdict};
use crate::error::Result;
use crate::fourier::{kappa_intersection_scan, parseval_check, ScanReport};
use crate::integrate::{body_volume_polar, frac_action, laplacian_A_at_zero, quasi_uniform_sphere, section_volume, Estimate};
use crate::numeric::{ball_volume, sub_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    /// Process exit code for a suite outcome.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Inconclusive => 3,
        }
    }
}

/// One gated quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub estimate: Estimate,
    pub target: Option<f64>,
    pub criterion: String,
    pub status: Status,
}

/// Suite output, written as `<stem>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub kappa: usize,
    pub n: usize,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<Check>,
    /// Suite-specific payload (scans, certificates, classification rows).
    pub details: Value,
    #[serde(skip)]
    pub(crate) tables: Vec<Table>,
}

/// A CSV table plus its gnuplot two-column view.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Table {
    pub suffix: String,
    pub csv: String,
    pub plot: String,
}

fn overall(checks: &[Check]) -> Status {
    checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
}

fn gate(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Closed-form volume of a body in `dim` dimensions, when there is one.
fn exact_volume(body: &BodySpec, dim: usize) -> Option<f64> {
    match &body.shape {
        Shape::EuclideanBall { radius } => Some(ball_volume(dim) * radius.powi(dim as i32)),
        Shape::BlockQBall { q } if *q == 2.0 => Some(ball_volume(dim)),
        _ => None,
    }
}

fn checks_table(checks: &[Check]) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "name", "value", "std_error", "target", "status"])?;
    let mut plot = String::from("# index value\n");
    for (i, c) in checks.iter().enumerate() {
        w.write_record([
            i.to_string(),
            c.name.clone(),
            format!("{:.17e}", c.estimate.value),
            format!("{:.17e}", c.estimate.std_error),
            c.target.map(|t| format!("{t:.17e}")).unwrap_or_default(),
            format!("{:?}", c.status).to_lowercase(),
        ])?;
        plot.push_str(&format!("{i} {:.17e}\n", c.estimate.value));
    }
    Ok(Table { suffix: String::new(), csv: String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"), plot })
}

fn scan_table(name: &str, scan: &ScanReport) -> Result<Table> {
    let mut buf = Vec::new();
    scan.write_csv(&mut buf)?;
    Ok(Table { suffix: format!("_{name}"), csv: String::from_utf8(buf).expect("csv is utf-8"), plot: scan.gnuplot_data() })
}

fn bodies_or_gallery(config: &ExperimentConfig, base: &Path) -> Result<Vec<(String, BodySpec)>> {
    let bodies = config.resolve_bodies(base)?;
    if !bodies.is_empty() {
        return Ok(bodies);
    }
    Ok(gallery(config.kappa, config.n, config.seed)?.into_iter().map(|f| (f.name, f.body)).collect())
}

/// Runs the configured suite. Relative body files resolve against `base`.
pub fn run_suite(config: &ExperimentConfig, base: &Path) -> Result<SuiteReport> {
    config.validate()?;
    let sigma = config.options.sigma;
    let params = &config.params;
    let seed = config.seed;
    let dim = config.kappa * config.n;
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let mut details = Value::Null;
    match config.suite {
        Suite::Volume => {
            let mut bodies = config.resolve_bodies(base)?;
            if bodies.is_empty() {
                bodies.push(("ball".into(), BodySpec::ball(config.kappa, config.n, 1.0)?));
            }
            for (i, (name, body)) in bodies.iter().enumerate() {
                let est = body_volume_polar(body, params, sub_seed(seed, i as u64))?;
                let target = exact_volume(body, dim);
                let (criterion, status) = match target {
                    Some(t) => (format!("|value - exact| <= {sigma} std_error"), gate(est.z_to(t).abs() <= sigma)),
                    None => ("no closed form; reported".to_string(), Status::Pass),
                };
                checks.push(Check { name: format!("{name}: volume"), estimate: est, target, criterion, status });
            }
        }
        Suite::Section => {
            let mut bodies = config.resolve_bodies(base)?;
            if bodies.is_empty() {
                bodies.push(("ball".into(), BodySpec::ball(config.kappa, config.n, 1.0)?));
            }
            let family = hurwitz_radon_family(config.kappa)?;
            let d = dim - config.kappa;
            let dirs = quasi_uniform_sphere(dim, config.options.dirs, seed);
            for (i, (name, body)) in bodies.iter().enumerate() {
                let target = exact_volume(body, d);
                for (j, x) in dirs.iter().enumerate() {
                    let xi = BlockVector::from_layout(x.clone(), body.layout())?;
                    let frame = section_frame(&xi, &family)?;
                    let est = section_volume(body, &frame, params, sub_seed(seed, (i * 1_000_000 + j) as u64))?;
                    let (criterion, status) = match target {
                        Some(t) => (format!("|value - exact| <= {sigma} std_error"), gate(est.z_to(t).abs() <= sigma)),
                        None => ("positive section volume".to_string(), gate(est.value > 0.0)),
                    };
                    checks.push(Check { name: format!("{name}: section {j}"), estimate: est, target, criterion, status });
                }
            }
        }
        Suite::FtScan => {
            let expect_positive = config
                .options
                .expect_positive
                .unwrap_or(answer(config.kappa, config.n) == Answer::Affirmative);
            let mut scans = Vec::new();
            for (i, (name, body)) in bodies_or_gallery(config, base)?.iter().enumerate() {
                let scan = kappa_intersection_scan(body, config.options.dirs, params, sub_seed(seed, i as u64))?;
                let worst = scan
                    .records
                    .iter()
                    .min_by(|a, b| a.margin.total_cmp(&b.margin))
                    .map(|r| r.ft.value)
                    .unwrap_or_else(|| Estimate::exact(f64::NAN));
                let witnesses = scan.negative_witnesses.len();
                let (criterion, status) = if expect_positive {
                    (format!("no value below -{sigma} std_error"), gate(witnesses == 0))
                } else {
                    (format!("{witnesses} negative witnesses; reported"), Status::Pass)
                };
                checks.push(Check { name: format!("{name}: most negative value"), estimate: worst, target: None, criterion, status });
                tables.push(scan_table(name, &scan)?);
                scans.push(json!({"name": name, "scan": scan}));
            }
            details = json!({ "expect_positive": expect_positive, "scans": scans });
        }
        Suite::Parseval => {
            let mut bodies = config.resolve_bodies(base)?;
            if bodies.is_empty() {
                bodies.push(("ball".into(), BodySpec::ball(config.kappa, config.n, 1.0)?));
                bodies.push(("bq4".into(), BodySpec::block_q_ball(config.kappa, config.n, 4.0)?));
            }
            let p = config.options.exponent.unwrap_or(config.kappa as f64);
            let mut reports = Vec::new();
            let (kname, k) = &bodies[0];
            for (i, (lname, l)) in bodies.iter().enumerate() {
                let r = parseval_check(k, l, p, config.options.dirs, params, sub_seed(seed, i as u64))?;
                let tol = config.options.parseval_tolerance;
                checks.push(Check {
                    name: format!("{kname}/{lname}: relative error"),
                    estimate: Estimate::exact(r.relative_error),
                    target: Some(0.0),
                    criterion: format!("relative error <= {tol}"),
                    status: gate(r.relative_error <= tol),
                });
                reports.push(json!({"k": kname, "l": lname, "report": r}));
            }
            details = json!({ "exponent": p, "pairs": reports });
        }
        Suite::Brunn => {
            let family = hurwitz_radon_family(config.kappa)?;
            let dirs = quasi_uniform_sphere(dim, config.options.dirs, seed);
            for (i, (name, body)) in bodies_or_gallery(config, base)?.iter().enumerate() {
                for (j, x) in dirs.iter().enumerate() {
                    let xi = BlockVector::from_layout(x.clone(), body.layout())?;
                    let frame = section_frame(&xi, &family)?;
                    let s = sub_seed(seed, (i * 1_000_000 + j) as u64);
                    let lap = laplacian_A_at_zero(body, &frame, 1, params, s)?;
                    checks.push(Check {
                        name: format!("{name}: laplacian {j}"),
                        status: gate(lap.value <= sigma * lap.std_error),
                        estimate: lap,
                        target: None,
                        criterion: format!("value <= {sigma} std_error"),
                    });
                    for &q in &config.options.brunn_q {
                        let a = frac_action(body, &frame, q, params, s)?;
                        checks.push(Check {
                            name: format!("{name}: action q={q} {j}"),
                            status: gate(a.value >= -sigma * a.std_error),
                            estimate: a,
                            target: None,
                            criterion: format!("value >= -{sigma} std_error"),
                        });
                    }
                }
            }
        }
        Suite::Counterexample => {
            let cx = CounterexampleConfig { kappa: config.kappa, n: config.n, q: config.options.q, seed, ..config.options.counterexample.clone() };
            let cert = run_counterexample(&cx)?;
            let status = match cert.verdict {
                Verdict::Reversal => Status::Pass,
                Verdict::NoReversal => Status::Fail,
                Verdict::Inconclusive => Status::Inconclusive,
            };
            checks.push(Check {
                name: "vol K - vol L".into(),
                estimate: cert.comparison.volume_difference,
                target: None,
                criterion: format!("sections dominated at every direction and value > {} std_error", crate::counterexample::SIGMA_GATE),
                status,
            });
            tables.push(sections_table(&cert)?);
            details = serde_json::to_value(&cert)?;
        }
        Suite::Classify => {
            let o = &config.options;
            let rows = classify(&o.kappas, o.max_n, o.verify.then_some(&o.verify_options), seed);
            for r in &rows {
                let status = match r.evidence {
                    Evidence::PositivityScanFailed | Evidence::CounterexampleNotFound => Status::Fail,
                    _ => Status::Pass,
                };
                checks.push(Check {
                    name: format!("kappa={} n={}", r.kappa, r.n),
                    estimate: Estimate::exact(if r.answer == Answer::Affirmative { 1.0 } else { 0.0 }),
                    target: None,
                    criterion: "numerical evidence agrees with the classification".into(),
                    status,
                });
            }
            tables.push(rows_table(&rows)?);
            details = serde_json::to_value(&rows)?;
        }
    }
    if config.suite != Suite::Classify {
        let mut t = checks_table(&checks)?;
        t.suffix = String::new();
        tables.insert(0, t);
    }
    Ok(SuiteReport { suite: config.suite, kappa: config.kappa, n: config.n, seed, status: overall(&checks), checks, details, tables })
}

fn sections_table(cert: &Certificate) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let dim = cert.config.kappa * cert.config.n;
    let mut header = vec!["index".to_string()];
    header.extend((0..dim).map(|i| format!("xi_{i}")));
    header.extend(["adversarial", "section_k", "section_l", "difference", "std_error", "dominated"].map(String::from));
    w.write_record(&header)?;
    let mut plot = String::from("# index section_k-section_l\n");
    for (i, s) in cert.comparison.sections.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(s.xi.iter().map(|v| format!("{v:.17e}")));
        row.push(s.adversarial.to_string());
        row.push(format!("{:.17e}", s.section_k.value));
        row.push(format!("{:.17e}", s.section_l.value));
        row.push(format!("{:.17e}", s.difference.value));
        row.push(format!("{:.17e}", s.difference.std_error));
        row.push(s.dominated.to_string());
        w.write_record(&row)?;
        plot.push_str(&format!("{i} {:.17e}\n", s.difference.value));
    }
    Ok(Table { suffix: "_sections".into(), csv: String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"), plot })
}

fn rows_table(rows: &[ClassificationRow]) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kappa", "n", "answer", "evidence", "details"])?;
    let mut plot = String::from("# kappa n affirmative\n");
    for r in rows {
        let ans = serde_json::to_value(r.answer)?;
        let ev = serde_json::to_value(r.evidence)?;
        w.write_record([
            r.kappa.to_string(),
            r.n.to_string(),
            ans.as_str().unwrap_or_default().to_string(),
            ev.as_str().unwrap_or_default().to_string(),
            r.details.clone(),
        ])?;
        plot.push_str(&format!("{} {} {}\n", r.kappa, r.n, u8::from(r.answer == Answer::Affirmative)));
    }
    Ok(Table { suffix: String::new(), csv: String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"), plot })
}

/// Writes `<stem>.json` plus `<stem><suffix>.csv` / `.dat` for every table
/// into the configured output directory; returns the written paths.
pub fn write_report(config: &ExperimentConfig, report: &SuiteReport, base: &Path) -> Result<Vec<std::path::PathBuf>> {
    let dir = base.join(&config.output.dir);
    std::fs::create_dir_all(&dir)?;
    let stem = config.stem();
    let mut written = Vec::new();
    let json_path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(&json!({ "config": config, "report": report }))?;
    text.push('\n');
    std::fs::write(&json_path, text)?;
    written.push(json_path);
    for t in &report.tables {
        let csv = dir.join(format!("{stem}{}.csv", t.suffix));
        let dat = dir.join(format!("{stem}{}.dat", t.suffix));
        std::fs::write(&csv, &t.csv)?;
        std::fs::write(&dat, &t.plot)?;
        written.push(csv);
        written.push(dat);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::QuadratureParams;

    #[test]
    fn volume_suite_on_the_ball_passes() {
        let mut c = ExperimentConfig::new(1, 4, Suite::Volume, 5);
        c.params = QuadratureParams::with_samples(100_000);
        let r = run_suite(&c, Path::new(".")).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!((r.checks[0].target.unwrap() - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn status_order_and_exit_codes() {
        assert!(Status::Fail > Status::Inconclusive && Status::Inconclusive > Status::Pass);
        assert_eq!(Status::Pass.exit_code(), 0);
        assert_eq!(Status::Fail.exit_code(), 2);
        assert_eq!(Status::Inconclusive.exit_code(), 3);
    }
}
