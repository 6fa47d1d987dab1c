use serde::{Deserialize, Serialize};

use super::constancy::{constancy_probe, Constancy};
use super::routes::{ft_by_route, route_for_exponent, FtValue, Route};
use crate::blockgeom::{BlockVector, BodySpec, Gauge};
use crate::error::{Error, Result};
use crate::integrate::{quasi_uniform_sphere, QuadratureParams};
use crate::numeric::sub_seed;

/// Evaluates transforms of |x|_D^{-p} for one body, refusing to collapse the
/// orbit-sphere integral when constancy could not be confirmed.
pub struct FtEvaluator<'a, G: Gauge + ?Sized> {
    body: &'a G,
    params: QuadratureParams,
    constancy: Constancy,
}

impl<'a, G: Gauge + ?Sized> FtEvaluator<'a, G> {
    /// For kappa >= 4 this runs a constancy probe (4 x 4 orbit points) first.
    pub fn new(body: &'a G, params: &QuadratureParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let constancy = if body.layout().kappa <= 2 {
            Constancy::Exact
        } else {
            let probe = constancy_probe(body, 4, 4, params, seed)?;
            if probe.passed {
                Constancy::Verified { probe }
            } else {
                Constancy::Failed { probe }
            }
        };
        Ok(FtEvaluator { body, params: *params, constancy })
    }

    pub fn constancy(&self) -> &Constancy {
        &self.constancy
    }

    pub fn evaluate(&self, xi: &BlockVector, p: f64, seed: u64) -> Result<FtValue> {
        if !self.constancy.usable() {
            return Err(Error::ConstancyUnverified(self.body.layout().kappa));
        }
        let route = route_for_exponent(self.body.layout(), p)?;
        ft_by_route(self.body, xi, route, &self.params, seed)
    }
}

/// One scanned direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: usize,
    pub ft: FtValue,
    /// value / std_error (signed); below -3 is a negative witness.
    pub margin: f64,
}

/// Positivity scan of (|x|_D^{-kappa})^ over quasi-uniform directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub body_id: String,
    pub body: BodySpec,
    pub exponent: f64,
    pub route: Route,
    pub seed: u64,
    pub constancy: Constancy,
    pub records: Vec<ScanRecord>,
    pub min_value: f64,
    pub min_margin: f64,
    /// Indices into `records` with value < -3 std_error.
    pub negative_witnesses: Vec<usize>,
}

impl ScanReport {
    pub fn directions(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.ft.xi.clone()).collect()
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &ScanRecord> {
        self.negative_witnesses.iter().map(move |&i| &self.records[i])
    }

    /// CSV table: index, direction coordinates, value, std_error, margin.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.body.kappa * self.body.n;
        let mut header = vec!["index".to_string()];
        header.extend((0..dim).map(|i| format!("xi_{i}")));
        header.extend(["value", "std_error", "margin"].map(String::from));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.index.to_string()];
            row.extend(r.ft.xi.iter().map(|v| format!("{v:.17e}")));
            row.push(format!("{:.17e}", r.ft.value.value));
            row.push(format!("{:.17e}", r.ft.value.std_error));
            row.push(format!("{:.17e}", r.margin));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two-column gnuplot data: direction index, value.
    pub fn gnuplot_data(&self) -> String {
        let mut s = String::from("# index value\n");
        for r in &self.records {
            s.push_str(&format!("{} {:.17e}\n", r.index, r.ft.value.value));
        }
        s
    }
}

/// Scans the transform of |x|_D^{-kappa} at `n_dirs` seeded quasi-uniform
/// directions (plus `extra` directions, if any). The route follows from
/// q = kappa n - 2 kappa; unimplemented q gives `UnsupportedCase`.
pub fn kappa_intersection_scan(
    body: &BodySpec,
    n_dirs: usize,
    params: &QuadratureParams,
    seed: u64,
) -> Result<ScanReport> {
    scan_directions(body, quasi_uniform_sphere(body.kappa * body.n, n_dirs, seed), params, seed)
}

pub(crate) fn scan_directions(
    body: &BodySpec,
    directions: Vec<Vec<f64>>,
    params: &QuadratureParams,
    seed: u64,
) -> Result<ScanReport> {
    body.validate()?;
    let layout = body.layout();
    let p = layout.kappa as f64;
    let route = route_for_exponent(layout, p)?;
    let eval = FtEvaluator::new(body, params, sub_seed(seed, u64::MAX))?;
    if !eval.constancy().usable() {
        return Err(Error::ConstancyUnverified(layout.kappa));
    }
    let mut records = Vec::with_capacity(directions.len());
    for (index, d) in directions.into_iter().enumerate() {
        let xi = BlockVector::from_layout(d, layout)?.normalized()?;
        let ft = eval.evaluate(&xi, p, sub_seed(seed, index as u64))?;
        let margin = if ft.value.std_error > 0.0 {
            ft.value.value / ft.value.std_error
        } else if ft.value.value < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        records.push(ScanRecord { index, ft, margin });
    }
    let min_value = records.iter().map(|r| r.ft.value.value).fold(f64::INFINITY, f64::min);
    let min_margin = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let negative_witnesses = records
        .iter()
        .filter(|r| r.ft.value.value < -3.0 * r.ft.value.std_error)
        .map(|r| r.index)
        .collect();
    Ok(ScanReport {
        body_id: body.id(),
        body: body.clone(),
        exponent: p,
        route,
        seed,
        constancy: eval.constancy().clone(),
        records,
        min_value,
        min_margin,
        negative_witnesses,
    })
}
