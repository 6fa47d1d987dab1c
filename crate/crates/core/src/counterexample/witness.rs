use serde::{Deserialize, Serialize};

use crate::blockgeom::{BlockVector, BodySpec, Gauge};
use crate::error::{Error, Result};
use crate::fourier::ScanReport;

/// Unit ball of the q-sum of the block Euclidean norms.
pub fn build_bq_ball(kappa: usize, n: usize, q: f64) -> Result<BodySpec> {
    BodySpec::block_q_ball(kappa, n, q)
}

/// Witness directions whose block-norm profiles lie close together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCluster {
    /// Block-norm profile (|xi_1|, .., |xi_n|) of the most negative member.
    pub profile: Vec<f64>,
    /// Indices into the scan records.
    pub members: Vec<usize>,
    pub min_margin: f64,
}

/// Rotation-invariant description of where the transform is negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRegion {
    pub body_id: String,
    pub exponent: f64,
    pub radius: f64,
    pub clusters: Vec<WitnessCluster>,
}

impl WitnessRegion {
    pub fn n_witnesses(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    /// A unit direction for each cluster: its profile placed on the first
    /// coordinate of every block.
    pub fn representatives(&self, kappa: usize) -> Vec<Vec<f64>> {
        self.clusters
            .iter()
            .map(|c| {
                let mut x = vec![0.0; kappa * c.profile.len()];
                for (i, b) in c.profile.iter().enumerate() {
                    x[i * kappa] = *b;
                }
                x
            })
            .collect()
    }
}

/// Distance between block-norm profiles below which witnesses share a cluster.
pub const CLUSTER_RADIUS: f64 = 0.25;

/// Groups the negative witnesses of `scan` by block-norm profile. Profiles
/// are unchanged by common block rotations, so the region is invariant.
pub fn negativity_witness(scan: &ScanReport) -> Result<WitnessRegion> {
    if scan.negative_witnesses.is_empty() {
        return Err(Error::NoNegativityFound);
    }
    let layout = scan.body.layout();
    let mut order: Vec<usize> = scan.negative_witnesses.clone();
    order.sort_by(|&a, &b| scan.records[a].margin.total_cmp(&scan.records[b].margin).then(a.cmp(&b)));
    let mut clusters: Vec<WitnessCluster> = Vec::new();
    for i in order {
        let rec = &scan.records[i];
        let profile = BlockVector::from_layout(rec.ft.xi.clone(), layout)?.block_norms();
        let near = clusters.iter_mut().find(|c| {
            c.profile.iter().zip(&profile).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < CLUSTER_RADIUS
        });
        match near {
            Some(c) => c.members.push(i),
            None => clusters.push(WitnessCluster { profile, members: vec![i], min_margin: rec.margin }),
        }
    }
    Ok(WitnessRegion { body_id: scan.body_id.clone(), exponent: scan.exponent, radius: CLUSTER_RADIUS, clusters })
}
