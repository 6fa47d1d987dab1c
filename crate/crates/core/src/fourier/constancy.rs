use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockgeom::{hurwitz_radon_family, section_frame, BlockVector, Gauge};
use crate::error::Result;
use crate::integrate::{sample_sphere, section_volume, Estimate, QuadratureParams};
use crate::numeric::sub_seed;

/// Section volume at one point eta of the orbit sphere of xi, against xi itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyRecord {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub at_xi: Estimate,
    pub at_eta: Estimate,
    pub z: f64,
}

/// Numerical test that Vol(D ∩ H_eta) is constant for unit eta in span(e_perp(xi)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyProbe {
    pub kappa: usize,
    pub n_xi: usize,
    pub n_eta: usize,
    pub records: Vec<ConstancyRecord>,
    pub max_z: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Whether the orbit-sphere collapse used by the transform routes is justified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Constancy {
    /// kappa <= 2: every orbit-plane direction is a block rotation of xi.
    Exact,
    Verified { probe: ConstancyProbe },
    Failed { probe: ConstancyProbe },
}

impl Constancy {
    pub fn usable(&self) -> bool {
        !matches!(self, Constancy::Failed { .. })
    }
}

/// Compares section volumes at `n_xi` random directions xi and `n_eta` points
/// eta of the unit sphere of span(e_perp(xi)) each (equally spaced on the
/// circle for kappa = 2, random otherwise). Both sides use the same sample
/// seed, drawn in the respective frame coordinates. Passes when every |z| <= 3.
pub fn constancy_probe<G: Gauge + ?Sized>(
    body: &G,
    n_xi: usize,
    n_eta: usize,
    params: &QuadratureParams,
    seed: u64,
) -> Result<ConstancyProbe> {
    let layout = body.layout();
    let family = hurwitz_radon_family(layout.kappa)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for i in 0..n_xi {
        let xi = BlockVector::from_layout(sample_sphere(layout.dim(), &mut rng), layout)?;
        let frame = section_frame(&xi, &family)?;
        let s = sub_seed(seed, i as u64);
        let at_xi = section_volume(body, &frame, params, s)?;
        for j in 0..n_eta {
            let w = if layout.kappa == 2 {
                let a = 2.0 * std::f64::consts::PI * j as f64 / n_eta as f64;
                vec![a.cos(), a.sin()]
            } else {
                sample_sphere(layout.kappa, &mut rng)
            };
            let eta = BlockVector::from_layout(frame.perp_point(&w), layout)?.normalized()?;
            let f_eta = section_frame(&eta, &family)?;
            let at_eta = section_volume(body, &f_eta, params, s)?;
            records.push(ConstancyRecord {
                xi: xi.coords().to_vec(),
                eta: eta.coords().to_vec(),
                at_xi,
                at_eta,
                z: at_xi.z_distance(&at_eta),
            });
        }
    }
    let max_z = records.iter().map(|r| r.z).fold(0.0, f64::max);
    let threshold = 3.0;
    Ok(ConstancyProbe { kappa: layout.kappa, n_xi, n_eta, records, max_z, threshold, passed: max_z <= threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockgeom::BodySpec;

    #[test]
    fn complex_orbit_planes_share_sections() {
        let b = BodySpec::block_q_ball(2, 3, 4.0).unwrap();
        let p = constancy_probe(&b, 3, 4, &QuadratureParams::with_samples(2000), 1).unwrap();
        assert!(p.passed, "max z {}", p.max_z);
        assert_eq!(p.records.len(), 12);
    }
}
