//! Block structure of R^{kn}, block rotations, body gauges and section frames.
//!
//! A point of R^{kn} is read as `n` ordered blocks of `kappa` coordinates. Bodies
//! whose gauge depends only on the block Euclidean norms are invariant under
//! rotating every block by the same element of SO(kappa).

mod body;
mod checks;
mod frame;
mod rotation;

pub use body::{BodySpec, Gauge, NormTerm, Shape};
pub use checks::{check_convexity, check_invariance, ConvexityReport};
pub use frame::{section_frame, SubspaceFrame};
pub use rotation::{block_rotate, hurwitz_radon_family, random_rotation, RotationFamily, SquareMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block layout of R^{kappa * n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layout {
    pub kappa: usize,
    pub n: usize,
}

impl Layout {
    pub fn new(kappa: usize, n: usize) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidParameter("kappa must be positive".into()));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        Ok(Layout { kappa, n })
    }

    /// Ambient dimension kappa * n.
    pub fn dim(&self) -> usize {
        self.kappa * self.n
    }

    /// Dimension of the sections H_xi, kappa * n - kappa.
    pub fn section_dim(&self) -> usize {
        self.kappa * (self.n - 1)
    }

    pub fn check(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: len });
        }
        Ok(())
    }

    /// Squared block norms |x_i|^2.
    pub fn block_sq_norms(&self, x: &[f64]) -> Vec<f64> {
        x.chunks_exact(self.kappa).map(|b| b.iter().map(|v| v * v).sum()).collect()
    }
}

/// A point of R^{kappa n} with its block structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockVector {
    coords: Vec<f64>,
    layout: Layout,
}

impl BlockVector {
    pub fn new(coords: Vec<f64>, kappa: usize, n: usize) -> Result<Self> {
        let layout = Layout::new(kappa, n)?;
        layout.check(coords.len())?;
        Ok(BlockVector { coords, layout })
    }

    pub fn from_layout(coords: Vec<f64>, layout: Layout) -> Result<Self> {
        layout.check(coords.len())?;
        Ok(BlockVector { coords, layout })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn kappa(&self) -> usize {
        self.layout.kappa
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Coordinates kappa*i .. kappa*i + kappa - 1.
    pub fn block(&self, i: usize) -> &[f64] {
        let k = self.layout.kappa;
        &self.coords[k * i..k * i + k]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn block_norms(&self) -> Vec<f64> {
        self.layout.block_sq_norms(&self.coords).into_iter().map(f64::sqrt).collect()
    }

    /// The same vector scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Result<Self> {
        let r = self.norm();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        Ok(BlockVector { coords: self.coords.iter().map(|v| v / r).collect(), layout: self.layout })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
