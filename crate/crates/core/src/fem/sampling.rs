//! White-noise sampling `u = K^-1 M^(1/2) z`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{OperatorSet, ScalarField};
use crate::error::{Error, Result};
use crate::solver::dense_cholesky;

/// Largest node count for which a dense Cholesky mass root is formed.
pub const DENSE_ROOT_MAX_NODES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassRoot {
    /// `diag(sqrt(row sums of M))`.
    Lumped,
    /// Dense lower Cholesky factor of `M`; small meshes only.
    DenseCholesky,
}

#[derive(Debug, Clone)]
enum Root {
    Diagonal(Vec<f64>),
    Dense(Vec<Vec<f64>>),
}

/// Draws samples from one operator set, reusing the mass root.
#[derive(Debug)]
pub struct Sampler<'a> {
    ops: &'a OperatorSet,
    root: Root,
}

impl<'a> Sampler<'a> {
    pub fn new(ops: &'a OperatorSet, mass_root: MassRoot) -> Result<Self> {
        let root = match mass_root {
            MassRoot::Lumped => Root::Diagonal(ops.lumped_mass().iter().map(|m| m.sqrt()).collect()),
            MassRoot::DenseCholesky => {
                let n = ops.num_nodes();
                if n > DENSE_ROOT_MAX_NODES {
                    return Err(Error::Unsupported(format!(
                        "dense Cholesky mass root refused for {n} nodes (limit {DENSE_ROOT_MAX_NODES})"
                    )));
                }
                Root::Dense(dense_cholesky(&ops.m().to_dense())?)
            }
        };
        Ok(Sampler { ops, root })
    }

    /// Standard normal vector for `seed`.
    pub fn noise(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.ops.num_nodes())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect()
    }

    /// `M^(1/2) z`.
    pub fn colour(&self, z: &[f64]) -> Vec<f64> {
        match &self.root {
            Root::Diagonal(d) => d.iter().zip(z).map(|(a, b)| a * b).collect(),
            Root::Dense(l) => l
                .iter()
                .enumerate()
                .map(|(i, row)| row[..=i].iter().zip(z).map(|(a, b)| a * b).sum())
                .collect(),
        }
    }

    pub fn sample(&self, seed: u64) -> Result<ScalarField> {
        let b = self.colour(&self.noise(seed));
        Ok(self.ops.field(self.ops.solve(&b)?))
    }
}

/// One realization of the field with covariance `K^-1 M K^-1`;
/// deterministic in `seed`.
pub fn sample_field(ops: &OperatorSet, seed: u64, mass_root: MassRoot) -> Result<ScalarField> {
    Sampler::new(ops, mass_root)?.sample(seed)
}
