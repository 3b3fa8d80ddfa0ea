//! Pointwise variance of the discrete covariance `K^-1 M K^-1` and the
//! normalized covariance `C = g A^-2 g` with `g = sigma / sqrt(G_2(x, x))`,
//! whose pointwise variance is the constant `sigma^2`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fem::{greens_column, MassRoot, OperatorSet, Sampler, ScalarField};
use crate::mesh::Mesh;
use crate::par;

/// Samples per deterministic reduction chunk.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMethod {
    Direct,
    Stochastic { samples: usize, seed: u64 },
}

/// Nodal variances. Nodes that were not requested hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    method: VarianceMethod,
}

impl VarianceField {
    /// Wraps precomputed nodal values (`NaN` for unknown nodes).
    pub fn from_values(mesh: Arc<Mesh>, values: Vec<f64>, method: VarianceMethod) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} nodes",
                values.len(),
                mesh.num_vertices()
            )));
        }
        Ok(VarianceField { mesh, values, method })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> VarianceMethod {
        self.method
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|v| !v.is_nan())
    }

    pub fn stddev(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.sqrt()).collect()
    }

    /// CSV `index,x[,y[,z]],variance,stddev`.
    pub fn to_csv(&self) -> String {
        let sd = self.stddev();
        ScalarField::new(self.mesh.clone(), self.values.clone())
            .expect("length matches mesh")
            .to_csv_columns(&[("variance", &self.values), ("stddev", &sd)])
    }
}

/// `(K^-1 M K^-1)_ii` for the given nodes (all nodes when `None`), from one
/// solve per node: `w = K^-1 e_i`, `var_i = w^T M w`.
pub fn variance_direct(ops: &OperatorSet, nodes: Option<&[usize]>) -> Result<VarianceField> {
    let n = ops.num_nodes();
    let all: Vec<usize>;
    let nodes = match nodes {
        Some(s) => s,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    if let Some(&bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!("node {bad} out of range ({n} nodes)")));
    }
    let results = par::map_slice(nodes, |&i| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let w = ops.solve(&e).map_err(|source| Error::NodeSolve {
            node: i,
            source: Box::new(source),
        })?;
        Ok(ops.m().bilinear(&w, &w))
    });
    let mut values = vec![f64::NAN; n];
    for (&i, r) in nodes.iter().zip(results) {
        values[i] = r?;
    }
    Ok(VarianceField {
        mesh: ops.mesh().clone(),
        values,
        method: VarianceMethod::Direct,
    })
}

/// `(1/N) sum_k X_k o Y_k` with `X_k = K^-1 Z_k`, `Y_k = K^-1 M Z_k` and
/// standard normal `Z_k`. Sample `k` draws from stream `k` of a ChaCha8
/// generator seeded with `seed`; sums are reduced in a fixed order, so the
/// result does not depend on the number of threads.
pub fn variance_stochastic(ops: &OperatorSet, samples: usize, seed: u64) -> Result<VarianceField> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let n = ops.num_nodes();
    let chunks = samples.div_ceil(CHUNK);
    let partial = par::map_range(chunks, |c| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; n];
        for k in c * CHUNK..((c + 1) * CHUNK).min(samples) {
            let z = noise(seed, k as u64, n);
            let x = ops.solve(&z)?;
            let y = ops.solve(&ops.apply_mass(&z))?;
            for i in 0..n {
                acc[i] += x[i] * y[i];
            }
        }
        Ok(acc)
    });
    let mut values = vec![0.0; n];
    for p in partial {
        for (v, a) in values.iter_mut().zip(p?) {
            *v += a;
        }
    }
    let inv = 1.0 / samples as f64;
    values.iter_mut().for_each(|v| *v *= inv);
    Ok(VarianceField {
        mesh: ops.mesh().clone(),
        values,
        method: VarianceMethod::Stochastic { samples, seed },
    })
}

fn noise(seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `g = sigma / sqrt(variance)` at nodes; `NaN` where the variance is
/// unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingField {
    mesh: Arc<Mesh>,
    g: Vec<f64>,
    sigma2: f64,
}

/// Builds `g` from a (possibly partial) variance field.
pub fn make_scaling(var: &VarianceField, sigma2: f64) -> Result<ScalingField> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma^2 must be positive, got {sigma2}"
        )));
    }
    let mut g = Vec::with_capacity(var.values.len());
    for (i, &v) in var.values.iter().enumerate() {
        if v.is_nan() {
            g.push(f64::NAN);
        } else if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "variance at node {i} is {v}; normalization needs positive variances"
            )));
        } else {
            g.push((sigma2 / v).sqrt());
        }
    }
    Ok(ScalingField {
        mesh: var.mesh.clone(),
        g,
        sigma2,
    })
}

impl ScalingField {
    /// `g == 1` everywhere.
    pub fn identity(mesh: Arc<Mesh>, sigma2: f64) -> Self {
        let n = mesh.num_vertices();
        ScalingField {
            mesh,
            g: vec![1.0; n],
            sigma2,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn is_complete(&self) -> bool {
        self.g.iter().all(|v| !v.is_nan())
    }

    /// Interpolated `g(x)`; needs `g` at the vertices of the containing cell.
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        let v = ScalarField::new(self.mesh.clone(), self.g.clone())?.value_at(x)?;
        if v.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "scaling field is not available around {x:?}"
            )));
        }
        Ok(v)
    }

    /// `g o u` at nodes.
    pub fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        if u.len() != self.g.len() {
            return Err(Error::InvalidArgument(
                "field and scaling have different lengths".into(),
            ));
        }
        let v = self.g.iter().zip(u.values()).map(|(g, x)| g * x).collect();
        ScalarField::new(u.mesh().clone(), v)
    }

    /// CSV `index,x[,y[,z]],g`.
    pub fn to_csv(&self) -> String {
        ScalarField::new(self.mesh.clone(), self.g.clone())
            .expect("length matches mesh")
            .to_csv_columns(&[("g", &self.g)])
    }
}

fn refuse_dirichlet(ops: &OperatorSet) -> Result<()> {
    if ops.bc().is_dirichlet() {
        return Err(Error::Unsupported(
            "variance normalization needs Neumann or Robin conditions; with Dirichlet the variance vanishes on the boundary"
                .into(),
        ));
    }
    Ok(())
}

/// Covariance function `c(x, .) = g(x) g(.) G_2(x, .)` of the normalized
/// operator.
pub fn normalized_greens_column(ops: &OperatorSet, g: &ScalingField, x: &[f64]) -> Result<ScalarField> {
    refuse_dirichlet(ops)?;
    let gx = g.value_at(x)?;
    let col = greens_column(ops, x, 2)?;
    let v = g.g.iter().zip(col.values()).map(|(gy, c)| gx * gy * c).collect();
    ScalarField::new(ops.mesh().clone(), v)
}

/// One realization `g o u` with `u` drawn as in [`crate::fem::sample_field`].
pub fn normalized_sample(ops: &OperatorSet, g: &ScalingField, seed: u64, mass_root: MassRoot) -> Result<ScalarField> {
    refuse_dirichlet(ops)?;
    if !g.is_complete() {
        return Err(Error::InvalidArgument("sampling needs g at every node".into()));
    }
    let u = Sampler::new(ops, mass_root)?.sample(seed)?;
    g.apply(&u)
}

/// Variance of `A^-2` and `g` in one step; `nodes` restricts the direct
/// method to a subset. Dirichlet operators are refused.
pub fn scaling_for(
    ops: &OperatorSet,
    sigma2: f64,
    method: VarianceMethod,
    nodes: Option<&[usize]>,
) -> Result<(VarianceField, ScalingField)> {
    refuse_dirichlet(ops)?;
    let var = match method {
        VarianceMethod::Direct => variance_direct(ops, nodes)?,
        VarianceMethod::Stochastic { samples, seed } => variance_stochastic(ops, samples, seed)?,
    };
    let g = make_scaling(&var, sigma2)?;
    Ok((var, g))
}
