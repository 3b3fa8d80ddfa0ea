//! The subcommands: each turns a validated [`RunConfig`] into one output
//! file.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};

use grf_core::fem::{assemble, greens_column, BcSpec, OperatorSet, Sampler, ScalarField};
use grf_core::greens::{make_params, phi_eval, GreensParams};
use grf_core::mesh::{
    affine_transform, build_structured_mesh, extract_boundary, parallelogram_map, parse_mesh, point_locate,
    serialize_mesh, Mesh, MeshKind,
};
use grf_core::robin::{constant_beta, optimal_beta_field, BoundaryField, ConstantRule, QuadratureMethod};
use grf_core::section::CrossSection;
use grf_core::variance::{make_scaling, variance_direct, variance_stochastic, ScalingField, VarianceField};

use crate::cache::{mesh_hash, Cache};
use crate::config::{config_error, BcKind, BetaMethod, BetaSource, Command, MeshSource, RunConfig, VarianceSpec};

pub fn run(cfg: &RunConfig, cache: &Cache) -> Result<()> {
    let mesh = Arc::new(load_mesh(&cfg.mesh)?);
    log::info!(
        "mesh {}: {} vertices, {} cells, dimension {}",
        cfg.mesh,
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.dim()
    );
    let ctx = Job {
        cfg,
        cache,
        hash: mesh_hash(&mesh),
        mesh,
    };
    let text = match cfg.command {
        Command::Mesh => serialize_mesh(&ctx.mesh),
        Command::Probe => ctx.probe()?,
        Command::Beta => ctx.beta()?,
        Command::Variance => ctx.variance()?,
        Command::Sample => ctx.sample()?,
    };
    write_file(&cfg.output, &text)?;
    let sidecar = serde_json::to_string_pretty(cfg)? + "\n";
    write_file(&cfg.sidecar_path(), &sidecar)
}

pub fn load_mesh(source: &MeshSource) -> Result<Mesh> {
    match source {
        MeshSource::Generated { kind, n } if kind == "parallelogram" => {
            let square = build_structured_mesh(MeshKind::Square, *n)?;
            let (a, b) = parallelogram_map();
            Ok(affine_transform(&square, &a, &b)?)
        }
        MeshSource::Generated { kind, n } => Ok(build_structured_mesh(kind.parse::<MeshKind>()?, *n)?),
        MeshSource::File { path } => {
            let text = fs::read_to_string(path).with_context(|| format!("reading mesh {}", path.display()))?;
            parse_mesh(&text).with_context(|| format!("in mesh file {}", path.display()))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

struct Job<'a> {
    cfg: &'a RunConfig,
    cache: &'a Cache,
    hash: String,
    mesh: Arc<Mesh>,
}

impl Job<'_> {
    fn params(&self, p: u32) -> Result<GreensParams> {
        Ok(make_params(self.cfg.gamma, self.cfg.alpha, self.mesh.dim(), p)?)
    }

    fn optimal_beta(&self, method: BetaMethod) -> Result<BoundaryField> {
        let boundary = extract_boundary(&self.mesh);
        let key = format!(
            "beta v1 mesh={} gamma={:?} alpha={:?} method={:?} stride={}",
            self.hash, self.cfg.gamma, self.cfg.alpha, method, self.cfg.stride
        );
        if let Some(values) = self.cache.load("beta", &key, boundary.num_quad_points()) {
            return Ok(BoundaryField::new(boundary, values)?);
        }
        let quad = QuadratureMethod::new(method.kind()).with_stride(self.cfg.stride);
        let field = optimal_beta_field(&self.mesh, &boundary, &self.params(2)?, &quad)?;
        if !field.failures().is_empty() {
            log::warn!(
                "{} boundary points were interpolated after failed evaluations",
                field.failures().len()
            );
        }
        log::info!("beta in [{:.6}, {:.6}]", field.min(), field.max());
        self.cache.store("beta", &key, field.values())?;
        Ok(field)
    }

    fn bc(&self) -> Result<BcSpec> {
        Ok(match (self.cfg.bc, self.cfg.beta) {
            (BcKind::Dirichlet, _) => BcSpec::Dirichlet,
            (BcKind::Neumann, _) => BcSpec::Neumann,
            (BcKind::Robin, Some(BetaSource::Const { value })) => BcSpec::robin_constant(value),
            (BcKind::Robin, Some(BetaSource::Roininen)) => {
                BcSpec::robin_constant(constant_beta(&self.params(2)?, ConstantRule::Roininen)?)
            }
            (BcKind::Robin, Some(BetaSource::Optimal { method })) => BcSpec::robin_field(self.optimal_beta(method)?),
            (BcKind::Robin, None) => return Err(config_error("--bc robin needs --beta")),
        })
    }

    fn operators(&self) -> Result<OperatorSet> {
        let ops = assemble(self.mesh.clone(), self.cfg.gamma, self.cfg.alpha, self.bc()?)?;
        Ok(ops.with_solver(self.cfg.solver()))
    }

    /// Nodal variances for `nodes` (all when `None`), merged with and stored
    /// back into the cache.
    fn variance_field(&self, ops: &OperatorSet, spec: VarianceSpec, nodes: Option<&[usize]>) -> Result<VarianceField> {
        let method = spec.method(self.cfg.seed);
        let key = format!(
            "var v1 mesh={} gamma={:?} alpha={:?} bc={:?} beta={:?} stride={} solver={:?} method={:?}",
            self.hash,
            self.cfg.gamma,
            self.cfg.alpha,
            self.cfg.bc,
            self.cfg.beta,
            self.cfg.stride,
            self.cfg.solver(),
            method
        );
        let n = ops.num_nodes();
        let cached = self.cache.load("var", &key, n);
        let values = match spec {
            VarianceSpec::Stochastic { samples } => match cached {
                Some(v) => v,
                None => {
                    let v = variance_stochastic(ops, samples, self.cfg.seed)?.values().to_vec();
                    self.cache.store("var", &key, &v)?;
                    v
                }
            },
            VarianceSpec::Direct => {
                let mut values = cached.unwrap_or_else(|| vec![f64::NAN; n]);
                let wanted: Vec<usize> = match nodes {
                    Some(s) => s.to_vec(),
                    None => (0..n).collect(),
                };
                let missing: Vec<usize> = wanted.into_iter().filter(|&i| values[i].is_nan()).collect();
                if !missing.is_empty() {
                    log::info!("computing variance at {} nodes", missing.len());
                    let fresh = variance_direct(ops, Some(&missing))?;
                    for &i in &missing {
                        values[i] = fresh.values()[i];
                    }
                    self.cache.store("var", &key, &values)?;
                }
                if nodes.is_some() {
                    // report only what was asked for
                    let keep: std::collections::HashSet<usize> = nodes.unwrap().iter().copied().collect();
                    for (i, v) in values.iter_mut().enumerate() {
                        if !keep.contains(&i) {
                            *v = f64::NAN;
                        }
                    }
                }
                values
            }
        };
        Ok(VarianceField::from_values(self.mesh.clone(), values, method)?)
    }

    fn scaling(&self, ops: &OperatorSet, spec: VarianceSpec, nodes: Option<&[usize]>) -> Result<ScalingField> {
        let var = self.variance_field(ops, spec, nodes)?;
        Ok(make_scaling(&var, self.params(2)?.sigma2()?)?)
    }

    fn probe(&self) -> Result<String> {
        let center = self.cfg.center.as_deref().expect("validated");
        let sec = self.cfg.section.as_ref().expect("validated");
        if center.len() != self.mesh.dim() {
            return Err(config_error(format!("--center needs {} coordinates", self.mesh.dim())));
        }
        let (cell, _) =
            point_locate(&self.mesh, center).with_context(|| format!("center {center:?} lies outside the mesh"))?;
        let section = CrossSection::new(&self.mesh, &sec.origin, &sec.direction, sec.count)?;
        let ops = self.operators()?;
        let column = match self.cfg.normalize {
            Some(spec) => {
                let mut nodes = section.support_nodes(&self.mesh);
                nodes.extend_from_slice(self.mesh.cell(cell));
                nodes.sort_unstable();
                nodes.dedup();
                let g = self.scaling(&ops, spec, Some(&nodes))?;
                grf_core::variance::normalized_greens_column(&ops, &g, center)?
            }
            None => greens_column(&ops, center, 2)?,
        };
        let values = section.sample(&column);
        if self.cfg.free_space {
            let params = self.params(2)?;
            let free = section
                .points()
                .iter()
                .map(|x| {
                    let r = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    phi_eval(&params, 2, r).map(|v| v.0)
                })
                .collect::<Result<Vec<f64>, _>>()?;
            Ok(section.to_csv(&[("value", &values), ("free", &free)]))
        } else {
            Ok(section.to_csv(&[("value", &values)]))
        }
    }

    fn beta(&self) -> Result<String> {
        let Some(BetaSource::Optimal { method }) = self.cfg.beta else {
            return Err(config_error("beta needs --beta opt:centers|opt:radial"));
        };
        let field = self.optimal_beta(method)?;
        match &self.cfg.section {
            None => Ok(field.to_csv(&self.mesh)),
            Some(sec) => Ok(beta_on_segment(&self.mesh, &field, &sec.origin, &sec.direction)),
        }
    }

    fn variance(&self) -> Result<String> {
        let ops = self.operators()?;
        let spec = self.cfg.normalize.unwrap_or(self.cfg.variance);
        let var = self.variance_field(&ops, spec, None)?;
        let sd = var.stddev();
        let field = ScalarField::new(self.mesh.clone(), var.values().to_vec())?;
        if self.cfg.normalize.is_some() {
            let g = make_scaling(&var, self.params(2)?.sigma2()?)?;
            Ok(field.to_csv_columns(&[("variance", var.values()), ("stddev", &sd), ("g", g.values())]))
        } else {
            Ok(field.to_csv_columns(&[("variance", var.values()), ("stddev", &sd)]))
        }
    }

    fn sample(&self) -> Result<String> {
        let ops = self.operators()?;
        let g = match self.cfg.normalize {
            Some(spec) => Some(self.scaling(&ops, spec, None)?),
            None => None,
        };
        let sampler = Sampler::new(&ops, self.cfg.mass_root.root())?;
        let mut names = Vec::with_capacity(self.cfg.count);
        let mut columns = Vec::with_capacity(self.cfg.count);
        for k in 0..self.cfg.count as u64 {
            let seed = self.cfg.seed.wrapping_add(k);
            let mut u = sampler.sample(seed)?;
            if let Some(g) = &g {
                u = g.apply(&u)?;
            }
            names.push(format!("sample_{seed}"));
            columns.push(u.into_values());
        }
        let cols: Vec<(&str, &[f64])> = names
            .iter()
            .map(String::as_str)
            .zip(columns.iter().map(Vec::as_slice))
            .collect();
        Ok(ScalarField::new(self.mesh.clone(), vec![0.0; self.mesh.num_vertices()])?.to_csv_columns(&cols))
    }
}

/// Coefficient values at boundary points on the segment `p + s d`,
/// `s in [0, 1]`, one row per distinct (point, normal), ordered by `s`.
fn beta_on_segment(mesh: &Mesh, field: &BoundaryField, origin: &[f64], dir: &[f64]) -> String {
    let b = field.boundary();
    let dim = mesh.dim();
    let dd: f64 = dir.iter().map(|v| v * v).sum();
    let tol = 1e-9 * (1.0 + dd.sqrt());
    let mut rows: Vec<(f64, usize, usize)> = Vec::new();
    for q in 0..b.num_quad_points() {
        let y = mesh.vertex(b.quad_vertex(q));
        let s = if dd > 0.0 {
            y.iter()
                .zip(origin)
                .zip(dir)
                .map(|((y, p), d)| (y - p) * d)
                .sum::<f64>()
                / dd
        } else {
            0.0
        };
        let off: f64 = (0..dim)
            .map(|k| (y[k] - origin[k] - s * dir[k]).powi(2))
            .sum::<f64>()
            .sqrt();
        if off > tol || s < -tol || s > 1.0 + tol {
            continue;
        }
        let facet = q / dim;
        let duplicate = rows
            .iter()
            .any(|&(_, v, f)| v == b.quad_vertex(q) && b.normal(f) == b.normal(facet));
        if !duplicate {
            rows.push((s, b.quad_vertex(q), facet));
        }
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let names = ["x", "y", "z"];
    let mut out = String::from("s");
    for n in &names[..dim] {
        out.push_str(&format!(",{n}"));
    }
    for n in &names[..dim] {
        out.push_str(&format!(",n{n}"));
    }
    out.push_str(",beta\n");
    for (s, v, f) in rows {
        out.push_str(&format!("{s}"));
        for x in mesh.vertex(v) {
            out.push_str(&format!(",{x}"));
        }
        for x in b.normal(f) {
            out.push_str(&format!(",{x}"));
        }
        let q = (0..dim)
            .map(|k| f * dim + k)
            .find(|&q| b.quad_vertex(q) == v)
            .expect("vertex of facet");
        out.push_str(&format!(",{}\n", field.values()[q]));
    }
    out
}
