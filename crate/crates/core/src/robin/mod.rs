//! Robin coefficients that make the domain Green's function mimic the
//! free-space one.
//!
//! At every boundary point `y` the optimal coefficient minimizes the
//! averaged residual of `beta Phi + dPhi/dn` over source points, which
//! gives the ratio evaluated by [`BetaIntegrator::beta_tilde`]; negative
//! values are clamped to zero.

mod integrator;
mod interp;

pub use integrator::BetaIntegrator;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::greens::GreensParams;
use crate::mesh::{BoundarySet, Mesh};
use crate::par;

use interp::Source;

/// Fraction of failed boundary points above which the field is rejected.
const MAX_FAILURE_FRACTION: f64 = 0.01;
/// Interpolation is used only between evaluated points whose values agree
/// to this relative tolerance.
const REFINE_TOL: f64 = 0.01;

/// Values at the boundary quadrature points (facet vertices, one value per
/// facet and local vertex), linear along each facet.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    boundary: BoundarySet,
    values: Vec<f64>,
    unclamped: Option<Vec<f64>>,
    failures: Vec<usize>,
}

impl BoundaryField {
    pub fn new(boundary: BoundarySet, values: Vec<f64>) -> Result<Self> {
        if values.len() != boundary.num_quad_points() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} boundary points",
                values.len(),
                boundary.num_quad_points()
            )));
        }
        Ok(BoundaryField {
            boundary,
            values,
            unclamped: None,
            failures: Vec::new(),
        })
    }

    pub fn constant(boundary: BoundarySet, value: f64) -> Self {
        let n = boundary.num_quad_points();
        BoundaryField {
            boundary,
            values: vec![value; n],
            unclamped: None,
            failures: Vec::new(),
        }
    }

    /// `f(vertex, normal)` at every quadrature point.
    pub fn from_fn(boundary: BoundarySet, f: impl Fn(usize, &[f64]) -> f64) -> Self {
        let dim = boundary.dim();
        let values = (0..boundary.num_quad_points())
            .map(|q| f(boundary.quad_vertex(q), boundary.normal(q / dim)))
            .collect();
        BoundaryField {
            boundary,
            values,
            unclamped: None,
            failures: Vec::new(),
        }
    }

    pub fn boundary(&self) -> &BoundarySet {
        &self.boundary
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `beta~` before clamping, when the field came from
    /// [`optimal_beta_field`].
    pub fn unclamped(&self) -> Option<&[f64]> {
        self.unclamped.as_deref()
    }

    /// Quadrature points whose evaluation failed and were interpolated.
    pub fn failures(&self) -> &[usize] {
        &self.failures
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Curve parameter of every quadrature point: the coordinate in 1D,
    /// arclength along the boundary loops in 2D, the point index in 3D.
    pub fn parameters(&self, mesh: &Mesh) -> Vec<f64> {
        let nq = self.boundary.num_quad_points();
        match mesh.dim() {
            1 => (0..nq).map(|q| mesh.vertex(self.boundary.quad_vertex(q))[0]).collect(),
            2 => {
                let (points, map) = interp::distinct_points(&self.boundary);
                match interp::runs_2d(mesh, &self.boundary, &map) {
                    Some(runs) => {
                        let mut s = vec![0.0; points.len()];
                        for run in &runs {
                            for (&id, &si) in run.ids.iter().zip(&run.s) {
                                s[id] = si;
                            }
                        }
                        map.iter().map(|&id| s[id]).collect()
                    }
                    None => (0..nq).map(|q| q as f64).collect(),
                }
            }
            _ => (0..nq).map(|q| q as f64).collect(),
        }
    }

    /// CSV `param,x[,y[,z]],beta`, one row per quadrature point, sorted by
    /// parameter.
    pub fn to_csv(&self, mesh: &Mesh) -> String {
        let params = self.parameters(mesh);
        let mut order: Vec<usize> = (0..params.len()).collect();
        order.sort_by(|&a, &b| params[a].partial_cmp(&params[b]).unwrap().then(a.cmp(&b)));
        let mut out = String::from("param");
        for name in &["x", "y", "z"][..mesh.dim()] {
            out.push(',');
            out.push_str(name);
        }
        out.push_str(",beta\n");
        for q in order {
            let _ = write!(out, "{}", params[q]);
            for x in mesh.vertex(self.boundary.quad_vertex(q)) {
                let _ = write!(out, ",{x}");
            }
            let _ = writeln!(out, ",{}", self.values[q]);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// One-point rule at cell centroids with the closed-form kernels.
    ElementCenters,
    /// Discrete radial Green's functions, evaluated at the points of a
    /// quadratic-exact rule in every cell.
    RadialProjection,
}

/// Integration radius around the boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Full,
    Radius(f64),
    /// Multiple of the characteristic length of `A^-2`.
    CharLengths(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMethod {
    pub kind: QuadratureKind,
    pub cutoff: Cutoff,
    /// Evaluate every `stride`-th point and interpolate the rest.
    pub stride: usize,
    /// Radial grid spacing; defaults to the shortest boundary edge.
    pub radial_h: Option<f64>,
    /// Radial truncation; defaults to 15 characteristic lengths.
    pub radial_radius: Option<f64>,
}

impl QuadratureMethod {
    pub fn new(kind: QuadratureKind) -> Self {
        QuadratureMethod {
            kind,
            cutoff: Cutoff::CharLengths(8.0),
            stride: 1,
            radial_h: None,
            radial_radius: None,
        }
    }

    pub fn element_centers() -> Self {
        Self::new(QuadratureKind::ElementCenters)
    }

    pub fn radial_projection() -> Self {
        Self::new(QuadratureKind::RadialProjection)
    }

    pub fn with_cutoff(mut self, cutoff: Cutoff) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }
}

/// `beta~(y)` for one boundary point with outward normal `n`.
///
/// Builds the integrator from scratch; use [`BetaIntegrator`] directly for
/// many points.
pub fn beta_tilde_at(
    y: &[f64],
    n: &[f64],
    mesh: &Mesh,
    boundary: &BoundarySet,
    params: &GreensParams,
    method: &QuadratureMethod,
) -> Result<f64> {
    BetaIntegrator::new(mesh, boundary, params, method)?.beta_tilde(y, n)
}

/// Optimal Robin coefficient at every boundary quadrature point.
///
/// Points sharing a vertex and a normal are evaluated once. With
/// `stride > 1` only a subset is evaluated and the rest interpolated, except
/// where the neighbouring evaluated values differ by more than 1%; those
/// points are evaluated too. Points whose evaluation fails are filled from
/// their neighbours and listed in [`BoundaryField::failures`]; more than 1%
/// failures is an error.
pub fn optimal_beta_field(
    mesh: &Mesh,
    boundary: &BoundarySet,
    params: &GreensParams,
    method: &QuadratureMethod,
) -> Result<BoundaryField> {
    if method.stride == 0 {
        return Err(Error::InvalidArgument("interpolation stride must be >= 1".into()));
    }
    if boundary.is_empty() {
        return Err(Error::InvalidArgument("mesh has no boundary".into()));
    }
    let integrator = BetaIntegrator::new(mesh, boundary, params, method)?;
    let (points, map) = interp::distinct_points(boundary);
    let mut plan = interp::plan(mesh, boundary, &points, &map, method.stride);
    let evaluate = |ids: &[usize]| {
        par::map_slice(ids, |&i| {
            let p = &points[i];
            integrator.beta_tilde(mesh.vertex(p.vertex), &p.normal)
        })
    };

    let mut value = vec![f64::NAN; points.len()];
    let mut failed = Vec::new();
    let mut first_error = None;
    let mut attempted = 0;
    let mut record = |ids: &[usize], results: Vec<Result<f64>>, value: &mut [f64]| {
        for (&i, r) in ids.iter().zip(results) {
            match r {
                Ok(v) => value[i] = v,
                Err(e) => {
                    log::warn!("beta evaluation failed at boundary vertex {}: {e}", points[i].vertex);
                    failed.push(i);
                    first_error.get_or_insert(e);
                }
            }
        }
    };
    let todo: Vec<usize> = (0..points.len()).filter(|&i| plan[i] == Source::Compute).collect();
    attempted += todo.len();
    record(&todo, evaluate(&todo), &mut value);

    // interpolate only across anchors that agree; evaluate the rest
    let refine: Vec<usize> = (0..points.len())
        .filter(|&i| match &plan[i] {
            Source::Blend(w) => {
                let vals: Vec<f64> = w.iter().map(|&(j, _)| value[j]).collect();
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                !(hi - lo <= REFINE_TOL * hi.abs().max(lo.abs()))
            }
            Source::Compute => false,
        })
        .collect();
    if !refine.is_empty() {
        attempted += refine.len();
        record(&refine, evaluate(&refine), &mut value);
        for &i in &refine {
            plan[i] = Source::Compute;
        }
    }

    if failed.len() as f64 > MAX_FAILURE_FRACTION * attempted as f64 {
        return Err(first_error.unwrap());
    }
    if !failed.is_empty() {
        let good: Vec<usize> = (0..points.len())
            .filter(|&i| plan[i] == Source::Compute && !value[i].is_nan())
            .collect();
        for &i in &failed {
            let w = interp::idw(mesh, &points, i, &good).ok_or_else(|| first_error.clone().unwrap())?;
            value[i] = w.iter().map(|&(j, c)| c * value[j]).sum();
        }
    }
    for (i, src) in plan.iter().enumerate() {
        if let Source::Blend(w) = src {
            value[i] = w.iter().map(|&(j, c)| c * value[j]).sum();
        }
    }

    let unclamped: Vec<f64> = map.iter().map(|&id| value[id]).collect();
    let values = unclamped.iter().map(|&b| b.max(0.0)).collect();
    let failed_ids: std::collections::HashSet<usize> = failed.into_iter().collect();
    let failures = (0..map.len()).filter(|q| failed_ids.contains(&map[*q])).collect();
    Ok(BoundaryField {
        boundary: boundary.clone(),
        values,
        unclamped: Some(unclamped),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantRule {
    /// `beta = kappa`, exact for `p = 1` in one dimension.
    Exact1d,
    /// `beta = sqrt(alpha) / 1.42`.
    Roininen,
}

pub fn constant_beta(params: &GreensParams, rule: ConstantRule) -> Result<f64> {
    match rule {
        ConstantRule::Exact1d => {
            if params.dim != 1 || params.p != 1 {
                return Err(Error::Unsupported(format!(
                    "beta = kappa is exact only for d = 1, p = 1 (got d = {}, p = {})",
                    params.dim, params.p
                )));
            }
            Ok(params.kappa)
        }
        ConstantRule::Roininen => Ok(params.alpha.sqrt() / 1.42),
    }
}
