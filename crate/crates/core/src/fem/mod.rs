//! P1 finite elements for `A = -gamma Laplace + alpha`.
//!
//! [`assemble`] produces the system matrix `K` (stiffness, reaction and
//! Robin boundary mass) and the consistent mass matrix `M`. The discrete
//! covariance of `A^-2` is `K^-1 M K^-1`, the discrete precision `K M^-1 K`.

mod field;
mod sampling;

pub use field::ScalarField;
pub use sampling::{sample_field, MassRoot, Sampler, DENSE_ROOT_MAX_NODES};

use std::sync::{Arc, OnceLock};

use crate::error::{invalid, Error, Result};
use crate::geometry::factorial;
use crate::mesh::{extract_boundary, point_locate, BoundarySet, Mesh};
use crate::robin::BoundaryField;
use crate::solver::EnvelopeCholesky;
use crate::sparse::CsrMatrix;

pub use crate::solver::{cg_solve, CgOutcome};

/// Robin coefficient `beta` in `beta u + du/dn = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum RobinCoefficient {
    Constant(f64),
    Field(BoundaryField),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BcSpec {
    Dirichlet,
    Neumann,
    Robin(RobinCoefficient),
}

impl BcSpec {
    pub fn robin_constant(beta: f64) -> Self {
        BcSpec::Robin(RobinCoefficient::Constant(beta))
    }

    pub fn robin_field(beta: BoundaryField) -> Self {
        BcSpec::Robin(RobinCoefficient::Field(beta))
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BcSpec::Dirichlet)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BcSpec::Dirichlet => "dirichlet",
            BcSpec::Neumann => "neumann",
            BcSpec::Robin(_) => "robin",
        }
    }
}

/// How systems with `K` are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    /// Sparse Cholesky, factored once on first use.
    Direct,
    /// Jacobi-preconditioned CG; `maxit` defaults to `10 n`.
    Cg { tol: f64, maxit: Option<usize> },
}

impl Default for SolverKind {
    fn default() -> Self {
        SolverKind::Direct
    }
}

/// Assembled operators on one mesh. Immutable; solves may run concurrently.
#[derive(Debug)]
pub struct OperatorSet {
    mesh: Arc<Mesh>,
    boundary: BoundarySet,
    k: CsrMatrix,
    m: CsrMatrix,
    lumped: Vec<f64>,
    gamma: f64,
    alpha: f64,
    bc: BcSpec,
    fixed: Vec<bool>,
    solver: SolverKind,
    factor: OnceLock<Result<EnvelopeCholesky>>,
}

/// Assembles `K = gamma S + alpha M (+ R)` and `M` on `mesh`.
///
/// Dirichlet conditions replace the rows and columns of boundary vertices in
/// `K` by those of the identity; `M` stays the consistent mass matrix.
pub fn assemble(mesh: impl Into<Arc<Mesh>>, gamma: f64, alpha: f64, bc: BcSpec) -> Result<OperatorSet> {
    let mesh = mesh.into();
    if !(gamma > 0.0 && gamma.is_finite()) || !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!(
            "gamma and alpha must be positive, got gamma = {gamma}, alpha = {alpha}"
        )));
    }
    if mesh.num_cells() == 0 {
        return Err(invalid("mesh has no cells"));
    }
    let boundary = extract_boundary(&mesh);
    let beta = robin_values(&bc, &boundary)?;

    let dim = mesh.dim();
    let nv = mesh.num_vertices();
    let nloc = dim + 1;
    let mass_scale = 1.0 / ((dim + 1) * (dim + 2)) as f64;
    let mut kt = Vec::with_capacity(mesh.num_cells() * nloc * nloc);
    let mut mt = Vec::with_capacity(mesh.num_cells() * nloc * nloc);
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        let vol = mesh.cell_volume(c);
        let g = mesh.barycentric_gradients(c);
        for a in 0..nloc {
            for b in 0..nloc {
                let s: f64 = (0..dim).map(|r| g[a][r] * g[b][r]).sum();
                let m = vol * mass_scale * if a == b { 2.0 } else { 1.0 };
                kt.push((cell[a], cell[b], gamma * vol * s + alpha * m));
                mt.push((cell[a], cell[b], m));
            }
        }
    }

    if let Some(beta) = &beta {
        // int_F lambda^a = |F| k! prod(a!) / (k + |a|)!, k = dim - 1
        let k = dim - 1;
        let unit = factorial(k) / factorial(k + 3);
        for f in 0..boundary.num_facets() {
            let verts = boundary.facet(f);
            let area = boundary.measure(f);
            let bf = &beta[f * dim..(f + 1) * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = 0.0;
                    for (c, &b) in bf.iter().enumerate() {
                        let equal = (c == i) as u8 + (c == j) as u8 + (i == j) as u8;
                        let mult = match equal {
                            3 => 6.0,
                            1 => 2.0,
                            _ => 1.0,
                        };
                        s += b * mult;
                    }
                    kt.push((verts[i], verts[j], area * unit * s));
                }
            }
        }
    }

    let mut k = CsrMatrix::from_triplets(nv, nv, kt);
    let m = CsrMatrix::from_triplets(nv, nv, mt);
    let lumped = m.row_sums();

    let mut fixed = vec![false; nv];
    if bc.is_dirichlet() {
        for v in boundary.vertices() {
            fixed[v] = true;
        }
        k = eliminate(&k, &fixed);
    }

    Ok(OperatorSet {
        mesh,
        boundary,
        k,
        m,
        lumped,
        gamma,
        alpha,
        bc,
        fixed,
        solver: SolverKind::Direct,
        factor: OnceLock::new(),
    })
}

/// Per-quadrature-point Robin values, validated.
fn robin_values(bc: &BcSpec, boundary: &BoundarySet) -> Result<Option<Vec<f64>>> {
    let values = match bc {
        BcSpec::Robin(RobinCoefficient::Constant(b)) => vec![*b; boundary.num_quad_points()],
        BcSpec::Robin(RobinCoefficient::Field(f)) => {
            if f.boundary() != boundary {
                return Err(invalid("Robin coefficient lives on a different boundary"));
            }
            f.values().to_vec()
        }
        _ => return Ok(None),
    };
    if let Some((q, b)) = values.iter().enumerate().find(|(_, b)| !(**b >= 0.0) || !b.is_finite()) {
        return Err(invalid(format!(
            "Robin coefficient must be finite and >= 0, got {b} at boundary point {q}"
        )));
    }
    Ok(Some(values))
}

fn eliminate(k: &CsrMatrix, fixed: &[bool]) -> CsrMatrix {
    let n = k.nrows();
    let mut t = Vec::with_capacity(k.nnz());
    for i in 0..n {
        if fixed[i] {
            t.push((i, i, 1.0));
            continue;
        }
        let (cols, vals) = k.row(i);
        t.extend(
            cols.iter()
                .zip(vals)
                .filter(|(j, _)| !fixed[**j])
                .map(|(&j, &v)| (i, j, v)),
        );
    }
    CsrMatrix::from_triplets(n, n, t)
}

impl OperatorSet {
    /// Same operators, different solver back end.
    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self.factor = OnceLock::new();
        self
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn boundary(&self) -> &BoundarySet {
        &self.boundary
    }

    pub fn k(&self) -> &CsrMatrix {
        &self.k
    }

    pub fn m(&self) -> &CsrMatrix {
        &self.m
    }

    /// Row sums of `M`.
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bc(&self) -> &BcSpec {
        &self.bc
    }

    pub fn solver(&self) -> SolverKind {
        self.solver
    }

    pub fn num_nodes(&self) -> usize {
        self.k.nrows()
    }

    /// Whether node `i` carries a Dirichlet constraint.
    pub fn is_fixed(&self, i: usize) -> bool {
        self.fixed[i]
    }

    /// Zeroes entries at Dirichlet nodes.
    pub fn mask(&self, v: &mut [f64]) {
        if self.bc.is_dirichlet() {
            for (x, &f) in v.iter_mut().zip(&self.fixed) {
                if f {
                    *x = 0.0;
                }
            }
        }
    }

    /// Solves `K x = b` with `b` masked at Dirichlet nodes.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.num_nodes() {
            return Err(invalid(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.num_nodes()
            )));
        }
        let mut rhs = b.to_vec();
        self.mask(&mut rhs);
        match self.solver {
            SolverKind::Direct => {
                let f = self
                    .factor
                    .get_or_init(|| EnvelopeCholesky::factor(&self.k))
                    .as_ref()
                    .map_err(Clone::clone)?;
                Ok(f.solve(&rhs))
            }
            SolverKind::Cg { tol, maxit } => {
                let maxit = maxit.unwrap_or(10 * self.num_nodes());
                Ok(cg_solve(&self.k, &rhs, tol, maxit)?.x)
            }
        }
    }

    /// `M v`, masked at Dirichlet nodes.
    pub fn apply_mass(&self, v: &[f64]) -> Vec<f64> {
        let mut y = self.m.mul_vec(v);
        self.mask(&mut y);
        y
    }

    fn field(&self, values: Vec<f64>) -> ScalarField {
        ScalarField::new(self.mesh.clone(), values).expect("length checked by solve")
    }
}

/// Load vector of a unit point source at `x`: the P1 basis functions
/// evaluated at `x`.
pub fn point_load(mesh: &Mesh, x: &[f64]) -> Result<Vec<f64>> {
    let (c, lam) = point_locate(mesh, x)?;
    let mut f = vec![0.0; mesh.num_vertices()];
    for (&v, l) in mesh.cell(c).iter().zip(lam) {
        f[v] += l;
    }
    Ok(f)
}

fn check_power(p: u32) -> Result<()> {
    if p == 1 || p == 2 {
        Ok(())
    } else {
        Err(invalid(format!("power p must be 1 or 2, got {p}")))
    }
}

/// `K^-1 f` for `p = 1`, `K^-1 M K^-1 f` for `p = 2`.
pub fn apply_covariance(ops: &OperatorSet, f: &[f64], p: u32) -> Result<ScalarField> {
    check_power(p)?;
    let v = ops.solve(f)?;
    if p == 1 {
        return Ok(ops.field(v));
    }
    let u = ops.solve(&ops.apply_mass(&v))?;
    Ok(ops.field(u))
}

/// Discrete Green's function `G_p(x, .)`.
pub fn greens_column(ops: &OperatorSet, x: &[f64], p: u32) -> Result<ScalarField> {
    check_power(p)?;
    let f = point_load(ops.mesh(), x)?;
    apply_covariance(ops, &f, p)
}

/// Like [`greens_column`] for a mesh node, without point location.
pub fn greens_column_at_node(ops: &OperatorSet, node: usize, p: u32) -> Result<ScalarField> {
    if node >= ops.num_nodes() {
        return Err(Error::InvalidArgument(format!("node {node} out of range")));
    }
    let mut f = vec![0.0; ops.num_nodes()];
    f[node] = 1.0;
    apply_covariance(ops, &f, p)
}
