//! Simplicial meshes in one, two and three dimensions.
//!
//! A [`Mesh`] owns vertex coordinates and cell connectivity. Boundary
//! facets are never stored; they are derived from the connectivity by
//! [`extract_boundary`]. Meshes are immutable once built.

mod boundary;
mod io;
mod structured;

pub use boundary::{extract_boundary, BoundarySet};
pub use io::{parse_mesh, serialize_mesh};
pub use structured::{build_structured_mesh, parallelogram_map, MeshKind};

use crate::error::{invalid, Error, Result};
use crate::geometry::{self, Mat3};

/// Tolerance on barycentric coordinates used by point location.
pub const LOCATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<f64>,
    cells: Vec<usize>,
}

impl Mesh {
    /// Builds a mesh from flat coordinate and connectivity arrays.
    ///
    /// `coords` holds `dim` values per vertex and `cells` holds `dim + 1`
    /// vertex indices per cell. Cells with negative signed volume are
    /// reoriented; degenerate cells are rejected.
    pub fn new(dim: usize, coords: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if coords.len() % dim != 0 {
            return Err(invalid("coordinate array length is not a multiple of dim"));
        }
        if cells.len() % (dim + 1) != 0 {
            return Err(invalid("cell array length is not a multiple of dim + 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite vertex coordinate"));
        }
        let nv = coords.len() / dim;
        if let Some(&bad) = cells.iter().find(|&&v| v >= nv) {
            return Err(invalid(format!("vertex index {bad} out of range for {nv} vertices")));
        }
        let mut mesh = Mesh { dim, coords, cells };
        mesh.normalize()?;
        Ok(mesh)
    }

    fn normalize(&mut self) -> Result<()> {
        self.normalize_cells()
            .map_err(|(c, vol)| invalid(format!("cell {c} is degenerate (volume {vol:e})")))
    }

    /// Reorients cells to positive volume; on failure returns the first
    /// degenerate cell and its signed volume.
    pub(crate) fn normalize_cells(&mut self) -> std::result::Result<(), (usize, f64)> {
        let scale = self.bounding_diameter().max(f64::MIN_POSITIVE);
        let vol_tol = 1e-13 * scale.powi(self.dim as i32);
        for c in 0..self.num_cells() {
            let vol = self.signed_volume(c);
            if vol.abs() <= vol_tol || !vol.is_finite() {
                return Err((c, vol));
            }
            if vol < 0.0 {
                let s = c * (self.dim + 1);
                self.cells.swap(s + self.dim - 1, s + self.dim);
            }
        }
        Ok(())
    }

    /// Skips validation; used by the parser, which reports its own errors.
    pub(crate) fn from_parts(dim: usize, coords: Vec<f64>, cells: Vec<usize>) -> Self {
        Mesh { dim, coords, cells }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.chunks_exact(self.dim + 1)
    }

    /// Edge matrix of a cell, columns `v_k - v_0`.
    pub(crate) fn jacobian(&self, c: usize) -> Mat3 {
        let cell = self.cell(c);
        let v0 = self.vertex(cell[0]);
        let mut j = [[0.0; 3]; 3];
        for k in 1..=self.dim {
            let vk = self.vertex(cell[k]);
            for r in 0..self.dim {
                j[r][k - 1] = vk[r] - v0[r];
            }
        }
        j
    }

    pub fn signed_volume(&self, c: usize) -> f64 {
        geometry::det(self.dim, &self.jacobian(c)) / geometry::factorial(self.dim)
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.signed_volume(c).abs()
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_volume(c)).sum()
    }

    pub fn cell_centroid(&self, c: usize) -> Vec<f64> {
        let cell = self.cell(c);
        let mut x = vec![0.0; self.dim];
        for &v in cell {
            for (xi, vi) in x.iter_mut().zip(self.vertex(v)) {
                *xi += vi;
            }
        }
        let k = (self.dim + 1) as f64;
        x.iter_mut().for_each(|xi| *xi /= k);
        x
    }

    /// Gradients of the barycentric coordinates of cell `c`, one row per
    /// local vertex.
    pub(crate) fn barycentric_gradients(&self, c: usize) -> [[f64; 3]; 4] {
        let inv = geometry::inverse(self.dim, &self.jacobian(c));
        let mut g = [[0.0; 3]; 4];
        for k in 1..=self.dim {
            for r in 0..self.dim {
                g[k][r] = inv[k - 1][r];
                g[0][r] -= inv[k - 1][r];
            }
        }
        g
    }

    /// Barycentric coordinates of `x` with respect to cell `c`.
    pub fn barycentric(&self, c: usize, x: &[f64]) -> Vec<f64> {
        let inv = geometry::inverse(self.dim, &self.jacobian(c));
        let v0 = self.vertex(self.cell(c)[0]);
        let mut lam = vec![0.0; self.dim + 1];
        let mut sum = 0.0;
        for k in 0..self.dim {
            let l: f64 = (0..self.dim).map(|r| inv[k][r] * (x[r] - v0[r])).sum();
            lam[k + 1] = l;
            sum += l;
        }
        lam[0] = 1.0 - sum;
        lam
    }

    fn bounding_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in self.coords.chunks_exact(self.dim) {
            for (k, &x) in v.iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        (0..self.dim).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Shortest edge over all cells.
    pub fn min_edge_length(&self) -> f64 {
        let mut h = f64::INFINITY;
        for cell in self.cells() {
            for a in 0..cell.len() {
                for b in a + 1..cell.len() {
                    h = h.min(geometry::distance(self.vertex(cell[a]), self.vertex(cell[b])));
                }
            }
        }
        h
    }
}

/// Locates the cell containing `x` by scanning all cells, O(#cells).
///
/// Returns the first cell whose barycentric coordinates are all
/// `>= -1e-10`; the coordinates are clipped to be nonnegative and
/// renormalized to sum to one.
pub fn point_locate(mesh: &Mesh, x: &[f64]) -> Result<(usize, Vec<f64>)> {
    if x.len() != mesh.dim() {
        return Err(invalid(format!(
            "point has {} coordinates, mesh dimension is {}",
            x.len(),
            mesh.dim()
        )));
    }
    for c in 0..mesh.num_cells() {
        let lam = mesh.barycentric(c, x);
        if lam.iter().all(|&l| l >= -LOCATE_TOL) {
            let mut lam: Vec<f64> = lam.into_iter().map(|l| l.max(0.0)).collect();
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= s);
            return Ok((c, lam));
        }
    }
    Err(Error::NotFound(format!("point {x:?} is outside the mesh")))
}

/// Maps every vertex through `x -> A x + b`.
///
/// `a` is row-major `dim x dim`. Connectivity is kept; cell orientation is
/// renormalized when `det A < 0`.
pub fn affine_transform(mesh: &Mesh, a: &[f64], b: &[f64]) -> Result<Mesh> {
    let d = mesh.dim();
    if a.len() != d * d || b.len() != d {
        return Err(invalid("affine map has wrong shape for mesh dimension"));
    }
    let mut m: Mat3 = [[0.0; 3]; 3];
    for r in 0..d {
        for c in 0..d {
            m[r][c] = a[r * d + c];
        }
    }
    let det = geometry::det(d, &m);
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !det.is_finite() || det.abs() <= 1e-14 * scale.powi(d as i32).max(f64::MIN_POSITIVE) {
        return Err(invalid(format!("affine map is singular (det = {det:e})")));
    }
    let mut coords = Vec::with_capacity(mesh.coords.len());
    for v in mesh.coords.chunks_exact(d) {
        for r in 0..d {
            let y: f64 = (0..d).map(|c| m[r][c] * v[c]).sum::<f64>() + b[r];
            coords.push(y);
        }
    }
    Mesh::new(d, coords, mesh.cells.clone())
}
