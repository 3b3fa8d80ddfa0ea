use std::collections::HashMap;

use super::Mesh;
use crate::geometry;

/// Boundary facets of a mesh with outward unit normals.
///
/// Quadrature points are the facet vertices, each weighted by
/// `measure / dim`; the rule integrates facet-linear functions exactly and
/// is the point set on which boundary fields (Robin coefficients) live.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    dim: usize,
    facets: Vec<usize>,
    owner: Vec<usize>,
    normals: Vec<f64>,
    measures: Vec<f64>,
}

impl BoundarySet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.owner.len()
    }

    /// Vertex indices of facet `f` (`dim` of them).
    pub fn facet(&self, f: usize) -> &[usize] {
        &self.facets[f * self.dim..(f + 1) * self.dim]
    }

    pub fn owner_cell(&self, f: usize) -> usize {
        self.owner[f]
    }

    pub fn normal(&self, f: usize) -> &[f64] {
        &self.normals[f * self.dim..(f + 1) * self.dim]
    }

    /// Length/area of the facet; 1 for point facets in 1D.
    pub fn measure(&self, f: usize) -> f64 {
        self.measures[f]
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    pub fn num_quad_points(&self) -> usize {
        self.facets.len()
    }

    /// Quadrature point `q` is local vertex `q % dim` of facet `q / dim`.
    pub fn quad_vertex(&self, q: usize) -> usize {
        self.facets[q]
    }

    pub fn quad_weight(&self, q: usize) -> f64 {
        self.measures[q / self.dim] / self.dim as f64
    }

    /// Distinct vertices touching the boundary, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v = self.facets.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }
}

/// Collects the facets that belong to exactly one cell.
///
/// Facets are ordered by owning cell, then by the local index of the vertex
/// opposite the facet, so the result is deterministic.
pub fn extract_boundary(mesh: &Mesh) -> BoundarySet {
    let dim = mesh.dim();
    let mut count: HashMap<[usize; 3], (u32, usize, usize)> = HashMap::new();
    for (c, cell) in mesh.cells().enumerate() {
        for skip in 0..=dim {
            let key = facet_key(cell, skip, dim);
            count.entry(key).and_modify(|e| e.0 += 1).or_insert((1, c, skip));
        }
    }
    let mut found: Vec<(usize, usize)> = count
        .values()
        .filter(|(n, _, _)| *n == 1)
        .map(|&(_, c, skip)| (c, skip))
        .collect();
    found.sort_unstable();
    if found.is_empty() {
        log::warn!("mesh has no boundary facets");
    }

    let mut set = BoundarySet {
        dim,
        facets: Vec::with_capacity(found.len() * dim),
        owner: Vec::with_capacity(found.len()),
        normals: Vec::with_capacity(found.len() * dim),
        measures: Vec::with_capacity(found.len()),
    };
    for (c, skip) in found {
        let cell = mesh.cell(c);
        let verts: Vec<usize> = (0..=dim).filter(|&k| k != skip).map(|k| cell[k]).collect();
        let (mut normal, measure) = facet_geometry(mesh, &verts);
        // orient away from the opposite vertex
        let opposite = mesh.vertex(cell[skip]);
        let base = mesh.vertex(verts[0]);
        let side: f64 = (0..dim).map(|r| normal[r] * (base[r] - opposite[r])).sum();
        if side < 0.0 {
            normal.iter_mut().for_each(|x| *x = -*x);
        }
        set.facets.extend(&verts);
        set.owner.push(c);
        set.normals.extend(&normal[..dim]);
        set.measures.push(measure);
    }
    set
}

fn facet_key(cell: &[usize], skip: usize, dim: usize) -> [usize; 3] {
    let mut key = [usize::MAX; 3];
    let mut n = 0;
    for (k, &v) in cell.iter().enumerate() {
        if k != skip {
            key[n] = v;
            n += 1;
        }
    }
    key[..dim].sort_unstable();
    key
}

/// Unit normal (unoriented) and measure of a facet.
fn facet_geometry(mesh: &Mesh, verts: &[usize]) -> ([f64; 3], f64) {
    match mesh.dim() {
        1 => ([1.0, 0.0, 0.0], 1.0),
        2 => {
            let a = mesh.vertex(verts[0]);
            let b = mesh.vertex(verts[1]);
            let t = [b[0] - a[0], b[1] - a[1]];
            let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
            ([t[1] / len, -t[0] / len, 0.0], len)
        }
        _ => {
            let a = mesh.vertex(verts[0]);
            let b = mesh.vertex(verts[1]);
            let c = mesh.vertex(verts[2]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let n = geometry::cross(u, v);
            let len = geometry::norm(&n);
            ([n[0] / len, n[1] / len, n[2] / len], 0.5 * len)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, MeshKind};

    #[test]
    fn square_boundary() {
        for n in [1, 3, 8] {
            let m = build_structured_mesh(MeshKind::Square, n).unwrap();
            let b = extract_boundary(&m);
            assert_eq!(b.num_facets(), 4 * n);
            assert!((b.total_measure() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bottom_edge_normal_points_down() {
        let m = build_structured_mesh(MeshKind::Square, 4).unwrap();
        let b = extract_boundary(&m);
        let mut seen = 0;
        for f in 0..b.num_facets() {
            let on_bottom = b.facet(f).iter().all(|&v| m.vertex(v)[1] == 0.0);
            if on_bottom {
                seen += 1;
                assert!((b.normal(f)[0]).abs() < 1e-15);
                assert!((b.normal(f)[1] + 1.0).abs() < 1e-15);
            }
        }
        assert_eq!(seen, 4);
    }

    #[test]
    fn cube_surface_area() {
        let m = build_structured_mesh(MeshKind::Cube, 3).unwrap();
        let b = extract_boundary(&m);
        assert_eq!(b.num_facets(), 12 * 9);
        assert!((b.total_measure() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn interval_endpoints() {
        let m = build_structured_mesh(MeshKind::Interval, 5).unwrap();
        let b = extract_boundary(&m);
        assert_eq!(b.num_facets(), 2);
        for f in 0..2 {
            let x = m.vertex(b.facet(f)[0])[0];
            let expect = if x == 0.0 { -1.0 } else { 1.0 };
            assert_eq!(b.normal(f)[0], expect);
        }
    }

    #[test]
    fn normals_are_unit_and_outward() {
        for kind in [MeshKind::Square, MeshKind::Cube] {
            let m = build_structured_mesh(kind, 2).unwrap();
            let b = extract_boundary(&m);
            for f in 0..b.num_facets() {
                let n = b.normal(f);
                assert!((geometry::norm(n) - 1.0).abs() < 1e-12);
                let cc = m.cell_centroid(b.owner_cell(f));
                let mut fc = vec![0.0; m.dim()];
                for &v in b.facet(f) {
                    for r in 0..m.dim() {
                        fc[r] += m.vertex(v)[r] / m.dim() as f64;
                    }
                }
                let s: f64 = (0..m.dim()).map(|r| n[r] * (fc[r] - cc[r])).sum();
                assert!(s > 0.0);
            }
        }
    }

    #[test]
    fn quad_weights_sum_to_measure() {
        let m = build_structured_mesh(MeshKind::Cube, 2).unwrap();
        let b = extract_boundary(&m);
        for f in 0..b.num_facets() {
            let w: f64 = (0..3).map(|k| b.quad_weight(3 * f + k)).sum();
            assert!((w - b.measure(f)).abs() <= 1e-12 * b.measure(f));
        }
    }
}
