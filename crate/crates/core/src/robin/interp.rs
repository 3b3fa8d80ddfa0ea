//! Choosing which boundary points to evaluate when `stride > 1`, and how
//! to fill in the others.
//!
//! In 2D the boundary is walked loop by loop. Corners (vertices whose two
//! facets have different normals) are always evaluated; between corners
//! every `stride`-th point is evaluated and the rest are interpolated
//! linearly in arclength. In 3D the evaluated set is every `stride`-th
//! point plus all edge/corner points, and the rest use inverse-distance
//! weights over the nearest evaluated points with a matching normal.

use std::collections::HashMap;

use crate::geometry;
use crate::mesh::{BoundarySet, Mesh};

/// Normals closer than this (cosine) count as the same side.
const SAME_SIDE: f64 = 0.99;
const IDW_NEIGHBOURS: usize = 4;

/// A distinct (vertex, outward normal) pair on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct EvalPoint {
    pub vertex: usize,
    pub normal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Source {
    Compute,
    /// weighted combination of other points' values
    Blend(Vec<(usize, f64)>),
}

/// Groups quadrature points by (vertex, normal). Returns the distinct
/// points and, per quadrature point, the index of its distinct point.
pub(crate) fn distinct_points(boundary: &BoundarySet) -> (Vec<EvalPoint>, Vec<usize>) {
    let dim = boundary.dim();
    let mut index: HashMap<(usize, [i64; 3]), usize> = HashMap::new();
    let mut points = Vec::new();
    let mut map = Vec::with_capacity(boundary.num_quad_points());
    for q in 0..boundary.num_quad_points() {
        let v = boundary.quad_vertex(q);
        let n = boundary.normal(q / dim);
        let mut key = [0i64; 3];
        for (k, x) in n.iter().enumerate() {
            key[k] = (x * 1e9).round() as i64;
        }
        let id = *index.entry((v, key)).or_insert_with(|| {
            points.push(EvalPoint {
                vertex: v,
                normal: n.to_vec(),
            });
            points.len() - 1
        });
        map.push(id);
    }
    (points, map)
}

/// One closed boundary curve of a 2D mesh as runs between corners.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Run {
    /// distinct-point ids in walking order
    pub ids: Vec<usize>,
    /// arclength from the start of the enclosing loop
    pub s: Vec<f64>,
}

/// Splits the boundary of a 2D mesh into runs between corners. `None` if
/// the boundary is not a set of simple closed curves.
pub(crate) fn runs_2d(mesh: &Mesh, boundary: &BoundarySet, map: &[usize]) -> Option<Vec<Run>> {
    let nf = boundary.num_facets();
    let mut at_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
    for f in 0..nf {
        for &v in boundary.facet(f) {
            at_vertex.entry(v).or_default().push(f);
        }
    }
    if at_vertex.values().any(|fs| fs.len() != 2) {
        return None;
    }
    let uid = |f: usize, v: usize| {
        let k = if boundary.facet(f)[0] == v { 0 } else { 1 };
        map[2 * f + k]
    };
    let mut seen = vec![false; nf];
    let mut runs = Vec::new();
    let mut offset = 0.0;
    for start in 0..nf {
        if seen[start] {
            continue;
        }
        // (vertex, incoming facet, outgoing facet) around the loop
        let mut walk = Vec::new();
        let mut f = start;
        let mut v = boundary.facet(start)[0];
        loop {
            seen[f] = true;
            let w = if boundary.facet(f)[0] == v {
                boundary.facet(f)[1]
            } else {
                boundary.facet(f)[0]
            };
            let next = at_vertex[&w].iter().copied().find(|&g| g != f)?;
            walk.push((w, f, next));
            f = next;
            v = w;
            if f == start {
                break;
            }
            if seen[f] {
                return None;
            }
        }
        let corner = |&(w, fin, fout): &(usize, usize, usize)| uid(fin, w) != uid(fout, w);
        let m = walk.len();
        let first_corner = walk.iter().position(corner).unwrap_or(0);
        walk.rotate_left(first_corner);
        let mut run = Run { ids: vec![], s: vec![] };
        let mut s = offset;
        let (w0, _, f0) = walk[0];
        run.ids.push(uid(f0, w0));
        run.s.push(s);
        for i in 1..=m {
            let (w, fin, fout) = walk[i % m];
            let (wp, _, _) = walk[i - 1];
            s += geometry::distance(mesh.vertex(w), mesh.vertex(wp));
            run.ids.push(uid(fin, w));
            run.s.push(s);
            if i < m && corner(&walk[i]) {
                runs.push(std::mem::replace(
                    &mut run,
                    Run {
                        ids: vec![uid(fout, w)],
                        s: vec![s],
                    },
                ));
            }
        }
        runs.push(run);
        offset = s;
    }
    Some(runs)
}

/// Decides, for every distinct point, whether it is evaluated or blended.
pub(crate) fn plan(
    mesh: &Mesh,
    boundary: &BoundarySet,
    points: &[EvalPoint],
    map: &[usize],
    stride: usize,
) -> Vec<Source> {
    let n = points.len();
    if stride <= 1 || mesh.dim() == 1 {
        return vec![Source::Compute; n];
    }
    if mesh.dim() == 2 {
        if let Some(runs) = runs_2d(mesh, boundary, map) {
            return plan_runs(&runs, n, stride);
        }
        log::warn!("boundary is not a union of simple loops; evaluating every point");
        return vec![Source::Compute; n];
    }
    // 3D: vertices with several normals are on edges or corners
    let mut normals_at: HashMap<usize, usize> = HashMap::new();
    for p in points {
        *normals_at.entry(p.vertex).or_default() += 1;
    }
    let computed: Vec<bool> = points
        .iter()
        .enumerate()
        .map(|(i, p)| i % stride == 0 || normals_at[&p.vertex] > 1)
        .collect();
    let donors: Vec<usize> = (0..n).filter(|&i| computed[i]).collect();
    (0..n)
        .map(|i| {
            if computed[i] {
                return Source::Compute;
            }
            match idw(mesh, points, i, &donors) {
                Some(w) => Source::Blend(w),
                None => Source::Compute,
            }
        })
        .collect()
}

fn plan_runs(runs: &[Run], n: usize, stride: usize) -> Vec<Source> {
    let mut out = vec![Source::Compute; n];
    for run in runs {
        let m = run.ids.len() - 1;
        let mut anchors: Vec<usize> = (0..=m).step_by(stride).collect();
        if *anchors.last().unwrap() != m {
            anchors.push(m);
        }
        for w in anchors.windows(2) {
            let (a, b) = (w[0], w[1]);
            for i in a + 1..b {
                let t = (run.s[i] - run.s[a]) / (run.s[b] - run.s[a]);
                out[run.ids[i]] = Source::Blend(vec![(run.ids[a], 1.0 - t), (run.ids[b], t)]);
            }
        }
    }
    out
}

/// Inverse-distance weights over the nearest donors on the same side.
pub(crate) fn idw(mesh: &Mesh, points: &[EvalPoint], i: usize, donors: &[usize]) -> Option<Vec<(usize, f64)>> {
    let x = mesh.vertex(points[i].vertex);
    let mut near: Vec<(f64, usize)> = donors
        .iter()
        .filter(|&&j| j != i && geometry::dot(&points[i].normal, &points[j].normal) > SAME_SIDE)
        .map(|&j| (geometry::distance(x, mesh.vertex(points[j].vertex)), j))
        .collect();
    if near.is_empty() {
        return None;
    }
    near.sort_by(|a, b| a.partial_cmp(b).unwrap());
    near.truncate(IDW_NEIGHBOURS);
    if near[0].0 == 0.0 {
        return Some(vec![(near[0].1, 1.0)]);
    }
    let total: f64 = near.iter().map(|(d, _)| 1.0 / (d * d)).sum();
    Some(near.iter().map(|&(d, j)| (j, 1.0 / (d * d * total))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, extract_boundary, MeshKind};

    #[test]
    fn square_has_four_runs() {
        let m = build_structured_mesh(MeshKind::Square, 5).unwrap();
        let b = extract_boundary(&m);
        let (pts, map) = distinct_points(&b);
        // 20 boundary vertices, corners counted twice
        assert_eq!(pts.len(), 24);
        let runs = runs_2d(&m, &b, &map).unwrap();
        assert_eq!(runs.len(), 4);
        for r in &runs {
            assert_eq!(r.ids.len(), 6);
            assert!((r.s[5] - r.s[0] - 1.0).abs() < 1e-12);
        }
        let total = runs.last().unwrap().s.last().unwrap();
        assert!((total - 4.0).abs() < 1e-12);
    }

    #[test]
    fn stride_plan_keeps_corners() {
        let m = build_structured_mesh(MeshKind::Square, 8).unwrap();
        let b = extract_boundary(&m);
        let (pts, map) = distinct_points(&b);
        let plan = plan(&m, &b, &pts, &map, 3);
        let computed = plan.iter().filter(|s| **s == Source::Compute).count();
        // per edge of 8 segments: anchors 0, 3, 6, 8
        assert_eq!(computed, 16);
        for (i, p) in pts.iter().enumerate() {
            let x = m.vertex(p.vertex);
            let corner = (x[0] == 0.0 || x[0] == 1.0) && (x[1] == 0.0 || x[1] == 1.0);
            if corner {
                assert_eq!(plan[i], Source::Compute);
            }
            if let Source::Blend(w) = &plan[i] {
                assert!((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cube_plan_blends_on_faces_only() {
        let m = build_structured_mesh(MeshKind::Cube, 4).unwrap();
        let b = extract_boundary(&m);
        let (pts, map) = distinct_points(&b);
        let plan = plan(&m, &b, &pts, &map, 2);
        for (i, s) in plan.iter().enumerate() {
            if let Source::Blend(w) = s {
                assert!(w
                    .iter()
                    .all(|&(j, _)| geometry::dot(&pts[i].normal, &pts[j].normal) > 0.99));
            }
        }
        assert!(plan.iter().any(|s| *s != Source::Compute));
    }
}
