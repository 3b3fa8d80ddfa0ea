//! Straight cross sections `x(s) = p + s d`, `s in [0, 1]`, for plotting
//! fields along a line.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::fem::ScalarField;
use crate::mesh::{point_locate, Mesh};

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    s: Vec<f64>,
    points: Vec<Vec<f64>>,
    cells: Vec<usize>,
    bary: Vec<Vec<f64>>,
}

impl CrossSection {
    /// `count` equally spaced parameters on `[0, 1]`; points outside the
    /// mesh are dropped.
    pub fn new(mesh: &Mesh, origin: &[f64], direction: &[f64], count: usize) -> Result<Self> {
        let dim = mesh.dim();
        if origin.len() != dim || direction.len() != dim {
            return Err(invalid(format!("section point and direction need {dim} coordinates")));
        }
        if count < 2 {
            return Err(invalid("a cross section needs at least 2 points"));
        }
        let mut out = CrossSection {
            s: Vec::with_capacity(count),
            points: Vec::with_capacity(count),
            cells: Vec::with_capacity(count),
            bary: Vec::with_capacity(count),
        };
        for i in 0..count {
            let s = i as f64 / (count - 1) as f64;
            let x: Vec<f64> = (0..dim).map(|k| origin[k] + s * direction[k]).collect();
            match point_locate(mesh, &x) {
                Ok((c, lam)) => {
                    out.s.push(s);
                    out.points.push(x);
                    out.cells.push(c);
                    out.bary.push(lam);
                }
                Err(Error::NotFound(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if out.s.is_empty() {
            return Err(Error::NotFound("cross section does not intersect the mesh".into()));
        }
        Ok(out)
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Interpolates `field` at every section point.
    pub fn sample(&self, field: &ScalarField) -> Vec<f64> {
        self.cells
            .iter()
            .zip(&self.bary)
            .map(|(&c, lam)| field.value_in_cell(c, lam))
            .collect()
    }

    /// Vertices of the cells crossed by the section, ascending.
    pub fn support_nodes(&self, mesh: &Mesh) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().flat_map(|&c| mesh.cell(c).to_vec()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// CSV `s,<name>...`.
    pub fn to_csv(&self, columns: &[(&str, &[f64])]) -> String {
        let mut out = String::from("s");
        for (name, _) in columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for i in 0..self.s.len() {
            let _ = write!(out, "{}", self.s[i]);
            for (_, col) in columns {
                let _ = write!(out, ",{}", col[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// L2 distance between two curves sampled on the same parameters
/// (trapezoidal rule in `s`).
pub fn l2_distance(s: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..s.len() {
        let d0 = a[i - 1] - b[i - 1];
        let d1 = a[i] - b[i];
        acc += 0.5 * (s[i] - s[i - 1]) * (d0 * d0 + d1 * d1);
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{affine_transform, build_structured_mesh, parallelogram_map, MeshKind};
    use std::sync::Arc;

    #[test]
    fn horizontal_section_on_square() {
        let m = Arc::new(build_structured_mesh(MeshKind::Square, 8).unwrap());
        let sec = CrossSection::new(&m, &[0.0, 0.5], &[1.0, 0.0], 11).unwrap();
        assert_eq!(sec.len(), 11);
        let vals = (0..m.num_vertices()).map(|i| m.vertex(i)[0]).collect();
        let f = ScalarField::new(m.clone(), vals).unwrap();
        let v = sec.sample(&f);
        for (s, x) in sec.s().iter().zip(v) {
            assert!((s - x).abs() < 1e-12);
        }
        assert!(sec.to_csv(&[("x", sec.s())]).starts_with("s,x\n0,0\n0.1,0.1\n"));
    }

    #[test]
    fn points_outside_are_dropped() {
        let m = build_structured_mesh(MeshKind::Square, 8).unwrap();
        let (a, b) = parallelogram_map();
        let p = affine_transform(&m, &a, &b).unwrap();
        let sec = CrossSection::new(&p, &[0.0, 0.01], &[1.0, 0.6], 50).unwrap();
        assert!(sec.len() < 50 && sec.len() > 10);
        assert!(CrossSection::new(&m, &[5.0, 5.0], &[1.0, 0.0], 5).is_err());
    }

    #[test]
    fn l2_of_constant_gap() {
        let s = [0.0, 0.5, 1.0];
        assert!((l2_distance(&s, &[1.0; 3], &[3.0; 3]) - 2.0).abs() < 1e-15);
    }
}
