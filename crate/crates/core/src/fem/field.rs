use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::mesh::{point_locate, Mesh};

/// Nodal values of a P1 function on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(invalid(format!(
                "field has {} values, mesh has {} vertices",
                values.len(),
                mesh.num_vertices()
            )));
        }
        Ok(ScalarField { mesh, values })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Interpolated value at an arbitrary point of the domain.
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        let (c, lam) = point_locate(&self.mesh, x)?;
        Ok(self.value_in_cell(c, &lam))
    }

    /// Interpolated value from a known cell and barycentric coordinates.
    pub fn value_in_cell(&self, c: usize, lam: &[f64]) -> f64 {
        self.mesh
            .cell(c)
            .iter()
            .zip(lam)
            .map(|(&v, l)| l * self.values[v])
            .sum()
    }

    /// CSV with header `index,x[,y[,z]],value`.
    pub fn to_csv(&self) -> String {
        self.to_csv_columns(&[("value", &self.values)])
    }

    /// CSV with one column per `(name, values)` pair after the coordinates.
    pub fn to_csv_columns(&self, columns: &[(&str, &[f64])]) -> String {
        let coord_names = ["x", "y", "z"];
        let dim = self.mesh.dim();
        let mut out = String::from("index");
        for name in &coord_names[..dim] {
            out.push(',');
            out.push_str(name);
        }
        for (name, _) in columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for i in 0..self.values.len() {
            let _ = write!(out, "{i}");
            for x in self.mesh.vertex(i) {
                let _ = write!(out, ",{x}");
            }
            for (_, col) in columns {
                let _ = write!(out, ",{}", col[i]);
            }
            out.push('\n');
        }
        out
    }
}
