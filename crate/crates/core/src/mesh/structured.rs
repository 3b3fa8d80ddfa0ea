use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::Mesh;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Interval,
    Square,
    Cube,
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(MeshKind::Interval),
            "square" => Ok(MeshKind::Square),
            "cube" => Ok(MeshKind::Cube),
            _ => Err(invalid(format!("unknown mesh kind '{s}'"))),
        }
    }
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeshKind::Interval => "interval",
            MeshKind::Square => "square",
            MeshKind::Cube => "cube",
        })
    }
}

/// Uniform meshes of the unit interval, square and cube.
///
/// * interval: `n` cells.
/// * square: each of the `n^2` squares is split into four triangles around
///   an added center vertex (`4 n^2` triangles).
/// * cube: each of the `n^3` cubes is split into six tetrahedra sharing the
///   main diagonal (`6 n^3` tetrahedra).
pub fn build_structured_mesh(kind: MeshKind, n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(invalid("structured mesh needs n >= 1"));
    }
    match kind {
        MeshKind::Interval => interval(n),
        MeshKind::Square => square(n),
        MeshKind::Cube => cube(n),
    }
}

fn interval(n: usize) -> Result<Mesh> {
    let coords = (0..=n).map(|i| i as f64 / n as f64).collect();
    let cells = (0..n).flat_map(|i| [i, i + 1]).collect();
    Mesh::new(1, coords, cells)
}

fn square(n: usize) -> Result<Mesh> {
    let h = 1.0 / n as f64;
    let grid = |i: usize, j: usize| j * (n + 1) + i;
    let center = |i: usize, j: usize| (n + 1) * (n + 1) + j * n + i;

    let mut coords = Vec::with_capacity(2 * ((n + 1) * (n + 1) + n * n));
    for j in 0..=n {
        for i in 0..=n {
            coords.extend([i as f64 * h, j as f64 * h]);
        }
    }
    for j in 0..n {
        for i in 0..n {
            coords.extend([(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
        }
    }

    let mut cells = Vec::with_capacity(12 * n * n);
    for j in 0..n {
        for i in 0..n {
            let c = center(i, j);
            let (a, b, cc, d) = (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
            cells.extend([c, a, b, c, b, cc, c, cc, d, c, d, a]);
        }
    }
    Mesh::new(2, coords, cells)
}

fn cube(n: usize) -> Result<Mesh> {
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;

    let mut coords = Vec::with_capacity(3 * (n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                coords.extend([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }

    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(24 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut p = [i, j, k];
                    cells.push(idx(p[0], p[1], p[2]));
                    for axis in perm {
                        p[axis] += 1;
                        cells.push(idx(p[0], p[1], p[2]));
                    }
                }
            }
        }
    }
    Mesh::new(3, coords, cells)
}

/// Linear map taking the unit square onto the parallelogram spanned by
/// `(cos t-, sin t-)` and `(cos t+, sin t+)` with `t± = pi/4 ± pi/8`.
///
/// Returns `(A, b)` with `A` row-major.
pub fn parallelogram_map() -> (Vec<f64>, Vec<f64>) {
    let tm = PI / 4.0 - PI / 8.0;
    let tp = PI / 4.0 + PI / 8.0;
    (vec![tm.cos(), tp.cos(), tm.sin(), tp.sin()], vec![0.0, 0.0])
}
