//! Dense linear algebra and a dense P1 finite-element assembly.

use std::collections::BTreeMap;

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(n: usize, m: usize) -> Dense {
    vec![vec![0.0; m]; n]
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let mut c = zeros(a.len(), b[0].len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            if a[i][k] != 0.0 {
                for j in 0..b[0].len() {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve_many(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let mut a = a.clone();
    let mut b = b.clone();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        assert!(a[p][k] != 0.0, "singular matrix");
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            for j in 0..m {
                b[i][j] -= f * b[k][j];
            }
        }
    }
    let mut x = zeros(n, m);
    for j in 0..m {
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k][j]).sum();
            x[i][j] = (b[i][j] - s) / a[i][i];
        }
    }
    x
}

pub fn solve(a: &Dense, b: &[f64]) -> Vec<f64> {
    let bm: Dense = b.iter().map(|&v| vec![v]).collect();
    solve_many(a, &bm).into_iter().map(|r| r[0]).collect()
}

pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut id = zeros(n, n);
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    solve_many(a, &id)
}

pub fn determinant(a: &Dense) -> f64 {
    let n = a.len();
    let mut a = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(k, p);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Boundary condition for [`assemble_dense`].
pub enum DenseBc<'a> {
    Neumann,
    Dirichlet,
    /// `beta(x, outward_normal)`, evaluated at facet vertices and
    /// interpolated linearly over each facet.
    Robin(&'a dyn Fn(&[f64], &[f64]) -> f64),
}

pub struct DenseOperator {
    pub k: Dense,
    pub m: Dense,
    /// Nodes constrained by a Dirichlet condition.
    pub fixed: Vec<bool>,
}

impl DenseOperator {
    /// `K^-1 M K^-1` restricted to free nodes, zero-padded.
    pub fn covariance(&self) -> Dense {
        let free: Vec<usize> = (0..self.k.len()).filter(|&i| !self.fixed[i]).collect();
        let sub = |a: &Dense| -> Dense { free.iter().map(|&i| free.iter().map(|&j| a[i][j]).collect()).collect() };
        let kinv = inverse(&sub(&self.k));
        let c = matmul(&matmul(&kinv, &sub(&self.m)), &kinv);
        let n = self.k.len();
        let mut out = zeros(n, n);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                out[i][j] = c[a][b];
            }
        }
        out
    }
}

fn point(coords: &[f64], dim: usize, v: usize) -> &[f64] {
    &coords[v * dim..(v + 1) * dim]
}

/// Quadrature on the reference simplex (barycentric points, weights summing
/// to one), exact for polynomials of degree `>= 2`.
fn volume_rule(dim: usize) -> Vec<(Vec<f64>, f64)> {
    match dim {
        1 => {
            let g = 0.5 / 3f64.sqrt();
            vec![(vec![0.5 - g, 0.5 + g], 0.5), (vec![0.5 + g, 0.5 - g], 0.5)]
        }
        2 => vec![
            (vec![0.5, 0.5, 0.0], 1.0 / 3.0),
            (vec![0.0, 0.5, 0.5], 1.0 / 3.0),
            (vec![0.5, 0.0, 0.5], 1.0 / 3.0),
        ],
        _ => {
            let a = 0.585_410_196_624_968_5;
            let b = 0.138_196_601_125_010_5;
            (0..4)
                .map(|k| {
                    let mut l = vec![b; 4];
                    l[k] = a;
                    (l, 0.25)
                })
                .collect()
        }
    }
}

/// Rule on a facet (a `dim - 1` simplex), exact to degree 3.
fn facet_rule(dim: usize) -> Vec<(Vec<f64>, f64)> {
    match dim {
        1 => vec![(vec![1.0], 1.0)],
        2 => {
            let g = 0.5 * (0.6f64).sqrt();
            vec![
                (vec![0.5 - g, 0.5 + g], 5.0 / 18.0),
                (vec![0.5, 0.5], 8.0 / 18.0),
                (vec![0.5 + g, 0.5 - g], 5.0 / 18.0),
            ]
        }
        _ => {
            let mut r = vec![(vec![1.0 / 3.0; 3], -27.0 / 48.0)];
            for k in 0..3 {
                let mut l = vec![0.2; 3];
                l[k] = 0.6;
                r.push((l, 25.0 / 48.0));
            }
            r
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `gamma * stiffness + alpha * mass (+ Robin term)`, assembled densely.
/// Dirichlet rows/columns are replaced by the identity.
pub fn assemble_dense(
    dim: usize,
    coords: &[f64],
    cells: &[usize],
    gamma: f64,
    alpha: f64,
    bc: DenseBc,
) -> DenseOperator {
    let nv = coords.len() / dim;
    let mut k = zeros(nv, nv);
    let mut m = zeros(nv, nv);
    let mut facets: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
    for (c, cell) in cells.chunks(dim + 1).enumerate() {
        // rows [1, x] -> columns of the inverse give the barycentric coefficients
        let t: Dense = cell
            .iter()
            .map(|&v| {
                let mut r = vec![1.0];
                r.extend_from_slice(point(coords, dim, v));
                r
            })
            .collect();
        let vol = determinant(&t).abs() / factorial(dim);
        let coef = inverse(&t);
        for a in 0..=dim {
            for b in 0..=dim {
                let g: f64 = (1..=dim).map(|r| coef[r][a] * coef[r][b]).sum();
                k[cell[a]][cell[b]] += gamma * vol * g;
                let q: f64 = volume_rule(dim).iter().map(|(l, w)| w * l[a] * l[b]).sum();
                m[cell[a]][cell[b]] += vol * q;
            }
        }
        for skip in 0..=dim {
            let mut f: Vec<usize> = (0..=dim).filter(|&j| j != skip).map(|j| cell[j]).collect();
            f.sort_unstable();
            let e = facets.entry(f).or_insert((0, c));
            e.0 += 1;
        }
    }
    for i in 0..nv {
        for j in 0..nv {
            k[i][j] += alpha * m[i][j];
        }
    }
    let boundary: Vec<(Vec<usize>, usize)> = facets
        .into_iter()
        .filter(|(_, (n, _))| *n == 1)
        .map(|(f, (_, c))| (f, c))
        .collect();
    let mut fixed = vec![false; nv];
    match bc {
        DenseBc::Neumann => {}
        DenseBc::Dirichlet => {
            for (f, _) in &boundary {
                for &v in f {
                    fixed[v] = true;
                }
            }
            for i in 0..nv {
                if fixed[i] {
                    for j in 0..nv {
                        k[i][j] = 0.0;
                        k[j][i] = 0.0;
                    }
                    k[i][i] = 1.0;
                }
            }
        }
        DenseBc::Robin(beta) => {
            for (f, c) in &boundary {
                let cell = &cells[c * (dim + 1)..(c + 1) * (dim + 1)];
                let opposite = *cell.iter().find(|v| !f.contains(v)).unwrap();
                let (normal, measure) = facet_normal(dim, coords, f, opposite);
                let bv: Vec<f64> = f.iter().map(|&v| beta(point(coords, dim, v), &normal)).collect();
                for (l, w) in facet_rule(dim) {
                    let bq: f64 = l.iter().zip(&bv).map(|(a, b)| a * b).sum();
                    for a in 0..dim {
                        for b in 0..dim {
                            k[f[a]][f[b]] += measure * w * bq * l[a] * l[b];
                        }
                    }
                }
            }
        }
    }
    DenseOperator { k, m, fixed }
}

fn facet_normal(dim: usize, coords: &[f64], f: &[usize], opposite: usize) -> (Vec<f64>, f64) {
    let p = |v: usize| point(coords, dim, v).to_vec();
    let (mut n, measure) = match dim {
        1 => (vec![1.0], 1.0),
        2 => {
            let (a, b) = (p(f[0]), p(f[1]));
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            (vec![(b[1] - a[1]) / len, (a[0] - b[0]) / len], len)
        }
        _ => {
            let (a, b, c) = (p(f[0]), p(f[1]), p(f[2]));
            let u: Vec<f64> = (0..3).map(|i| b[i] - a[i]).collect();
            let v: Vec<f64> = (0..3).map(|i| c[i] - a[i]).collect();
            let w = vec![
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            (w.iter().map(|x| x / len).collect(), 0.5 * len)
        }
    };
    let a = p(f[0]);
    let o = p(opposite);
    let s: f64 = (0..dim).map(|i| n[i] * (a[i] - o[i])).sum();
    if s < 0.0 {
        n.iter_mut().for_each(|x| *x = -*x);
    }
    (n, measure)
}
