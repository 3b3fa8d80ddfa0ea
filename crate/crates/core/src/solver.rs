//! Linear solvers for symmetric positive definite systems.
//!
//! [`cg_solve`] is Jacobi-preconditioned conjugate gradients.
//! [`EnvelopeCholesky`] is a sparse direct factorization on the envelope of
//! a reverse Cuthill-McKee reordering; it is the default back end for the
//! many repeated solves against one operator (variance fields, sampling).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` to relative residual `tol` with a diagonal
/// preconditioner. `b = 0` returns zero after 0 iterations.
pub fn cg_solve(a: &CsrMatrix, b: &[f64], tol: f64, maxit: usize) -> Result<CgOutcome> {
    let n = b.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, right-hand side has length {n}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 1..=maxit {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: it, value: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / bnorm;
        if res <= tol {
            return Ok(CgOutcome {
                x,
                iterations: it,
                residual: res,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iterations: maxit,
        residual: res,
    })
}

/// Reverse Cuthill-McKee ordering of the symmetric sparsity graph of `a`.
///
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a.row(v).0.iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_by_key(|&u| (degree[u], u));
            for u in nbrs {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Endpoint of a few rounds of "farthest node in BFS" starting at `seed`.
fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut start = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (far, depth) = bfs_farthest(a, start, degree);
        if depth <= ecc {
            break;
        }
        ecc = depth;
        start = far;
    }
    start
}

fn bfs_farthest(a: &CsrMatrix, start: usize, degree: &[usize]) -> (usize, usize) {
    let n = a.nrows();
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut best = (start, 0usize);
    while let Some(v) = queue.pop_front() {
        let l = level[v];
        if l > best.1 || (l == best.1 && degree[v] < degree[best.0]) {
            best = (v, l);
        }
        for &u in a.row(v).0 {
            if level[u] == usize::MAX {
                level[u] = l + 1;
                queue.push_back(u);
            }
        }
    }
    best
}

/// Row-envelope Cholesky factor `P A P^T = L L^T`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    /// first stored column of each row of `L`
    first: Vec<usize>,
    /// start of each row's slice in `values`
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first = (0..n).collect::<Vec<_>>();
        for old in 0..n {
            let i = inv[old];
            for &j_old in a.row(old).0 {
                let j = inv[j_old];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for i in 0..n {
            offset.push(total);
            total += i - first[i] + 1;
        }
        offset.push(total);
        let mut values = vec![0.0; total];
        for old in 0..n {
            let i = inv[old];
            let (cols, vals) = a.row(old);
            for (&j_old, &v) in cols.iter().zip(vals) {
                let j = inv[j_old];
                if j <= i {
                    values[offset[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = offset[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let (head, tail) = values.split_at_mut(row_i);
                let row_j = &head[offset[j]..offset[j + 1]];
                let s: f64 = tail[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(x, y)| x * y)
                    .sum();
                let ljj = row_j[j - fj];
                tail[j - fi] = (tail[j - fi] - s) / ljj;
            }
            let li = &values[row_i..row_i + i - fi];
            let s: f64 = li.iter().map(|x| x * x).sum();
            let d = values[row_i + i - fi] - s;
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    pivot: perm[i],
                    value: d,
                });
            }
            values[row_i + i - fi] = d.sqrt();
        }
        Ok(EnvelopeCholesky {
            perm,
            first,
            offset,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        // L y = b
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (yk, l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Dense lower Cholesky factor of a small SPD matrix, row-major.
pub fn dense_cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: d });
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn cg_diagonal_and_zero_rhs() {
        let a = CsrMatrix::identity(4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let out = cg_solve(&a, &b, 1e-12, 10).unwrap();
        assert_eq!(out.x, b.to_vec());
        let out = cg_solve(&a, &[0.0; 4], 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cg_reports_no_convergence() {
        let a = laplacian_1d(50);
        let b = vec![1.0; 50];
        match cg_solve(&a, &b, 1e-14, 2) {
            Err(Error::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cholesky_matches_cg() {
        let a = laplacian_1d(40);
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let chol = EnvelopeCholesky::factor(&a).unwrap();
        let x = chol.solve(&b);
        let y = cg_solve(&a, &b, 1e-14, 400).unwrap().x;
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(
            EnvelopeCholesky::factor(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn rcm_is_permutation() {
        let a = laplacian_1d(17);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn envelope_solve_has_small_residual(seed in 0u64..1000, n in 2usize..30) {
            // random sparse SPD: diagonally dominant with random off-diagonals
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); ((s >> 33) as f64) / (1u64 << 31) as f64 };
            let mut t = Vec::new();
            let mut diag = vec![1.0; n];
            for i in 0..n {
                for j in 0..i {
                    if next() < 0.3 {
                        let v = next() - 0.5;
                        t.push((i, j, v));
                        t.push((j, i, v));
                        diag[i] += v.abs();
                        diag[j] += v.abs();
                    }
                }
            }
            t.extend(diag.iter().enumerate().map(|(i, &d)| (i, i, d)));
            let a = CsrMatrix::from_triplets(n, n, t);
            let b: Vec<f64> = (0..n).map(|_| next() - 0.5).collect();
            let x = EnvelopeCholesky::factor(&a).unwrap().solve(&b);
            let r = a.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                prop_assert!((ri - bi).abs() < 1e-12);
            }
        }
    }
}
