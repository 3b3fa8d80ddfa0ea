//! Small fixed-size linear algebra for simplices in up to three dimensions.
//!
//! Matrices are stored row-major in `[[f64; 3]; 3]`; only the leading
//! `dim x dim` block is meaningful.

pub type Mat3 = [[f64; 3]; 3];

pub fn det(dim: usize, m: &Mat3) -> f64 {
    match dim {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("dimension {dim} not supported"),
    }
}

/// Inverse of the leading `dim x dim` block. The caller guarantees `det != 0`.
pub fn inverse(dim: usize, m: &Mat3) -> Mat3 {
    let d = det(dim, m);
    let mut inv = [[0.0; 3]; 3];
    match dim {
        1 => inv[0][0] = 1.0 / d,
        2 => {
            inv[0][0] = m[1][1] / d;
            inv[0][1] = -m[0][1] / d;
            inv[1][0] = -m[1][0] / d;
            inv[1][1] = m[0][0] / d;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor of (j, i)
                    let (r0, r1) = other_two(j);
                    let (c0, c1) = other_two(i);
                    let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    inv[i][j] = sign * minor / d;
                }
            }
        }
        _ => unreachable!("dimension {dim} not supported"),
    }
    inv
}

fn other_two(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = [[2.0, 1.0, 0.5], [0.0, 3.0, -1.0], [1.0, 0.0, 4.0]];
        for dim in 1..=3 {
            let inv = inverse(dim, &m);
            for i in 0..dim {
                for j in 0..dim {
                    let v: f64 = (0..dim).map(|k| inv[i][k] * m[k][j]).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-14, "dim {dim} ({i},{j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
    }
}
