//! Reference values of the Robin coefficient
//! `beta(y) = -int (Pa dPb/dn + Pb dPa/dn) / (2 int Pa Pb)` on a convex
//! polygon, integrated in polar coordinates centred at the boundary point
//! `y` so that the `log r` / `1/r` behaviour of the integrands is absorbed
//! by the Jacobian.

use std::f64::consts::PI;

use crate::quad::integrate;

/// `phi(r) = [Pa, Pa', Pb, Pb']`.
pub fn beta_tilde_polygon(
    polygon: &[[f64; 2]],
    y: [f64; 2],
    normal: [f64; 2],
    phi: &dyn Fn(f64) -> [f64; 4],
    rel_tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = polygon
        .iter()
        .filter(|v| (v[0] - y[0]).hypot(v[1] - y[1]) > 1e-14)
        .map(|v| (v[1] - y[1]).atan2(v[0] - y[0]).rem_euclid(2.0 * PI))
        .collect();
    cuts.push(0.0);
    cuts.push(2.0 * PI);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let num_inner = |t: f64| {
        let d = [t.cos(), t.sin()];
        let rho = exit_distance(polygon, y, d);
        if rho <= 0.0 {
            return 0.0;
        }
        let dn = -(d[0] * normal[0] + d[1] * normal[1]);
        dn * integrate(
            |r| {
                let p = phi(r);
                (p[0] * p[3] + p[2] * p[1]) * r
            },
            0.0,
            rho,
            0.0,
            rel_tol * 0.1,
        )
    };
    let den_inner = |t: f64| {
        let d = [t.cos(), t.sin()];
        let rho = exit_distance(polygon, y, d);
        if rho <= 0.0 {
            return 0.0;
        }
        integrate(
            |r| {
                let p = phi(r);
                p[0] * p[2] * r
            },
            0.0,
            rho,
            0.0,
            rel_tol * 0.1,
        )
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for w in cuts.windows(2) {
        num += integrate(num_inner, w[0], w[1], 0.0, rel_tol * 0.1);
        den += integrate(den_inner, w[0], w[1], 0.0, rel_tol * 0.1);
    }
    -num / (2.0 * den)
}

/// Distance from `y` along `d` to where the ray leaves the convex polygon
/// (counter-clockwise vertices); zero if it leaves immediately.
fn exit_distance(polygon: &[[f64; 2]], y: [f64; 2], d: [f64; 2]) -> f64 {
    let n = polygon.len();
    let mut t_exit = f64::INFINITY;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        // outward normal of a ccw edge
        let en = [b[1] - a[1], a[0] - b[0]];
        let dd = en[0] * d[0] + en[1] * d[1];
        if dd > 1e-15 {
            let t = (en[0] * (a[0] - y[0]) + en[1] * (a[1] - y[1])) / dd;
            t_exit = t_exit.min(t.max(0.0));
        }
    }
    t_exit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_distances_in_unit_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!((exit_distance(&sq, [0.0, 0.5], [1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(exit_distance(&sq, [0.0, 0.5], [-1.0, 0.0]), 0.0);
        let r = exit_distance(&sq, [0.0, 0.5], [0.6, 0.8]);
        assert!((r - 0.625).abs() < 1e-15);
    }

    #[test]
    fn half_plane_exponential_kernel() {
        // Pa = Pb = exp(-k r): on a half-disc far from corners the ratio is
        // -int 2 P P' (-d.n) / (2 int P^2) with int over angles of -d.n = 2
        // and int cos over the half circle = 2, radial parts in closed form.
        let k = 40.0;
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let phi = |r: f64| {
            let e = (-k * r).exp();
            [e, -k * e, e, -k * e]
        };
        let b = beta_tilde_polygon(&sq, [0.0, 0.5], [-1.0, 0.0], &phi, 1e-10);
        // radial: int 2 e (-k e) r dr = -2k/(4k^2); int e^2 r dr = 1/(4k^2)
        // angular: int cos = 2, int 1 = pi
        let expect = -(2.0 * (-2.0 * k / (4.0 * k * k))) / (2.0 * PI / (4.0 * k * k));
        assert!(((b - expect) / expect).abs() < 1e-6, "{b} vs {expect}");
    }
}
