//! Discrete free-space Green's functions on a radial grid.
//!
//! The radially symmetric weak form
//! `int_0^R w(r) (gamma u' v' + alpha u v) dr = v(0)` with
//! `w = 2, 2 pi r, 4 pi r^2` for `d = 1, 2, 3` is discretized with linear
//! elements on a uniform grid, Neumann at `r = R`. Solving once with a unit
//! load at the origin gives `Phi_1^h`; solving again with the weighted mass
//! applied to `Phi_1^h` gives `Phi_2^h`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{invalid, Result};

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Warn when `Phi_1(R) / max Phi_1` exceeds this.
const TAIL_WARN: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dim: usize,
    h: f64,
    r_max: f64,
    radii: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    warnings: Vec<String>,
}

/// Values and radial derivatives of both profiles at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub phi1: f64,
    pub dphi1: f64,
    pub phi2: f64,
    pub dphi2: f64,
}

impl RadialProfile {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn phi1(&self) -> &[f64] {
        &self.phi1
    }

    pub fn phi2(&self) -> &[f64] {
        &self.phi2
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Linear interpolation of the nodal values with the element-wise
    /// constant derivative. Zero beyond `R`.
    pub fn eval(&self, r: f64) -> RadialSample {
        let n = self.radii.len() - 1;
        if !(r >= 0.0) || r > self.r_max {
            return RadialSample {
                phi1: 0.0,
                dphi1: 0.0,
                phi2: 0.0,
                dphi2: 0.0,
            };
        }
        let e = ((r / self.h) as usize).min(n - 1);
        let t = (r - self.radii[e]) / self.h;
        let lerp = |v: &[f64]| (1.0 - t) * v[e] + t * v[e + 1];
        let slope = |v: &[f64]| (v[e + 1] - v[e]) / self.h;
        RadialSample {
            phi1: lerp(&self.phi1),
            dphi1: slope(&self.phi1),
            phi2: lerp(&self.phi2),
            dphi2: slope(&self.phi2),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,phi1,phi2\n");
        for i in 0..self.radii.len() {
            let _ = writeln!(out, "{},{},{}", self.radii[i], self.phi1[i], self.phi2[i]);
        }
        out
    }
}

/// Builds `Phi_1^h` and `Phi_2^h` on `[0, r_max]` with spacing close to `h`
/// (the grid is uniform with `ceil(r_max / h)` elements).
pub fn radial_greens_profile(dim: usize, gamma: f64, alpha: f64, h: f64, r_max: f64) -> Result<RadialProfile> {
    if !(1..=3).contains(&dim) {
        return Err(invalid(format!("radial profile needs d in 1..=3, got {dim}")));
    }
    if !(gamma > 0.0) || !(alpha > 0.0) {
        return Err(invalid("gamma and alpha must be positive"));
    }
    if !(h > 0.0) || !h.is_finite() || !(r_max > h) || !r_max.is_finite() {
        return Err(invalid(format!("need 0 < h < R, got h = {h}, R = {r_max}")));
    }
    let n = (r_max / h).ceil() as usize;
    let h = r_max / n as f64;
    let radii: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();

    let weight = |r: f64| match dim {
        1 => 2.0,
        2 => 2.0 * PI * r,
        _ => 4.0 * PI * r * r,
    };

    // tridiagonal K (diag, off) and weighted mass M (diag, off)
    let mut kd = vec![0.0; n + 1];
    let mut ko = vec![0.0; n];
    let mut md = vec![0.0; n + 1];
    let mut mo = vec![0.0; n];
    for e in 0..n {
        let (a, b) = (radii[e], radii[e + 1]);
        let mut w0 = 0.0;
        let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
        for (xi, wq) in GAUSS3 {
            let r = 0.5 * (a + b) + 0.5 * h * xi;
            let jw = 0.5 * h * wq * weight(r);
            let l1 = (r - a) / h;
            let l0 = 1.0 - l1;
            w0 += jw;
            m00 += jw * l0 * l0;
            m01 += jw * l0 * l1;
            m11 += jw * l1 * l1;
        }
        let s = gamma * w0 / (h * h);
        kd[e] += s + alpha * m00;
        kd[e + 1] += s + alpha * m11;
        ko[e] += -s + alpha * m01;
        md[e] += m00;
        md[e + 1] += m11;
        mo[e] += m01;
    }

    let mut load = vec![0.0; n + 1];
    load[0] = 1.0;
    let phi1 = thomas(&kd, &ko, &load);
    let mut mphi = vec![0.0; n + 1];
    for i in 0..=n {
        mphi[i] = md[i] * phi1[i];
        if i > 0 {
            mphi[i] += mo[i - 1] * phi1[i - 1];
        }
        if i < n {
            mphi[i] += mo[i] * phi1[i + 1];
        }
    }
    let phi2 = thomas(&kd, &ko, &mphi);

    let mut warnings = Vec::new();
    let peak = phi1.iter().cloned().fold(0.0, f64::max);
    let tail = phi1[n].abs() / peak;
    if tail > TAIL_WARN {
        let msg = format!("truncation radius R = {r_max} too small: Phi_1(R) / max = {tail:.3e}");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    Ok(RadialProfile {
        dim,
        h,
        r_max,
        radii,
        phi1,
        phi2,
        warnings,
    })
}

/// Symmetric tridiagonal solve (diagonal `d`, off-diagonal `o`).
fn thomas(d: &[f64], o: &[f64], b: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut piv = d[0];
    x[0] = b[0] / piv;
    for i in 1..n {
        c[i - 1] = o[i - 1] / piv;
        piv = d[i] - o[i - 1] * c[i - 1];
        x[i] = (b[i] - o[i - 1] * x[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}
