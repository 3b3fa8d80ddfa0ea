//! Modified Bessel functions of the second kind for the orders needed by
//! the Matérn family: 0, 1/2, 1 and 3/2.
//!
//! `K0` and `K1` use the ascending series for `z <= 2` and Steed's
//! continued fraction (CF2) for `z > 2`. Half-integer orders are
//! elementary.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 2.0;
const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    Half,
    One,
    ThreeHalves,
}

impl BesselOrder {
    pub fn value(self) -> f64 {
        match self {
            BesselOrder::Zero => 0.0,
            BesselOrder::Half => 0.5,
            BesselOrder::One => 1.0,
            BesselOrder::ThreeHalves => 1.5,
        }
    }
}

/// `K_order(z)` for `z > 0`.
pub fn bessel_k(order: BesselOrder, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("K_nu(z) requires finite z > 0, got {z}")));
    }
    Ok(match order {
        BesselOrder::Zero => k0_k1(z).0,
        BesselOrder::One => k0_k1(z).1,
        BesselOrder::Half => k_half(z),
        BesselOrder::ThreeHalves => k_half(z) * (1.0 + 1.0 / z),
    })
}

pub(crate) fn k_half(z: f64) -> f64 {
    (FRAC_PI_2 / z).sqrt() * (-z).exp()
}

/// `(K0(z), K1(z))` for `z > 0`. No argument checking.
pub(crate) fn k0_k1(z: f64) -> (f64, f64) {
    if z <= SERIES_MAX {
        series(z)
    } else {
        steed(z)
    }
}

fn series(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // K0 = -(ln(z/2) + gamma) I0 + sum_{k>=1} H_k q^k / (k!)^2
    // K1 = 1/z + ln(z/2) I1 - (z/4) sum_{k>=0} (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
    let mut t0 = 1.0; // q^k / (k!)^2
    let mut t1 = 1.0; // q^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1 = 1.0;
    let mut s0 = 0.0;
    let mut s1 = -2.0 * EULER_GAMMA + 1.0; // psi(1) + psi(2)
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t0;
        i1 += t1;
        s0 += harmonic * t0;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        let psi_sum = -2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0);
        s1 += psi_sum * t1;
        if t0 < EPS * i0 && t1 < EPS * i1 {
            break;
        }
    }
    let i1 = 0.5 * z * i1;
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + log_half * i1 - 0.25 * z * s1;
    (k0, k1)
}

fn steed(x: f64) -> (f64, f64) {
    // Continued fraction CF2 for order mu = 0 (Temme / Numerical Recipes bessik).
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
