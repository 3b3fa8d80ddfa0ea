//! Free-space Green's functions of `A^p`, `A = -gamma Laplace + alpha`.
//!
//! For `nu = p - d/2 > 0` these are Matérn covariances
//! `sigma^2 / (2^(nu-1) Gamma(nu)) (kappa r)^nu K_nu(kappa r)` with
//! `kappa = sqrt(alpha / gamma)` and pointwise variance
//! `sigma^2 = Gamma(nu) / (Gamma(nu + d/2) (4 pi)^(d/2) alpha^nu gamma^(d/2))`.
//! For `p = 1` in two and three dimensions the functions are singular at
//! the source:
//!
//! * `d = 2`: `K0(kappa r) / (2 pi gamma)`
//! * `d = 3`: `exp(-kappa r) / (4 pi gamma r)`
//!
//! Radial derivatives follow from `(z^nu K_nu(z))' = -z^nu K_{nu-1}(z)`.

mod bessel;
mod radial;

pub use bessel::{bessel_k, BesselOrder};
pub use radial::{radial_greens_profile, RadialProfile, RadialSample};

pub(crate) use bessel::k0_k1;

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensParams {
    pub gamma: f64,
    pub alpha: f64,
    pub dim: usize,
    pub p: u32,
    pub kappa: f64,
    pub nu: f64,
    sigma2: Option<f64>,
    char_length: Option<f64>,
}

impl GreensParams {
    /// Pointwise variance of the Matérn field; defined only for `nu > 0`.
    pub fn sigma2(&self) -> Result<f64> {
        self.sigma2.ok_or_else(|| {
            Error::Unsupported(format!(
                "A^-{} is not trace-class in {} dimensions (nu = {})",
                self.p, self.dim, self.nu
            ))
        })
    }

    /// `sqrt(8 nu) sqrt(gamma / alpha)`, the distance at which the
    /// correlation drops to roughly 0.1; defined only for `nu > 0`.
    pub fn char_length(&self) -> Result<f64> {
        self.char_length
            .ok_or_else(|| Error::Unsupported(format!("no characteristic length for nu = {}", self.nu)))
    }

    /// Same operator, different power.
    pub fn with_power(&self, p: u32) -> Result<GreensParams> {
        make_params(self.gamma, self.alpha, self.dim, p)
    }
}

pub fn make_params(gamma: f64, alpha: f64, dim: usize, p: u32) -> Result<GreensParams> {
    if !(gamma > 0.0 && gamma.is_finite()) || !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!(
            "gamma and alpha must be positive, got gamma = {gamma}, alpha = {alpha}"
        )));
    }
    if !(1..=3).contains(&dim) {
        return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    if !(1..=2).contains(&p) {
        return Err(invalid(format!("power p must be 1 or 2, got {p}")));
    }
    let half_d = dim as f64 / 2.0;
    let nu = p as f64 - half_d;
    let kappa = (alpha / gamma).sqrt();
    let (sigma2, char_length) = if nu > 0.0 {
        let s2 = gamma_half_integer(nu)
            / (gamma_half_integer(nu + half_d) * (4.0 * PI).powf(half_d) * alpha.powf(nu) * gamma.powf(half_d));
        (Some(s2), Some((8.0 * nu).sqrt() * (gamma / alpha).sqrt()))
    } else {
        (None, None)
    };
    Ok(GreensParams {
        gamma,
        alpha,
        dim,
        p,
        kappa,
        nu,
        sigma2,
        char_length,
    })
}

/// Gamma function at positive integers and half-integers.
pub(crate) fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    debug_assert!((2.0 * x - twice).abs() < 1e-12 && x > 0.0);
    let (mut acc, mut y) = if twice as u64 % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while y < x - 0.25 {
        acc *= y;
        y += 1.0;
    }
    acc
}

/// One free-space Green's function `Phi_p` as a function of distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSpaceGreens {
    dim: usize,
    p: u32,
    kappa: f64,
    coef: f64,
}

impl FreeSpaceGreens {
    pub fn new(params: &GreensParams, p: u32) -> Result<Self> {
        let q = params.with_power(p)?;
        let coef = match (q.dim, p) {
            (2, 1) => 1.0 / (2.0 * PI * q.gamma),
            (3, 1) => 1.0 / (4.0 * PI * q.gamma),
            _ => {
                let s2 = q.sigma2()?;
                s2 / (2f64.powf(q.nu - 1.0) * gamma_half_integer(q.nu))
            }
        };
        Ok(FreeSpaceGreens {
            dim: q.dim,
            p,
            kappa: q.kappa,
            coef,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_singular(&self) -> bool {
        self.p == 1 && self.dim >= 2
    }

    /// `(Phi(r), dPhi/dr(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("distance must be finite and >= 0, got {r}")));
        }
        if r == 0.0 && self.is_singular() {
            return Err(Error::Domain(format!(
                "Phi_1 is singular at r = 0 in {} dimensions",
                self.dim
            )));
        }
        let z = self.kappa * r;
        let k = if self.dim == 2 && z > 0.0 { k0_k1(z) } else { (0.0, 0.0) };
        Ok(self.eval_with(r, k))
    }

    /// Evaluation with `(K0, K1)(kappa r)` supplied by the caller (only read
    /// in two dimensions).
    pub(crate) fn eval_with(&self, r: f64, (k0, k1): (f64, f64)) -> (f64, f64) {
        let kap = self.kappa;
        let z = kap * r;
        let c = self.coef;
        let sqrt_half_pi = FRAC_PI_2.sqrt();
        match (self.dim, self.p) {
            (2, 1) => (c * k0, -c * kap * k1),
            (3, 1) => {
                let e = (-z).exp();
                (c * e / r, -c * e * (1.0 + z) / (r * r))
            }
            // nu = 1/2
            (1, 1) | (3, 2) => {
                let e = sqrt_half_pi * (-z).exp();
                (c * e, -c * kap * e)
            }
            // nu = 1
            (2, 2) => {
                if z == 0.0 {
                    (c, 0.0)
                } else {
                    (c * z * k1, -c * kap * z * k0)
                }
            }
            // nu = 3/2
            (1, 2) => {
                let e = sqrt_half_pi * (-z).exp();
                (c * e * (1.0 + z), -c * kap * z * e)
            }
            _ => unreachable!(),
        }
    }
}

/// `(Phi_p(r), Phi_p'(r))` for the operator described by `params`.
pub fn phi_eval(params: &GreensParams, p: u32, r: f64) -> Result<(f64, f64)> {
    FreeSpaceGreens::new(params, p)?.eval(r)
}
