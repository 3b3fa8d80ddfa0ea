//! `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt`.

use crate::quad::integrate;

pub fn bessel_k_integral(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0);
    // exp(-z (cosh t - 1)) < e^-60 beyond t_max
    let t_max = (1.0 + 60.0 / z).acosh();
    let scaled = integrate(
        |t| (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh(),
        0.0,
        t_max,
        0.0,
        1e-14,
    );
    scaled * (-z).exp()
}
