//! Adaptive Gauss-Kronrod (7/15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: (estimate, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol` or relative
/// tolerance `rel_tol`, whichever is looser, by global bisection.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    let mut iters = 0;
    while err > abs_tol.max(rel_tol * total.abs()) && iters < 5000 {
        iters += 1;
        let (k, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, pv, pe) = panels.swap_remove(k);
        let m = 0.5 * (pa + pb);
        let (v1, e1) = gk15(&mut f, pa, m);
        let (v2, e2) = gk15(&mut f, m, pb);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        panels.push((pa, m, v1, e1));
        panels.push((m, pb, v2, e2));
    }
    panels.iter().map(|p| p.2).sum()
}
