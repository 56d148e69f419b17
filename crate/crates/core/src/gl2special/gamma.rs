use num_complex::Complex64;

use crate::scaled::ScaledReal;

// B_{2k} / (2k (2k - 1))
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Principal branch of `ln Gamma(z)` for `Re z > 0`, continuous in `Im z`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma needs Re z > 0");
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let mut s = (w - 0.5) * w.ln() - w + half_ln_2pi;
    let w2 = (w * w).inv();
    let mut p = w.inv();
    for c in STIRLING {
        s += p * c;
        p *= w2;
    }
    s - shift
}

/// `|Gamma(1/2 + i t)| = sqrt(pi / cosh(pi t))`.
pub fn gamma_half_modulus(t: f64) -> ScaledReal {
    let t = t.abs();
    let pi = std::f64::consts::PI;
    let c = (2.0 * pi / (1.0 + (-2.0 * pi * t).exp())).sqrt();
    ScaledReal::exp(-0.5 * pi * t) * c
}

/// `1 / |Gamma(1/2 + i t)|` with the exponential `e^{pi t / 2}` removed.
pub(crate) fn inv_gamma_half_modulus_scaled(t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    ((1.0 + (-2.0 * pi * t.abs()).exp()) / (2.0 * pi)).sqrt()
}
