//! `K_{it}(x)` for real order `t` and positive argument.

use std::f64::consts::{FRAC_PI_2, LN_10, LN_2, PI};

use num_complex::Complex64;
use rug::{Assign, Float};
use serde::Serialize;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::scaled::ScaledReal;

/// Accuracy and path selection for [`k_bessel_imag_scaled`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BesselEvalConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Orders above this use multiprecision quadrature.
    pub t_switch: f64,
    pub max_refinements: u32,
    /// Use the convergent power series for `t >= 1`, `x <= 2 sqrt(t)`.
    pub use_series: bool,
}

impl Default for BesselEvalConfig {
    fn default() -> Self {
        BesselEvalConfig { abs_tol: 1e-13, rel_tol: 1e-12, t_switch: 10.0, max_refinements: 12, use_series: true }
    }
}

impl BesselEvalConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v <= 1e-3;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::Domain("Bessel tolerances must lie in (0, 1e-3]".into()));
        }
        if self.max_refinements < 4 {
            return Err(Error::Domain("max_refinements must be at least 4".into()));
        }
        if !(self.t_switch >= 0.0) {
            return Err(Error::Domain("t_switch must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Which algorithm evaluated a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BesselPath {
    Series,
    Double,
    Multiprecision,
}

/// `sqrt(x^2 - t^2) - t acos(t / x)` for `x > t`, else zero. `-phi_hat`
/// approximates `ln(e^{pi t/2} K_{it}(x))` up to algebraic factors.
pub(crate) fn phi_hat(t: f64, x: f64) -> f64 {
    if x > t {
        let r = (x - t).sqrt() * (x + t).sqrt();
        r - t * (t / x).min(1.0).acos()
    } else {
        0.0
    }
}

/// Nats lost to cancellation in the real-axis integral.
fn cancellation_loss(t: f64, x: f64) -> f64 {
    (FRAC_PI_2 * t - x + phi_hat(t, x)).max(0.0)
}

/// `K_{it}(x)`; symmetric in `t` by construction.
pub fn k_bessel_imag_scaled(t: f64, x: f64, cfg: &BesselEvalConfig) -> Result<ScaledReal> {
    let g = k_bessel_exp_scaled(t, x, cfg)?;
    Ok(g * ScaledReal::exp(-FRAC_PI_2 * t.abs()))
}

/// `e^{pi |t| / 2} K_{it}(x)`, which is of moderate size for `x <= |t|`.
pub fn k_bessel_exp_scaled(t: f64, x: f64, cfg: &BesselEvalConfig) -> Result<ScaledReal> {
    Ok(k_bessel_with_path(t, x, cfg)?.0)
}

/// As [`k_bessel_exp_scaled`], also reporting the path taken.
pub fn k_bessel_with_path(t: f64, x: f64, cfg: &BesselEvalConfig) -> Result<(ScaledReal, BesselPath)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K-Bessel argument must be positive and finite, got {x}")));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("K-Bessel order must be finite, got {t}")));
    }
    let t = t.abs();
    if cfg.use_series && series_applies(t, x) {
        return Ok((series_scaled(t, x), BesselPath::Series));
    }
    if t <= cfg.t_switch {
        Ok((quad_double(t, x, cfg)?, BesselPath::Double))
    } else {
        Ok((quad_mp(t, x, cfg)?, BesselPath::Multiprecision))
    }
}

pub(crate) fn series_applies(t: f64, x: f64) -> bool {
    t >= 1.0 && x <= 2.0 * t.sqrt()
}

/// `K_{it}(x) = -sqrt(pi / (t sinh pi t)) Im[e^{i(t ln(x/2) - arg Gamma(1+it))} S]`
/// with `S = sum (x^2/4)^k / (k! (1+it)_k)`.
fn series_scaled(t: f64, x: f64) -> ScaledReal {
    let q = 0.25 * x * x;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term = term * q / (Complex64::new(k, t) * k);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    let theta = t * (0.5 * x).ln() - ln_gamma(Complex64::new(1.0, t)).im;
    let im = Complex64::from_polar(1.0, theta) * sum;
    let amp = (2.0 * PI / (t * (1.0 - (-2.0 * PI * t).exp()))).sqrt();
    ScaledReal::from_f64(-amp * im.im)
}

/// Truncation point `u*` with `x (cosh u* - 1) = margin`.
fn truncation(x: f64, margin: f64) -> f64 {
    let r = margin / x;
    if r > 1e15 {
        LN_2 + r.ln()
    } else {
        (1.0 + r).acosh()
    }
}

fn initial_grid(t: f64, x: f64, loss: f64) -> (f64, usize) {
    let u_star = truncation(x, 46.0 + loss);
    let h0 = (0.5 / (t + 1.0)).min(u_star / 64.0);
    let n = (u_star / h0).ceil() as usize;
    (u_star / n as f64, n)
}

/// Trapezoid rule for `int_0^inf e^{-x(cosh u - 1)} cos(t u) du` in
/// double precision; the result times `e^{pi t/2 - x}` is returned.
fn quad_double(t: f64, x: f64, cfg: &BesselEvalConfig) -> Result<ScaledReal> {
    let loss = cancellation_loss(t, x);
    let (mut h, n) = initial_grid(t, x, loss);
    let f = |u: f64| {
        let s = (0.5 * u).sinh();
        (-2.0 * x * s * s).exp() * (t * u).cos()
    };
    let mut sum = 0.5;
    let mut abs = 0.5;
    for k in 1..=n {
        let v = f(k as f64 * h);
        sum += v;
        abs += v.abs();
    }
    let mut prev = sum * h;
    let mut nodes = n;
    for _ in 0..cfg.max_refinements {
        h *= 0.5;
        let mut odd = 0.0;
        for k in 0..nodes {
            let v = f((2 * k + 1) as f64 * h);
            odd += v;
            abs += v.abs();
        }
        nodes *= 2;
        sum += odd;
        let cur = sum * h;
        let s_abs = abs * h;
        let tol = (cfg.rel_tol * cur.abs()).max(cfg.abs_tol * s_abs * (-loss).exp()).max(64.0 * f64::EPSILON * s_abs);
        if (cur - prev).abs() <= tol {
            return Ok(ScaledReal::exp(FRAC_PI_2 * t - x) * cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!("K_it(x) double quadrature, t={t}, x={x}")))
}

/// Decimal digits used by the multiprecision path.
pub(crate) fn working_digits(t: f64, x: f64) -> u32 {
    20 + (cancellation_loss(t, x) / LN_10).ceil() as u32
}

fn to_scaled(v: &Float) -> ScaledReal {
    if v.is_zero() {
        return ScaledReal::ZERO;
    }
    let (m, e) = v.to_f64_exp();
    ScaledReal::new(m, e as i64)
}

/// Adds the trapezoid ordinates at `u = offset + k delta`, `k < count`.
/// `cosh` and `cos` are advanced by exact-rotation recurrences so only one
/// transcendental call (`exp`) is made per node.
fn mp_nodes(t: f64, x: f64, prec: u32, offset: f64, delta: f64, count: usize, sum: &mut Float) -> f64 {
    let fx = Float::with_val(prec, x);
    let mut e_pos = Float::with_val(prec, offset);
    e_pos.exp_mut();
    let mut e_neg = Float::with_val(prec, -offset);
    e_neg.exp_mut();
    let mut step_pos = Float::with_val(prec, delta);
    step_pos.exp_mut();
    let mut step_neg = Float::with_val(prec, -delta);
    step_neg.exp_mut();

    let mut c = Float::with_val(prec, t * offset);
    let mut s = Float::with_val(prec, 0);
    s.assign(&c);
    s.sin_mut();
    c.cos_mut();
    let mut rc = Float::with_val(prec, t * delta);
    let mut rs = Float::with_val(prec, 0);
    rs.assign(&rc);
    rs.sin_mut();
    rc.cos_mut();

    let mut arg = Float::new(prec);
    let mut tmp = Float::new(prec);
    let mut tmp2 = Float::new(prec);
    let mut abs = 0.0;
    for _ in 0..count {
        // arg = -x ((e + 1/e)/2 - 1)
        arg.assign(&e_pos + &e_neg);
        arg /= 2;
        arg -= 1;
        arg *= &fx;
        arg = -arg;
        arg.exp_mut();
        arg *= &c;
        abs += arg.to_f64().abs();
        *sum += &arg;

        e_pos *= &step_pos;
        e_neg *= &step_neg;
        tmp.assign(&c * &rc);
        tmp2.assign(&s * &rs);
        tmp -= &tmp2;
        tmp2.assign(&s * &rc);
        s.assign(&c * &rs);
        s += &tmp2;
        c.assign(&tmp);
    }
    abs
}

/// Same integral as [`quad_double`] with `20 + ceil(loss / ln 10)` digits,
/// never more than `20 + ceil(0.69 t)` digits.
fn quad_mp(t: f64, x: f64, cfg: &BesselEvalConfig) -> Result<ScaledReal> {
    let loss = cancellation_loss(t, x);
    let digits = working_digits(t, x);
    let prec = (digits as f64 * LN_10 / LN_2).ceil() as u32 + 32;
    let (mut h, n) = initial_grid(t, x, loss);

    let mut sum = Float::with_val(prec, 0.5);
    let mut abs = 0.5 + mp_nodes(t, x, prec, h, h, n, &mut sum);
    let mut prev = Float::with_val(prec, &sum * h);
    let mut nodes = n;
    let mut diff = Float::new(prec);
    for _ in 0..cfg.max_refinements {
        h *= 0.5;
        abs += mp_nodes(t, x, prec, h, 2.0 * h, nodes, &mut sum);
        nodes *= 2;
        let cur = Float::with_val(prec, &sum * h);
        diff.assign(&cur - &prev);
        let cur_s = to_scaled(&cur);
        let tol = (cur_s.abs() * cfg.rel_tol).add(ScaledReal::exp(-loss) * (cfg.abs_tol * abs * h));
        if to_scaled(&diff).cmp_abs(&tol).is_le() {
            return Ok(ScaledReal::exp(FRAC_PI_2 * t - x) * cur_s);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!("K_it(x) multiprecision quadrature, t={t}, x={x}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> BesselEvalConfig {
        BesselEvalConfig::default()
    }

    #[test]
    fn k0_large_argument() {
        let k = k_bessel_imag_scaled(0.0, 50.0, &cfg()).unwrap().to_f64();
        let lead = (PI / 100.0).sqrt() * (-50f64).exp();
        assert!((k / lead - 1.0).abs() < 0.01);
    }

    #[test]
    fn paths_agree_where_they_overlap() {
        let quad = BesselEvalConfig { use_series: false, ..cfg() };
        for &(t, x) in &[(1.5, 0.7), (3.0, 2.0), (6.0, 0.05), (8.0, 4.5)] {
            let a = k_bessel_exp_scaled(t, x, &cfg()).unwrap().to_f64();
            let b = k_bessel_exp_scaled(t, x, &quad).unwrap().to_f64();
            assert!((a - b).abs() < 1e-11, "t={t} x={x}: {a} vs {b}");
        }
        let mp = BesselEvalConfig { t_switch: 0.0, use_series: false, ..cfg() };
        for &(t, x) in &[(2.5, 1.0), (9.0, 3.0), (9.0, 14.0)] {
            let a = k_bessel_exp_scaled(t, x, &quad).unwrap().to_f64();
            let b = k_bessel_exp_scaled(t, x, &mp).unwrap().to_f64();
            assert!((a - b).abs() < 1e-10, "t={t} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn symmetric_in_order() {
        let a = k_bessel_imag_scaled(4.0, 2.0, &cfg()).unwrap();
        let b = k_bessel_imag_scaled(-4.0, 2.0, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_argument() {
        assert!(matches!(k_bessel_imag_scaled(1.0, 0.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(k_bessel_imag_scaled(1.0, -2.0, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn sign_scan() {
        // positive beyond the turning point, sign changes only before it
        let t = 12.0;
        let mut prev = 0.0;
        let mut changes_after = 0;
        let mut changes_before = 0;
        for k in 1..400 {
            let x = 0.05 * k as f64;
            let v = k_bessel_exp_scaled(t, x, &cfg()).unwrap().to_f64();
            if x >= t {
                assert!(v > 0.0, "x={x}");
            }
            if prev * v < 0.0 {
                if x >= t {
                    changes_after += 1
                } else {
                    changes_before += 1
                }
            }
            prev = v;
        }
        assert_eq!(changes_after, 0);
        assert!(changes_before > 0);
    }

    #[test]
    fn digits_never_exceed_budget() {
        for &t in &[11.0, 50.0, 300.0] {
            for &x in &[1e-3, 1.0, t / 2.0, t, 3.0 * t] {
                assert!(working_digits(t, x) <= 20 + (0.69 * t).ceil() as u32);
            }
        }
    }
}
