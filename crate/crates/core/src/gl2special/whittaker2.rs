//! Normalized GL(2) Whittaker function and its square integrals.

use std::f64::consts::PI;
use std::sync::Arc;

use super::bessel::{k_bessel_exp_scaled, BesselEvalConfig};
use super::gamma::inv_gamma_half_modulus_scaled;
use super::kernel::BesselKernel;
use crate::error::Result;
use crate::quad::{integrate, QuadConfig};

/// `W_{it}(x) = sqrt(x) K_{it}(2 pi x) / |Gamma(1/2 + it)|`.
pub fn gl2_whittaker(t: f64, x: f64, cfg: &BesselEvalConfig) -> Result<f64> {
    let g = k_bessel_exp_scaled(t, 2.0 * PI * x, cfg)?;
    Ok((g * (x.sqrt() * inv_gamma_half_modulus_scaled(t))).to_f64())
}

/// Repeated evaluation of `W_{it}` at one order through the kernel cache.
pub struct Gl2Whittaker {
    kernel: Arc<BesselKernel>,
    norm: f64,
}

impl Gl2Whittaker {
    pub fn new(t: f64, cfg: &BesselEvalConfig) -> Gl2Whittaker {
        Gl2Whittaker { kernel: BesselKernel::shared(t, cfg), norm: inv_gamma_half_modulus_scaled(t) }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok((self.kernel.g(2.0 * PI * x)? * (x.sqrt() * self.norm)).to_f64())
    }
}

/// Upper end of the integration range: past `max(cut, T) + 20` the
/// integrand is below `e^{-250}` of its size near the turning point.
fn upper_limit(t: f64, cut: f64) -> f64 {
    let big_t = t.abs().max(0.5);
    (4.0 * big_t).max(cut.max(big_t) + 20.0)
}

const S_MIN: f64 = -30.0;

fn quad_cfg(cfg: &BesselEvalConfig, panels: usize) -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-11,
        rel_tol: (cfg.rel_tol * 1e3).clamp(1e-10, 1e-7),
        initial_panels: panels,
        max_intervals: 200_000,
    }
}

/// `int_0^inf W_{it}(x)^2 dx / x`, computed in `s = ln x`.
pub fn whittaker_sq_log_integral(t: f64, cfg: &BesselEvalConfig) -> Result<f64> {
    let w = Gl2Whittaker::new(t, cfg);
    let s_max = upper_limit(t, 0.0).ln();
    // the integrand oscillates with frequency about 2t in s for x < t/(2 pi)
    let panels = 16 + ((s_max - S_MIN) * t.abs() / PI).ceil() as usize;
    let r = integrate(
        |s| {
            let v = w.eval(s.exp())?;
            Ok(v * v)
        },
        S_MIN,
        s_max,
        &quad_cfg(cfg, panels),
    )?;
    Ok(r.value)
}

/// `int_cut^inf W_{it}(x)^2 / sqrt(x^2 - cut^2) dx` via `x = cut cosh(sigma)`.
pub fn whittaker_sq_tail_integral(t: f64, cut: f64, cfg: &BesselEvalConfig) -> Result<f64> {
    if !(cut >= 0.0) || !cut.is_finite() {
        return Err(crate::Error::Domain(format!("cut must be finite and nonnegative, got {cut}")));
    }
    if cut == 0.0 {
        return whittaker_sq_log_integral(t, cfg);
    }
    let w = Gl2Whittaker::new(t, cfg);
    let x_max = upper_limit(t, cut);
    if cut >= x_max {
        return Ok(0.0);
    }
    let sigma_max = (x_max / cut).acosh();
    let panels = 16 + (sigma_max * t.abs() / PI).ceil() as usize;
    let r = integrate(
        |sigma| {
            let v = w.eval(cut * sigma.cosh())?;
            Ok(v * v)
        },
        0.0,
        sigma_max,
        &quad_cfg(cfg, panels),
    )?;
    Ok(r.value)
}
