//! Fixed-order cache of `e^{pi t/2} K_{it}(x)` as piecewise Chebyshev
//! interpolants in `s = ln x`.
//!
//! Each piece is a deterministic function of the order, the config and
//! the piece index, so lookups give identical values no matter which
//! thread first built a piece.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use super::bessel::{k_bessel_exp_scaled, BesselEvalConfig};
use crate::error::Result;
use crate::scaled::ScaledReal;

const DEGREE: usize = 32;
const MAX_DEPTH: u32 = 6;
const LIN_TOL: f64 = 2e-12;
const LOG_TOL: f64 = 2e-12;

#[derive(Debug)]
enum Piece {
    Cheb { lo: f64, hi: f64, coef: Vec<f64> },
    Split { mid: f64, left: Box<Piece>, right: Box<Piece> },
    Direct,
}

impl Piece {
    fn eval(&self, s: f64) -> Option<f64> {
        match self {
            Piece::Cheb { lo, hi, coef } => Some(clenshaw(coef, (2.0 * s - lo - hi) / (hi - lo))),
            Piece::Split { mid, left, right } => {
                if s < *mid {
                    left.eval(s)
                } else {
                    right.eval(s)
                }
            }
            Piece::Direct => None,
        }
    }
}

fn clenshaw(c: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    u * b1 - b2 + c[0]
}

/// Interpolation coefficients at the Chebyshev extreme points.
fn cheb_fit(vals: &[f64]) -> Vec<f64> {
    let n = vals.len() - 1;
    (0..=n)
        .map(|k| {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (PI * (j * k) as f64 / n as f64).cos();
            }
            let scale = if k == 0 || k == n { 1.0 } else { 2.0 };
            s * scale / n as f64
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Oscillatory,
    Monotone,
}

/// Evaluator for `G(x) = e^{pi t/2} K_{it}(x)` at a fixed order.
pub struct BesselKernel {
    t: f64,
    cfg: BesselEvalConfig,
    cached: bool,
    s_lo: f64,
    s_turn: f64,
    w_osc: f64,
    w_mono: f64,
    osc: RwLock<HashMap<i64, Arc<Piece>>>,
    mono: RwLock<HashMap<i64, Arc<Piece>>>,
}

type Registry = Mutex<HashMap<(u64, [u64; 4], u32, bool), Arc<BesselKernel>>>;

impl BesselKernel {
    pub fn new(t: f64, cfg: BesselEvalConfig) -> BesselKernel {
        let t = t.abs();
        let cached = cfg.use_series && t >= 1.0;
        let x_lo = 2.0 * t.sqrt();
        let x_turn = t + 2.0 * t.cbrt() + 1.0;
        BesselKernel {
            t,
            cfg,
            cached,
            s_lo: x_lo.ln(),
            s_turn: x_turn.ln(),
            w_osc: (12.0 / (t + 1.0)).min(0.5),
            w_mono: 0.25,
            osc: RwLock::new(HashMap::new()),
            mono: RwLock::new(HashMap::new()),
        }
    }

    /// Process-wide kernel for this order and config.
    pub fn shared(t: f64, cfg: &BesselEvalConfig) -> Arc<BesselKernel> {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        let key = (
            t.abs().to_bits(),
            [cfg.abs_tol.to_bits(), cfg.rel_tol.to_bits(), cfg.t_switch.to_bits(), 0],
            cfg.max_refinements,
            cfg.use_series,
        );
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = reg.lock().expect("kernel registry poisoned");
        map.entry(key).or_insert_with(|| Arc::new(BesselKernel::new(t, *cfg))).clone()
    }

    pub fn order(&self) -> f64 {
        self.t
    }

    pub fn config(&self) -> &BesselEvalConfig {
        &self.cfg
    }

    /// `e^{pi t/2} K_{it}(x)`.
    pub fn g(&self, x: f64) -> Result<ScaledReal> {
        if !self.cached || !(x > 0.0) {
            return k_bessel_exp_scaled(self.t, x, &self.cfg);
        }
        let s = x.ln();
        let (region, idx) = if s < self.s_turn {
            (Region::Oscillatory, ((s - self.s_lo) / self.w_osc).floor() as i64)
        } else {
            (Region::Monotone, ((s - self.s_turn) / self.w_mono).floor() as i64)
        };
        let piece = self.piece(region, idx)?;
        match (piece.eval(s), region) {
            (Some(v), Region::Oscillatory) => Ok(ScaledReal::from_f64(v)),
            (Some(v), Region::Monotone) => Ok(ScaledReal::exp(v)),
            (None, _) => k_bessel_exp_scaled(self.t, x, &self.cfg),
        }
    }

    fn piece(&self, region: Region, idx: i64) -> Result<Arc<Piece>> {
        let map = match region {
            Region::Oscillatory => &self.osc,
            Region::Monotone => &self.mono,
        };
        if let Some(p) = map.read().expect("kernel cache poisoned").get(&idx) {
            return Ok(p.clone());
        }
        let (lo, hi) = match region {
            Region::Oscillatory => {
                let lo = self.s_lo + idx as f64 * self.w_osc;
                (lo, (lo + self.w_osc).min(self.s_turn))
            }
            Region::Monotone => {
                let lo = self.s_turn + idx as f64 * self.w_mono;
                (lo, lo + self.w_mono)
            }
        };
        let built = Arc::new(self.build(region, lo, hi, 0)?);
        let mut guard = map.write().expect("kernel cache poisoned");
        Ok(guard.entry(idx).or_insert(built).clone())
    }

    fn sample(&self, region: Region, s: f64) -> Result<Option<f64>> {
        let g = k_bessel_exp_scaled(self.t, s.exp(), &self.cfg)?;
        Ok(match region {
            Region::Oscillatory => Some(g.to_f64()),
            Region::Monotone if g.signum() > 0.0 => Some(g.ln_abs()),
            Region::Monotone => None,
        })
    }

    fn build(&self, region: Region, lo: f64, hi: f64, depth: u32) -> Result<Piece> {
        let mut vals = Vec::with_capacity(DEGREE + 1);
        for j in 0..=DEGREE {
            let u = (PI * j as f64 / DEGREE as f64).cos();
            match self.sample(region, 0.5 * (lo + hi) + 0.5 * (hi - lo) * u)? {
                Some(v) => vals.push(v),
                None => return Ok(Piece::Direct),
            }
        }
        let coef = cheb_fit(&vals);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = match region {
            Region::Oscillatory => LIN_TOL * scale.max(1e-300),
            Region::Monotone => LOG_TOL,
        };
        let piece = Piece::Cheb { lo, hi, coef };
        let mut worst: f64 = 0.0;
        for u in [-0.71, 0.37] {
            let s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * u;
            match self.sample(region, s)? {
                Some(v) => worst = worst.max((piece.eval(s).expect("leaf") - v).abs()),
                None => return Ok(Piece::Direct),
            }
        }
        if worst <= tol {
            return Ok(piece);
        }
        if depth >= MAX_DEPTH {
            return Ok(Piece::Direct);
        }
        let mid = 0.5 * (lo + hi);
        Ok(Piece::Split {
            mid,
            left: Box::new(self.build(region, lo, mid, depth + 1)?),
            right: Box::new(self.build(region, mid, hi, depth + 1)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_matches_direct() {
        let cfg = BesselEvalConfig::default();
        for &t in &[3.0, 15.0] {
            let kern = BesselKernel::new(t, cfg);
            let small = (1..12).map(|k| 10f64.powi(-k) * 1.7);
            for x in (1..60).map(|k| 0.37 * k as f64 * (1.0 + t / 10.0)).chain(small) {
                let a = kern.g(x).unwrap();
                let b = k_bessel_exp_scaled(t, x, &cfg).unwrap();
                let diff = a.sub(b).abs();
                let scale = if x > t { b.abs() } else { ScaledReal::from_f64(1.0 / (1.0 + t).sqrt()) };
                assert!((diff / scale).to_f64() < 1e-10, "t={t} x={x}: {a} vs {b}");
            }
        }
    }
}
