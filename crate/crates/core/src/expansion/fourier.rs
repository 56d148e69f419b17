//! Truncated Fourier-Whittaker expansion and its analytic part.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::coeffs::CoefficientTable;
use crate::counting::for_each_lattice_point;
use crate::error::Result;
use crate::gl2special::BesselEvalConfig;
use crate::h3geom::{iwasawa, to_matrix, H3Point, RealMatrix3};
use crate::quad::{ComplexSum, NeumaierSum};
use crate::spectral::{t_zero, SpectralTriple};
use crate::whittaker3::{e_phase, JwEvaluator};

/// Terms whose `W~` is provably below `e^{-69}` (about `1e-30`) are skipped.
const NEGLIGIBLE_LOG: f64 = -69.0;

/// Truncation of the expansion: coefficient support `m1^2 m2 <= m_cutoff`
/// and pair radius `|c z2 + d| <= r_cd`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncation {
    pub m_cutoff: u64,
    pub r_cd: f64,
}

impl Truncation {
    /// `M = (8 T0)^3 / (y1^2 y2)`, `R_cd = 8 T0 / min(1, y1)`.
    pub fn default_for(z: &H3Point<f64>, nu: &SpectralTriple<f64>) -> Self {
        let t0 = t_zero(nu);
        let m = (8.0 * t0).powi(3) / (z.y1 * z.y1 * z.y2);
        Truncation { m_cutoff: m.floor().max(1.0) as u64, r_cd: 8.0 * t0 / z.y1.min(1.0) }
    }
}

/// Bezout coefficients `(a, b)` with `a d - b c = 1`.
pub fn bezout(c: i64, d: i64) -> (i64, i64) {
    // extended Euclid on (d, c): x d + y c = g, g = +-1
    let (mut r0, mut r1) = (d, c);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    let g = r0.signum();
    (x0 * g, -y0 * g)
}

/// Iwasawa coordinates of `(gamma (+) 1) z` for the bottom row `(c, d)`.
fn block_point(c: i64, d: i64, z: &H3Point<f64>) -> Result<H3Point<f64>> {
    let (a, b) = bezout(c, d);
    let m = RealMatrix3::new([[a as f64, b as f64, 0.0], [c as f64, d as f64, 0.0], [0.0, 0.0, 1.0]]);
    Ok(iwasawa(&m.mul(&to_matrix(z)))?.point)
}

fn coprime_pairs(z: &H3Point<f64>, r_cd: f64) -> Result<Vec<(i64, i64)>> {
    let mut pairs = Vec::new();
    for_each_lattice_point(Complex64::new(z.x2, z.y2), r_cd, true, |c, d| pairs.push((c, d)))?;
    Ok(pairs)
}

/// Value of the truncated expansion and the sum of the moduli of its terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierSum {
    pub value: Complex64,
    pub abs_sum: f64,
    pub pairs: usize,
    pub evaluated: usize,
}

/// Evaluates the expansion, summing over the coprime pairs with each
/// pair's partial sum compensated and the pairs merged in lattice order.
pub fn fourier_whittaker_terms(
    z: &H3Point<f64>,
    nu: &SpectralTriple<f64>,
    coeffs: &CoefficientTable,
    trunc: &Truncation,
    cfg: &BesselEvalConfig,
) -> Result<FourierSum> {
    let ev = JwEvaluator::new(nu, cfg);
    let pairs = coprime_pairs(z, trunc.r_cd)?;
    let support: Vec<((u64, u64), Complex64)> =
        coeffs.iter().filter(|&((m1, m2), _)| m1 * m1 * m2 <= trunc.m_cutoff).collect();
    let parts: Vec<Result<(Complex64, f64, usize)>> = pairs
        .par_iter()
        .map(|&(c, d)| {
            let zp = block_point(c, d, z)?;
            let mut acc = ComplexSum::default();
            let mut abs = NeumaierSum::default();
            let mut evaluated = 0;
            for &((m1, m2), lam) in &support {
                let (y1, y2) = (m1 as f64 * zp.y1, m2 as f64 * zp.y2);
                if ev.log_magnitude_bound(y1, y2) < NEGLIGIBLE_LOG {
                    continue;
                }
                evaluated += 1;
                let w = ev.eval(y1, y2)?;
                let coef = lam / (m1 * m2) as f64;
                for sign in [1.0, -1.0] {
                    let term = coef * e_phase(m1 as f64 * zp.x1 + sign * m2 as f64 * zp.x2) * w;
                    acc.add(term);
                    abs.add(term.norm());
                }
            }
            Ok((acc.value(), abs.value(), evaluated))
        })
        .collect();
    let mut value = ComplexSum::default();
    let mut abs_sum = NeumaierSum::default();
    let mut evaluated = 0;
    for p in parts {
        let (v, a, n) = p?;
        value.add(v);
        abs_sum.add(a);
        evaluated += n;
    }
    Ok(FourierSum { value: value.value(), abs_sum: abs_sum.value(), pairs: pairs.len(), evaluated })
}

/// The truncated expansion at `z`.
pub fn fourier_whittaker_sum(
    z: &H3Point<f64>,
    nu: &SpectralTriple<f64>,
    coeffs: &CoefficientTable,
    trunc: &Truncation,
    cfg: &BesselEvalConfig,
) -> Result<Complex64> {
    Ok(fourier_whittaker_terms(z, nu, coeffs, trunc, cfg)?.value)
}

/// `|W~(s1 |c z2 + d|, s2 |c z2 + d|^{-2})|` per coprime pair, in lattice
/// order.
pub fn analytic_part_terms(
    s1: f64,
    s2: f64,
    z2: Complex64,
    nu: &SpectralTriple<f64>,
    r_cd: f64,
    cfg: &BesselEvalConfig,
) -> Result<Vec<((i64, i64), f64)>> {
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(crate::Error::Domain(format!("s1, s2 must be positive, got ({s1}, {s2})")));
    }
    let ev = JwEvaluator::new(nu, cfg);
    let mut pairs = Vec::new();
    for_each_lattice_point(z2, r_cd, true, |c, d| pairs.push((c, d)))?;
    pairs
        .par_iter()
        .map(|&(c, d)| {
            let r = (Complex64::new(c as f64, 0.0) * z2 + d as f64).norm();
            let (y1, y2) = (s1 * r, s2 / (r * r));
            let v = if ev.log_magnitude_bound(y1, y2) < NEGLIGIBLE_LOG { 0.0 } else { ev.eval(y1, y2)?.norm() };
            Ok(((c, d), v))
        })
        .collect()
}

/// `F(s1, s2) = sum_{gcd(c,d)=1} |W~(s1 |c z2 + d|, s2 |c z2 + d|^{-2})|`
/// over `|c z2 + d| <= r_cd`.
#[allow(non_snake_case)]
pub fn analytic_part_F(
    s1: f64,
    s2: f64,
    z2: Complex64,
    nu: &SpectralTriple<f64>,
    r_cd: f64,
    cfg: &BesselEvalConfig,
) -> Result<f64> {
    let mut s = NeumaierSum::default();
    for (_, v) in analytic_part_terms(s1, s2, z2, nu, r_cd, cfg)? {
        s.add(v);
    }
    Ok(s.value())
}
