//! Cartan projection `g = k1 exp(C(g)) k2` and the norm on the Cartan
//! subalgebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::h3geom::RealMatrix3;
use crate::report::VerificationReport;
use crate::scalar::Real;

/// Sorted logarithms `a1 >= a2 >= a3` of the normalized singular values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CartanVector<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
}

impl<T: Real> CartanVector<T> {
    /// Sorts and projects onto the trace-zero plane.
    pub fn from_unsorted(v: [T; 3]) -> Self {
        let mut v = v;
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let mean = (v[0] + v[1] + v[2]) / T::lit(3.0);
        CartanVector { a1: v[0] - mean, a2: v[1] - mean, a3: v[2] - mean }
    }
}

const MAX_SWEEPS: usize = 60;

/// Singular values by one-sided Jacobi rotations on the columns, sweeping
/// the pairs (0,1), (0,2), (1,2) in that order.
pub fn singular_values<T: Real>(m: &RealMatrix3<T>) -> [T; 3] {
    let mut a = m.m;
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(4.0));
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
            for row in &a {
                alpha = alpha + row[p] * row[p];
                beta = beta + row[q] * row[q];
                gamma = gamma + row[p] * row[q];
            }
            if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
            let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
            let t = if zeta == T::zero() { T::one() } else { t };
            let c = T::one() / (T::one() + t * t).sqrt();
            let s = c * t;
            for row in a.iter_mut() {
                let (u, v) = (row[p], row[q]);
                row[p] = c * u - s * v;
                row[q] = s * u + c * v;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = [0, 1, 2].map(|j| (a[0][j] * a[0][j] + a[1][j] * a[1][j] + a[2][j] * a[2][j]).sqrt());
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Logarithms of the singular values of `m / |det m|^{1/3}`.
pub fn cartan_project<T: Real>(m: &RealMatrix3<T>) -> Result<CartanVector<T>> {
    let d = m.det();
    if d == T::zero() || !d.is_finite() || !m.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let sv = singular_values(m);
    if sv[2] <= T::zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(CartanVector::from_unsorted(sv.map(|s| s.ln())))
}

/// Euclidean norm `sqrt(a1^2 + a2^2 + a3^2)`.
pub fn cartan_norm<T: Real>(c: &CartanVector<T>) -> T {
    (c.a1 * c.a1 + c.a2 * c.a2 + c.a3 * c.a3).sqrt()
}

/// Draws an upper-triangular `g` with positive diagonal, `det g = 1`,
/// `0 < ||g - 1||_F <= radius`.
fn sample_upper(rng: &mut ChaCha8Rng, radius: f64) -> RealMatrix3<f64> {
    loop {
        let l1: f64 = rng.random_range(-radius..=radius);
        let l2: f64 = rng.random_range(-radius..=radius);
        let l3 = -l1 - l2;
        let u: [f64; 3] = [0; 3].map(|_| rng.random_range(-radius..=radius));
        let g = RealMatrix3::new([[l1.exp(), u[0], u[1]], [0.0, l2.exp(), u[2]], [0.0, 0.0, l3.exp()]]);
        let dist = g.sub(&RealMatrix3::identity()).frobenius();
        if dist > 0.0 && dist <= radius {
            return g;
        }
    }
}

/// Seed for sample `k`, independent of how samples are split over threads.
fn sample_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k.wrapping_mul(0xD1B5_4A32_D192_ED03).rotate_left(17)
}

/// Empirical constants in `||C(g)|| ~ ||g^t g - 1|| ~ ||g - 1||` for
/// upper-triangular `g` near the identity.
pub fn verify_cartan_lemma(samples: usize, radius: f64, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1], got {radius}")));
    }
    let rows: Vec<Result<Vec<f64>>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, k));
            let g = sample_upper(&mut rng, radius);
            let id = RealMatrix3::identity();
            let dist = g.sub(&id).frobenius();
            let c = cartan_norm(&cartan_project(&g)?);
            let gtg = g.transpose().mul(&g).sub(&id).frobenius();
            Ok(vec![k as f64, dist, c, gtg, c / dist, gtg / dist])
        })
        .collect();
    let mut report =
        VerificationReport::new("cartan", &["sample", "dist", "cartan_norm", "gtg_dist", "ratio_c", "ratio_gtg"]);
    for r in rows {
        report.push_row(r?);
    }
    let (lo, hi) = (1.0 / 50.0, 50.0);
    let stats = [
        ("ratio_c_min", report.column_min("ratio_c")),
        ("ratio_c_max", report.column_max("ratio_c")),
        ("ratio_gtg_min", report.column_min("ratio_gtg")),
        ("ratio_gtg_max", report.column_max("ratio_gtg")),
    ];
    report.set_passed(true);
    for (k, v) in stats {
        report.add_summary(k, v);
        if !(lo..=hi).contains(&v) {
            report.fail(format!("{k} = {v} outside [1/50, 50]"));
        }
    }
    Ok(report)
}
