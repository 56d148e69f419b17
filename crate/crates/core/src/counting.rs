//! Lattice points in disks and the integer matrices entering the
//! pre-trace inequality.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::{cartan_norm, cartan_project};
use crate::error::{Error, Result};
use crate::h3geom::{sandwich, siegel_height, H3Point, IntMatrix3};
use crate::quad::NeumaierSum;

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Visits the pairs `(c, d) != (0, 0)` with `|c z2 + d| <= r`, `c`
/// ascending then `d` ascending.
pub fn for_each_lattice_point<F: FnMut(i64, i64)>(z2: Complex64, r: f64, coprime_only: bool, mut f: F) -> Result<()> {
    if !(z2.im > 0.0) || !z2.re.is_finite() || !z2.im.is_finite() {
        return Err(Error::Domain(format!("z2 must lie in the upper half-plane, got {z2}")));
    }
    if !(r > 0.0) || !(r < 1e6 * z2.norm().max(1.0)) {
        return Err(Error::Feasibility(format!("disk radius {r} out of range")));
    }
    let cmax = (r / z2.im).floor() as i64;
    for c in -cmax..=cmax {
        let cy = c as f64 * z2.im;
        let rem = r * r - cy * cy;
        if rem < 0.0 {
            continue;
        }
        let half = rem.sqrt();
        let center = -(c as f64) * z2.re;
        let lo = (center - half).ceil() as i64 - 1;
        let hi = (center + half).floor() as i64 + 1;
        for d in lo..=hi {
            if c == 0 && d == 0 {
                continue;
            }
            let re = c as f64 * z2.re + d as f64;
            if re * re + cy * cy > r * r {
                continue;
            }
            if coprime_only && gcd(c, d) != 1 {
                continue;
            }
            f(c, d);
        }
    }
    Ok(())
}

/// Number of `(c, d) != (0, 0)` with `|c z2 + d| <= r`.
pub fn lattice_disk_count(z2: Complex64, r: f64, coprime_only: bool) -> Result<u64> {
    let mut n = 0;
    for_each_lattice_point(z2, r, coprime_only, |_, _| n += 1)?;
    Ok(n)
}

/// A dyadic shell index; `(k, l)` for two-parameter shells, `l = 0` when a
/// single index is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicShell {
    pub k: u32,
    pub l: u32,
}

/// Coprime pairs with `2^m <= |c z2 + d| < 2^{m+1}`.
pub fn lattice_shell_count(z2: Complex64, m: i32) -> Result<u64> {
    let lo = 2f64.powi(m);
    let mut n = 0;
    for_each_lattice_point(z2, 2.0 * lo, true, |c, d| {
        let v = Complex64::new(c as f64, 0.0) * z2 + d as f64;
        if v.norm() >= lo && v.norm() < 2.0 * lo {
            n += 1;
        }
    })?;
    Ok(n)
}

/// The four classes by the vanishing pattern of `g, h, d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MClass {
    M1,
    M2,
    M3,
    M4,
}

impl MClass {
    pub fn index(self) -> usize {
        self as usize
    }
}

pub fn classify_m(gamma: &IntMatrix3) -> MClass {
    match (gamma.g(), gamma.h(), gamma.d()) {
        (0, 0, 0) => MClass::M1,
        (0, h, 0) if h != 0 => MClass::M2,
        (0, 0, d) if d != 0 => MClass::M3,
        _ => MClass::M4,
    }
}

/// Largest possible `||M||_F^2` and entry size for `M` with Cartan norm
/// at most `r`: singular values `e^{a_j}` with `a` in a disk of radius
/// `r` in the trace-zero plane.
fn ball_bounds(r: f64) -> (f64, f64) {
    let u = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let w = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()];
    let mut frob: f64 = 0.0;
    let n = 20_000;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let s: f64 = (0..3).map(|j| (2.0 * r * (th.cos() * u[j] + th.sin() * w[j])).exp()).sum();
        frob = frob.max(s);
    }
    let c = (2.0f64 / 3.0).sqrt() * r;
    frob = frob.max((2.0 * c).exp() + 2.0 * (-c).exp());
    (frob * (1.0 + 1e-9) + 1e-12, c.exp() * (1.0 + 1e-9))
}

/// Integers in `[center - half, center + half]`, widened by a hair.
fn int_range(center: f64, half: f64) -> Result<std::ops::RangeInclusive<i64>> {
    let lo = (center - half - 1e-9).ceil();
    let hi = (center + half + 1e-9).floor();
    if !(lo.abs() < 1e15 && hi.abs() < 1e15) {
        return Err(Error::Feasibility(format!("entry interval around {center} too large")));
    }
    Ok(lo as i64..=hi as i64)
}

struct Budget {
    frob: f64,
    entry: f64,
}

impl Budget {
    /// Allowed `|M_ij|` given the squared mass already spent.
    fn allow(&self, spent: f64) -> f64 {
        (self.frob - spent).max(0.0).sqrt().min(self.entry)
    }
}

fn ensure_feasible(z: &H3Point<f64>, r: f64) -> Result<()> {
    if !(r >= 0.0) || r > 3.0 {
        return Err(Error::Feasibility(format!("radius {r} outside [0, 3]")));
    }
    let s = siegel_height::<f64>() - 1e-9;
    let in_siegel =
        z.x1.abs() <= 0.5 + 1e-9 && z.x2.abs() <= 0.5 + 1e-9 && z.x3.abs() <= 0.5 + 1e-9 && z.y1 >= s && z.y2 >= s;
    if !in_siegel {
        return Err(Error::Feasibility(format!("point {z} is not in the Siegel set")));
    }
    if z.y1 * z.y2 * z.y1 * z.y2 > 1e7 {
        return Err(Error::Feasibility(format!("heights of {z} make the matrix count too large")));
    }
    Ok(())
}

/// Calls `visit` with every canonical `gamma` with `||C(z^{-1} gamma z)|| <= r`
/// and its Cartan norm, for one value of the entry `g`.
fn visit_for_g<F: FnMut(IntMatrix3, f64)>(z: &H3Point<f64>, r: f64, bud: &Budget, g: i64, visit: &mut F) -> Result<()> {
    let H3Point { x1, x2, x3, y1, y2 } = *z;
    let gf = g as f64;
    let m31 = gf * y1 * y2;
    let s1 = m31 * m31;
    if s1 > bud.frob {
        return Ok(());
    }
    for h in int_range(-gf * x2, bud.allow(s1) / y1)? {
        let hf = h as f64;
        let m32 = (hf + gf * x2) * y1;
        let s2 = s1 + m32 * m32;
        for d in int_range(gf * x1, bud.allow(s2) / y2)? {
            let df = d as f64;
            let m21 = (df - gf * x1) * y2;
            let s3 = s2 + m21 * m21;
            for a in int_range(df * x2 - gf * x1 * x2 + gf * x3, bud.allow(s3))? {
                let af = a as f64;
                let m11 = af - df * x2 + gf * x1 * x2 - gf * x3;
                let s4 = s3 + m11 * m11;
                for e in int_range(-df * x2 + (hf + gf * x2) * x1, bud.allow(s4))? {
                    let ef = e as f64;
                    let m22 = ef + df * x2 - (hf + gf * x2) * x1;
                    let s5 = s4 + m22 * m22;
                    for i in int_range(-hf * x1 - gf * x3, bud.allow(s5))? {
                        let iff = i as f64;
                        let m33 = iff + hf * x1 + gf * x3;
                        let s6 = s5 + m33 * m33;
                        let f_center = -ef * x1 - df * x3 + (iff + hf * x1 + gf * x3) * x1;
                        for f in int_range(f_center, bud.allow(s6) * y1)? {
                            let ff = f as f64;
                            let m23 = (ff - f_center) / y1;
                            let s7 = s6 + m23 * m23;
                            let b_center = -(af - ef + hf * x1 - df * x2 + gf * x1 * x2) * x2 + (hf + gf * x2) * x3;
                            for b in int_range(b_center, bud.allow(s7) * y2)? {
                                let bf = b as f64;
                                let m12 = (bf - b_center) / y2;
                                let s8 = s7 + m12 * m12;
                                let c_center = -(bf * x1 - ff * x2 + (-ef + iff + hf * x1) * x1 * x2 + af * x3
                                    - (iff + hf * x1 + df * x2 - gf * x1 * x2) * x3
                                    - gf * x3 * x3);
                                let c_range = int_range(c_center, bud.allow(s8) * y1 * y2)?;
                                // det = c (dh - eg) + a (ei - fh) - b (di - fg)
                                let lin = (d as i128) * (h as i128) - (e as i128) * (g as i128);
                                let rest = (a as i128) * ((e as i128) * (i as i128) - (f as i128) * (h as i128))
                                    - (b as i128) * ((d as i128) * (i as i128) - (f as i128) * (g as i128));
                                let mut check = |c: i64| {
                                    let gamma = IntMatrix3::from_entries([a, b, c, d, e, f, g, h, i]);
                                    if !gamma.is_canonical() {
                                        return Ok(());
                                    }
                                    let n = cartan_norm(&cartan_project(&sandwich(z, &gamma))?);
                                    if n <= r {
                                        visit(gamma, n);
                                    }
                                    Ok::<(), Error>(())
                                };
                                if lin == 0 {
                                    if rest == 1 || rest == -1 {
                                        for c in c_range {
                                            check(c)?;
                                        }
                                    }
                                } else {
                                    for target in [-1i128, 1] {
                                        let num = target - rest;
                                        if num % lin == 0 {
                                            let c = num / lin;
                                            if c >= *c_range.start() as i128 && c <= *c_range.end() as i128 {
                                                check(c as i64)?;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn g_values(z: &H3Point<f64>, bud: &Budget) -> Result<Vec<i64>> {
    Ok(int_range(0.0, bud.entry / (z.y1 * z.y2))?.collect())
}

fn budget(r: f64) -> Budget {
    let (frob, entry) = ball_bounds(r);
    Budget { frob, entry }
}

/// All canonical `gamma` in `PGL_3(Z)` with `||C(z^{-1} gamma z)|| <= r`,
/// sorted. Entries are found in the order `g, h, d, a, e, i, f, b, c`, each
/// confined by the entry formulas of `z^{-1} gamma z` and by the Frobenius
/// mass still available inside the Cartan ball.
pub fn enumerate_gammas(z: &H3Point<f64>, r: f64) -> Result<Vec<IntMatrix3>> {
    ensure_feasible(z, r)?;
    let bud = budget(r);
    let per_g: Vec<Result<Vec<IntMatrix3>>> = g_values(z, &bud)?
        .into_par_iter()
        .map(|g| {
            let mut out = Vec::new();
            visit_for_g(z, r, &bud, g, &mut |m, _| out.push(m))?;
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for v in per_g {
        all.extend(v?);
    }
    all.sort();
    Ok(all)
}

/// Per-class totals and the weight sum of one enumeration pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClassTally {
    pub counts: [u64; 4],
}

impl ClassTally {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Visits matching matrices per `g` in parallel, folding each `g` into an
/// accumulator; accumulators are merged in ascending `g`.
fn fold_gammas<A, F, M>(z: &H3Point<f64>, r: f64, init: A, step: F, merge: M) -> Result<A>
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, IntMatrix3, f64) + Sync,
    M: Fn(&mut A, A),
{
    ensure_feasible(z, r)?;
    let bud = budget(r);
    let parts: Vec<Result<A>> = g_values(z, &bud)?
        .into_par_iter()
        .map(|g| {
            let mut acc = init.clone();
            visit_for_g(z, r, &bud, g, &mut |m, n| step(&mut acc, m, n))?;
            Ok(acc)
        })
        .collect();
    let mut acc = init;
    for p in parts {
        merge(&mut acc, p?);
    }
    Ok(acc)
}

/// Class totals without materializing the matrix list.
pub fn count_gammas(z: &H3Point<f64>, r: f64) -> Result<ClassTally> {
    fold_gammas(
        z,
        r,
        ClassTally::default(),
        |acc, m, _| acc.counts[classify_m(&m).index()] += 1,
        |acc, p| {
            for k in 0..4 {
                acc.counts[k] += p.counts[k];
            }
        },
    )
}

/// M1 count in the Cartan shell `[k, 2k)` and its predicted envelope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellCount {
    pub count: u64,
    pub envelope: f64,
}

/// Number of M1 matrices with Cartan norm in `[k, 2k)`, alongside
/// `(1 + y1 k)(1 + y2 k)(1 + y1 y2 k)`.
pub fn m1_shell_count(z: &H3Point<f64>, k: f64) -> Result<ShellCount> {
    if !(k > 0.0 && k <= 2.0) {
        return Err(Error::Domain(format!("shell parameter must lie in (0, 2], got {k}")));
    }
    let count = fold_gammas(
        z,
        2.0 * k,
        0u64,
        |acc, m, n| {
            if classify_m(&m) == MClass::M1 && n >= k && n < 2.0 * k {
                *acc += 1;
            }
        },
        |acc, p| *acc += p,
    )?;
    let envelope = (1.0 + z.y1 * k) * (1.0 + z.y2 * k) * (1.0 + z.y1 * z.y2 * k);
    Ok(ShellCount { count, envelope })
}

/// Majorant `lambda^{3/2} (1 + lambda^{1/2} ||C||)^{-1/2}` of the
/// spherical test function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightModel {
    lambda: f64,
}

impl WeightModel {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
        }
        Ok(WeightModel { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn weight(&self, cartan_norm: f64) -> f64 {
        self.lambda.powf(1.5) / (1.0 + self.lambda.sqrt() * cartan_norm).sqrt()
    }
}

/// Pre-trace sum with its split over the four classes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PretraceSum {
    pub total: f64,
    pub by_class: [f64; 4],
    pub counts: [u64; 4],
}

#[derive(Clone, Default)]
struct PretraceAcc {
    sums: [NeumaierSum; 4],
    counts: [u64; 4],
}

/// `sum_gamma lambda^{3/2} (1 + lambda^{1/2} ||C(z^{-1} gamma z)||)^{-1/2}`
/// over the matrices with Cartan norm at most `r`.
pub fn pretrace_weight_sum(z: &H3Point<f64>, model: &WeightModel, r: f64) -> Result<PretraceSum> {
    let acc = fold_gammas(
        z,
        r,
        PretraceAcc::default(),
        |acc, m, n| {
            let k = classify_m(&m).index();
            acc.sums[k].add(model.weight(n));
            acc.counts[k] += 1;
        },
        |acc, p| {
            for k in 0..4 {
                acc.sums[k].add(p.sums[k].value());
                acc.counts[k] += p.counts[k];
            }
        },
    )?;
    let by_class = [0, 1, 2, 3].map(|k| acc.sums[k].value());
    let mut total = NeumaierSum::default();
    for v in by_class {
        total.add(v);
    }
    Ok(PretraceSum { total: total.value(), by_class, counts: acc.counts })
}
