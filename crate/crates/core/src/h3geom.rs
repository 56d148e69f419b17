//! Points of the generalized upper half-plane and the matrices acting on
//! them.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::fmt_num;
use crate::scalar::Real;

/// `z = n(x1, x2, x3) diag(y1 y2, y1, 1)` with the unipotent part
/// `[[1, x2, x3], [0, 1, x1], [0, 0, 1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H3Point<T> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
    pub y1: T,
    pub y2: T,
}

impl<T: Real> H3Point<T> {
    pub fn new(x1: T, x2: T, x3: T, y1: T, y2: T) -> Result<Self> {
        let finite = [x1, x2, x3, y1, y2].iter().all(|v| v.is_finite());
        if !finite || !(y1 > T::zero()) || !(y2 > T::zero()) {
            return Err(Error::Domain(format!("invalid point ({x1}, {x2}, {x3}, {y1}, {y2})")));
        }
        Ok(H3Point { x1, x2, x3, y1, y2 })
    }

    pub fn origin() -> Self {
        H3Point { x1: T::zero(), x2: T::zero(), x3: T::zero(), y1: T::one(), y2: T::one() }
    }

    /// Parses `"x1,x2,x3,y1,y2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!("expected x1,x2,x3,y1,y2, got {s:?}")));
        }
        let mut v = [T::zero(); 5];
        for (slot, p) in v.iter_mut().zip(&parts) {
            let f: f64 = p.parse().map_err(|_| Error::Parse(format!("bad number {p:?} in point")))?;
            *slot = T::lit(f);
        }
        H3Point::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn to_f64(&self) -> H3Point<f64> {
        H3Point {
            x1: self.x1.as_f64(),
            x2: self.x2.as_f64(),
            x3: self.x3.as_f64(),
            y1: self.y1.as_f64(),
            y2: self.y2.as_f64(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        [self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3, self.y1 - other.y1, self.y2 - other.y2]
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T: Real> fmt::Display for H3Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = [self.x1, self.x2, self.x3, self.y1, self.y2].map(|c| fmt_num(c.as_f64()));
        write!(f, "{}", v.join(","))
    }
}

/// Real 3x3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealMatrix3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> RealMatrix3<T> {
    pub fn new(m: [[T; 3]; 3]) -> Self {
        RealMatrix3 { m }
    }

    pub fn identity() -> Self {
        let (o, l) = (T::zero(), T::one());
        RealMatrix3 { m: [[l, o, o], [o, l, o], [o, o, l]] }
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let o = T::zero();
        RealMatrix3 { m: [[a, o, o], [o, b, o], [o, o, c]] }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).fold(T::zero(), |s, k| s + self.m[i][k] * rhs.m[k][j]);
            }
        }
        RealMatrix3 { m: out }
    }

    pub fn transpose(&self) -> Self {
        let mut out = self.m;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[j][i];
            }
        }
        RealMatrix3 { m: out }
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return Err(Error::SingularMatrix);
        }
        let m = &self.m;
        let c = |a: usize, b: usize, c: usize, e: usize| m[a][b] * m[c][e] - m[a][e] * m[c][b];
        let adj = [
            [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
            [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
            [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
        ];
        Ok(RealMatrix3 { m: adj.map(|r| r.map(|v| v / d)) })
    }

    pub fn scale(&self, s: T) -> Self {
        RealMatrix3 { m: self.m.map(|r| r.map(|v| v * s)) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RealMatrix3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j] - rhs.m[i][j])) }
    }

    pub fn frobenius(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |s, v| s + *v * *v).sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.sub(rhs).m.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

/// Integer matrix of determinant `+-1`, entries labelled `a..i` row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IntMatrix3 {
    pub m: [[i64; 3]; 3],
}

impl IntMatrix3 {
    /// Checks unimodularity.
    pub fn new(m: [[i64; 3]; 3]) -> Result<Self> {
        let g = IntMatrix3 { m };
        match g.det() {
            1 | -1 => Ok(g),
            d => Err(Error::Domain(format!("determinant {d} is not +-1"))),
        }
    }

    /// Builds from entries `a..i` without the determinant check.
    pub fn from_entries(e: [i64; 9]) -> Self {
        IntMatrix3 { m: [[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]] }
    }

    pub fn entries(&self) -> [i64; 9] {
        let m = &self.m;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }

    pub fn identity() -> Self {
        IntMatrix3 { m: [[1, 0, 0], [0, 1, 0], [0, 0, 1]] }
    }

    /// Inversion in the upper-left 2x2 block.
    pub fn s12() -> Self {
        IntMatrix3 { m: [[0, -1, 0], [1, 0, 0], [0, 0, 1]] }
    }

    /// Inversion in the lower-right 2x2 block.
    pub fn s23() -> Self {
        IntMatrix3 { m: [[1, 0, 0], [0, 0, -1], [0, 1, 0]] }
    }

    /// `[[1, n2, n3], [0, 1, n1], [0, 0, 1]]`.
    pub fn unipotent(n1: i64, n2: i64, n3: i64) -> Self {
        IntMatrix3 { m: [[1, n2, n3], [0, 1, n1], [0, 0, 1]] }
    }

    pub fn det(&self) -> i128 {
        let m = self.m.map(|r| r.map(|v| v as i128));
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = [[0i64; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut s: i64 = 0;
                for k in 0..3 {
                    s = self.m[i][k]
                        .checked_mul(rhs.m[k][j])
                        .and_then(|p| s.checked_add(p))
                        .ok_or_else(|| Error::Overflow("integer matrix product".into()))?;
                }
                *cell = s;
            }
        }
        Ok(IntMatrix3 { m: out })
    }

    pub fn neg(&self) -> Self {
        IntMatrix3 { m: self.m.map(|r| r.map(|v| -v)) }
    }

    /// True when the first nonzero entry in reading order is positive.
    pub fn is_canonical(&self) -> bool {
        self.entries().iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
    }

    /// The representative of `{g, -g}` with positive leading entry.
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            *self
        } else {
            self.neg()
        }
    }

    pub fn to_real<T: Real>(&self) -> RealMatrix3<T> {
        RealMatrix3 { m: self.m.map(|r| r.map(|v| T::lit(v as f64))) }
    }

    pub fn a(&self) -> i64 {
        self.m[0][0]
    }
    pub fn b(&self) -> i64 {
        self.m[0][1]
    }
    pub fn c(&self) -> i64 {
        self.m[0][2]
    }
    pub fn d(&self) -> i64 {
        self.m[1][0]
    }
    pub fn e(&self) -> i64 {
        self.m[1][1]
    }
    pub fn f(&self) -> i64 {
        self.m[1][2]
    }
    pub fn g(&self) -> i64 {
        self.m[2][0]
    }
    pub fn h(&self) -> i64 {
        self.m[2][1]
    }
    pub fn i(&self) -> i64 {
        self.m[2][2]
    }
}

impl fmt::Display for IntMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.entries().map(|v| v.to_string());
        write!(f, "{}", e.join(" "))
    }
}

pub fn to_matrix<T: Real>(z: &H3Point<T>) -> RealMatrix3<T> {
    let (o, l) = (T::zero(), T::one());
    RealMatrix3 { m: [[z.y1 * z.y2, z.x2 * z.y1, z.x3], [o, z.y1, z.x1], [o, o, l]] }
}

/// `m = scale * to_matrix(point) * k` with `k` orthogonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Iwasawa<T> {
    pub point: H3Point<T>,
    pub scale: T,
    pub k: RealMatrix3<T>,
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn axpy<T: Real>(a: &[T; 3], s: T, b: &[T; 3]) -> [T; 3] {
    [a[0] - s * b[0], a[1] - s * b[1], a[2] - s * b[2]]
}

/// Bottom-up Gram-Schmidt on the rows of `m`.
pub fn iwasawa<T: Real>(m: &RealMatrix3<T>) -> Result<Iwasawa<T>> {
    let d = m.det();
    if d == T::zero() || !d.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let [r1, r2, r3] = m.m;
    let s = dot(&r3, &r3).sqrt();
    let k3 = r3.map(|v| v / s);
    let r2 = r2.map(|v| v / s);
    let r1 = r1.map(|v| v / s);
    let x1 = dot(&r2, &k3);
    let v = axpy(&r2, x1, &k3);
    let y1 = dot(&v, &v).sqrt();
    let k2 = v.map(|c| c / y1);
    let x3 = dot(&r1, &k3);
    let x2y1 = dot(&r1, &k2);
    let w = axpy(&axpy(&r1, x3, &k3), x2y1, &k2);
    let y1y2 = dot(&w, &w).sqrt();
    let k1 = w.map(|c| c / y1y2);
    if !(y1 > T::zero() && y1y2 > T::zero()) {
        return Err(Error::SingularMatrix);
    }
    let point = H3Point::new(x1, x2y1 / y1, x3, y1, y1y2 / y1)?;
    Ok(Iwasawa { point, scale: s, k: RealMatrix3 { m: [k1, k2, k3] } })
}

/// The point `Iwasawa(gamma z)`.
pub fn act<T: Real>(gamma: &IntMatrix3, z: &H3Point<T>) -> Result<H3Point<T>> {
    Ok(iwasawa(&gamma.to_real::<T>().mul(&to_matrix(z)))?.point)
}

/// `(y1 |c z2 + d|, y2 |c z2 + d|^{-2})` with `z2 = x2 + i y2`.
pub fn gl2_block_heights<T: Real>(c: i64, d: i64, z: &H3Point<T>) -> Result<(T, T)> {
    if c == 0 && d == 0 {
        return Err(Error::InvalidPair(c, d));
    }
    let (cr, dr) = (T::lit(c as f64), T::lit(d as f64));
    let re = cr * z.x2 + dr;
    let im = cr * z.y2;
    let r = re.hypot(im);
    Ok((z.y1 * r, z.y2 / (r * r)))
}

/// `(-x2, -x1, x1 x2 - x3, y2, y1)`, the Iwasawa coordinates of
/// `w (z^{-1})^t w` with `w` the long Weyl element.
pub fn dual_point<T: Real>(z: &H3Point<T>) -> H3Point<T> {
    H3Point { x1: -z.x2, x2: -z.x1, x3: z.x1 * z.x2 - z.x3, y1: z.y2, y2: z.y1 }
}

/// Threshold `sqrt(3)/2` of the Siegel set.
pub fn siegel_height<T: Real>() -> T {
    T::lit(3.0).sqrt() / T::lit(2.0)
}

fn floor_i64<T: Real>(v: T) -> Result<i64> {
    v.floor().to_i64().ok_or_else(|| Error::Domain(format!("coordinate {v} too large to reduce")))
}

const REDUCTION_CAP: usize = 10_000;

/// Moves `z` into the Siegel set `|x_i| <= 1/2`, `y1, y2 >= sqrt(3)/2`.
///
/// Alternates integer translations with the two block inversions. Ties at
/// `x = +-1/2` resolve towards `-1/2`.
pub fn siegel_reduce<T: Real>(z: &H3Point<T>) -> Result<(H3Point<T>, IntMatrix3)> {
    let half = T::lit(0.5);
    let thr = siegel_height::<T>() * (T::one() - T::lit(1e-12).max(T::epsilon() * T::lit(8.0)));
    let mut cur = *z;
    let mut gamma = IntMatrix3::identity();
    for _ in 0..REDUCTION_CAP {
        let n1 = -floor_i64(cur.x1 + half)?;
        let n2 = -floor_i64(cur.x2 + half)?;
        let x1 = cur.x1 + T::lit(n1 as f64);
        let x3 = cur.x3 + T::lit(n2 as f64) * cur.x1;
        let n3 = -floor_i64(x3 + half)?;
        let step = IntMatrix3::unipotent(n1, n2, n3);
        if step != IntMatrix3::identity() {
            cur = H3Point { x1, x2: cur.x2 + T::lit(n2 as f64), x3: x3 + T::lit(n3 as f64), ..cur };
            gamma = step.checked_mul(&gamma)?;
        }
        let inv = if cur.y2 < thr {
            IntMatrix3::s12()
        } else if cur.y1 < thr {
            IntMatrix3::s23()
        } else {
            // recompute from the accumulated matrix to shed rounding drift
            let out = act(&gamma, z)?;
            return Ok((out, gamma));
        };
        cur = act(&inv, &cur)?;
        gamma = inv.checked_mul(&gamma)?;
    }
    Err(Error::IterationLimit(REDUCTION_CAP))
}

/// `z^{-1} gamma z` from the explicit entry formulas.
pub fn sandwich<T: Real>(z: &H3Point<T>, gamma: &IntMatrix3) -> RealMatrix3<T> {
    let [a, b, c, d, e, f, g, h, i] = gamma.entries().map(|v| T::lit(v as f64));
    let H3Point { x1, x2, x3, y1, y2 } = *z;
    let m11 = a - d * x2 + g * x1 * x2 - g * x3;
    let m12 = (b + (a - e + h * x1 - d * x2 + g * x1 * x2) * x2 - (h + g * x2) * x3) / y2;
    let m13 = (c + b * x1 - f * x2 + (-e + i + h * x1) * x1 * x2 + a * x3
        - (i + h * x1 + d * x2 - g * x1 * x2) * x3
        - g * x3 * x3)
        / (y1 * y2);
    let m21 = (d - g * x1) * y2;
    let m22 = e + d * x2 - (h + g * x2) * x1;
    let m23 = (f + e * x1 + d * x3 - (i + h * x1 + g * x3) * x1) / y1;
    let m31 = g * y1 * y2;
    let m32 = (h + g * x2) * y1;
    let m33 = i + h * x1 + g * x3;
    RealMatrix3 { m: [[m11, m12, m13], [m21, m22, m23], [m31, m32, m33]] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x1: f64, x2: f64, x3: f64, y1: f64, y2: f64) -> H3Point<f64> {
        H3Point::new(x1, x2, x3, y1, y2).unwrap()
    }

    #[test]
    fn matrix_form() {
        assert_eq!(to_matrix(&H3Point::<f64>::origin()), RealMatrix3::identity());
        let m = to_matrix(&pt(0.3, 0.0, 0.0, 1.0, 1.0));
        assert_eq!(m.m[1][2], 0.3);
    }

    #[test]
    fn iwasawa_examples() {
        let r = iwasawa(&RealMatrix3::<f64>::identity()).unwrap();
        assert_eq!(r.point, H3Point::origin());
        assert_eq!(r.scale, 1.0);
        let r = iwasawa(&RealMatrix3::diag(4.0, 2.0, 1.0)).unwrap();
        assert_eq!(r.point, pt(0.0, 0.0, 0.0, 2.0, 2.0));
        assert!(matches!(iwasawa(&RealMatrix3::diag(1.0, 0.0, 1.0)), Err(Error::SingularMatrix)));
    }

    #[test]
    fn dual_examples() {
        let z = pt(0.1, -0.2, 0.3, 1.5, 0.7);
        assert_eq!(dual_point(&dual_point(&z)), z);
        assert_eq!(dual_point(&pt(0.0, 0.0, 0.0, 2.0, 3.0)), pt(0.0, 0.0, 0.0, 3.0, 2.0));
    }

    #[test]
    fn block_heights() {
        let z = pt(0.2, 0.0, 0.1, 1.3, 1.0);
        assert_eq!(gl2_block_heights(0, 1, &z).unwrap(), (1.3, 1.0));
        let (a, b) = gl2_block_heights(1, 0, &z).unwrap();
        assert!((a - 1.3).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        assert!(matches!(gl2_block_heights(0, 0, &z), Err(Error::InvalidPair(0, 0))));
    }

    #[test]
    fn sandwich_identity() {
        let z = pt(0.2, -0.4, 0.1, 1.3, 2.0);
        let m = sandwich(&z, &IntMatrix3::identity());
        assert!(m.max_abs_diff(&RealMatrix3::identity()) < 1e-15);
    }

    #[test]
    fn reduce_fixed_point() {
        let z = pt(0.1, -0.3, 0.2, 1.2, 1.5);
        let (r, g) = siegel_reduce(&z).unwrap();
        assert_eq!(g, IntMatrix3::identity());
        assert_eq!(r, z);
    }

    #[test]
    fn reduce_low_point() {
        let (r, g) = siegel_reduce(&pt(0.0, 0.0, 0.0, 0.1, 0.1)).unwrap();
        let s = siegel_height::<f64>();
        assert!(r.y1 >= s - 1e-9 && r.y2 >= s - 1e-9);
        assert!(r.x1.abs() <= 0.5 + 1e-9 && r.x2.abs() <= 0.5 + 1e-9 && r.x3.abs() <= 0.5 + 1e-9);
        assert_eq!(g.det().abs(), 1);
    }

    #[test]
    fn canonical_sign() {
        let g = IntMatrix3::from_entries([0, -1, 0, 1, 0, 0, 0, 0, 1]);
        assert!(!g.is_canonical());
        assert_eq!(g.canonical().entries(), [0, 1, 0, -1, 0, 0, 0, 0, -1]);
        assert!(IntMatrix3::new([[1, 1, 0], [0, 2, 0], [0, 0, 1]]).is_err());
    }

    #[test]
    fn parse_and_print() {
        let z = H3Point::<f64>::parse("0.1, -0.25,0,1.5,2").unwrap();
        assert_eq!(z, pt(0.1, -0.25, 0.0, 1.5, 2.0));
        assert_eq!(z.to_string(), "0.1,-0.25,0,1.5,2");
        assert!(H3Point::<f64>::parse("1,2,3").is_err());
        assert!(H3Point::<f64>::parse("0,0,0,-1,1").is_err());
    }
}
