//! Real numbers with an out-of-band binary exponent.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use serde::Serialize;

/// `mantissa * 2^exp2` with `|mantissa|` in `[1, 2)`, or canonical zero.
///
/// Used wherever a quantity like `exp(-pi t / 2)` has to survive long
/// enough to be cancelled against its reciprocal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledReal {
    mantissa: f64,
    exp2: i64,
}

const TWO_52: f64 = 4503599627370496.0;

/// Split a finite nonzero float into `m * 2^e` with `|m|` in `[1, 2)`.
fn frexp(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal: rescale into the normal range first
        let (m, e) = frexp(x * TWO_52);
        return (m, e - 52);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, raw - 1023)
}

/// `2^e` for `e` within the normal exponent range.
fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// `m * 2^e` computed without spurious intermediate overflow.
pub(crate) fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1023 {
        m *= pow2(1023);
        e -= 1023;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1022 {
        m *= pow2(-1022);
        e += 1022;
        if m == 0.0 {
            return m;
        }
    }
    m * pow2(e)
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal { mantissa: 0.0, exp2: 0 };
    pub const ONE: ScaledReal = ScaledReal { mantissa: 1.0, exp2: 0 };

    /// Normalizes `m * 2^e`. Non-finite mantissas are kept as given.
    pub fn new(m: f64, e: i64) -> ScaledReal {
        if m == 0.0 {
            return ScaledReal::ZERO;
        }
        if !m.is_finite() {
            return ScaledReal { mantissa: m, exp2: 0 };
        }
        let (mm, me) = frexp(m);
        ScaledReal { mantissa: mm, exp2: e + me }
    }

    pub fn from_f64(x: f64) -> ScaledReal {
        ScaledReal::new(x, 0)
    }

    /// `e^ln` for any finite `ln`, including values far outside f64 range.
    pub fn exp(ln: f64) -> ScaledReal {
        let y = ln / std::f64::consts::LN_2;
        let e = y.floor();
        let frac = ln - e * std::f64::consts::LN_2;
        ScaledReal::new(frac.exp(), e as i64)
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.is_finite()
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(self) -> ScaledReal {
        ScaledReal { mantissa: self.mantissa.abs(), exp2: self.exp2 }
    }

    /// Natural log of the absolute value; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.mantissa == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.mantissa.abs().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// Plain float value; underflows to zero and overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            return self.mantissa;
        }
        ldexp(self.mantissa, self.exp2)
    }

    /// Multiplies by `2^k`.
    pub fn scale2(self, k: i64) -> ScaledReal {
        if self.is_zero() {
            self
        } else {
            ScaledReal { mantissa: self.mantissa, exp2: self.exp2 + k }
        }
    }

    pub fn sqrt(self) -> ScaledReal {
        assert!(self.mantissa >= 0.0, "sqrt of negative ScaledReal");
        if self.is_zero() {
            return self;
        }
        let (m, e) = if self.exp2 % 2 == 0 { (self.mantissa, self.exp2) } else { (self.mantissa * 2.0, self.exp2 - 1) };
        ScaledReal::new(m.sqrt(), e / 2)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: ScaledReal) -> ScaledReal {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp2 >= other.exp2 { (self, other) } else { (other, self) };
        let shift = lo.exp2 - hi.exp2;
        if shift < -1100 {
            return hi;
        }
        ScaledReal::new(hi.mantissa + ldexp(lo.mantissa, shift), hi.exp2)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: ScaledReal) -> ScaledReal {
        self.add(-other)
    }

    /// Magnitude comparison.
    pub fn cmp_abs(&self, other: &ScaledReal) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exp2.cmp(&other.exp2).then(self.mantissa.abs().total_cmp(&other.mantissa.abs())),
        }
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: ScaledReal) -> ScaledReal {
        ScaledReal::new(self.mantissa * rhs.mantissa, self.exp2 + rhs.exp2)
    }
}

impl Mul<f64> for ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: f64) -> ScaledReal {
        ScaledReal::new(self.mantissa * rhs, self.exp2)
    }
}

impl Div for ScaledReal {
    type Output = ScaledReal;
    fn div(self, rhs: ScaledReal) -> ScaledReal {
        ScaledReal::new(self.mantissa / rhs.mantissa, self.exp2 - rhs.exp2)
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> ScaledReal {
        ScaledReal { mantissa: -self.mantissa, exp2: self.exp2 }
    }
}

impl From<f64> for ScaledReal {
    fn from(x: f64) -> Self {
        ScaledReal::from_f64(x)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() || !self.is_finite() {
            return write!(f, "{}", self.mantissa);
        }
        // decimal mantissa/exponent without going through f64 range
        let l10 = self.ln_abs() / std::f64::consts::LN_10;
        let e10 = l10.floor();
        let m10 = 10f64.powf(l10 - e10) * self.mantissa.signum();
        write!(f, "{m10:.15}e{e10}")
    }
}
