//! Closed-form bound envelopes and their crossover.

use serde::Serialize;

use crate::scalar::Real;

/// Exponent `eps`, implied constant `c` and decay exponent `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeParams<T> {
    pub epsilon: T,
    pub c: T,
    pub a: T,
}

impl<T: Real> EnvelopeParams<T> {
    pub fn new(epsilon: T, c: T, a: T) -> crate::Result<Self> {
        if !(epsilon > T::zero() && c > T::zero() && a > T::zero()) {
            return Err(crate::Error::Domain("envelope parameters must be positive".into()));
        }
        Ok(EnvelopeParams { epsilon, c, a })
    }
}

/// `C min(y1, y2) (lambda^{1+eps} / (y1 y2) + lambda^{3/2+eps} / (y1 y2)^2)`.
pub fn theorem2_envelope<T: Real>(lambda: T, y1: T, y2: T, p: &EnvelopeParams<T>) -> T {
    let prod = y1 * y2;
    let e = p.epsilon;
    p.c * y1.min(y2) * (lambda.powf(T::one() + e) / prod + lambda.powf(T::lit(1.5) + e) / (prod * prod))
}

/// `C (lambda^{3/4} + lambda^{5/8} y1 y2)`.
pub fn theorem3_envelope<T: Real>(lambda: T, y1: T, y2: T, p: &EnvelopeParams<T>) -> T {
    p.c * (lambda.powf(T::lit(0.75)) + lambda.powf(T::lit(0.625)) * y1 * y2)
}

/// The worst case over heights and where it is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GlobalEnvelope<T> {
    pub value: T,
    /// The product `y1 y2` at the maximum.
    pub maximizer: T,
}

/// `max_{3/4 <= P <= lambda} min(E2(P), E3(P) lambda^eps)` with
/// `y1 = y2 = sqrt(P)`. `E2` decreases and `E3` increases in `P`, so the
/// maximum sits at their crossing or at an end of the range.
pub fn global_envelope<T: Real>(lambda: T, p: &EnvelopeParams<T>) -> GlobalEnvelope<T> {
    let f2 = |pp: T| theorem2_envelope(lambda, pp.sqrt(), pp.sqrt(), p);
    let f3 = |pp: T| theorem3_envelope(lambda, pp.sqrt(), pp.sqrt(), p) * lambda.powf(p.epsilon);
    let lo = T::lit(0.75);
    let hi = lambda.max(lo);
    if f2(lo) <= f3(lo) {
        return GlobalEnvelope { value: f2(lo), maximizer: lo };
    }
    if f2(hi) >= f3(hi) {
        return GlobalEnvelope { value: f3(hi), maximizer: hi };
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let m = (a + b) / T::lit(2.0);
        if f2(m.exp()) > f3(m.exp()) {
            a = m;
        } else {
            b = m;
        }
    }
    let pm = ((a + b) / T::lit(2.0)).exp();
    GlobalEnvelope { value: f2(pm).min(f3(pm)), maximizer: pm }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fitted_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::lit(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |s, &v| s + v) / n;
    let my = ys.iter().fold(T::zero(), |s, &v| s + v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    sxy / sxx
}
