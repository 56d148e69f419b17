//! Spectral and Langlands parameters of a tempered GL(3) form.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tempered spectral parameters `(nu0, nu1, nu2) = i (t0, t1, t2)` with
/// `t0 = t1 + t2`. Only `t1` and `t2` are stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralTriple<T> {
    t1: T,
    t2: T,
}

impl<T: Real> SpectralTriple<T> {
    pub fn new(t1: T, t2: T) -> Result<Self> {
        if !(t1.is_finite() && t2.is_finite()) || t1 < T::zero() || t2 < T::zero() {
            return Err(Error::Domain(format!("spectral parameters must be finite and nonnegative, got ({t1}, {t2})")));
        }
        Ok(SpectralTriple { t1, t2 })
    }

    pub fn t0(&self) -> T {
        self.t1 + self.t2
    }

    pub fn t1(&self) -> T {
        self.t1
    }

    pub fn t2(&self) -> T {
        self.t2
    }

    /// The same form's parameters with `nu1` and `nu2` exchanged.
    pub fn swapped(&self) -> Self {
        SpectralTriple { t1: self.t2, t2: self.t1 }
    }

    /// `(nu0, nu1, nu2)` as complex numbers.
    pub fn nu(&self) -> [Complex<T>; 3] {
        [Complex::new(T::zero(), self.t0()), Complex::new(T::zero(), self.t1), Complex::new(T::zero(), self.t2)]
    }
}

/// Langlands parameters `(mu1, mu2, mu3)` summing to zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LanglandsTriple<T> {
    pub m1: Complex<T>,
    pub m2: Complex<T>,
    pub m3: Complex<T>,
}

impl<T: Real> LanglandsTriple<T> {
    pub fn new(m1: Complex<T>, m2: Complex<T>, m3: Complex<T>) -> Result<Self> {
        let s = m1 + m2 + m3;
        let scale = T::one().max(m1.norm()).max(m2.norm()).max(m3.norm());
        if s.norm() > T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) * scale {
            return Err(Error::Domain("Langlands parameters must sum to zero".into()));
        }
        Ok(LanglandsTriple { m1, m2, m3 })
    }

    /// `1 - (mu1^2 + mu2^2 + mu3^2) / 2`, real part.
    pub fn laplace_eigenvalue(&self) -> T {
        let q = self.m1 * self.m1 + self.m2 * self.m2 + self.m3 * self.m3;
        T::one() - q.re / T::lit(2.0)
    }
}

/// A signed element `(nu0, nu1, nu2)` of a Weyl orbit; may leave the
/// nonnegative cone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignedTriple<T> {
    pub nu0: Complex<T>,
    pub nu1: Complex<T>,
    pub nu2: Complex<T>,
}

impl<T: Real> SignedTriple<T> {
    /// Langlands triple `(nu1 + 2 nu2, nu1 - nu2, -2 nu1 - nu2)`.
    pub fn langlands(&self) -> LanglandsTriple<T> {
        let two = T::lit(2.0);
        LanglandsTriple { m1: self.nu1 + self.nu2 * two, m2: self.nu1 - self.nu2, m3: -(self.nu1 * two) - self.nu2 }
    }

    /// The six-element orbit listed in the same order as for a base triple.
    pub fn orbit(&self) -> [SignedTriple<T>; 6] {
        let (n0, n1, n2) = (self.nu0, self.nu1, self.nu2);
        let st = |a, b, c| SignedTriple { nu0: a, nu1: b, nu2: c };
        [st(n0, n1, n2), st(n2, -n1, n0), st(-n1, n2, -n0), st(-n0, -n2, -n1), st(-n2, -n0, n1), st(n1, n0, -n2)]
    }

    /// `max(2, |nu0|, |nu1|, |nu2|)`.
    pub fn t_zero(&self) -> T {
        T::lit(2.0).max(self.nu0.norm()).max(self.nu1.norm()).max(self.nu2.norm())
    }
}

pub fn langlands_from_spectral<T: Real>(nu: &SpectralTriple<T>) -> LanglandsTriple<T> {
    as_signed(nu).langlands()
}

/// `1 + 3 t1^2 + 3 t1 t2 + 3 t2^2`.
pub fn laplace_eigenvalue<T: Real>(nu: &SpectralTriple<T>) -> T {
    let three = T::lit(3.0);
    T::one() + three * (nu.t1 * nu.t1 + nu.t1 * nu.t2 + nu.t2 * nu.t2)
}

pub fn weyl_orbit<T: Real>(nu: &SpectralTriple<T>) -> [SignedTriple<T>; 6] {
    as_signed(nu).orbit()
}

/// `max(2, t0)`.
pub fn t_zero<T: Real>(nu: &SpectralTriple<T>) -> T {
    T::lit(2.0).max(nu.t0())
}

fn as_signed<T: Real>(nu: &SpectralTriple<T>) -> SignedTriple<T> {
    let [nu0, nu1, nu2] = nu.nu();
    SignedTriple { nu0, nu1, nu2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(a: f64, b: f64) -> SpectralTriple<f64> {
        SpectralTriple::new(a, b).unwrap()
    }

    #[test]
    fn langlands_examples() {
        let l = langlands_from_spectral(&st(2.0, 5.0));
        assert_eq!((l.m1.im, l.m2.im, l.m3.im), (12.0, -3.0, -9.0));
        let l = langlands_from_spectral(&st(1.0, 1.0));
        assert_eq!((l.m1.im, l.m2.im, l.m3.im), (3.0, 0.0, -3.0));
        let l = langlands_from_spectral(&st(0.0, 0.0));
        assert_eq!(l.m1.norm() + l.m2.norm() + l.m3.norm(), 0.0);
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(laplace_eigenvalue(&st(0.0, 0.0)), 1.0);
        assert_eq!(laplace_eigenvalue(&st(2.0, 2.0)), 37.0);
        assert_eq!(laplace_eigenvalue(&st(1.0, 0.0)), 4.0);
    }

    #[test]
    fn orbit_second_element() {
        let o = weyl_orbit(&st(1.0, 2.0));
        assert_eq!((o[1].nu0.im, o[1].nu1.im, o[1].nu2.im), (2.0, -1.0, 3.0));
        for e in &o {
            assert!((e.nu1 + e.nu2 - e.nu0).norm() < 1e-15);
        }
    }

    #[test]
    fn t_zero_examples() {
        assert_eq!(t_zero(&st(0.0, 0.0)), 2.0);
        assert_eq!(t_zero(&st(3.0, 4.0)), 7.0);
    }

    #[test]
    fn rejects_negative() {
        assert!(SpectralTriple::new(-1.0, 0.0).is_err());
        assert!(SpectralTriple::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn generic_f32() {
        let nu = SpectralTriple::<f32>::new(2.0, 2.0).unwrap();
        assert_eq!(laplace_eigenvalue(&nu), 37.0f32);
        assert_eq!(t_zero(&nu), 4.0f32);
    }
}
