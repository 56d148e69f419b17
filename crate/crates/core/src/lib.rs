//! Numerical laboratory for the sup-norm problem of GL(3) Maass forms.
//!
//! The crate evaluates the GL(2) and GL(3) Whittaker functions, implements
//! the geometry of the generalized upper half-plane, enumerates the integer
//! matrices entering the pre-trace inequality, and evaluates the envelope
//! functions that bound a cusp form in the Siegel set.
//!
//! Geometry, spectral parameters and envelopes are generic over
//! [`Real`]; the special-function kernels work in `f64` and switch to
//! multiprecision arithmetic where cancellation demands it.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartan;
pub mod counting;
pub mod error;
pub mod expansion;
pub mod gl2special;
pub mod h3geom;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod scaled;
pub mod spectral;
pub mod suites;
pub mod whittaker3;

pub use error::{Error, Result};
pub use scalar::Real;
pub use scaled::ScaledReal;

pub type SpectralTripleF64 = spectral::SpectralTriple<f64>;
pub type SpectralTripleF32 = spectral::SpectralTriple<f32>;
pub type H3PointF64 = h3geom::H3Point<f64>;
pub type H3PointF32 = h3geom::H3Point<f32>;
pub type RealMatrix3F64 = h3geom::RealMatrix3<f64>;
pub type RealMatrix3F32 = h3geom::RealMatrix3<f32>;
pub type CartanVectorF64 = cartan::CartanVector<f64>;
pub type CartanVectorF32 = cartan::CartanVector<f32>;
pub type EnvelopeParamsF64 = expansion::EnvelopeParams<f64>;
