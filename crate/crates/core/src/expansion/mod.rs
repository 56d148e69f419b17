//! Fourier-Whittaker expansion, coefficient tables and bound envelopes.

mod coeffs;
mod envelope;
mod fourier;

pub use coeffs::{primes_up_to, rankin_selberg_partial, schur3, CoefficientTable, Provenance};
pub use envelope::{
    fitted_slope, global_envelope, theorem2_envelope, theorem3_envelope, EnvelopeParams, GlobalEnvelope,
};
pub use fourier::{
    analytic_part_F, analytic_part_terms, bezout, fourier_whittaker_sum, fourier_whittaker_terms, FourierSum,
    Truncation,
};
