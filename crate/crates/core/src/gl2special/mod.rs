//! Bessel functions of imaginary order, the normalized GL(2) Whittaker
//! function and the integrals of its square.

mod bessel;
mod gamma;
mod kernel;
mod whittaker2;

pub(crate) use bessel::phi_hat;
pub use bessel::{k_bessel_exp_scaled, k_bessel_imag_scaled, k_bessel_with_path, BesselEvalConfig, BesselPath};
pub use gamma::{gamma_half_modulus, ln_gamma};
pub use kernel::BesselKernel;
pub use whittaker2::{gl2_whittaker, whittaker_sq_log_integral, whittaker_sq_tail_integral, Gl2Whittaker};
