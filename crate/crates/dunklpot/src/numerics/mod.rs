//! Special functions and quadrature engines.

mod bessel;
mod gamma;
mod oscillatory;
mod quadrature;

pub use bessel::{bessel_j, BesselJ};
pub use gamma::{gamma, ln_gamma, recip_gamma};
pub use oscillatory::{
    integrate_bessel_tail, integrate_bessel_tail_with, iterated_aitken, lambda_weighted_integral,
    OscillatoryOptions,
};
pub(crate) use oscillatory::integrate_smooth;
pub use quadrature::{
    integrate_finite, integrate_finite_with, integrate_from_zero, integrate_to_infinity,
    QuadOptions, QuadratureResult,
};

pub(crate) use gamma::sin_pi;
