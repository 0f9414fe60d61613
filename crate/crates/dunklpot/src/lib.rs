//! Radial Dunkl-type harmonic analysis at desk scale.
//!
//! On radial functions the Dunkl transform with multiplicity weight `gamma` in
//! dimension `n` reduces to a Hankel-type transform of order
//! `v = gamma + n/2 - 1`. This crate builds on that reduction:
//!
//! * [`numerics`]: gamma, Bessel J, adaptive and oscillatory quadrature;
//! * [`radial_transform`]: sampled radial profiles and the transform itself;
//! * [`semigroup`]: the beta-stable semigroup kernels and operators;
//! * [`potentials`]: Riesz and bi-parametric (Bessel, Flett) potentials;
//! * [`wavelet`]: finite atomic wavelet measures and their constants;
//! * [`inversion`]: truncated hypersingular inverses of the potentials;
//! * [`rates`]: smoothness moduli and convergence-rate experiments;
//! * [`cli`]: the `dunklpot` command-line front end.

pub mod cli;
pub mod error;
pub mod inversion;
pub mod numerics;
pub mod potentials;
pub mod radial_transform;
pub mod rates;
pub mod semigroup;
pub mod wavelet;

pub use error::{Error, Result};
