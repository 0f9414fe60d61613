//! Radial profiles and the Hankel-type transform that realizes the Dunkl
//! transform on radial functions.
//!
//! Convention: for a radial f(x) = F(|x|),
//!
//! ```text
//! H_v(F)(r) = r^(-v) * integral_0^inf F(s) J_v(r s) s^(v+1) ds,   v = gamma + n/2 - 1,
//! ```
//!
//! and the radial weighted measure is r^(n + 2 gamma - 1) dr. With this
//! choice the Gaussian e^(-r^2/2) is a fixed point, H_v is an involution and
//! the Dunkl normalization constant is 1.

mod io;
mod profile;
mod spline;
mod transform;

pub use io::{read_profile_csv, read_profile_file, write_profile_csv, write_profile_file};
pub use profile::{fit_power_tail, PowerTail, PowerTerm, RadialProfile};
pub use transform::{
    apply_multiplier, apply_multiplier_with, eval_at_origin, eval_at_origin_fn, hankel,
    hankel_fn, hankel_with, integrate_against_power, normalized_weighted_norm, sample_profile,
    transform_fn, weighted_norm,
};

pub(crate) use profile::ols;
pub(crate) use spline::LogSpline;
pub(crate) use transform::{hankel_on, multiply_spectrum};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Dimension n and multiplicity weight gamma of the Dunkl setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DunklParams {
    pub n: u32,
    pub gamma: f64,
}

impl DunklParams {
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be at least 1".into()));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "multiplicity weight must be finite and >= 0, got {gamma}"
            )));
        }
        Ok(DunklParams { n, gamma })
    }

    /// Hankel order v = gamma + n/2 - 1.
    pub fn v(&self) -> f64 {
        self.gamma + self.n as f64 / 2.0 - 1.0
    }

    /// Homogeneity degree n + 2 gamma of the weight.
    pub fn homogeneity(&self) -> f64 {
        self.n as f64 + 2.0 * self.gamma
    }

    /// Dunkl params whose Hankel order is `v` (with n = 1).
    pub fn from_order(v: f64) -> Result<Self> {
        Self::new(1, v + 0.5)
    }
}

/// A log-spaced radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_min: 1e-4,
            r_max: 50.0,
            count: 2048,
        }
    }
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_min > 0.0) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs 0 < r_min < r_max < inf, got ({r_min}, {r_max})"
            )));
        }
        if count < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 16 points, got {count}"
            )));
        }
        Ok(GridSpec {
            r_min,
            r_max,
            count,
        })
    }

    pub fn radii(&self) -> Vec<f64> {
        let n = self.count;
        let ratio = (self.r_max / self.r_min).ln();
        let mut out: Vec<f64> = (0..n)
            .map(|i| self.r_min * (ratio * i as f64 / (n - 1) as f64).exp())
            .collect();
        out[0] = self.r_min;
        out[n - 1] = self.r_max;
        out
    }
}

/// Accuracy controls for a transform evaluation at a single radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_evals: 200_000,
        }
    }
}
