//! The beta-stable semigroup: kernels W^(beta,t) and the operators e^(-t |xi|^beta).
//!
//! In the radial picture the kernel is the transform of e^(-t s^beta). It is
//! Gaussian for beta = 2 and the Poisson kernel for beta = 1; for other beta
//! it is computed by oscillatory quadrature near the origin and by its
//! large-r expansion
//!
//! ```text
//! W(r) ~ sum_{k>=1} (-t)^k / k! * 2^(beta k + v + 1) Gamma(v + 1 + beta k/2) / Gamma(-beta k/2) * r^(-beta k - 2v - 2)
//! ```
//!
//! further out. The expansion converges for beta < 1, is asymptotic for
//! beta > 1 and vanishes identically for even integer beta.

use rayon::prelude::*;
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::numerics::{
    gamma, lambda_weighted_integral, ln_gamma, sin_pi, BesselJ, OscillatoryOptions,
};
use crate::radial_transform::{
    apply_multiplier_with, ols, DunklParams, GridSpec, PowerTail, PowerTerm, RadialProfile,
    TransformOptions,
};

/// Stability index beta, time t and the Dunkl setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupSpec {
    pub beta: f64,
    pub t: f64,
    pub params: DunklParams,
}

impl SemigroupSpec {
    pub fn new(beta: f64, t: f64, params: DunklParams) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be > 0, got {beta}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("t must be > 0, got {t}")));
        }
        Ok(SemigroupSpec { beta, t, params })
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.beta, t, self.params)
    }

    /// The spectral symbol e^(-t s^beta).
    pub fn symbol(&self, s: f64) -> f64 {
        (-self.t * s.powf(self.beta)).exp()
    }

    fn is_even_integer(&self) -> bool {
        self.beta.fract() == 0.0 && (self.beta as u64) % 2 == 0
    }
}

/// Closed-form kernel for beta = 2 (heat) and beta = 1 (Poisson).
pub fn kernel_closed_form(spec: &SemigroupSpec, r: f64) -> Result<f64> {
    let v = spec.params.v();
    let t = spec.t;
    if spec.beta == 2.0 {
        Ok((2.0 * t).powf(-(v + 1.0)) * (-r * r / (4.0 * t)).exp())
    } else if spec.beta == 1.0 {
        let c = 2f64.powf(v + 1.0) / PI.sqrt() * gamma(v + 1.5)?;
        Ok(c * t * (t * t + r * r).powf(-(v + 1.5)))
    } else {
        Err(Error::UnsupportedBeta(spec.beta))
    }
}

/// W(0) = 2^(-v) Gamma((2v+2)/beta) / (Gamma(v+1) beta t^((2v+2)/beta)).
pub fn kernel_at_origin(spec: &SemigroupSpec) -> Result<f64> {
    let v = spec.params.v();
    let a = (2.0 * v + 2.0) / spec.beta;
    let l0 = BesselJ::new(v)?.lambda_at_zero();
    Ok(l0 * gamma(a)? / (spec.beta * spec.t.powf(a)))
}

/// Coefficient of r^(-beta k - 2v - 2) in the large-r expansion.
fn series_coefficient(spec: &SemigroupSpec, k: u32) -> f64 {
    let v = spec.params.v();
    let x = spec.beta * k as f64 / 2.0;
    let s = sin_pi(x);
    if s == 0.0 {
        return 0.0;
    }
    // 1/Gamma(-x) = -sin(pi x) Gamma(1+x) / pi.
    let lg = |z: f64| ln_gamma(z).expect("positive argument");
    let ln_mag = k as f64 * spec.t.ln() - lg(k as f64 + 1.0)
        + (2.0 * x + v + 1.0) * LN_2
        + lg(v + 1.0 + x)
        + lg(1.0 + x)
        - PI.ln();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 } * -s.signum();
    sign * s.abs() * ln_mag.exp()
}

fn series_exponent(spec: &SemigroupSpec, k: u32) -> f64 {
    -spec.beta * k as f64 - 2.0 * spec.params.v() - 2.0
}

/// Large-r expansion of the kernel at r, when it can be summed to full accuracy.
///
/// Returns `None` when the terms stop decreasing before reaching double
/// precision, or when cancellation between terms would cost accuracy.
pub fn kernel_series(spec: &SemigroupSpec, r: f64) -> Option<f64> {
    if spec.is_even_integer() || !(r > 0.0) {
        return None;
    }
    let mut sum = 0.0;
    let mut biggest: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..400 {
        let c = series_coefficient(spec, k);
        if c == 0.0 {
            continue;
        }
        let term = c * r.powf(series_exponent(spec, k));
        if !term.is_finite() {
            return None;
        }
        if term.abs() > prev {
            return None;
        }
        prev = term.abs();
        sum += term;
        biggest = biggest.max(term.abs());
        if term.abs() <= 1e-16 * sum.abs() {
            return (biggest <= 1e3 * sum.abs()).then_some(sum);
        }
    }
    None
}

/// The leading terms of the large-r expansion as a tail model.
///
/// `None` for even integer beta, where the kernel decays faster than any power.
pub fn kernel_tail_model(spec: &SemigroupSpec, terms: usize) -> Option<PowerTail> {
    if spec.is_even_integer() {
        return None;
    }
    let mut out = Vec::new();
    for k in 1..400 {
        if out.len() == terms {
            break;
        }
        let c = series_coefficient(spec, k);
        if c != 0.0 {
            out.push(PowerTerm {
                amplitude: c,
                exponent: series_exponent(spec, k),
            });
        }
    }
    PowerTail::new(out).ok()
}

/// The kernel at r by direct oscillatory quadrature of the transform of e^(-t s^beta).
pub fn kernel_quadrature(spec: &SemigroupSpec, r: f64, opts: &TransformOptions) -> Result<f64> {
    let bessel = BesselJ::new(spec.params.v())?;
    let cutoff = (50.0 / spec.t).powf(1.0 / spec.beta);
    let osc = OscillatoryOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        max_evals: opts.max_evals,
        cutoff,
    };
    let g = |s: f64| spec.symbol(s);
    lambda_weighted_integral(&g, &bessel, r, 0.0, &osc)
        .map(|res| res.value)
        .map_err(|e| Error::TransformFailure {
            radius: r,
            source: Box::new(e),
        })
}

/// The kernel at r: closed form when available, otherwise the large-r series
/// where it is accurate and quadrature elsewhere.
pub fn kernel_value(spec: &SemigroupSpec, r: f64) -> Result<f64> {
    if spec.beta == 1.0 || spec.beta == 2.0 {
        return kernel_closed_form(spec, r);
    }
    if r == 0.0 {
        return kernel_at_origin(spec);
    }
    if let Some(x) = kernel_series(spec, r) {
        return Ok(x);
    }
    kernel_quadrature(spec, r, &TransformOptions::default())
}

/// The kernel W^(beta,t) sampled on `grid`, with its power-law tail attached
/// when beta is not an even integer.
pub fn kernel_profile(spec: &SemigroupSpec, grid: &GridSpec) -> Result<RadialProfile> {
    let radii = grid.radii();
    let values = radii
        .par_iter()
        .map(|&r| kernel_value(spec, r))
        .collect::<Result<Vec<f64>>>()?;
    let profile = RadialProfile::new(radii, values, kernel_at_origin(spec)?)?;
    Ok(match kernel_tail_model(spec, 3) {
        Some(t) => profile.with_tail(t),
        None => profile,
    })
}

/// The kernel sampled by quadrature at every radius (and at the origin),
/// independent of any closed form or series.
pub fn kernel_profile_quadrature(spec: &SemigroupSpec, grid: &GridSpec) -> Result<RadialProfile> {
    let opts = TransformOptions::default();
    let radii = grid.radii();
    let values = radii
        .par_iter()
        .map(|&r| kernel_quadrature(spec, r, &opts))
        .collect::<Result<Vec<f64>>>()?;
    let origin = kernel_quadrature(spec, 0.0, &opts)?;
    Ok(RadialProfile::new(radii, values, origin)?.with_fitted_tail())
}

/// The semigroup operator applied to f through its symbol e^(-t s^beta).
pub fn apply_semigroup(f: &RadialProfile, spec: &SemigroupSpec) -> Result<RadialProfile> {
    apply_semigroup_with(f, spec, &TransformOptions::default())
}

/// [`apply_semigroup`] with explicit accuracy.
pub fn apply_semigroup_with(
    f: &RadialProfile,
    spec: &SemigroupSpec,
    opts: &TransformOptions,
) -> Result<RadialProfile> {
    let s = *spec;
    apply_multiplier_with(f, &spec.params, move |x| s.symbol(x), opts)
}

/// Least-squares slope of ln|F| against ln r over `window`.
pub fn tail_slope(f: &RadialProfile, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad window ({lo}, {hi})")));
    }
    if lo < f.r_min() || hi > f.r_max() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "window ({lo}, {hi}) is not inside the grid [{}, {}]",
            f.r_min(),
            f.r_max()
        )));
    }
    let mut pts: Vec<f64> = f
        .radii()
        .iter()
        .copied()
        .filter(|&r| r >= lo && r <= hi)
        .collect();
    if pts.len() < 8 {
        pts = (0..64)
            .map(|i| lo * (hi / lo).powf(i as f64 / 63.0))
            .collect();
    }
    let vals: Vec<f64> = pts.iter().map(|&r| f.eval(r)).collect();
    let sign = vals[0].signum();
    if vals.iter().any(|&x| x == 0.0 || x.signum() != sign) {
        return Err(Error::SignChange);
    }
    let xs: Vec<f64> = pts.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|x| x.abs().ln()).collect();
    Ok(ols(&xs, &ys).0)
}
