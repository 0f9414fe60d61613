//! Riesz, Bessel, Flett and bi-parametric potentials.
//!
//! All potentials act spectrally: the Riesz potential has symbol s^(-alpha)
//! and the bi-parametric potential (1 + s^beta)^(-alpha/beta), with the
//! Bessel (beta = 2) and Flett (beta = 1) potentials as special cases. The
//! `*_via_time_integral` routes rebuild the same symbols from the
//! beta-semigroup by quadrature in t and serve as independent checks.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gamma, integrate_from_zero, integrate_to_infinity, recip_gamma, QuadOptions};
use crate::radial_transform::{
    apply_multiplier_with, hankel_on, integrate_against_power, multiply_spectrum, DunklParams,
    GridSpec, LogSpline, PowerTail, PowerTerm, RadialProfile, TransformOptions,
};
use crate::semigroup::{kernel_closed_form, kernel_profile, SemigroupSpec};

/// Which potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Riesz,
    Biparametric,
}

/// A potential operator with its parameters.
///
/// For the Riesz potential `beta` only selects the semigroup used by the
/// time-integral route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub alpha: f64,
    pub beta: f64,
    pub params: DunklParams,
}

impl PotentialSpec {
    /// Riesz potential of order alpha, 0 < alpha < n + 2 gamma.
    pub fn riesz(alpha: f64, params: DunklParams) -> Result<Self> {
        let limit = params.homogeneity();
        if !(alpha > 0.0 && alpha < limit) {
            return Err(Error::AlphaOutOfRange { alpha, limit });
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Riesz,
            alpha,
            beta: 2.0,
            params,
        })
    }

    /// Bi-parametric potential with symbol (1 + s^beta)^(-alpha/beta).
    pub fn biparametric(alpha: f64, beta: f64, params: DunklParams) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange {
                alpha,
                limit: f64::INFINITY,
            });
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be > 0, got {beta}")));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Biparametric,
            alpha,
            beta,
            params,
        })
    }

    /// Bessel potential: symbol (1 + s^2)^(-alpha/2).
    pub fn bessel(alpha: f64, params: DunklParams) -> Result<Self> {
        Self::biparametric(alpha, 2.0, params)
    }

    /// Flett potential: symbol (1 + s)^(-alpha).
    pub fn flett(alpha: f64, params: DunklParams) -> Result<Self> {
        Self::biparametric(alpha, 1.0, params)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be > 0, got {beta}")));
        }
        self.beta = beta;
        Ok(self)
    }

    /// theta = alpha / beta.
    pub fn theta(&self) -> f64 {
        self.alpha / self.beta
    }

    /// The spectral symbol of the operator.
    pub fn symbol(&self, s: f64) -> f64 {
        match self.kind {
            PotentialKind::Riesz => s.powf(-self.alpha),
            PotentialKind::Biparametric => (1.0 + s.powf(self.beta)).powf(-self.theta()),
        }
    }
}

/// Integral over t in (0, inf) of h(t), split at the expected peak `t_peak`
/// and marched outward in ln t until the integrand is negligible.
pub(crate) fn time_integral<H: Fn(f64) -> f64 + ?Sized>(h: &H, t_peak: f64) -> Result<f64> {
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_evals: 200_000,
    };
    let head = integrate_from_zero(h, t_peak, &opts)?;
    let tail = integrate_to_infinity(h, t_peak, f64::INFINITY, &opts)?;
    Ok(head.value + tail.value)
}

/// (1/Gamma(theta)) integral_0^inf t^(theta-1) e^(-rate t) dt by quadrature.
///
/// Equals rate^(-theta); computed numerically on purpose.
pub fn gamma_time_integral(theta: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) || !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need theta > 0 and rate > 0, got {theta}, {rate}"
        )));
    }
    let h = |t: f64| t.powf(theta - 1.0) * (-rate * t).exp();
    Ok(time_integral(&h, theta / rate)? / gamma(theta)?)
}

/// A positive spectral multiplier tabulated on a log grid and interpolated
/// in (ln s, ln m), with power-law continuation beyond the table.
#[derive(Debug, Clone)]
pub struct NumericMultiplier {
    spline: LogSpline,
    lo: f64,
    hi: f64,
    lo_value: f64,
    hi_value: f64,
    lo_slope: f64,
    hi_slope: f64,
}

impl NumericMultiplier {
    /// Tabulate `m` at `count` log-spaced points of [s_lo, s_hi].
    pub fn tabulate<M: Fn(f64) -> Result<f64> + Sync>(
        m: M,
        s_lo: f64,
        s_hi: f64,
        count: usize,
    ) -> Result<Self> {
        use rayon::prelude::*;
        let radii = GridSpec::new(s_lo, s_hi, count)?.radii();
        let values = radii
            .par_iter()
            .map(|&s| m(s))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(i) = values.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tabulated multiplier must be positive and finite, got {} at s = {}",
                values[i], radii[i]
            )));
        }
        let logs: Vec<f64> = values.iter().map(|x| x.ln()).collect();
        let n = radii.len();
        let slope = |i: usize, j: usize| (logs[j] - logs[i]) / (radii[j] / radii[i]).ln();
        Ok(NumericMultiplier {
            spline: LogSpline::new(&radii, &logs),
            lo: radii[0],
            hi: radii[n - 1],
            lo_value: logs[0],
            hi_value: logs[n - 1],
            lo_slope: slope(0, 1),
            hi_slope: slope(n - 2, n - 1),
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s < self.lo {
            (self.lo_value + self.lo_slope * (s / self.lo).ln()).exp()
        } else if s > self.hi {
            (self.hi_value + self.hi_slope * (s / self.hi).ln()).exp()
        } else {
            self.spline.eval_u(s.ln()).exp()
        }
    }
}

const TABLE_LO: f64 = 1e-8;
const TABLE_HI: f64 = 1e4;
const TABLE_COUNT: usize = 800;

fn check_riesz(spec: &PotentialSpec) -> Result<()> {
    let limit = spec.params.homogeneity();
    if !(spec.alpha > 0.0 && spec.alpha < limit) {
        return Err(Error::AlphaOutOfRange {
            alpha: spec.alpha,
            limit,
        });
    }
    Ok(())
}

fn riesz_spectrum(f: &RadialProfile, spec: &PotentialSpec, opts: &TransformOptions) -> Result<RadialProfile> {
    check_riesz(spec)?;
    let spectrum = hankel_on(f, &spec.params, f.radii(), opts)?;
    if let Some(k) = spectrum.origin_exponent() {
        if k - spec.alpha + spec.params.homogeneity() <= 0.0 {
            return Err(Error::NonIntegrable(format!(
                "spectrum ~ s^{k} times s^-{} is not integrable at the origin",
                spec.alpha
            )));
        }
    }
    Ok(spectrum)
}

/// Large-r behaviour of the Riesz potential of f.
///
/// Expanding the spectrum as sum_k c_{2k} s^(2k) near the origin, each term
/// c_{2k} s^(2k - alpha) contributes its exact transform
/// c_{2k} 2^(2k-alpha+v+1) Gamma(v+1+k-alpha/2) / Gamma(alpha/2-k) r^(alpha-2k-2v-2).
fn riesz_tail(f: &RadialProfile, spec: &PotentialSpec, terms: usize) -> Option<PowerTail> {
    let v = spec.params.v();
    let a = spec.alpha;
    let mut out = Vec::new();
    let mut fact = 1.0;
    for k in 0..terms {
        if k > 0 {
            fact *= k as f64;
        }
        let m = integrate_against_power(f, 2.0 * v + 1.0 + 2.0 * k as f64).ok()?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        let c = sign * m / (4f64.powi(k as i32) * fact * 2f64.powf(v) * gamma(kf + v + 1.0).ok()?);
        let h = ((2.0 * kf - a + v + 1.0) * LN_2).exp()
            * gamma(v + 1.0 + kf - a / 2.0).ok()?
            * recip_gamma(a / 2.0 - kf);
        let amp = c * h;
        if amp != 0.0 && amp.is_finite() {
            out.push(PowerTerm {
                amplitude: amp,
                exponent: a - 2.0 * kf - 2.0 * v - 2.0,
            });
        }
    }
    PowerTail::new(out).ok()
}

/// The Riesz potential H_v(s^(-alpha) H_v(f)) on the radii of f.
pub fn riesz(f: &RadialProfile, spec: &PotentialSpec) -> Result<RadialProfile> {
    riesz_with(f, spec, &TransformOptions::default())
}

/// [`riesz`] with explicit accuracy.
pub fn riesz_with(f: &RadialProfile, spec: &PotentialSpec, opts: &TransformOptions) -> Result<RadialProfile> {
    if f.constant_value() == Some(0.0) {
        return Ok(f.clone());
    }
    let spectrum = riesz_spectrum(f, spec, opts)?;
    let a = spec.alpha;
    let out = multiply_spectrum(&spectrum, &spec.params, f.radii(), |s| s.powf(-a), opts)?;
    Ok(match riesz_tail(f, spec, 5) {
        Some(t) => out.with_tail(t),
        None => out,
    })
}

/// The Riesz symbol rebuilt as (1/Gamma(alpha/beta)) integral t^(alpha/beta - 1) e^(-t s^beta) dt.
pub fn riesz_time_multiplier(alpha: f64, beta: f64) -> Result<NumericMultiplier> {
    let theta = alpha / beta;
    NumericMultiplier::tabulate(
        |s| gamma_time_integral(theta, s.powf(beta)),
        TABLE_LO,
        TABLE_HI,
        TABLE_COUNT,
    )
}

/// The Riesz potential through the beta-semigroup: the t-integral of the
/// semigroup symbol is evaluated by quadrature rather than in closed form.
pub fn riesz_via_time_integral(f: &RadialProfile, spec: &PotentialSpec, beta: f64) -> Result<RadialProfile> {
    let opts = TransformOptions::default();
    if f.constant_value() == Some(0.0) {
        return Ok(f.clone());
    }
    let spectrum = riesz_spectrum(f, spec, &opts)?;
    let table = riesz_time_multiplier(spec.alpha, beta)?;
    multiply_spectrum(&spectrum, &spec.params, f.radii(), |s| table.eval(s), &opts)
}

fn check_biparametric(spec: &PotentialSpec) -> Result<()> {
    if spec.kind != PotentialKind::Biparametric {
        return Err(Error::InvalidArgument("expected a bi-parametric potential".into()));
    }
    Ok(())
}

/// The bi-parametric potential H_v((1 + s^beta)^(-alpha/beta) H_v(f)).
pub fn biparametric(f: &RadialProfile, spec: &PotentialSpec) -> Result<RadialProfile> {
    check_biparametric(spec)?;
    let s = *spec;
    apply_multiplier_with(f, &spec.params, move |x| s.symbol(x), &TransformOptions::default())
}

/// The bi-parametric symbol rebuilt as (1/Gamma(theta)) integral t^(theta-1) e^(-t) e^(-t s^beta) dt.
pub fn biparametric_time_multiplier(alpha: f64, beta: f64) -> Result<NumericMultiplier> {
    let theta = alpha / beta;
    NumericMultiplier::tabulate(
        |s| gamma_time_integral(theta, 1.0 + s.powf(beta)),
        TABLE_LO,
        TABLE_HI,
        TABLE_COUNT,
    )
}

/// The bi-parametric potential with its symbol built from the damped
/// semigroup integral by quadrature in t.
pub fn biparametric_via_time_integral(f: &RadialProfile, spec: &PotentialSpec) -> Result<RadialProfile> {
    check_biparametric(spec)?;
    if let Some(c) = f.constant_value() {
        return Ok(f.scaled(if c == 0.0 { 0.0 } else { 1.0 }));
    }
    let table = biparametric_time_multiplier(spec.alpha, spec.beta)?;
    apply_multiplier_with(f, &spec.params, |s| table.eval(s), &TransformOptions::default())
}

/// The convolution kernel of the potential on `grid`.
///
/// Riesz: d r^(alpha - n - 2 gamma) with d = 2^(v+1-alpha) Gamma(v+1-alpha/2) / Gamma(alpha/2),
/// so that its transform is exactly s^(-alpha). Bi-parametric: the subordinated
/// kernel (1/Gamma(theta)) integral t^(theta-1) e^(-t) W^(beta,t)(r) dt.
pub fn potential_kernel(spec: &PotentialSpec, grid: &GridSpec) -> Result<RadialProfile> {
    let v = spec.params.v();
    let radii = grid.radii();
    match spec.kind {
        PotentialKind::Riesz => {
            check_riesz(spec)?;
            let a = spec.alpha;
            let d = ((v + 1.0 - a) * LN_2).exp() * gamma(v + 1.0 - a / 2.0)? / gamma(a / 2.0)?;
            let p = a - 2.0 * v - 2.0;
            let values = radii.iter().map(|r| d * r.powf(p)).collect();
            Ok(RadialProfile::new(radii, values, f64::INFINITY)?.with_tail(PowerTail::single(d, p)?))
        }
        PotentialKind::Biparametric => {
            let beta = spec.beta;
            let theta = spec.theta();
            let h = spec.params.homogeneity();
            // W^(beta,t)(r) = t^(-h/beta) W^(beta,1)(t^(-1/beta) r).
            let unit = SemigroupSpec::new(beta, 1.0, spec.params)?;
            let profile = if beta == 1.0 || beta == 2.0 {
                None
            } else {
                Some(kernel_profile(&unit, &GridSpec::new(1e-4, 1e3, 1500)?)?)
            };
            let w1 = |x: f64| match &profile {
                Some(p) => p.eval(x),
                None => kernel_closed_form(&unit, x).unwrap_or(f64::NAN),
            };
            let g = gamma(theta)?;
            use rayon::prelude::*;
            let values = radii
                .par_iter()
                .map(|&r| {
                    let integrand =
                        |t: f64| t.powf(theta - 1.0 - h / beta) * (-t).exp() * w1(t.powf(-1.0 / beta) * r);
                    let peak = r.powf(beta).clamp(1e-8, 1.0);
                    time_integral(&integrand, peak).map(|x| x / g)
                })
                .collect::<Result<Vec<f64>>>()?;
            let origin = if theta > h / beta {
                w1(0.0) * gamma(theta - h / beta)? / g
            } else {
                f64::INFINITY
            };
            Ok(RadialProfile::new(radii, values, origin)?.with_fitted_tail())
        }
    }
}
