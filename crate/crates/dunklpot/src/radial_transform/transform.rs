//! The Hankel-type transform, origin values, weighted norms and spectral multipliers.

use rayon::prelude::*;

use super::profile::{PowerTail, RadialProfile};
use super::{DunklParams, GridSpec, TransformOptions};
use crate::error::{Error, Result};
use crate::numerics::{
    integrate_finite_with, integrate_smooth, integrate_to_infinity, lambda_weighted_integral, BesselJ,
    OscillatoryOptions, QuadOptions,
};

/// Sample `f` on a log-spaced grid, with origin value f(0).
pub fn sample_profile<F: Fn(f64) -> f64>(f: F, grid: &GridSpec) -> Result<RadialProfile> {
    let radii = grid.radii();
    let values: Vec<f64> = radii.iter().map(|&r| f(r)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample(radii[i]));
    }
    let origin = f(0.0);
    if origin.is_nan() {
        return Err(Error::NonFiniteSample(0.0));
    }
    RadialProfile::new(radii, values, origin)
}

fn osc_options(opts: &TransformOptions, cutoff: f64) -> OscillatoryOptions {
    OscillatoryOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        max_evals: opts.max_evals,
        cutoff,
    }
}

fn quad_options(opts: &TransformOptions) -> QuadOptions {
    QuadOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        max_evals: opts.max_evals,
    }
}

/// Largest r * cutoff at which the moment series is used.
const MOMENT_REACH: f64 = 2.0;
/// Number of even moments kept; the series terms fall below 1e-25 well before.
const MOMENT_COUNT: usize = 24;

/// Small-argument form of the transform of a compactly supported g:
/// H(g)(r) = 2^(-v) sum_k (-1)^k (r/2)^(2k) M_2k / (k! Gamma(k+v+1)),
/// with M_j = integral_0^cutoff g(s) s^(2v+1+j) ds.
struct MomentSeries {
    /// M_2k 2^(-v) / (k! Gamma(k+v+1)) 4^(-k).
    coeffs: Vec<f64>,
}

impl MomentSeries {
    fn new<G: Fn(f64) -> f64 + Sync + ?Sized>(
        g: &G,
        bessel: &BesselJ,
        cutoff: f64,
        opts: &OscillatoryOptions,
    ) -> Result<Self> {
        let v = bessel.order();
        let q = 2.0 * v + 1.0;
        let mopts = OscillatoryOptions {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            ..*opts
        };
        let coeffs = (0..MOMENT_COUNT)
            .into_par_iter()
            .map(|k| {
                let p = q + 2.0 * k as f64;
                let h = |s: f64| if s == 0.0 { 0.0 } else { g(s) * s.powf(p) };
                let m = integrate_smooth(&h, 0.0, cutoff, &mopts)?.value;
                Ok(m * bessel.lambda_at_zero() * ln_ratio(k, v).exp() * (-(k as f64) * 4f64.ln()).exp())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(MomentSeries { coeffs })
    }

    fn eval(&self, r: f64) -> f64 {
        let y = -r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }
}

/// ln(Gamma(v+1) / (k! Gamma(k+v+1))).
fn ln_ratio(k: usize, v: f64) -> f64 {
    (1..=k).map(|j| -((j as f64) * (j as f64 + v)).ln()).sum()
}

/// H_v(g)(r) at each of `radii` for a function g that vanishes beyond `cutoff`.
///
/// Radii are evaluated in parallel; each value is independent of the schedule.
pub fn transform_fn<G: Fn(f64) -> f64 + Sync + ?Sized>(
    g: &G,
    params: &DunklParams,
    radii: &[f64],
    cutoff: f64,
    opts: &TransformOptions,
) -> Result<Vec<f64>> {
    let bessel = BesselJ::new(params.v())?;
    let osc = osc_options(opts, cutoff);
    let series = if cutoff.is_finite() && radii.iter().any(|&r| r * cutoff <= MOMENT_REACH) {
        MomentSeries::new(g, &bessel, cutoff, &osc).ok()
    } else {
        None
    };
    radii
        .par_iter()
        .map(|&r| {
            if let Some(ms) = series.as_ref().filter(|_| r * cutoff <= MOMENT_REACH) {
                return Ok(ms.eval(r));
            }
            lambda_weighted_integral(g, &bessel, r, 0.0, &osc)
                .map(|res| res.value)
                .map_err(|e| Error::TransformFailure {
                    radius: r,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// H_v(g)(0) = (2^(-v) / Gamma(v+1)) * integral_0^inf g(s) s^(2v+1) ds.
pub fn eval_at_origin_fn<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    params: &DunklParams,
    cutoff: f64,
    opts: &TransformOptions,
) -> Result<f64> {
    let bessel = BesselJ::new(params.v())?;
    let res = lambda_weighted_integral(g, &bessel, 0.0, 0.0, &osc_options(opts, cutoff))
        .map_err(|e| Error::TransformFailure {
            radius: 0.0,
            source: Box::new(e),
        })?;
    Ok(res.value)
}

fn check_transformable(f: &RadialProfile, v: f64) -> Result<()> {
    if let Some(t) = f.tail() {
        let p = t.leading_exponent();
        if p >= -(v + 0.5) {
            return Err(Error::NonIntegrable(format!(
                "tail exponent {p} does not decay faster than r^-(v+1/2) = r^{}",
                -(v + 0.5)
            )));
        }
    }
    if let Some(k) = f.origin_exponent() {
        if k + 2.0 * v + 2.0 <= 0.0 {
            return Err(Error::NonIntegrable(format!(
                "origin singularity r^{k} is not integrable against r^(2v+1)"
            )));
        }
    }
    Ok(())
}

/// H_v(F) sampled on `out`, with default accuracy.
pub fn hankel(f: &RadialProfile, params: &DunklParams, out: &GridSpec) -> Result<RadialProfile> {
    hankel_with(f, params, out, &TransformOptions::default())
}

/// H_v(F) sampled on `out`.
///
/// The origin value comes from [`eval_at_origin`]; when F is too heavy-tailed
/// for that integral to converge the origin is marked infinite. A power-law
/// tail is attached when the output's last decade follows one.
pub fn hankel_with(
    f: &RadialProfile,
    params: &DunklParams,
    out: &GridSpec,
    opts: &TransformOptions,
) -> Result<RadialProfile> {
    hankel_on(f, params, &out.radii(), opts)
}

pub(crate) fn hankel_on(
    f: &RadialProfile,
    params: &DunklParams,
    radii: &[f64],
    opts: &TransformOptions,
) -> Result<RadialProfile> {
    check_transformable(f, params.v())?;
    let g = |s: f64| f.eval(s);
    let cutoff = f.support_end();
    let values = transform_fn(&g, params, radii, cutoff, opts)?;
    let origin = match eval_at_origin_with(f, params, opts) {
        Ok(x) => x,
        Err(Error::NonIntegrable(_)) => {
            let sign = f
                .tail()
                .and_then(|t| {
                    t.terms()
                        .iter()
                        .max_by(|a, b| a.exponent.total_cmp(&b.exponent))
                        .map(|term| term.amplitude.signum())
                })
                .unwrap_or(1.0);
            sign * f64::INFINITY
        }
        Err(e) => return Err(e),
    };
    Ok(RadialProfile::new(radii.to_vec(), values, origin)?.with_fitted_tail())
}

/// H_v(g) for a function g given as a closure, sampled on `out`.
pub fn hankel_fn<G: Fn(f64) -> f64 + Sync + ?Sized>(
    g: &G,
    params: &DunklParams,
    out: &GridSpec,
    cutoff: f64,
    opts: &TransformOptions,
) -> Result<RadialProfile> {
    let radii = out.radii();
    let values = transform_fn(g, params, &radii, cutoff, opts)?;
    let origin = eval_at_origin_fn(g, params, cutoff, opts)?;
    Ok(RadialProfile::new(radii, values, origin)?.with_fitted_tail())
}

/// The integral over [0, inf) of F(s) s^q ds, using the profile's origin and
/// tail models analytically.
pub fn integrate_against_power(f: &RadialProfile, q: f64) -> Result<f64> {
    integrate_against_power_with(f, q, &TransformOptions::default())
}

fn integrate_against_power_with(f: &RadialProfile, q: f64, opts: &TransformOptions) -> Result<f64> {
    let r0 = f.r_min();
    let v0 = f.values()[0];
    let head = match f.origin_exponent() {
        None => {
            let o = f.origin_value();
            o * r0.powf(q + 1.0) / (q + 1.0) + (v0 - o) * r0.powf(q + 1.0) / (q + 2.0)
        }
        Some(k) => {
            if k + q + 1.0 <= 0.0 {
                return Err(Error::NonIntegrable(format!(
                    "r^{k} times r^{q} is not integrable at the origin"
                )));
            }
            v0 * r0.powf(q + 1.0) / (k + q + 1.0)
        }
    };
    let tail = match f.tail() {
        None => 0.0,
        Some(t) => {
            let mut acc = 0.0;
            for term in t.terms() {
                let e = term.exponent + q + 1.0;
                if term.amplitude == 0.0 {
                    continue;
                }
                if e >= 0.0 {
                    return Err(Error::NonIntegrable(format!(
                        "tail r^{} times r^{q} is not integrable at infinity",
                        term.exponent
                    )));
                }
                acc -= term.amplitude * f.r_max().powf(e) / e;
            }
            acc
        }
    };
    let end = f.support_end().min(f.r_max());
    let h = |s: f64| f.eval(s) * s.powf(q);
    let body = integrate_to_infinity(&h, r0, end, &quad_options(opts))?;
    Ok(head + body.value + tail)
}

/// H_v(F)(0) = (2^(-v) / Gamma(v+1)) * integral_0^inf F(s) s^(2v+1) ds.
pub fn eval_at_origin(f: &RadialProfile, params: &DunklParams) -> Result<f64> {
    eval_at_origin_with(f, params, &TransformOptions::default())
}

fn eval_at_origin_with(f: &RadialProfile, params: &DunklParams, opts: &TransformOptions) -> Result<f64> {
    let bessel = BesselJ::new(params.v())?;
    if let Some(c) = f.constant_value() {
        if c == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(bessel.lambda_at_zero() * integrate_against_power_with(f, 2.0 * params.v() + 1.0, opts)?)
}

/// (integral_0^inf |F(r)|^p r^(n + 2 gamma - 1) dr)^(1/p), or the sup norm for p = inf.
pub fn weighted_norm(f: &RadialProfile, p: f64, params: &DunklParams) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("norm exponent must be >= 1, got {p}")));
    }
    let q = 2.0 * params.v() + 1.0;
    if p.is_infinite() {
        if f.origin_value().is_infinite() {
            return Err(Error::DivergentNorm("profile is unbounded at the origin".into()));
        }
        if let Some(t) = f.tail() {
            if t.leading_exponent() > 0.0 {
                return Err(Error::DivergentNorm("tail grows at infinity".into()));
            }
        }
        let m = f.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        return Ok(m.max(f.origin_value().abs()));
    }
    let scale = f.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let opts = quad_options(&TransformOptions::default());
    let r0 = f.r_min();
    let v0 = f.values()[0] / scale;
    let head = match f.origin_exponent() {
        None => {
            let o = f.origin_value() / scale;
            let h = |s: f64| (o + (v0 - o) * s / r0).abs().powf(p) * s.powf(q);
            integrate_finite_with(&h, 0.0, r0, &opts)?.value
        }
        Some(k) => {
            if k * p + q + 1.0 <= 0.0 {
                return Err(Error::DivergentNorm(format!(
                    "origin singularity r^{k} is not in L^{p}"
                )));
            }
            v0.abs().powf(p) * r0.powf(q + 1.0) / (k * p + q + 1.0)
        }
    };
    let tail = match f.tail() {
        None => 0.0,
        Some(t) => {
            let e = t.leading_exponent() * p + q + 1.0;
            if e >= 0.0 {
                return Err(Error::DivergentNorm(format!(
                    "tail r^{} is not in L^{p} for the weight r^{q}",
                    t.leading_exponent()
                )));
            }
            if let [term] = t.terms() {
                -(term.amplitude / scale).abs().powf(p) * f.r_max().powf(e) / e
            } else {
                let h = |s: f64| (t.eval(s) / scale).abs().powf(p) * s.powf(q);
                integrate_to_infinity(&h, f.r_max(), f64::INFINITY, &opts)?.value
            }
        }
    };
    let end = f.support_end().min(f.r_max());
    let h = |s: f64| (f.eval(s) / scale).abs().powf(p) * s.powf(q);
    let body = integrate_to_infinity(&h, r0, end, &opts)?.value;
    Ok(scale * (head + body + tail).powf(1.0 / p))
}

/// [`weighted_norm`] against the normalized measure (2^(-v)/Gamma(v+1)) r^(2v+1) dr,
/// for which the transform of a probability-type kernel has mass H_v(F)(0).
pub fn normalized_weighted_norm(f: &RadialProfile, p: f64, params: &DunklParams) -> Result<f64> {
    let raw = weighted_norm(f, p, params)?;
    if p.is_infinite() {
        return Ok(raw);
    }
    let l0 = BesselJ::new(params.v())?.lambda_at_zero();
    Ok(raw * l0.powf(1.0 / p))
}

/// H_v(m * H_v(F)) on the radii of F, with default accuracy.
pub fn apply_multiplier<M: Fn(f64) -> f64 + Sync>(
    f: &RadialProfile,
    params: &DunklParams,
    m: M,
) -> Result<RadialProfile> {
    apply_multiplier_with(f, params, m, &TransformOptions::default())
}

/// The spectral multiplier operator with symbol `m`: H_v(m * H_v(F)).
///
/// The result lives on the radii of F. A constant input is mapped to the
/// constant m(0) times itself.
pub fn apply_multiplier_with<M: Fn(f64) -> f64 + Sync>(
    f: &RadialProfile,
    params: &DunklParams,
    m: M,
    opts: &TransformOptions,
) -> Result<RadialProfile> {
    if let Some(c) = f.constant_value() {
        let k = m(0.0) * c;
        let out = RadialProfile::new(f.radii().to_vec(), vec![k; f.len()], k)?;
        return Ok(out.with_tail(PowerTail::single(k, 0.0)?));
    }
    let spectrum = hankel_on(f, params, f.radii(), opts)?;
    multiply_spectrum(&spectrum, params, f.radii(), m, opts)
}

/// H_v(m * S) on `radii` for an already transformed profile S.
pub(crate) fn multiply_spectrum<M: Fn(f64) -> f64 + Sync>(
    spectrum: &RadialProfile,
    params: &DunklParams,
    radii: &[f64],
    m: M,
    opts: &TransformOptions,
) -> Result<RadialProfile> {
    let g = |s: f64| {
        let x = spectrum.eval(s);
        if x == 0.0 {
            0.0
        } else {
            m(s) * x
        }
    };
    let cutoff = spectrum.support_end();
    let values = transform_fn(&g, params, radii, cutoff, opts)?;
    let origin = eval_at_origin_fn(&g, params, cutoff, opts)?;
    Ok(RadialProfile::new(radii.to_vec(), values, origin)?.with_fitted_tail())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(a: f64) -> impl Fn(f64) -> f64 {
        move |r: f64| (-0.5 * a * r * r).exp()
    }

    fn small_grid() -> GridSpec {
        GridSpec::new(1e-3, 20.0, 600).unwrap()
    }

    #[test]
    fn sampling() {
        let p = sample_profile(|r| 1.0 / (1.0 + r * r), &GridSpec::default()).unwrap();
        for (&r, &v) in p.radii().iter().zip(p.values()) {
            assert_eq!(v, 1.0 / (1.0 + r * r));
        }
        assert_eq!(p.origin_value(), 1.0);
        let bad = sample_profile(|r| if r == 1e-4 { f64::NAN } else { r }, &GridSpec::default());
        assert!(matches!(bad, Err(Error::NonFiniteSample(r)) if r == 1e-4));
    }

    #[test]
    fn gaussian_is_fixed() {
        for &v in &[-0.5, 0.0, 0.7, 2.3] {
            let params = DunklParams::from_order(v).unwrap();
            let f = sample_profile(gauss(1.0), &GridSpec::default()).unwrap();
            let h = hankel(&f, &params, &small_grid()).unwrap();
            for (&r, &x) in h.radii().iter().zip(h.values()) {
                assert!((x - (-0.5 * r * r).exp()).abs() < 1e-8, "v={v} r={r}");
            }
            assert!((h.origin_value() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn weber_with_t2() {
        let params = DunklParams::from_order(0.5).unwrap();
        let f = sample_profile(|s| (-2.0 * s * s).exp(), &GridSpec::default()).unwrap();
        let h = hankel(&f, &params, &small_grid()).unwrap();
        for (&r, &x) in h.radii().iter().zip(h.values()) {
            assert!((x - 0.125 * (-r * r / 8.0).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn laplace_hankel() {
        let params = DunklParams::from_order(-0.5).unwrap();
        let f = sample_profile(|s| (-s).exp(), &GridSpec::default()).unwrap();
        let h = hankel(&f, &params, &small_grid()).unwrap();
        let c = (2.0 / std::f64::consts::PI).sqrt();
        for (&r, &x) in h.radii().iter().zip(h.values()) {
            assert!((x - c / (1.0 + r * r)).abs() < 1e-7, "r={r}: {x}");
        }
        assert!((eval_at_origin(&f, &params).unwrap() - 0.797_884_560_8).abs() < 1e-9);
    }

    #[test]
    fn origin_values() {
        let g = sample_profile(gauss(1.0), &GridSpec::default()).unwrap();
        for &v in &[-0.5, 0.0, 1.3, 4.0] {
            let params = DunklParams::from_order(v).unwrap();
            assert!((eval_at_origin(&g, &params).unwrap() - 1.0).abs() < 1e-7);
        }
        let zero = sample_profile(|_| 0.0, &GridSpec::default()).unwrap();
        assert_eq!(eval_at_origin(&zero, &DunklParams::new(2, 0.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn norms() {
        let params = DunklParams::new(1, 0.0).unwrap();
        let g = sample_profile(gauss(1.0), &GridSpec::default()).unwrap();
        let n2 = weighted_norm(&g, 2.0, &params).unwrap();
        assert!((n2 - 0.941_396_263_776_7).abs() < 1e-10);
        let ng = weighted_norm(&g.scaled(-3.0), 2.0, &params).unwrap();
        assert!((ng - 3.0 * n2).abs() < 1e-12 * ng);
        let zero = sample_profile(|_| 0.0, &GridSpec::default()).unwrap();
        assert_eq!(weighted_norm(&zero, 1.5, &params).unwrap(), 0.0);
        let lorentz = sample_profile(|r| 1.0 / (1.0 + r * r), &GridSpec::default())
            .unwrap()
            .with_fitted_tail();
        let res = weighted_norm(&lorentz, 1.0, &DunklParams::new(3, 0.0).unwrap());
        assert!(matches!(res, Err(Error::DivergentNorm(_))));
        assert_eq!(weighted_norm(&g, f64::INFINITY, &params).unwrap(), 1.0);
    }

    #[test]
    fn multiplier_on_gaussian() {
        // e^(-t r^2) applied to the Gaussian gives a wider Gaussian.
        let params = DunklParams::new(2, 0.3).unwrap();
        let t: f64 = 0.4;
        let f = sample_profile(gauss(1.0), &GridSpec::new(1e-3, 20.0, 700).unwrap()).unwrap();
        let out = apply_multiplier(&f, &params, |s| (-t * s * s).exp()).unwrap();
        let w = 1.0 + 2.0 * t;
        let h = params.homogeneity() / 2.0;
        for (&r, &x) in out.radii().iter().zip(out.values()) {
            let want = w.powf(-h) * (-r * r / (2.0 * w)).exp();
            assert!((x - want).abs() < 1e-8, "r={r}");
        }
        assert!((out.origin_value() - w.powf(-h)).abs() < 1e-9);
    }

    #[test]
    fn rejects_heavy_tails() {
        let params = DunklParams::new(3, 0.0).unwrap();
        let f = sample_profile(|r| 1.0 / (1.0 + r), &GridSpec::default())
            .unwrap()
            .with_fitted_tail();
        assert!(matches!(hankel(&f, &params, &small_grid()), Err(Error::NonIntegrable(_))));
    }
}
