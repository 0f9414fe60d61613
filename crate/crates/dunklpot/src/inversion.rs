//! Wavelet-like transforms and the truncated hypersingular operators that
//! invert Riesz and bi-parametric potentials.
//!
//! Everything is spectral. Writing mu for the Laplace transform of the
//! wavelet measure and theta = alpha / beta, the truncated operators act on
//! the transform of g by
//!
//! ```text
//! Riesz:          s^alpha Phi(eps s^beta)
//! bi-parametric:  (1 + s^beta)^theta Phi(eps (1 + s^beta))
//! Phi(x) = integral_x^inf mu(tau) tau^(-theta-1) d tau
//! ```
//!
//! and (1/C(theta, nu)) times the output converges to f as eps -> 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{gamma, integrate_finite_with, integrate_to_infinity, QuadOptions};
use crate::potentials::{time_integral, NumericMultiplier, PotentialKind};
use crate::radial_transform::{
    apply_multiplier_with, hankel_on, multiply_spectrum, weighted_norm, DunklParams, LogSpline,
    RadialProfile, TransformOptions,
};
use crate::wavelet::WaveletMeasure;

/// A wavelet measure paired with a potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionSpec {
    pub nu: WaveletMeasure,
    pub alpha: f64,
    pub beta: f64,
    pub params: DunklParams,
    pub kind: PotentialKind,
}

impl InversionSpec {
    pub fn new(
        nu: WaveletMeasure,
        alpha: f64,
        beta: f64,
        params: DunklParams,
        kind: PotentialKind,
    ) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be > 0, got {beta}")));
        }
        let limit = match kind {
            PotentialKind::Riesz => params.homogeneity(),
            PotentialKind::Biparametric => f64::INFINITY,
        };
        if !(alpha > 0.0 && alpha < limit) {
            return Err(Error::AlphaOutOfRange { alpha, limit });
        }
        let need = (alpha / beta).floor() as usize;
        if nu.vanishing_order() < need {
            return Err(Error::InsufficientVanishingMoments {
                have: nu.vanishing_order(),
                need,
            });
        }
        Ok(InversionSpec {
            nu,
            alpha,
            beta,
            params,
            kind,
        })
    }

    pub fn riesz(nu: WaveletMeasure, alpha: f64, beta: f64, params: DunklParams) -> Result<Self> {
        Self::new(nu, alpha, beta, params, PotentialKind::Riesz)
    }

    pub fn biparametric(nu: WaveletMeasure, alpha: f64, beta: f64, params: DunklParams) -> Result<Self> {
        Self::new(nu, alpha, beta, params, PotentialKind::Biparametric)
    }

    pub fn theta(&self) -> f64 {
        self.alpha / self.beta
    }

    /// C(theta, nu).
    pub fn constant(&self) -> Result<f64> {
        self.nu.normalizing_constant(self.theta())
    }
}

/// Phi_theta(x) = integral_x^inf mu(tau) tau^(-theta-1) d tau, tabulated once.
///
/// Below `x0 = 0.5 / s_max` it is C(theta, nu) minus a moment series; above it
/// the values come from accumulated quadrature, interpolated in ln x.
#[derive(Debug, Clone)]
pub struct PhiTable {
    first: usize,
    theta: f64,
    constant: f64,
    x0: f64,
    x_top: f64,
    spline: LogSpline,
    series: Vec<f64>,
}

impl PhiTable {
    pub fn new(nu: &WaveletMeasure, theta: f64) -> Result<Self> {
        let constant = nu.normalizing_constant(theta)?;
        let s_min = nu.atoms()[0].0;
        let x0 = 0.5 / nu.s_max();
        let x_top = 745.0 / s_min;
        let decades = (x_top / x0).log10();
        let count = (600.0 * decades).ceil() as usize + 16;
        let xs: Vec<f64> = (0..count)
            .map(|i| x0 * (x_top / x0).powf(i as f64 / (count - 1) as f64))
            .collect();
        let h = |t: f64| nu.laplace_transform(t) * t.powf(-theta - 1.0);
        let opts = QuadOptions {
            abs_tol: 1e-300,
            rel_tol: 1e-13,
            max_evals: 10_000,
        };
        let mut values = vec![0.0; count];
        let mut acc = 0.0;
        for i in (0..count - 1).rev() {
            acc += integrate_finite_with(&h, xs[i], xs[i + 1], &opts)?.value;
            values[i] = acc;
        }
        // (-1)^m moment(m) / (m! (m - theta)) for m = M+1, M+2, ...
        let first = nu.vanishing_order() + 1;
        let mut fact: f64 = (1..first).map(|k| k as f64).product();
        let series = (first..first + 40)
            .map(|m| {
                fact *= m as f64;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * nu.moment(m as f64) / (fact * (m as f64 - theta))
            })
            .collect();
        Ok(PhiTable {
            first,
            theta,
            constant,
            x0,
            x_top,
            spline: LogSpline::new(&xs, &values),
            series,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// C(theta, nu) = Phi(0+).
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// integral_0^x mu(tau) tau^(-theta-1) d tau from the moment expansion of mu.
    fn head(&self, x: f64) -> f64 {
        let first = self.first;
        let poly = self.series.iter().rev().fold(0.0, |acc, c| acc * x + c);
        poly * x.powf(first as f64 - self.theta)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.constant
        } else if x < self.x0 {
            self.constant - self.head(x)
        } else if x >= self.x_top {
            0.0
        } else {
            self.spline.eval_u(x.ln())
        }
    }
}

/// The Laplace transform x -> integral_0^inf e^(-x s) K_theta(s) ds of the
/// Riemann-Liouville kernel, tabulated by direct quadrature in s.
///
/// It coincides with Phi_theta and serves as an independent route.
#[derive(Debug, Clone)]
pub struct KernelLaplaceTable {
    spline: LogSpline,
    lo: f64,
    hi: f64,
    at_lo: f64,
}

impl KernelLaplaceTable {
    pub fn new(nu: &WaveletMeasure, theta: f64, x_lo: f64, x_hi: f64) -> Result<Self> {
        use rayon::prelude::*;
        let decades = (x_hi / x_lo).log10();
        let count = (60.0 * decades).ceil() as usize + 16;
        let xs: Vec<f64> = (0..count)
            .map(|i| x_lo * (x_hi / x_lo).powf(i as f64 / (count - 1) as f64))
            .collect();
        let mut knots: Vec<f64> = nu.atoms().iter().map(|a| a.0).collect();
        let far = 4.0 * nu.s_max();
        knots.push(far);
        let opts = QuadOptions {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_evals: 400_000,
        };
        let values = xs
            .par_iter()
            .map(|&x| {
                let k = |s: f64| (-x * s).exp() * nu.rl_kernel(theta, s).unwrap_or(f64::NAN);
                let mut total = 0.0;
                for w in knots.windows(2) {
                    total += integrate_finite_with(&k, w[0], w[1], &opts)?.value;
                }
                Ok(total + integrate_to_infinity(&k, far, f64::INFINITY, &opts)?.value)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(KernelLaplaceTable {
            spline: LogSpline::new(&xs, &values),
            lo: x_lo,
            hi: x_hi,
            at_lo: values[0],
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo {
            self.at_lo
        } else if x >= self.hi {
            0.0
        } else {
            self.spline.eval_u(x.ln())
        }
    }
}

fn require_kind(spec: &InversionSpec, kind: PotentialKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::InvalidArgument(format!(
            "operation needs a {kind:?} inversion spec, got {:?}",
            spec.kind
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be > 0, got {eps}")));
    }
    Ok(())
}

/// W^(beta,t) f = sum_j c_j B^(beta, s_j t) f, applied as the multiplier mu(t s^beta).
pub fn wavelet_like_transform(f: &RadialProfile, spec: &InversionSpec, t: f64) -> Result<RadialProfile> {
    check_eps(t)?;
    let (nu, beta) = (&spec.nu, spec.beta);
    apply_multiplier_with(
        f,
        &spec.params,
        |s| nu.laplace_transform(t * s.powf(beta)),
        &TransformOptions::default(),
    )
}

/// The damped transform sum_j c_j e^(-s_j t) B^(beta, s_j t) f, i.e. the multiplier mu(t (1 + s^beta)).
pub fn wavelet_like_transform_damped(
    f: &RadialProfile,
    spec: &InversionSpec,
    t: f64,
) -> Result<RadialProfile> {
    check_eps(t)?;
    let (nu, beta) = (&spec.nu, spec.beta);
    apply_multiplier_with(
        f,
        &spec.params,
        |s| nu.laplace_transform(t * (1.0 + s.powf(beta))),
        &TransformOptions::default(),
    )
}

fn is_zero(g: &RadialProfile) -> bool {
    g.constant_value() == Some(0.0)
}

fn riesz_sweep(g: &RadialProfile, spec: &InversionSpec, eps: &[f64]) -> Result<Vec<RadialProfile>> {
    require_kind(spec, PotentialKind::Riesz)?;
    for &e in eps {
        check_eps(e)?;
    }
    if is_zero(g) {
        return Ok(vec![g.clone(); eps.len()]);
    }
    let opts = TransformOptions::default();
    let phi = PhiTable::new(&spec.nu, spec.theta())?;
    let spectrum = hankel_on(g, &spec.params, g.radii(), &opts)?;
    let (a, b) = (spec.alpha, spec.beta);
    eps.iter()
        .map(|&e| {
            multiply_spectrum(&spectrum, &spec.params, g.radii(), |s| s.powf(a) * phi.eval(e * s.powf(b)), &opts)
        })
        .collect()
}

fn biparam_sweep(g: &RadialProfile, spec: &InversionSpec, eps: &[f64]) -> Result<Vec<RadialProfile>> {
    require_kind(spec, PotentialKind::Biparametric)?;
    for &e in eps {
        check_eps(e)?;
    }
    let phi = PhiTable::new(&spec.nu, spec.theta())?;
    let (b, th) = (spec.beta, spec.theta());
    eps.iter()
        .map(|&e| {
            apply_multiplier_with(
                g,
                &spec.params,
                |s| {
                    let w = 1.0 + s.powf(b);
                    w.powf(th) * phi.eval(e * w)
                },
                &TransformOptions::default(),
            )
        })
        .collect()
}

/// T_eps g: the truncated hypersingular integral inverting the Riesz potential.
pub fn truncated_riesz_inverse(g: &RadialProfile, spec: &InversionSpec, eps: f64) -> Result<RadialProfile> {
    Ok(riesz_sweep(g, spec, &[eps])?.remove(0))
}

/// [`truncated_riesz_inverse`] for several eps, sharing the transform of g.
pub fn truncated_riesz_inverse_sweep(
    g: &RadialProfile,
    spec: &InversionSpec,
    eps: &[f64],
) -> Result<Vec<RadialProfile>> {
    riesz_sweep(g, spec, eps)
}

/// V_eps g: the truncated operator inverting the bi-parametric potential.
pub fn truncated_biparam_inverse(g: &RadialProfile, spec: &InversionSpec, eps: f64) -> Result<RadialProfile> {
    Ok(biparam_sweep(g, spec, &[eps])?.remove(0))
}

/// [`truncated_biparam_inverse`] for several eps.
pub fn truncated_biparam_inverse_sweep(
    g: &RadialProfile,
    spec: &InversionSpec,
    eps: &[f64],
) -> Result<Vec<RadialProfile>> {
    biparam_sweep(g, spec, eps)
}

fn kernel_table(spec: &InversionSpec, x_lo: f64) -> Result<KernelLaplaceTable> {
    let s_min = spec.nu.atoms()[0].0;
    KernelLaplaceTable::new(&spec.nu, spec.theta(), x_lo, 745.0 / s_min)
}

/// T_eps applied to the Riesz potential of f, computed from f as
/// integral_0^inf B^(beta, eps s) f K_theta(s) ds.
pub fn truncated_riesz_inverse_kernel_route(
    f: &RadialProfile,
    spec: &InversionSpec,
    eps: f64,
) -> Result<RadialProfile> {
    require_kind(spec, PotentialKind::Riesz)?;
    check_eps(eps)?;
    let table = kernel_table(spec, eps * f.r_min().powf(spec.beta).min(1.0) * 1e-3)?;
    let b = spec.beta;
    apply_multiplier_with(f, &spec.params, |s| table.eval(eps * s.powf(b)), &TransformOptions::default())
}

/// V_eps applied to the bi-parametric potential of f, computed from f as
/// integral_0^inf e^(-eps s) B^(beta, eps s) f K_theta(s) ds.
pub fn truncated_biparam_inverse_kernel_route(
    f: &RadialProfile,
    spec: &InversionSpec,
    eps: f64,
) -> Result<RadialProfile> {
    require_kind(spec, PotentialKind::Biparametric)?;
    check_eps(eps)?;
    let table = kernel_table(spec, eps * 0.5)?;
    let b = spec.beta;
    apply_multiplier_with(
        f,
        &spec.params,
        |s| table.eval(eps * (1.0 + s.powf(b))),
        &TransformOptions::default(),
    )
}

/// The bi-parametric potential rebuilt from damped wavelet-like transforms:
/// (1 / (kappa Gamma(theta))) integral_0^inf t^(theta-1) V^(beta,t) f dt.
pub fn biparam_from_wavelet(f: &RadialProfile, spec: &InversionSpec) -> Result<RadialProfile> {
    let theta = spec.theta();
    let kappa = spec.nu.kappa(theta);
    if kappa.abs() <= 1e-12 * spec.nu.total_variation() * spec.nu.atoms()[0].0.powf(-theta) {
        return Err(Error::ZeroKappa);
    }
    if let Some(c) = f.constant_value() {
        return Ok(f.scaled(if c == 0.0 { 0.0 } else { 1.0 }));
    }
    let norm = kappa * gamma(theta)?;
    let (nu, beta) = (&spec.nu, spec.beta);
    let table = NumericMultiplier::tabulate(
        |s| {
            let w = 1.0 + s.powf(beta);
            let h = |t: f64| t.powf(theta - 1.0) * nu.laplace_transform(t * w);
            Ok(time_integral(&h, 1.0 / (w * nu.s_max()))? / norm)
        },
        1e-8,
        1e4,
        800,
    )?;
    apply_multiplier_with(f, &spec.params, |s| table.eval(s), &TransformOptions::default())
}

/// ||T_eps g||_p (or ||V_eps g||_p) along `eps_grid`.
///
/// A necessary-condition check at finite resolution: bounded norms are
/// expected for g in the potential space, growth indicates it is not.
pub fn sup_norm_diagnostic(
    g: &RadialProfile,
    spec: &InversionSpec,
    eps_grid: &[f64],
    p: f64,
) -> Result<Vec<(f64, f64)>> {
    if eps_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("eps grid must be strictly decreasing".into()));
    }
    let outs = match spec.kind {
        PotentialKind::Riesz => riesz_sweep(g, spec, eps_grid)?,
        PotentialKind::Biparametric => biparam_sweep(g, spec, eps_grid)?,
    };
    eps_grid
        .iter()
        .zip(outs)
        .map(|(&e, out)| Ok((e, weighted_norm(&out, p, &spec.params)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{biparametric, riesz, PotentialSpec};
    use crate::radial_transform::{sample_profile, GridSpec};

    fn nu12() -> WaveletMeasure {
        "1:1,2:-1".parse().unwrap()
    }

    fn gaussian() -> RadialProfile {
        sample_profile(|r| (-0.5 * r * r).exp(), &GridSpec::new(1e-3, 20.0, 400).unwrap()).unwrap()
    }

    #[test]
    fn spec_checks() {
        let p = DunklParams::new(1, 0.0).unwrap();
        assert!(matches!(
            InversionSpec::riesz(nu12(), 3.0, 2.0, p),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            InversionSpec::biparametric(nu12(), 2.0, 2.0, p),
            Err(Error::InsufficientVanishingMoments { have: 0, need: 1 })
        ));
        let s = InversionSpec::biparametric(nu12(), 1.0, 2.0, p).unwrap();
        assert!((s.constant().unwrap() - 2.0 * std::f64::consts::PI.sqrt() * (2f64.sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn phi_table_limits() {
        for (nu, theta) in [(nu12(), 0.5), ("1:1,2:-2,3:1".parse().unwrap(), 1.0), (nu12(), 0.3)] {
            let phi = PhiTable::new(&nu, theta).unwrap();
            let c = phi.constant();
            let x0 = phi.x0;
            // The series head and the tabulated body meet at x0.
            let below = phi.eval(x0 * (1.0 - 1e-12));
            let above = phi.eval(x0);
            assert!((below - above).abs() < 1e-11 * c.abs(), "{below} {above}");
            assert!((phi.eval(1e-14) - c).abs() < 1e-6 * c.abs());
            // Against direct quadrature.
            for &x in &[0.7, 3.0, 20.0] {
                let h = |t: f64| nu.laplace_transform(t) * t.powf(-theta - 1.0);
                let q = integrate_to_infinity(&h, x, f64::INFINITY, &QuadOptions::new(1e-300, 1e-13)).unwrap();
                assert!((phi.eval(x) - q.value).abs() < 1e-10 * c.abs(), "x={x}");
            }
        }
    }

    #[test]
    fn kernel_laplace_matches_phi() {
        let nu: WaveletMeasure = "1:1,2:-2,3:1".parse().unwrap();
        let phi = PhiTable::new(&nu, 0.7).unwrap();
        let k = KernelLaplaceTable::new(&nu, 0.7, 1e-4, 745.0).unwrap();
        for &x in &[1e-3, 0.05, 0.4, 2.0, 9.0] {
            assert!((phi.eval(x) - k.eval(x)).abs() < 1e-8, "x={x}: {} {}", phi.eval(x), k.eval(x));
        }
    }

    #[test]
    fn riesz_inversion_origin_matches_oracle() {
        // (1/C) T_eps(I f)(0) - f(0) for a Gaussian, n = 3, gamma = 0, mpmath values.
        let params = DunklParams::new(3, 0.0).unwrap();
        let f = gaussian();
        let g = riesz(&f, &PotentialSpec::riesz(1.0, params).unwrap()).unwrap();
        let spec = InversionSpec::riesz(nu12(), 1.0, 2.0, params).unwrap();
        let c = spec.constant().unwrap();
        let outs = truncated_riesz_inverse_sweep(&g, &spec, &[1e-1, 1e-2]).unwrap();
        let want = [-0.579_426_436_974_794_8, -0.213_126_583_334_763_4];
        for (out, w) in outs.iter().zip(want) {
            assert!((out.origin_value() / c - 1.0 - w).abs() < 1e-6, "{}", out.origin_value() / c - 1.0);
        }
    }

    #[test]
    fn biparam_routes_agree() {
        let params = DunklParams::new(2, 0.0).unwrap();
        let f = gaussian();
        let spec = InversionSpec::biparametric(nu12(), 1.0, 2.0, params).unwrap();
        let g = biparametric(&f, &PotentialSpec::bessel(1.0, params).unwrap()).unwrap();
        let a = truncated_biparam_inverse(&g, &spec, 1e-2).unwrap();
        let b = truncated_biparam_inverse_kernel_route(&f, &spec, 1e-2).unwrap();
        assert!(a.sup_distance(&b) < 1e-6, "{}", a.sup_distance(&b));
        let w = biparam_from_wavelet(&f, &spec).unwrap();
        assert!(w.sup_distance(&g) < 1e-6, "{}", w.sup_distance(&g));
        let zero = RadialProfile::constant(0.0, &GridSpec::new(1e-3, 20.0, 64).unwrap()).unwrap();
        assert_eq!(truncated_biparam_inverse(&zero, &spec, 1e-2).unwrap().constant_value(), Some(0.0));
    }

    #[test]
    fn zero_kappa() {
        // c_2 chosen so that c_1 + c_2 2^(-1/2) + c_3 3^(-1/2) = 0 with c_1 + c_2 + c_3 = 0.
        let c2 = (1.0 - 3f64.powf(-0.5)) / (3f64.powf(-0.5) - 2f64.powf(-0.5));
        let nu = WaveletMeasure::new(vec![(1.0, 1.0), (2.0, c2), (3.0, -1.0 - c2)]).unwrap();
        let spec = InversionSpec::biparametric(nu, 1.0, 2.0, DunklParams::new(1, 0.0).unwrap()).unwrap();
        assert!(matches!(biparam_from_wavelet(&gaussian(), &spec), Err(Error::ZeroKappa)));
    }

    #[test]
    fn wavelet_transforms() {
        let params = DunklParams::new(1, 0.5).unwrap();
        let spec = InversionSpec::riesz(nu12(), 1.0, 2.0, params).unwrap();
        let out = wavelet_like_transform(&gaussian(), &spec, 1e-4).unwrap();
        assert!(out.values().iter().all(|x| x.abs() < 1e-3));
        let zero = RadialProfile::constant(0.0, &GridSpec::new(1e-3, 20.0, 64).unwrap()).unwrap();
        assert_eq!(wavelet_like_transform_damped(&zero, &spec, 0.1).unwrap().constant_value(), Some(0.0));
    }
}
