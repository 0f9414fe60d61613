//! Semi-infinite integrals against Bessel functions.
//!
//! The half-line is cut at consecutive zeros of J_v(r s); each panel is
//! integrated by adaptive Gauss–Kronrod and the alternating sequence of partial
//! sums is accelerated with iterated Aitken extrapolation.

use super::bessel::BesselJ;
use super::quadrature::{
    integrate_finite_with, integrate_from_zero, integrate_to_infinity, QuadOptions,
    QuadratureResult,
};
use crate::error::{Error, Result};

/// Options for the Bessel-weighted integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    /// The integrand is identically zero beyond this point (may be infinite).
    pub cutoff: f64,
}

impl Default for OscillatoryOptions {
    fn default() -> Self {
        OscillatoryOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_evals: 200_000,
            cutoff: f64::INFINITY,
        }
    }
}

impl OscillatoryOptions {
    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn quad(&self, scale: f64) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol * scale,
            rel_tol: self.rel_tol * scale,
            max_evals: self.max_evals,
        }
    }
}

/// Number of trailing partial sums fed to the extrapolation.
const AITKEN_WINDOW: usize = 15;

/// Iterated Aitken delta-squared on a sequence of partial sums.
pub fn iterated_aitken(seq: &[f64]) -> f64 {
    let mut s: Vec<f64> = seq.to_vec();
    while s.len() >= 3 {
        let mut next = Vec::with_capacity(s.len() - 2);
        for i in 0..s.len() - 2 {
            let d1 = s[i + 1] - s[i];
            let d2 = s[i + 2] - s[i + 1];
            let den = d2 - d1;
            let x = s[i + 2] - d2 * d2 / den;
            next.push(if den != 0.0 && x.is_finite() { x } else { s[i + 2] });
        }
        s = next;
    }
    *s.last().expect("non-empty sequence")
}

/// Computes the integral over [s0, infinity) of g(s) lambda_v(r s) s^(2v+1),
/// where lambda_v(x) = J_v(x) / x^v.
///
/// This form is regular at the origin for every v >= -1/2 and equals
/// r^(-v) times the integral of g(s) J_v(r s) s^(v+1).
pub fn lambda_weighted_integral<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    bessel: &BesselJ,
    r: f64,
    s0: f64,
    opts: &OscillatoryOptions,
) -> Result<QuadratureResult> {
    let q = 2.0 * bessel.order() + 1.0;
    let end = opts.cutoff;
    if !(s0 >= 0.0) || !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need s0 >= 0 and r >= 0, got s0 = {s0}, r = {r}"
        )));
    }
    if s0 >= end {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    if r == 0.0 {
        let l0 = bessel.lambda_at_zero();
        let h = |s: f64| if s == 0.0 { 0.0 } else { g(s) * l0 * s.powf(q) };
        return integrate_smooth(&h, s0, end, opts);
    }
    let h = |s: f64| {
        if s == 0.0 {
            if q == 0.0 {
                g(0.0) * bessel.lambda_at_zero()
            } else {
                0.0
            }
        } else {
            g(s) * bessel.lambda(r * s) * s.powf(q)
        }
    };

    // First zero of J_v(r s) beyond s0.
    let mut k = 1;
    while bessel.zero(k) / r <= s0 {
        k += 1;
    }
    let first = (bessel.zero(k) / r).min(end);
    let head = integrate_smooth(&h, s0, first, opts)?;
    let mut evals = head.evaluations;
    let mut err = head.error_estimate;
    let mut sum = head.value;
    if first >= end {
        return Ok(QuadratureResult {
            value: sum,
            error_estimate: err,
            evaluations: evals,
        });
    }

    let panel_opts = opts.quad(0.02);
    let mut partial: Vec<f64> = vec![sum];
    let mut terms: Vec<f64> = Vec::new();
    let mut extrapolated: Vec<f64> = Vec::new();
    let mut growing = 0;
    let mut a = first;
    loop {
        k += 1;
        let b = (bessel.zero(k) / r).min(end);
        let panel = integrate_finite_with(&h, a, b, &panel_opts)?;
        evals += panel.evaluations;
        err += panel.error_estimate;
        sum += panel.value;
        terms.push(panel.value);
        partial.push(sum);
        if b >= end {
            return Ok(QuadratureResult {
                value: sum,
                error_estimate: err,
                evaluations: evals,
            });
        }
        a = b;
        let n = terms.len();

        // Plain convergence: the last few panels are negligible.
        let tol = opts.target(sum);
        if n >= 3 && terms[n - 3..].iter().all(|t| t.abs() <= 0.01 * tol) {
            return Ok(QuadratureResult {
                value: sum,
                error_estimate: err + terms[n - 1].abs(),
                evaluations: evals,
            });
        }

        // Panels whose magnitude keeps growing signal an integrand that is not
        // dominated by a decaying envelope.
        if end.is_infinite() && n >= 3 && terms[n - 1].abs() > terms[n - 3].abs() {
            growing += 1;
        } else {
            growing = 0;
        }
        if growing >= 12 {
            return Err(Error::EnvelopeViolation(a));
        }

        // Extrapolation once the panel sums alternate with shrinking magnitude.
        let alternating = n >= 4
            && terms[n - 4..].windows(2).all(|w| w[0] * w[1] < 0.0)
            && terms[n - 1].abs() < terms[n - 3].abs();
        if alternating {
            let start = partial.len().saturating_sub(AITKEN_WINDOW);
            let e = iterated_aitken(&partial[start..]);
            extrapolated.push(e);
            let m = extrapolated.len();
            if m >= 3 {
                let d1 = (extrapolated[m - 1] - extrapolated[m - 2]).abs();
                let d2 = (extrapolated[m - 2] - extrapolated[m - 3]).abs();
                let tol = opts.target(e);
                if d1 <= 0.1 * tol && d2 <= 0.1 * tol {
                    return Ok(QuadratureResult {
                        value: e,
                        error_estimate: err + d1.max(d2),
                        evaluations: evals,
                    });
                }
            }
        } else {
            extrapolated.clear();
        }

        if evals > opts.max_evals {
            let best = extrapolated.last().copied().unwrap_or(sum);
            return Err(Error::NonConvergence {
                best,
                error_estimate: err + terms[n - 1].abs(),
                evaluations: evals,
            });
        }
    }
}

/// Non-oscillatory integral over [a, b] (b may be infinite), switching to a
/// logarithmic variable when the interval spans a large ratio.
pub(crate) fn integrate_smooth<H: Fn(f64) -> f64 + ?Sized>(
    h: &H,
    a: f64,
    b: f64,
    opts: &OscillatoryOptions,
) -> Result<QuadratureResult> {
    let qopts = opts.quad(0.1);
    if a == 0.0 {
        let mid = b.min(1.0);
        let mut r = integrate_from_zero(h, mid, &qopts)?;
        if b > mid {
            let t = integrate_to_infinity(h, mid, b, &qopts)?;
            r.value += t.value;
            r.error_estimate += t.error_estimate;
            r.evaluations += t.evaluations;
        }
        return Ok(r);
    }
    if b.is_infinite() || b / a > 4.0 {
        return integrate_to_infinity(h, a, b, &qopts);
    }
    integrate_finite_with(h, a, b, &qopts)
}

/// Integral over [s0, infinity) of F(s) J_v(r s) s^(v+1) ds for r > 0.
pub fn integrate_bessel_tail<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    v: f64,
    r: f64,
    s0: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    let opts = OscillatoryOptions {
        abs_tol,
        rel_tol: 0.0,
        ..Default::default()
    };
    integrate_bessel_tail_with(f, v, r, s0, &opts)
}

/// [`integrate_bessel_tail`] with full options.
pub fn integrate_bessel_tail_with<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    v: f64,
    r: f64,
    s0: f64,
    opts: &OscillatoryOptions,
) -> Result<QuadratureResult> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("need r > 0, got {r}")));
    }
    let bessel = BesselJ::new(v)?;
    let scale = r.powf(v);
    let scaled = OscillatoryOptions {
        abs_tol: opts.abs_tol / scale,
        ..*opts
    };
    let mut res = lambda_weighted_integral(f, &bessel, r, s0, &scaled)?;
    res.value *= scale;
    res.error_estimate *= scale;
    Ok(res)
}
