//! Sampled radial profiles with interpolation and an optional power-law tail.

use super::spline::LogSpline;
use super::GridSpec;
use crate::error::{Error, Result};

/// One term a * r^p of a tail model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub amplitude: f64,
    pub exponent: f64,
}

/// Behaviour beyond the last grid radius: a finite sum of power terms.
///
/// A least-squares fit produces a single term; analytically known tails
/// (for example the large-r expansion of a stable kernel) may carry several.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTail {
    terms: Vec<PowerTerm>,
}

impl PowerTail {
    pub fn new(terms: Vec<PowerTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("tail needs at least one term".into()));
        }
        if terms
            .iter()
            .any(|t| !t.amplitude.is_finite() || !t.exponent.is_finite())
        {
            return Err(Error::InvalidArgument("tail terms must be finite".into()));
        }
        Ok(PowerTail { terms })
    }

    pub fn single(amplitude: f64, exponent: f64) -> Result<Self> {
        Self::new(vec![PowerTerm {
            amplitude,
            exponent,
        }])
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    /// The slowest-decaying exponent.
    pub fn leading_exponent(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.exponent)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude * r.powf(t.exponent))
            .sum()
    }

    fn scaled(&self, c: f64) -> PowerTail {
        PowerTail {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm {
                    amplitude: c * t.amplitude,
                    exponent: t.exponent,
                })
                .collect(),
        }
    }
}

/// A radial function F_0 on [0, infinity).
///
/// Values are held on strictly increasing positive radii and interpolated by
/// a cubic spline in ln r. Below the first radius the profile blends linearly
/// into `origin_value`, or, when the origin value is infinite (a singular
/// profile), continues the power law through the first two samples. Beyond
/// the last radius the tail model applies, or the profile is zero.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    origin_value: f64,
    tail: Option<PowerTail>,
    spline: LogSpline,
}

impl PartialEq for RadialProfile {
    fn eq(&self, other: &Self) -> bool {
        self.radii == other.radii
            && self.values == other.values
            && (self.origin_value == other.origin_value
                || (self.origin_value.is_nan() && other.origin_value.is_nan()))
            && self.tail == other.tail
    }
}

/// Relative level below which samples count as numerically zero.
const NEGLIGIBLE: f64 = 1e-15;

impl RadialProfile {
    /// Build a profile without a tail.
    ///
    /// `origin_value` may be infinite to mark a profile singular at r = 0.
    pub fn new(radii: Vec<f64>, values: Vec<f64>, origin_value: f64) -> Result<Self> {
        if radii.len() < 4 || radii.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "profile needs at least 4 radii and matching values (got {} and {})",
                radii.len(),
                values.len()
            )));
        }
        if radii[0] <= 0.0 || !radii.iter().all(|r| r.is_finite()) {
            return Err(Error::InvalidArgument("radii must be positive and finite".into()));
        }
        if let Some(w) = radii.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!(
                "radii must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(radii[i]));
        }
        if origin_value.is_nan() {
            return Err(Error::NonFiniteSample(0.0));
        }
        let spline = LogSpline::new(&radii, &values);
        Ok(RadialProfile {
            radii,
            values,
            origin_value,
            tail: None,
            spline,
        })
    }

    /// Attach a tail model.
    pub fn with_tail(mut self, tail: PowerTail) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Remove the tail model, making the profile zero beyond the grid.
    pub fn without_tail(mut self) -> Self {
        self.tail = None;
        self
    }

    /// Attach a fitted tail when the last decade of samples follows a power law.
    pub fn with_fitted_tail(self) -> Self {
        match fit_power_tail(&self.radii, &self.values) {
            Some(t) => self.with_tail(t),
            None => self,
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin_value(&self) -> f64 {
        self.origin_value
    }

    pub fn tail(&self) -> Option<&PowerTail> {
        self.tail.as_ref()
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("non-empty")
    }

    /// The log-spaced grid these radii came from, if they are log-spaced.
    pub fn grid_spec(&self) -> Option<GridSpec> {
        let g = GridSpec::new(self.r_min(), self.r_max(), self.len()).ok()?;
        let same = g
            .radii()
            .iter()
            .zip(&self.radii)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * b);
        same.then_some(g)
    }

    /// Exponent k of the power law used below the first radius for singular
    /// profiles (value ~ r^k); `None` when the origin value is finite.
    pub fn origin_exponent(&self) -> Option<f64> {
        if self.origin_value.is_finite() {
            return None;
        }
        let (r0, r1) = (self.radii[0], self.radii[1]);
        let (v0, v1) = (self.values[0], self.values[1]);
        if v0 == 0.0 || v1 == 0.0 || v0.signum() != v1.signum() {
            return Some(0.0);
        }
        Some((v1 / v0).ln() / (r1 / r0).ln())
    }

    /// F_0(r) for r >= 0.
    pub fn eval(&self, r: f64) -> f64 {
        let r0 = self.radii[0];
        if r < r0 {
            if self.origin_value.is_finite() {
                return self.origin_value + (self.values[0] - self.origin_value) * (r / r0);
            }
            if r == 0.0 {
                return self.origin_value;
            }
            let k = self.origin_exponent().unwrap_or(0.0);
            return self.values[0] * (r / r0).powf(k);
        }
        let rn = self.r_max();
        if r > rn {
            return match &self.tail {
                Some(t) => t.eval(r),
                None => 0.0,
            };
        }
        self.spline.eval_u(r.ln())
    }

    /// Radius beyond which the profile vanishes to working precision.
    ///
    /// Infinite when a tail is attached.
    pub fn support_end(&self) -> f64 {
        if self.tail.is_some() {
            return f64::INFINITY;
        }
        let mut scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if self.origin_value.is_finite() {
            scale = scale.max(self.origin_value.abs());
        }
        let n = self.len();
        match self
            .values
            .iter()
            .rposition(|v| v.abs() > NEGLIGIBLE * scale)
        {
            Some(i) => self.radii[(i + 2).min(n - 1)],
            None => self.radii[1.min(n - 1)],
        }
    }

    /// `Some(c)` when every sample, the origin and the tail describe the constant c.
    pub fn constant_value(&self) -> Option<f64> {
        let c = self.origin_value;
        if !c.is_finite() || self.values.iter().any(|&v| v != c) {
            return None;
        }
        match &self.tail {
            Some(t) if t.terms.len() == 1 && t.terms[0].exponent == 0.0 && t.terms[0].amplitude == c => {
                Some(c)
            }
            _ => None,
        }
    }

    /// A constant profile on the given grid (its tail is the constant itself).
    pub fn constant(c: f64, grid: &GridSpec) -> Result<Self> {
        let radii = grid.radii();
        let values = vec![c; radii.len()];
        Ok(Self::new(radii, values, c)?.with_tail(PowerTail::single(c, 0.0)?))
    }

    /// c * F.
    pub fn scaled(&self, c: f64) -> RadialProfile {
        let values: Vec<f64> = self.values.iter().map(|v| c * v).collect();
        let mut out = RadialProfile::new(self.radii.clone(), values, c * self.origin_value)
            .expect("scaling preserves validity");
        if c == 0.0 {
            out.origin_value = 0.0;
        }
        out.tail = self.tail.as_ref().map(|t| t.scaled(c));
        out
    }

    /// a * self + b * other on a shared grid.
    pub fn linear_combination(&self, a: f64, other: &RadialProfile, b: f64) -> Result<RadialProfile> {
        if self.radii != other.radii {
            return Err(Error::InvalidArgument("profiles live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let origin = a * self.origin_value + b * other.origin_value;
        let mut out = RadialProfile::new(self.radii.clone(), values, origin)?;
        out.tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (x, y) => {
                let mut terms = Vec::new();
                if let Some(t) = x {
                    terms.extend(t.scaled(a).terms);
                }
                if let Some(t) = y {
                    terms.extend(t.scaled(b).terms);
                }
                Some(PowerTail::new(terms)?)
            }
        };
        Ok(out)
    }

    /// Largest absolute difference over this profile's radii and the origin.
    pub fn sup_distance(&self, other: &RadialProfile) -> f64 {
        let mut d = self
            .radii
            .iter()
            .map(|&r| (self.eval(r) - other.eval(r)).abs())
            .fold(0.0, f64::max);
        if self.origin_value.is_finite() && other.origin_value.is_finite() {
            d = d.max((self.origin_value - other.origin_value).abs());
        }
        d
    }
}

/// Least-squares power law on the last decade of a sampled profile.
///
/// Returns `None` when the decade is numerically zero, changes sign, or is not
/// well described by a power law. The amplitude is adjusted so that the tail
/// meets the last sample exactly.
pub fn fit_power_tail(radii: &[f64], values: &[f64]) -> Option<PowerTail> {
    let n = radii.len();
    let r_max = radii[n - 1];
    let start = radii.iter().position(|&r| r >= r_max / 10.0)?;
    let idx: Vec<usize> = (start..n).collect();
    if idx.len() < 4 {
        return None;
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let window_max = idx.iter().fold(0.0_f64, |m, &i| m.max(values[i].abs()));
    if window_max <= 1e-14 * scale {
        return None;
    }
    let sign = values[n - 1].signum();
    if idx.iter().any(|&i| values[i] == 0.0 || values[i].signum() != sign) {
        return None;
    }
    let xs: Vec<f64> = idx.iter().map(|&i| radii[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| values[i].abs().ln()).collect();
    let (slope, intercept) = ols(&xs, &ys);
    let max_res = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    if max_res > 0.05 {
        return None;
    }
    // The local slope over the final fifth must agree with the fit.
    let tail_start = idx.len() * 4 / 5;
    if idx.len() - tail_start >= 3 {
        let (local, _) = ols(&xs[tail_start..], &ys[tail_start..]);
        if (local - slope).abs() > 0.1 {
            return None;
        }
    }
    let amplitude = values[n - 1] / r_max.powf(slope);
    PowerTail::single(amplitude, slope).ok()
}

/// Ordinary least squares y = b + m x; returns (m, b).
pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let m = sxy / sxx;
    (m, my - m * mx)
}
