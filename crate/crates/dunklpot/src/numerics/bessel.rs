//! Bessel functions of the first kind for real order v >= -1/2.
//!
//! Three regimes:
//! * x < 12: the ascending power series;
//! * x >= 25 with v well below x: Hankel's asymptotic expansion for the
//!   fractional part of the order, then upward recurrence (stable while the
//!   order stays below x);
//! * everything else: Steed's method (continued fractions CF1 and CF2 with a
//!   downward recurrence), which is accurate for any x >= 2.

use super::gamma::gamma;
use crate::error::{Error, Result};
use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 12.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;
const EPS: f64 = 1e-16;
const FPMIN: f64 = f64::MIN_POSITIVE / EPS;
const MAX_ITER: usize = 100_000;
/// Number of zeros of J_v refined and cached per order.
const CACHED_ZEROS: usize = 64;
/// Degree of the Chebyshev interpolant of sqrt(x) J_v(x) on [SERIES_LIMIT, ASYMPTOTIC_LIMIT].
const MID_DEGREE: usize = 48;
/// Orders up to which that interpolant is used.
const MID_MAX_ORDER: f64 = 8.0;

/// J_v for a fixed order, with the per-order constants precomputed.
///
/// Also exposes the entire function `lambda(x) = J_v(x) / x^v`, which is what
/// the radial transforms integrate, and a cache of the first positive zeros.
#[derive(Debug, Clone)]
pub struct BesselJ {
    v: f64,
    recip_gamma_v1: f64,
    two_pow_minus_v: f64,
    zeros: Vec<f64>,
    /// Chebyshev coefficients of sqrt(x) J_v(x) between the series and
    /// asymptotic regimes, where direct evaluation needs Steed's method.
    mid: Vec<f64>,
}

impl BesselJ {
    pub fn new(v: f64) -> Result<Self> {
        if !(v >= -0.5) || !v.is_finite() {
            return Err(Error::UnsupportedOrder(v));
        }
        let mut b = BesselJ {
            v,
            recip_gamma_v1: 1.0 / gamma(v + 1.0)?,
            two_pow_minus_v: 2f64.powf(-v),
            zeros: Vec::new(),
            mid: Vec::new(),
        };
        if v <= MID_MAX_ORDER {
            b.mid = mid_coefficients(v);
        }
        b.zeros = b.refine_zeros(CACHED_ZEROS);
        Ok(b)
    }

    pub fn order(&self) -> f64 {
        self.v
    }

    /// lambda(0) = 1 / (2^v Gamma(v+1)).
    pub fn lambda_at_zero(&self) -> f64 {
        self.two_pow_minus_v * self.recip_gamma_v1
    }

    /// J_v(x) for x >= 0.
    pub fn j(&self, x: f64) -> f64 {
        if x == 0.0 {
            return if self.v == 0.0 {
                1.0
            } else if self.v > 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        if x < SERIES_LIMIT {
            return self.lambda_series(x) * x.powf(self.v);
        }
        j_large(self.v, x)
    }

    /// J_v(x) / x^v, finite at the origin.
    pub fn lambda(&self, x: f64) -> f64 {
        if x < SERIES_LIMIT {
            return self.lambda_series(x);
        }
        if x < ASYMPTOTIC_LIMIT && !self.mid.is_empty() {
            return self.lambda_mid(x);
        }
        j_large(self.v, x) / x.powf(self.v)
    }

    fn lambda_mid(&self, x: f64) -> f64 {
        let t = (2.0 * x - (SERIES_LIMIT + ASYMPTOTIC_LIMIT)) / (ASYMPTOTIC_LIMIT - SERIES_LIMIT);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.mid[1..].iter().rev() {
            let b0 = c + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        (0.5 * self.mid[0] + t * b1 - b2) * x.powf(-self.v - 0.5)
    }

    fn lambda_series(&self, x: f64) -> f64 {
        let y = -0.25 * x * x;
        let mut term = self.recip_gamma_v1;
        let mut sum = term;
        let mut k = 1.0;
        loop {
            term *= y / (k * (k + self.v));
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() && k > 0.5 * x {
                break;
            }
            if term == 0.0 || k > 300.0 {
                break;
            }
            k += 1.0;
        }
        sum * self.two_pow_minus_v
    }

    /// McMahon's large-zero expansion for the k-th positive zero (k >= 1).
    pub fn mcmahon_zero(&self, k: usize) -> f64 {
        let mu = 4.0 * self.v * self.v;
        let b = (k as f64 + 0.5 * self.v - 0.25) * PI;
        let e = 8.0 * b;
        b - (mu - 1.0) / e
            - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
            - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e.powi(5))
    }

    /// The k-th positive zero of J_v (k >= 1). The first few are refined by
    /// bracketing; later ones use McMahon's expansion directly.
    pub fn zero(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        if k <= self.zeros.len() {
            self.zeros[k - 1]
        } else {
            self.mcmahon_zero(k)
        }
    }

    fn refine_zeros(&self, count: usize) -> Vec<f64> {
        // Scan for sign changes with a step well below the zero spacing (~pi).
        let mut zeros = Vec::with_capacity(count);
        let step = 0.25;
        let mut a = 1e-3;
        let mut fa = self.j(a);
        while zeros.len() < count {
            let b = a + step;
            let fb = self.j(b);
            if fa == 0.0 {
                zeros.push(a);
            } else if fa.signum() != fb.signum() {
                zeros.push(self.bisect(a, b, fa));
            }
            a = b;
            fa = fb;
        }
        zeros
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.j(m);
            if fm == 0.0 {
                return m;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

/// J_v(x) for real order v >= -1/2 and x >= 0.
pub fn bessel_j(v: f64, x: f64) -> Result<f64> {
    if !(v >= -0.5) {
        return Err(Error::UnsupportedOrder(v));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("bessel_j needs x >= 0, got {x}")));
    }
    if x < SERIES_LIMIT {
        let rg = 1.0 / gamma(v + 1.0)?;
        let b = BesselJ {
            v,
            recip_gamma_v1: rg,
            two_pow_minus_v: 2f64.powf(-v),
            zeros: Vec::new(),
            mid: Vec::new(),
        };
        return Ok(b.j(x));
    }
    Ok(j_large(v, x))
}

fn mid_coefficients(v: f64) -> Vec<f64> {
    let n = MID_DEGREE;
    let (a, b) = (SERIES_LIMIT, ASYMPTOTIC_LIMIT);
    let angle = |j: usize, k: usize| PI * j as f64 * (k as f64 + 0.5) / n as f64;
    let samples: Vec<f64> = (0..n)
        .map(|k| {
            let x = 0.5 * (a + b) + 0.5 * (b - a) * angle(1, k).cos();
            j_large(v, x) * x.sqrt()
        })
        .collect();
    (0..n)
        .map(|j| {
            let s: f64 = samples.iter().enumerate().map(|(k, f)| f * angle(j, k).cos()).sum();
            2.0 * s / n as f64
        })
        .collect()
}

fn j_large(v: f64, x: f64) -> f64 {
    if x >= ASYMPTOTIC_LIMIT && v < 0.5 * x {
        j_asymptotic_recurrence(v, x)
    } else {
        j_steed(v, x)
    }
}

/// Hankel's expansion for J_mu(x), |mu| <= 3/2 and x >= 25.
fn j_hankel(mu: f64, x: f64) -> f64 {
    let m4 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (m4 - odd * odd) / (kf * 8.0 * x);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // Signs follow +,-,+,... separately within P (even k) and Q (odd k).
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * mu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn j_asymptotic_recurrence(v: f64, x: f64) -> f64 {
    if v < 0.0 {
        return j_hankel(v, x);
    }
    let n = v.floor();
    let mu = v - n;
    let mut j0 = j_hankel(mu, x);
    if n == 0.0 {
        return j0;
    }
    let mut j1 = j_hankel(mu + 1.0, x);
    let mut order = mu + 1.0;
    while order < v - 0.5 {
        let j2 = 2.0 * order / x * j1 - j0;
        j0 = j1;
        j1 = j2;
        order += 1.0;
    }
    j1
}

/// Steed's method for J_v(x), x >= 2.
fn j_steed(v: f64, x: f64) -> f64 {
    let nl = ((v - x + 1.5).floor()).max(0.0) as usize;
    let xmu = v - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_v / J_v by modified Lentz.
    let mut isign = 1.0;
    let mut h = v * xi;
    if h.abs() < FPMIN {
        h = FPMIN;
    }
    let mut b = xi2 * v;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    // Downward recurrence from v to mu with arbitrary normalisation.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = v * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq = (J'_mu + i Y'_mu) / (J_mu + i Y_mu).
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAX_ITER {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    rjl1 * (rjmu / rjl)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_pos(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }
    fn half_neg(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * x.cos()
    }

    #[test]
    fn reference_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert!((bessel_j(0.5, PI / 2.0).unwrap() - 0.636_619_772_4).abs() < 1e-10);
        assert!((bessel_j(-0.5, PI).unwrap() + 0.450_158_158_1).abs() < 1e-10);
        assert!(matches!(bessel_j(-0.6, 1.0), Err(Error::UnsupportedOrder(_))));
    }

    #[test]
    fn integer_orders_against_tabulated_values() {
        // Reference values computed with 25-digit arithmetic.
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (0.0, 10.0, -0.245_935_764_451_348_3),
            (1.0, 10.0, 0.043_472_746_168_861_44),
            (0.0, 30.0, -0.086_367_983_581_040_2),
            (1.0, 50.0, -0.097_511_828_125_175_2),
            (5.0, 20.0, 0.151_169_767_982_394_97),
            (10.0, 15.0, -0.090_071_811_047_659_05),
            (20.0, 15.0, 0.007_360_234_079_223_485),
            (2.0, 100.0, -0.021_528_757_344_505_37),
        ];
        for (v, x, expect) in cases {
            let got = bessel_j(v, x).unwrap();
            assert!((got - expect).abs() < 1e-12, "J_{v}({x}) = {got}, want {expect}");
        }
    }

    #[test]
    fn half_orders_match_closed_forms_everywhere() {
        let mut x = 1e-3;
        while x <= 100.0 {
            let a = bessel_j(0.5, x).unwrap();
            let b = bessel_j(-0.5, x).unwrap();
            assert!((a - half_pos(x)).abs() < 1e-10, "x = {x}");
            assert!((b - half_neg(x)).abs() < 1e-10, "x = {x}");
            x *= 1.013;
        }
        for &x in &[11.99, 12.0, 24.99, 25.0, 400.0, 1000.0] {
            assert!((bessel_j(0.5, x).unwrap() - half_pos(x)).abs() < 1e-12);
            assert!((bessel_j(-0.5, x).unwrap() - half_neg(x)).abs() < 1e-12);
            assert!((bessel_j(1.5, x).unwrap() - (half_pos(x) / x - half_neg(x))).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolated_band_matches_steed() {
        for &v in &[-0.5, 0.0, 0.5, 1.3, 2.3, 4.0, 8.0] {
            let b = BesselJ::new(v).unwrap();
            let mut x = SERIES_LIMIT;
            while x < ASYMPTOTIC_LIMIT {
                let exact = j_steed(v, x) / x.powf(v);
                let scale = x.powf(-v - 0.5);
                assert!((b.lambda(x) - exact).abs() < 3e-14 * scale, "v={v} x={x}");
                x += 0.0137;
            }
        }
        let (pos, neg) = (BesselJ::new(0.5).unwrap(), BesselJ::new(-0.5).unwrap());
        let mut x = SERIES_LIMIT;
        while x < ASYMPTOTIC_LIMIT {
            assert!((pos.lambda(x) * x.sqrt() - half_pos(x)).abs() < 4e-15, "x={x}");
            assert!((neg.lambda(x) / x.sqrt() - half_neg(x)).abs() < 4e-15, "x={x}");
            x += 0.0137;
        }
    }

    #[test]
    fn regimes_agree_at_their_boundaries() {
        for &v in &[-0.5, 0.0, 0.3, 1.7, 2.3, 7.5, 30.0] {
            for &x in &[12.0, 25.0, 60.0] {
                let series = if x <= 12.0 {
                    let b = BesselJ::new(v).unwrap();
                    b.lambda_series(x) * x.powf(v)
                } else {
                    j_hankel_or_recurrence_or_nan(v, x)
                };
                let steed = j_steed(v, x);
                if series.is_finite() {
                    assert!((series - steed).abs() < 1e-11, "v={v} x={x}: {series} vs {steed}");
                }
            }
        }
    }

    fn j_hankel_or_recurrence_or_nan(v: f64, x: f64) -> f64 {
        if x >= ASYMPTOTIC_LIMIT && v < 0.5 * x {
            j_asymptotic_recurrence(v, x)
        } else {
            f64::NAN
        }
    }

    #[test]
    fn lambda_is_entire() {
        let b = BesselJ::new(-0.5).unwrap();
        assert!((b.lambda(0.0) - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((b.lambda(3.0) - (2.0 / PI).sqrt() * 3.0_f64.cos()).abs() < 1e-13);
        let b = BesselJ::new(2.3).unwrap();
        assert!((b.lambda(0.0) - b.lambda_at_zero()).abs() < 1e-15);
    }

    #[test]
    fn zeros_are_zeros() {
        for &v in &[-0.5, 0.0, 0.7, 2.3] {
            let b = BesselJ::new(v).unwrap();
            for k in 1..=70 {
                let z = b.zero(k);
                assert!(b.j(z).abs() < 1e-9, "v={v} k={k}");
                if k > 1 {
                    assert!(z > b.zero(k - 1));
                }
            }
        }
        let b = BesselJ::new(0.0).unwrap();
        assert!((b.zero(1) - 2.404_825_557_695_773).abs() < 1e-12);
    }
}
