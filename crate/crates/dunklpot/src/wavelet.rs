//! Finite atomic wavelet measures nu = sum_j c_j delta_{s_j} with zero mass.
//!
//! Everything the inversion formulas need reduces to finite sums over the
//! atoms: moments, the Laplace transform mu(t), the normalizing constant
//! C(r, nu) = integral_0^inf mu(t) t^(-1-r) dt, kappa and the
//! Riemann-Liouville kernel K_theta.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    gamma, integrate_finite_with, integrate_from_zero, integrate_to_infinity, QuadOptions,
};

/// A finite signed measure on (0, inf) with total mass zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveletMeasure {
    atoms: Vec<(f64, f64)>,
    vanishing_order: usize,
}

/// Relative level at which a moment counts as zero.
const MOMENT_TOL: f64 = 1e-10;

impl WaveletMeasure {
    /// Build from (s_j, c_j) pairs; atoms are sorted by position.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.len() < 2 {
            return Err(Error::InvalidMeasure("need at least two atoms".into()));
        }
        if atoms.iter().any(|&(s, c)| !(s > 0.0) || !s.is_finite() || !c.is_finite()) {
            return Err(Error::InvalidMeasure("atoms need finite s > 0 and finite weights".into()));
        }
        if atoms.iter().any(|&(_, c)| c == 0.0) {
            return Err(Error::InvalidMeasure("atom weights must be nonzero".into()));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMeasure("atom positions must be distinct".into()));
        }
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        let tv: f64 = atoms.iter().map(|a| a.1.abs()).sum();
        if mass.abs() > 1e-12 * tv {
            return Err(Error::InvalidMeasure(format!(
                "total mass must vanish, got {mass}"
            )));
        }
        let mut nu = WaveletMeasure {
            atoms,
            vanishing_order: 0,
        };
        let mut m = 0;
        while m + 2 < nu.atoms.len() && nu.moment_vanishes((m + 1) as f64) {
            m += 1;
        }
        nu.vanishing_order = m;
        Ok(nu)
    }

    fn moment_vanishes(&self, m: f64) -> bool {
        let scale: f64 = self.atoms.iter().map(|&(s, c)| c.abs() * s.powf(m)).sum();
        self.moment(m).abs() <= MOMENT_TOL * scale
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Largest M with moments 0..=M all zero.
    pub fn vanishing_order(&self) -> usize {
        self.vanishing_order
    }

    /// Total variation sum |c_j|.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.abs()).sum()
    }

    pub fn s_max(&self) -> f64 {
        self.atoms.last().expect("non-empty").0
    }

    /// The measure with every atom moved from s_j to lambda s_j.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(s, c)| (lambda * s, c)).collect())
    }

    /// sum_j c_j s_j^m.
    pub fn moment(&self, m: f64) -> f64 {
        self.atoms.iter().map(|&(s, c)| c * s.powf(m)).sum()
    }

    /// mu(t) = sum_j c_j e^(-t s_j).
    ///
    /// For small t the vanishing moments are used to avoid cancellation.
    pub fn laplace_transform(&self, t: f64) -> f64 {
        if t * self.s_max() < 0.5 {
            self.laplace_series(t)
        } else {
            self.atoms.iter().map(|&(s, c)| c * (-t * s).exp()).sum()
        }
    }

    fn laplace_series(&self, t: f64) -> f64 {
        // mu(t) = sum_{m > M} (-t)^m moment(m) / m!
        let mut sum = 0.0;
        let mut fact = 1.0;
        for m in 1..=self.vanishing_order + 40 {
            fact *= m as f64;
            if m <= self.vanishing_order {
                continue;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * t.powi(m as i32) * self.moment(m as f64) / fact;
        }
        sum
    }

    fn require_order(&self, r: f64) -> Result<()> {
        let need = r.floor() as usize;
        if self.vanishing_order < need {
            return Err(Error::InsufficientVanishingMoments {
                have: self.vanishing_order,
                need,
            });
        }
        Ok(())
    }

    /// C(r, nu) in closed form.
    ///
    /// Gamma(-r) sum_j c_j s_j^r for fractional r, and
    /// ((-1)^(r+1) / r!) sum_j c_j s_j^r ln s_j for integer r.
    pub fn normalizing_constant(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be > 0, got {r}")));
        }
        self.require_order(r)?;
        if r.fract() == 0.0 {
            let sign = if (r as u64) % 2 == 1 { 1.0 } else { -1.0 };
            let s: f64 = self.atoms.iter().map(|&(s, c)| c * s.powf(r) * s.ln()).sum();
            Ok(sign * s / gamma(r + 1.0)?)
        } else {
            Ok(gamma(-r)? * self.moment(r))
        }
    }

    /// C(r, nu) by quadrature of integral_0^inf mu(t) t^(-1-r) dt.
    pub fn normalizing_constant_via_mu(&self, r: f64, tol: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be > 0, got {r}")));
        }
        self.require_order(r)?;
        let opts = QuadOptions::new(0.1 * tol, 0.0);
        let h = |t: f64| self.laplace_transform(t) * t.powf(-1.0 - r);
        let split = 1.0 / self.s_max();
        let head = integrate_from_zero(&h, split, &opts)?;
        let tail = integrate_to_infinity(&h, split, f64::INFINITY, &opts)?;
        Ok(head.value + tail.value)
    }

    /// kappa_nu(r) = sum_j c_j s_j^(-r).
    pub fn kappa(&self, r: f64) -> f64 {
        self.moment(-r)
    }

    /// K_theta(s) = (1 / (s Gamma(theta + 1))) sum_{s_j < s} c_j (s - s_j)^theta.
    pub fn rl_kernel(&self, theta: f64, s: f64) -> Result<f64> {
        if !(theta > 0.0) {
            return Err(Error::InvalidArgument(format!("theta must be > 0, got {theta}")));
        }
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("s must be > 0, got {s}")));
        }
        let g = gamma(theta + 1.0)?;
        if s > 4.0 * self.s_max() {
            return Ok(self.rl_kernel_far(theta, s) / (s * g));
        }
        let sum: f64 = self
            .atoms
            .iter()
            .filter(|a| a.0 < s)
            .map(|&(sj, c)| c * (s - sj).powf(theta))
            .sum();
        Ok(sum / (s * g))
    }

    /// sum_j c_j (s - s_j)^theta for s beyond every atom, by the binomial series
    /// s^theta sum_k binom(theta, k) (-1)^k moment(k) s^(-k).
    fn rl_kernel_far(&self, theta: f64, s: f64) -> f64 {
        let mut binom = 1.0;
        let mut sum = 0.0;
        for k in 0..=self.vanishing_order + 60 {
            if k > 0 {
                binom *= (theta - (k - 1) as f64) / k as f64;
            }
            if k <= self.vanishing_order {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * binom * self.moment(k as f64) * s.powf(-(k as f64));
            sum += term;
            if term == 0.0 && binom == 0.0 {
                break;
            }
        }
        s.powf(theta) * sum
    }

    /// integral_0^inf K_theta(s) ds by quadrature between and beyond the atoms.
    pub fn rl_kernel_integral(&self, theta: f64, tol: f64) -> Result<f64> {
        if !(theta > 0.0) {
            return Err(Error::InvalidArgument(format!("theta must be > 0, got {theta}")));
        }
        self.require_order(theta)?;
        let opts = QuadOptions {
            abs_tol: 0.05 * tol,
            rel_tol: 0.0,
            max_evals: 400_000,
        };
        let k = |s: f64| self.rl_kernel(theta, s).unwrap_or(f64::NAN);
        let mut knots: Vec<f64> = self.atoms.iter().map(|a| a.0).collect();
        knots.push(4.0 * self.s_max());
        let mut total = 0.0;
        for w in knots.windows(2) {
            total += integrate_finite_with(&k, w[0], w[1], &opts)?.value;
        }
        let far = integrate_to_infinity(&k, 4.0 * self.s_max(), f64::INFINITY, &opts)?;
        let total = total + far.value;
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                best: total,
                error_estimate: f64::INFINITY,
                evaluations: 0,
            });
        }
        Ok(total)
    }
}

/// The measure with the given atoms and M vanishing moments, normalized by c_1 = 1.
///
/// With exactly M + 2 points the solution is unique; with more points the
/// minimum-norm solution of the moment system is returned.
pub fn construct_vanishing_moments(points: &[f64], m: usize) -> Result<WaveletMeasure> {
    if points.len() < m + 2 {
        return Err(Error::InsufficientPoints {
            needed: m + 2,
            got: points.len(),
        });
    }
    if points.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidMeasure("points must be positive and finite".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(f64::total_cmp);
    if pts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::SingularSystem);
    }
    let c = if pts.len() == m + 2 {
        // Divided-difference weights c_j = 1 / prod_{i != j} (s_j - s_i).
        let w: Vec<f64> = (0..pts.len())
            .map(|j| {
                1.0 / (0..pts.len())
                    .filter(|&i| i != j)
                    .map(|i| pts[j] - pts[i])
                    .product::<f64>()
            })
            .collect();
        w.iter().map(|x| x / w[0]).collect()
    } else {
        minimum_norm_weights(&pts, m)?
    };
    WaveletMeasure::new(pts.into_iter().zip(c).collect())
}

/// Minimum-norm (c_2, ..., c_N) solving sum_{j>=2} c_j s_j^k = -s_1^k, k = 0..=M.
fn minimum_norm_weights(pts: &[f64], m: usize) -> Result<Vec<f64>> {
    let rows = m + 1;
    let cols = pts.len() - 1;
    let a: Vec<Vec<f64>> = (0..rows)
        .map(|k| pts[1..].iter().map(|s| s.powi(k as i32)).collect())
        .collect();
    let b: Vec<f64> = (0..rows).map(|k| -pts[0].powi(k as i32)).collect();
    // Solve (A A^T) y = b, then c = A^T y.
    let mut g = vec![vec![0.0; rows]; rows];
    for i in 0..rows {
        for j in 0..rows {
            g[i][j] = (0..cols).map(|l| a[i][l] * a[j][l]).sum();
        }
    }
    let y = solve(g, b)?;
    let mut c = vec![1.0];
    c.extend((0..cols).map(|l| (0..rows).map(|i| a[i][l] * y[i]).sum::<f64>()));
    Ok(c)
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

impl FromStr for WaveletMeasure {
    type Err = Error;

    /// Parses `"s1:c1,s2:c2,..."`.
    fn from_str(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (s, c) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("measure atom {part:?} is not s:c")))?;
            let s: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad atom position {s:?}")))?;
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad atom weight {c:?}")))?;
            atoms.push((s, c));
        }
        WaveletMeasure::new(atoms)
    }
}

impl fmt::Display for WaveletMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|(s, c)| format!("{s}:{c}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dipole() -> WaveletMeasure {
        "1:1,2:-1".parse().unwrap()
    }

    fn second_difference() -> WaveletMeasure {
        "1:1,2:-2,3:1".parse().unwrap()
    }

    #[test]
    fn construction() {
        let nu = construct_vanishing_moments(&[1.0, 2.0], 0).unwrap();
        assert_eq!(nu.atoms(), &[(1.0, 1.0), (2.0, -1.0)]);
        let nu = construct_vanishing_moments(&[1.0, 2.0, 3.0], 1).unwrap();
        let c: Vec<f64> = nu.atoms().iter().map(|a| a.1).collect();
        assert!((c[0] - 1.0).abs() < 1e-15 && (c[1] + 2.0).abs() < 1e-14 && (c[2] - 1.0).abs() < 1e-14);
        assert_eq!(nu.vanishing_order(), 1);
        assert!(matches!(
            construct_vanishing_moments(&[1.0, 2.0], 1),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
        assert!(matches!(
            construct_vanishing_moments(&[1.0, 2.0, 2.0], 1),
            Err(Error::SingularSystem)
        ));
        let nu = construct_vanishing_moments(&[0.5, 1.0, 1.7, 2.2, 3.0], 2).unwrap();
        assert!(nu.vanishing_order() >= 2);
    }

    #[test]
    fn moments_and_laplace() {
        assert_eq!(dipole().moment(0.0), 0.0);
        assert_eq!(dipole().moment(1.0), -1.0);
        assert_eq!(second_difference().moment(2.0), 2.0);
        assert_eq!(dipole().laplace_transform(0.0), 0.0);
        assert!((dipole().laplace_transform(1.0) - 0.232_544_2).abs() < 1e-7);
        let mu = second_difference().laplace_transform(20.0);
        assert!((mu / (-20f64).exp() - 1.0).abs() < 0.01);
        // Series and direct sums agree where both are accurate.
        let nu = second_difference();
        let t = 0.16;
        let direct: f64 = nu.atoms().iter().map(|&(s, c)| c * (-t * s).exp()).sum();
        assert!((nu.laplace_series(t) - direct).abs() < 1e-15);
    }

    #[test]
    fn normalizing_constants() {
        let c = dipole().normalizing_constant(0.5).unwrap();
        assert!((c - 1.468_348_847_450_969).abs() < 1e-13);
        assert!((c - 2.0 * PI.sqrt() * (2f64.sqrt() - 1.0)).abs() < 1e-13);
        let c = second_difference().normalizing_constant(1.0).unwrap();
        assert!((c - 0.523_248_1).abs() < 1e-7);
        assert!(matches!(
            dipole().normalizing_constant(1.5),
            Err(Error::InsufficientVanishingMoments { have: 0, need: 1 })
        ));
        for (nu, r) in [(dipole(), 0.5), (second_difference(), 1.0), (second_difference(), 0.5)] {
            let a = nu.normalizing_constant(r).unwrap();
            let b = nu.normalizing_constant_via_mu(r, 1e-8).unwrap();
            assert!((a - b).abs() < 1e-7, "r={r}: {a} vs {b}");
        }
        let want = -2.0 * PI.sqrt() * (1.0 - 2.0 * 2f64.sqrt() + 3f64.sqrt());
        assert!((second_difference().normalizing_constant(0.5).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn kappa_values() {
        assert!((dipole().kappa(0.5) - 0.292_893_2).abs() < 1e-7);
        assert_eq!(dipole().kappa(0.0), 0.0);
        assert!((second_difference().kappa(1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rl_kernel_values() {
        assert_eq!(dipole().rl_kernel(0.5, 0.5).unwrap(), 0.0);
        let k = dipole().rl_kernel(0.5, 4.0).unwrap();
        assert!((k - 0.089_660_231_501_487).abs() < 1e-14);
        let k = second_difference().rl_kernel(0.5, 2.0).unwrap();
        assert!((k - 0.564_189_6).abs() < 1e-7);
        // Far-field series continues the direct sum.
        let nu = second_difference();
        let s = 12.5;
        let direct: f64 = nu.atoms().iter().map(|&(sj, c)| c * (s - sj).powf(0.5)).sum::<f64>()
            / (s * gamma(1.5).unwrap());
        assert!((nu.rl_kernel(0.5, s).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn rl_kernel_integrals() {
        for (nu, theta) in [(dipole(), 0.5), (second_difference(), 0.5), (second_difference(), 1.0)] {
            let a = nu.rl_kernel_integral(theta, 1e-7).unwrap();
            let b = nu.normalizing_constant(theta).unwrap();
            assert!((a - b).abs() < 1e-6, "theta={theta}: {a} vs {b}");
        }
    }

    #[test]
    fn parsing() {
        let nu: WaveletMeasure = "1:1, 2:-1".parse().unwrap();
        assert_eq!(nu, dipole());
        assert!("1:1,2:-2".parse::<WaveletMeasure>().is_err());
        assert!("1-1".parse::<WaveletMeasure>().is_err());
        assert_eq!(second_difference().to_string(), "1:1,2:-2,3:1");
    }
}
