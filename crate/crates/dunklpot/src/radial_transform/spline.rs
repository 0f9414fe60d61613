//! Natural cubic spline in the variable u = ln r.

#[derive(Debug, Clone)]
pub(crate) struct LogSpline {
    u: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    /// (u_0, h) when the nodes are equally spaced in u.
    uniform: Option<(f64, f64)>,
}

impl LogSpline {
    pub(crate) fn new(radii: &[f64], y: &[f64]) -> Self {
        let n = radii.len();
        let u: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for the second derivatives, natural end conditions.
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = u[i] - u[i - 1];
                let h1 = u[i + 1] - u[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            // Forward elimination (Thomas algorithm) over rows 1..n-2.
            for i in 2..n - 1 {
                let lower = u[i] - u[i - 1];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 2] = rhs[n - 2] / diag[n - 2];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            }
        }
        let h = (u[n - 1] - u[0]) / (n - 1) as f64;
        let uniform = u
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
            .then_some((u[0], h));
        LogSpline {
            u,
            y: y.to_vec(),
            m,
            uniform,
        }
    }

    fn interval(&self, u: f64) -> usize {
        let n = self.u.len();
        if let Some((u0, h)) = self.uniform {
            let i = ((u - u0) / h).floor();
            let i = if i < 0.0 { 0 } else { (i as usize).min(n - 2) };
            // Guard against rounding at node boundaries.
            if u < self.u[i] && i > 0 {
                return i - 1;
            }
            if u > self.u[i + 1] && i + 2 < n {
                return i + 1;
            }
            return i;
        }
        match self.u.binary_search_by(|x| x.total_cmp(&u)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Evaluate at u inside [u_0, u_{n-1}].
    pub(crate) fn eval_u(&self, u: f64) -> f64 {
        let i = self.interval(u);
        let h = self.u[i + 1] - self.u[i];
        let a = (self.u[i + 1] - u) / h;
        let b = (u - self.u[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}
