//! Adaptive Gauss–Kronrod quadrature on finite intervals and log-substituted
//! integration over half-lines.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, always >= 0.
    pub error_estimate: f64,
    /// Number of integrand evaluations, always >= 1.
    pub evaluations: usize,
}

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_evals: 200_000,
        }
    }
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod rule with the embedded 7-point Gauss estimate.
/// Returns (value, error estimate, roundoff floor) using the QUADPACK error
/// heuristic; the floor is the error level below which refinement cannot help.
pub(crate) fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    if !result.is_finite() {
        err = f64::INFINITY;
    }
    (result, err, floor)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
    id: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over [a, b].
///
/// The interval with the largest error estimate is bisected until the total
/// error estimate is below `max(abs_tol, rel_tol * |value|)`. When the budget
/// runs out first, returns [`Error::NonConvergence`] carrying the best estimate.
pub fn integrate_finite<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_finite_with(f, a, b, &QuadOptions::new(abs_tol, rel_tol))
}

/// [`integrate_finite`] with an explicit evaluation budget.
pub fn integrate_finite_with<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 1,
            });
        }
        return Err(Error::InvalidArgument(format!(
            "integration interval [{a}, {b}] must be finite with a < b"
        )));
    }
    let (v0, e0, fl0) = gk15(f, a, b);
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        error: e0,
        floor: fl0,
        id: 0,
    });
    let mut next_id = 1;
    let mut total_value = v0;
    let mut total_error = e0;
    let mut total_floor = fl0;
    loop {
        if total_error <= opts.target(total_value).max(2.0 * total_floor) {
            break;
        }
        if evals + 30 > opts.max_evals {
            let value = heap.iter().map(|s| s.value).sum();
            return Err(Error::NonConvergence {
                best: value,
                error_estimate: total_error,
                evaluations: evals,
            });
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // Interval cannot be split further in floating point.
            heap.push(seg);
            let value = heap.iter().map(|s| s.value).sum();
            return Err(Error::NonConvergence {
                best: value,
                error_estimate: total_error,
                evaluations: evals,
            });
        }
        let (v1, e1, fl1) = gk15(f, seg.a, mid);
        let (v2, e2, fl2) = gk15(f, mid, seg.b);
        evals += 30;
        total_value += v1 + v2 - seg.value;
        total_error += e1 + e2 - seg.error;
        total_floor += fl1 + fl2 - seg.floor;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            floor: fl1,
            id: next_id,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            floor: fl2,
            id: next_id + 1,
        });
        next_id += 2;
        // Recompute periodically to avoid drift of the running sums.
        if next_id % 64 == 1 {
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
            total_floor = heap.iter().map(|s| s.floor).sum();
        }
    }
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum();
    let error = segs.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations: evals,
    })
}

/// Integral of `f` over [0, b] via s = e^u, marching toward u = -infinity in
/// unit steps until the remaining contribution is negligible.
///
/// Suited to integrands with algebraic behaviour s^q, q > -1, at the origin.
pub fn integrate_from_zero<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let g = |u: f64| {
        let s = u.exp();
        f(s) * s
    };
    march_log(&g, b.ln(), -1.0, f64::NEG_INFINITY, opts)
}

/// Integral of `f` over [a, end] (end may be +infinity) via s = e^u, marching
/// upward in unit steps of u until the tail is negligible or `end` is reached.
pub fn integrate_to_infinity<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    end: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let g = |u: f64| {
        let s = u.exp();
        f(s) * s
    };
    let stop = if end.is_finite() { end.ln() } else { f64::INFINITY };
    march_log(&g, a.ln(), 1.0, stop, opts)
}

/// Integrate g from u0 in steps of `step` (sign gives direction) until `stop`
/// or until successive chunks show the remainder is below tolerance.
fn march_log<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    u0: f64,
    step: f64,
    stop: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let mut u = u0;
    let mut prev_abs = f64::INFINITY;
    let mut quiet_chunks = 0;
    let chunk_opts = QuadOptions {
        abs_tol: opts.abs_tol * 0.05,
        rel_tol: opts.rel_tol * 0.05,
        max_evals: opts.max_evals,
    };
    for _ in 0..4000 {
        let mut next = u + step;
        let last = if step > 0.0 { next >= stop } else { next <= stop };
        if last {
            next = stop;
        }
        let (lo, hi) = if step > 0.0 { (u, next) } else { (next, u) };
        let r = integrate_finite_with(g, lo, hi, &chunk_opts)?;
        total += r.value;
        err += r.error_estimate;
        evals += r.evaluations;
        if last {
            break;
        }
        let a = r.value.abs();
        // Remainder bound assuming at least geometric decay of the chunks.
        let ratio = if prev_abs > 0.0 && prev_abs.is_finite() {
            a / prev_abs
        } else {
            1.0
        };
        let small = (a <= opts.target(total) * 1e-3 && ratio < 1.0) || a <= 1e-300;
        let geometric_tail = ratio < 0.999 && a * ratio / (1.0 - ratio) < opts.target(total) * 0.1;
        if small || geometric_tail {
            quiet_chunks += 1;
        } else {
            quiet_chunks = 0;
        }
        if quiet_chunks >= 3 {
            break;
        }
        if evals > opts.max_evals {
            return Err(Error::NonConvergence {
                best: total,
                error_estimate: err.max(a),
                evaluations: evals,
            });
        }
        prev_abs = a;
        u = next;
    }
    Ok(QuadratureResult {
        value: total,
        error_estimate: err,
        evaluations: evals.max(1),
    })
}
