//! t-Riemann sums, t-integration and the t-derivative.
//!
//! The t-integral of `f` over `[a, b]` has the closed form `lift_t(∫ f)`, so
//! [`t_integrate`] delegates the classical part to an adaptive Simpson rule
//! and lifts the result. [`t_riemann_sum`] evaluates the folded `⊕_t` sum
//! directly from a tagged partition and converges to the same value.

use super::{lift, t_sub, Temper, TemperedError};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

const MAX_SIMPSON_DEPTH: u32 = 50;

/// A tagged partition `a = x_0 < x_1 < ... < x_n = b` with one sample per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    points: Vec<f64>,
    samples: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>, samples: Vec<f64>) -> Result<Self, TemperedError> {
        if points.len() < 2 {
            return Err(TemperedError::InvalidPartition(
                "need at least two points".into(),
            ));
        }
        if samples.len() != points.len() - 1 {
            return Err(TemperedError::InvalidPartition(format!(
                "{} cells but {} samples",
                points.len() - 1,
                samples.len()
            )));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(TemperedError::InvalidPartition(format!(
                    "points not strictly increasing at cell {i}"
                )));
            }
            let s = samples[i];
            if !(w[0] <= s && s <= w[1]) {
                return Err(TemperedError::InvalidPartition(format!(
                    "sample {s} outside cell [{}, {}]",
                    w[0], w[1]
                )));
            }
        }
        Ok(Partition { points, samples })
    }

    /// Regular partition of `[a, b]` into `n` cells, sampled at midpoints.
    pub fn regular(a: f64, b: f64, n: usize) -> Result<Self, TemperedError> {
        Self::regular_tagged(a, b, n, 0.5)
    }

    /// Regular partition sampled at `x_{i-1} + frac * (x_i - x_{i-1})`, `frac ∈ [0, 1]`.
    pub fn regular_tagged(a: f64, b: f64, n: usize, frac: f64) -> Result<Self, TemperedError> {
        if n == 0 || !(a < b) || !(0.0..=1.0).contains(&frac) {
            return Err(TemperedError::InvalidPartition(format!(
                "regular partition needs a < b, n >= 1 and frac in [0, 1] (a={a}, b={b}, n={n}, frac={frac})"
            )));
        }
        let h = (b - a) / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        points[n] = b;
        let samples = points
            .windows(2)
            .map(|w| w[0] + frac * (w[1] - w[0]))
            .collect();
        Ok(Partition { points, samples })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn cells(&self) -> usize {
        self.samples.len()
    }

    /// Mesh `s(Δ) = max_i (x_i - x_{i-1})`.
    pub fn step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// `(|I_i|, ξ_i)` pairs.
    pub fn tagged_cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .windows(2)
            .zip(&self.samples)
            .map(|(w, &s)| (w[1] - w[0], s))
    }
}

/// The t-Riemann sum `⊕_t |I_i| f(ξ_i)` over a tagged partition.
///
/// For `t ≠ 1` the fold is evaluated through the product form
/// `(∏ (1 + (1 - t)|I_i| f(ξ_i)) - 1) / (1 - t)`, accumulated in log space
/// whenever every factor is positive.
pub fn t_riemann_sum<F>(f: F, partition: &Partition, t: Temper) -> Result<f64, TemperedError>
where
    F: Fn(f64) -> f64,
{
    let mut terms = Vec::with_capacity(partition.cells());
    for (width, xi) in partition.tagged_cells() {
        let v = f(xi);
        if !v.is_finite() {
            return Err(TemperedError::Domain {
                op: "t_riemann_sum",
                value: xi,
            });
        }
        terms.push(width * v);
    }
    if t.is_classical() {
        return Ok(terms.iter().sum());
    }
    let k = t.one_minus();
    let value = if terms.iter().all(|&c| k * c > -1.0) {
        let log_prod: f64 = terms.iter().map(|&c| (k * c).ln_1p()).sum();
        log_prod.exp_m1() / k
    } else {
        let prod: f64 = terms.iter().map(|&c| 1.0 + k * c).product();
        (prod - 1.0) / k
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(TemperedError::Overflow {
            op: "t_riemann_sum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature, TemperedError>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(TemperedError::Domain {
            op: "adaptive_simpson",
            value: tol,
        });
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut acc = SimpsonAcc {
        evaluations: 3,
        error: 0.0,
        converged: true,
    };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let value = simpson_rec(
        &f,
        lo,
        hi,
        fa,
        fm,
        fb,
        whole,
        tol,
        MAX_SIMPSON_DEPTH,
        &mut acc,
    );
    if !value.is_finite() {
        return Err(TemperedError::Overflow {
            op: "adaptive_simpson",
        });
    }
    if !acc.converged && acc.error > tol {
        return Err(TemperedError::QuadratureDiverged {
            achieved: acc.error,
            requested: tol,
        });
    }
    Ok(Quadrature {
        value: sign * value,
        error_estimate: acc.error,
        evaluations: acc.evaluations,
    })
}

struct SimpsonAcc {
    evaluations: usize,
    error: f64,
    converged: bool,
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut SimpsonAcc,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    acc.evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth == 0 || !delta.is_finite() {
        if depth == 0 && delta.abs() > 15.0 * tol {
            acc.converged = false;
        }
        acc.error += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc)
}

/// t-integral of `f` over `[a, b]`: `lift_t` of the classical integral.
pub fn t_integrate<F>(f: F, a: f64, b: f64, t: Temper, tol: f64) -> Result<f64, TemperedError>
where
    F: Fn(f64) -> f64,
{
    let q = adaptive_simpson(f, a, b, tol)?;
    let v = lift(q.value, t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(TemperedError::Overflow { op: "t_integrate" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

/// t-derivative `D_t f(z)` from the tempered difference quotient
/// `(f(z + h) ⊖_t f(z)) / h`, with two levels of Richardson step halving.
pub fn t_derivative<F>(f: F, z: f64, t: Temper, h: f64) -> Result<DerivativeEstimate, TemperedError>
where
    F: Fn(f64) -> f64,
{
    if !(h > 0.0) {
        return Err(TemperedError::Domain {
            op: "t_derivative",
            value: h,
        });
    }
    let fz = f(z);
    if !fz.is_finite() {
        return Err(TemperedError::Domain {
            op: "t_derivative",
            value: z,
        });
    }
    let kf = t.one_minus() * fz;
    if !t.is_classical() && (1.0 + kf).abs() <= 4.0 * f64::EPSILON * kf.abs().max(1.0) {
        return Err(TemperedError::Singular {
            op: "t_derivative",
            value: fz,
        });
    }
    let quotient =
        |step: f64| -> Result<f64, TemperedError> { Ok(t_sub(f(z + step), fz, t)? / step) };
    let q0 = quotient(h)?;
    let q1 = quotient(0.5 * h)?;
    let q2 = quotient(0.25 * h)?;
    let r0 = 2.0 * q1 - q0;
    let r1 = 2.0 * q2 - q1;
    let value = (4.0 * r1 - r0) / 3.0;
    if !value.is_finite() {
        return Err(TemperedError::Overflow { op: "t_derivative" });
    }
    Ok(DerivativeEstimate {
        value,
        error_estimate: (value - r1).abs(),
    })
}

/// [`t_derivative`] with the default step `1e-4 * max(1, |z|)`.
pub fn t_derivative_default<F>(f: F, z: f64, t: Temper) -> Result<DerivativeEstimate, TemperedError>
where
    F: Fn(f64) -> f64,
{
    t_derivative(f, z, t, 1e-4 * z.abs().max(1.0))
}
