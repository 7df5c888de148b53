//! Poincaré disk and Lorentz hyperboloid distances, their t-selves, and the
//! norm remap `embed_t` that keeps t-self distances to the origin fixed.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tempered::{lift, lift_inv, lift_sup, ln_lift, Temper, TemperedError};

/// Largest norm a [`DiskPoint`] may carry; anything closer to the boundary is clamped.
pub const MAX_RADIUS: f64 = 1.0 - 1e-15;

const HYPERBOLOID_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point with norm {0} is not strictly inside the unit disk")]
    OutsideDisk(f64),
    #[error("radius {0} outside [0, 1)")]
    InvalidRadius(f64),
    #[error("point is not on the hyperboloid: x∘x = {inner}, expected {expected}")]
    NotOnHyperboloid { inner: f64, expected: f64 },
    #[error("curvature mismatch: {0} vs {1}")]
    CurvatureMismatch(f64, f64),
    #[error("curvature must be positive and finite, got {0}")]
    InvalidCurvature(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("hyperbolicity constant must be positive, got {0}")]
    InvalidTau(f64),
    #[error("closeness exponent must be positive, got {0}")]
    InvalidK(f64),
    #[error("budget g = {g} violates log(1 + f g) / f <= k log 10 for f = {f}, k = {k}")]
    BudgetViolated { f: f64, g: f64, k: f64 },
    #[error(transparent)]
    Tempered(#[from] TemperedError),
}

/// A point of the open unit disk.
///
/// Points whose norm lies in `(MAX_RADIUS, 1)` are pulled back to
/// `MAX_RADIUS` and marked `clamped`; norms `>= 1` are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    z: Complex64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    clamped: bool,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint {
        z: Complex64 { re: 0.0, im: 0.0 },
        clamped: false,
    };

    pub fn new(x: f64, y: f64) -> Result<Self, GeometryError> {
        Self::from_complex(Complex64::new(x, y))
    }

    pub fn from_complex(z: Complex64) -> Result<Self, GeometryError> {
        let r = z.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(GeometryError::OutsideDisk(r));
        }
        if r > MAX_RADIUS {
            return Ok(DiskPoint {
                z: z * (MAX_RADIUS / r),
                clamped: true,
            });
        }
        Ok(DiskPoint { z, clamped: false })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self, GeometryError> {
        if !(r >= 0.0) {
            return Err(GeometryError::InvalidRadius(r));
        }
        Self::from_complex(Complex64::from_polar(r, theta))
    }

    /// Point at hyperbolic distance `d` from the origin in direction `theta`.
    pub fn at_distance(d: f64, theta: f64) -> Result<Self, GeometryError> {
        Self::from_polar((0.5 * d.abs()).tanh().min(MAX_RADIUS), theta)
    }

    /// Like [`from_complex`](Self::from_complex) but maps any norm `>= 1` to
    /// `MAX_RADIUS` (flagged) instead of failing. Used where rounding can
    /// push a computed point onto the boundary.
    pub(crate) fn saturating(z: Complex64) -> Self {
        let r = z.norm();
        if r > MAX_RADIUS {
            DiskPoint {
                z: z * (MAX_RADIUS / r),
                clamped: true,
            }
        } else {
            DiskPoint { z, clamped: false }
        }
    }

    pub fn complex(&self) -> Complex64 {
        self.z
    }

    pub fn x(&self) -> f64 {
        self.z.re
    }

    pub fn y(&self) -> f64 {
        self.z.im
    }

    pub fn norm(&self) -> f64 {
        self.z.norm()
    }

    pub fn arg(&self) -> f64 {
        self.z.arg()
    }

    pub fn is_clamped(&self) -> bool {
        self.clamped
    }
}

/// Disk isometry `z ↦ (z - a) / (1 - ā z)`, sending `a` to the origin.
pub fn mobius_translate(z: DiskPoint, a: DiskPoint) -> DiskPoint {
    let (z, a) = (z.z, a.z);
    DiskPoint::saturating((z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z))
}

/// Inverse of [`mobius_translate`]: `w ↦ (w + a) / (1 + ā w)`.
pub fn mobius_translate_inv(w: DiskPoint, a: DiskPoint) -> DiskPoint {
    let (w, a) = (w.z, a.z);
    DiskPoint::saturating((w + a) / (Complex64::new(1.0, 0.0) + a.conj() * w))
}

/// `log((1 + r) / (1 - r))`, the distance from the origin to a point of norm `r`.
#[inline]
pub fn origin_dist(r: f64) -> f64 {
    2.0 * r.atanh()
}

/// Hyperbolic (curvature −1) distance in the Poincaré disk.
pub fn poincare_dist(x: DiskPoint, y: DiskPoint) -> f64 {
    if x.z == y.z {
        return 0.0;
    }
    origin_dist(mobius_translate(y, x).norm().min(MAX_RADIUS))
}

/// The t-self distance `lift_t(d_B1(x, y))`.
pub fn t_self_dist(x: DiskPoint, y: DiskPoint, t: Temper) -> f64 {
    lift(poincare_dist(x, y), t)
}

/// A point of the hyperboloid `H_c = {x : x_0 > 0, x∘x = -1/c}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzPoint {
    coords: Vec<f64>,
    c: f64,
}

/// Lorentzian inner product `-x_0 y_0 + Σ_{i>0} x_i y_i`.
pub fn lorentz_inner(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

impl LorentzPoint {
    pub fn new(coords: Vec<f64>, c: f64) -> Result<Self, GeometryError> {
        check_curvature(c)?;
        if coords.len() < 2 || !(coords[0] > 0.0) {
            return Err(GeometryError::NotOnHyperboloid {
                inner: f64::NAN,
                expected: -1.0 / c,
            });
        }
        let inner = lorentz_inner(&coords, &coords);
        let expected = -1.0 / c;
        if (inner - expected).abs() > HYPERBOLOID_TOL * coords[0] * coords[0].max(1.0) {
            return Err(GeometryError::NotOnHyperboloid { inner, expected });
        }
        Ok(LorentzPoint { coords, c })
    }

    /// Lifts spatial coordinates onto the sheet by solving for `x_0`.
    pub fn from_spatial(spatial: &[f64], c: f64) -> Result<Self, GeometryError> {
        check_curvature(c)?;
        let s2: f64 = spatial.iter().map(|v| v * v).sum();
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push((1.0 / c + s2).sqrt());
        coords.extend_from_slice(spatial);
        Ok(LorentzPoint { coords, c })
    }

    /// Gaussian spatial coordinates with standard deviation `scale`, lifted onto `H_c`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        dim: usize,
        c: f64,
        scale: f64,
    ) -> Result<Self, GeometryError> {
        let spatial: Vec<f64> = (0..dim)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                scale * g
            })
            .collect();
        Self::from_spatial(&spatial, c)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn curvature(&self) -> f64 {
        self.c
    }
}

fn check_curvature(c: f64) -> Result<(), GeometryError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidCurvature(c))
    }
}

/// Squared Lorentzian distortion `d_L(x, y) = -2/c - 2 x∘y`; not a metric.
pub fn lorentz_dist(x: &LorentzPoint, y: &LorentzPoint) -> Result<f64, GeometryError> {
    if x.c != y.c {
        return Err(GeometryError::CurvatureMismatch(x.c, y.c));
    }
    if x.coords.len() != y.coords.len() {
        return Err(GeometryError::DimensionMismatch(
            x.coords.len(),
            y.coords.len(),
        ));
    }
    if x.coords == y.coords {
        return Ok(0.0);
    }
    // Rounding can leave a tiny negative value for nearby points.
    Ok((-2.0 / x.c - 2.0 * lorentz_inner(&x.coords, &y.coords)).max(0.0))
}

pub fn lorentz_tself_dist(
    x: &LorentzPoint,
    y: &LorentzPoint,
    t: Temper,
) -> Result<f64, GeometryError> {
    Ok(lift(lorentz_dist(x, y)?, t))
}

/// `t = 1 + 1/τ`, the temper whose t-self caps every distortion at `τ`.
pub fn t_for_hyperbolicity(tau: f64) -> Result<Temper, GeometryError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(GeometryError::InvalidTau(tau));
    }
    Ok(Temper::new(1.0 + 1.0 / tau)?)
}

/// Largest t-self distance to the origin representable by a k-close point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodableDistance {
    /// `log_t(2·10^k - 1)`; `+inf` if it overflows `f64`.
    pub value: f64,
    /// Natural log of `value`, always finite.
    pub ln_value: f64,
}

/// `log_t(2·10^k - 1)`: the t-self distance from the origin of a point of norm `1 - 10^{-k}`.
pub fn max_encodable_distance(k: f64, t: Temper) -> Result<EncodableDistance, GeometryError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(GeometryError::InvalidK(k));
    }
    use std::f64::consts::{LN_10, LN_2};
    // Tails of ln 2 and ln 10 beyond their f64 roundings.
    const LN_2_LO: f64 = 2.3190468138462996e-17;
    const LN_10_LO: f64 = -2.1707562233822494e-16;

    // ln x = ln 2 + k ln 10 + ln(1 - 10^{-k}/2), carried as hi + lo.
    let a = k * LN_10;
    let hi = LN_2 + a;
    let bv = hi - LN_2;
    let lo = ((LN_2 - (hi - bv)) + (a - bv))
        + k.mul_add(LN_10, -a)
        + (LN_2_LO + k * LN_10_LO)
        + (-0.5 * 10f64.powf(-k)).ln_1p();
    let ln_x = hi + lo;
    if t.is_classical() {
        return Ok(EncodableDistance {
            value: ln_x,
            ln_value: ln_x.ln(),
        });
    }
    let m = t.one_minus();
    let u = m * hi;
    let value = if u >= 1.0 {
        // x^{1-t} directly; exp of the rounded log would lose ~u ulps.
        let x = 2.0 * 10f64.powf(k) - 1.0;
        (x.powf(m) - 1.0) / m
    } else {
        lift(ln_x, t)
    };
    let ln_value = if u > 0.0 {
        let u_lo = m.mul_add(hi, -u) + m * lo;
        u + (u_lo + (-(-(u + u_lo)).exp()).ln_1p() - m.ln())
    } else {
        ln_lift(ln_x, t)?
    };
    Ok(EncodableDistance { value, ln_value })
}

/// Encoding trade-off parameters `(k, f(k) = 1 - t, g(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TselfConfig {
    pub t: Temper,
    pub k: f64,
    pub f_k: f64,
    pub g_k: Option<f64>,
}

/// `log(1 + f g) / f <= k log 10` (the `f = 0` limit reads `g <= k log 10`).
pub fn budget_feasible(f: f64, g: f64, k: f64) -> bool {
    let cap = k * std::f64::consts::LN_10;
    if f.abs() < crate::tempered::CLASSICAL_BAND {
        return g <= cap;
    }
    let base = f * g;
    if !(base > -1.0) {
        return false;
    }
    base.ln_1p() / f <= cap
}

impl TselfConfig {
    pub fn new(t: Temper, k: f64, g_k: Option<f64>) -> Result<Self, GeometryError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(GeometryError::InvalidK(k));
        }
        let f_k = t.one_minus();
        if let Some(g) = g_k {
            if !(g >= 0.0) || !budget_feasible(f_k, g, k) {
                return Err(GeometryError::BudgetViolated { f: f_k, g, k });
            }
        }
        Ok(TselfConfig { t, k, f_k, g_k })
    }

    pub fn max_distance(&self) -> Result<EncodableDistance, GeometryError> {
        max_encodable_distance(self.k, self.t)
    }
}

/// Output of [`embed_t_radius`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedRadius {
    pub radius: f64,
    /// Set when the exact value is not representable below `MAX_RADIUS`
    /// (including `t > 1` with `D >= 1/(t - 1)`, where no solution exists).
    pub saturated: bool,
}

/// Norm `r'` with `log_t((1 + r')/(1 - r')) = log((1 + r)/(1 - r))`.
///
/// Closed form `r' = (E - 1)/(E + 1)`, `E = exp_t(D)`, `D = log((1 + r)/(1 - r))`,
/// evaluated as `tanh(ln(E) / 2)`.
pub fn embed_t_radius(r: f64, t: Temper) -> Result<EmbedRadius, GeometryError> {
    if !(0.0..1.0).contains(&r) {
        return Err(GeometryError::InvalidRadius(r));
    }
    if t.is_classical() {
        return Ok(EmbedRadius {
            radius: r,
            saturated: false,
        });
    }
    let d = origin_dist(r);
    if d >= lift_sup(t) {
        return Ok(EmbedRadius {
            radius: MAX_RADIUS,
            saturated: true,
        });
    }
    let radius = (0.5 * lift_inv(d, t)?).tanh();
    if radius > MAX_RADIUS {
        return Ok(EmbedRadius {
            radius: MAX_RADIUS,
            saturated: true,
        });
    }
    Ok(EmbedRadius {
        radius,
        saturated: false,
    })
}

/// Norm of the isoline of posterior `p`: `embed_t(|2p - 1|)`; exactly 1 (the
/// boundary) when `p ∈ {0, 1}`.
pub fn isoline_radius(p: f64, t: Temper) -> Result<f64, GeometryError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GeometryError::InvalidRadius(p));
    }
    let r = (2.0 * p - 1.0).abs();
    if r >= 1.0 {
        return Ok(1.0);
    }
    Ok(embed_t_radius(r, t)?.radius)
}
