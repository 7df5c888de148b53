use super::{Temper, TemperedError};

/// Tempered addition `a ⊕_t b = a + b + (1 - t) a b`.
#[inline]
pub fn t_add(a: f64, b: f64, t: Temper) -> f64 {
    if t.is_classical() {
        a + b
    } else {
        a + b + t.one_minus() * a * b
    }
}

/// Tempered subtraction `a ⊖_t b = (a - b) / (1 + (1 - t) b)`, the inverse of [`t_add`].
pub fn t_sub(a: f64, b: f64, t: Temper) -> Result<f64, TemperedError> {
    if t.is_classical() {
        return Ok(a - b);
    }
    let den = 1.0 + t.one_minus() * b;
    if den == 0.0 {
        return Err(TemperedError::Singular {
            op: "t_sub",
            value: b,
        });
    }
    Ok((a - b) / den)
}

/// Tempered negation `0 ⊖_t z`.
pub fn t_neg(z: f64, t: Temper) -> Result<f64, TemperedError> {
    t_sub(0.0, z, t)
}

/// `log_t(z) = (z^{1-t} - 1) / (1 - t)` for `z > 0`.
pub fn log_t(z: f64, t: Temper) -> Result<f64, TemperedError> {
    if !(z > 0.0) {
        return Err(TemperedError::Domain {
            op: "log_t",
            value: z,
        });
    }
    if t.is_classical() {
        return Ok(z.ln());
    }
    let k = t.one_minus();
    Ok((k * z.ln()).exp_m1() / k)
}

/// Result of [`exp_t_clamped`]: the value and whether the base `1 + (1 - t) z`
/// was non-positive and the value was clamped to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpT {
    pub value: f64,
    pub clamped: bool,
}

/// `exp_t(z) = [1 + (1 - t) z]^{1/(1-t)}` with the boundary behaviour made explicit.
///
/// For `t < 1` a non-positive base is clamped to 0 (continuous extension);
/// for `t > 1` it is a domain error since the power diverges there.
pub fn exp_t_clamped(z: f64, t: Temper) -> Result<ExpT, TemperedError> {
    if z.is_nan() {
        return Err(TemperedError::Domain {
            op: "exp_t",
            value: z,
        });
    }
    if t.is_classical() {
        return Ok(ExpT {
            value: z.exp(),
            clamped: false,
        });
    }
    let k = t.one_minus();
    let x = k * z;
    if x <= -1.0 {
        if k > 0.0 {
            return Ok(ExpT {
                value: 0.0,
                clamped: true,
            });
        }
        return Err(TemperedError::Domain {
            op: "exp_t",
            value: z,
        });
    }
    let value = (x.ln_1p() / k).exp();
    Ok(ExpT {
        value,
        clamped: false,
    })
}

pub fn exp_t(z: f64, t: Temper) -> Result<f64, TemperedError> {
    exp_t_clamped(z, t).map(|e| e.value)
}

/// Tempered product `exp_t(log_t x + log_t y)`.
pub fn t_mul(x: f64, y: f64, t: Temper) -> Result<f64, TemperedError> {
    if t.is_classical() {
        check_positive("t_mul", x)?;
        check_positive("t_mul", y)?;
        return Ok(x * y);
    }
    exp_t(log_t(x, t)? + log_t(y, t)?, t)
}

/// Tempered division `exp_t(log_t x - log_t y)`.
pub fn t_div(x: f64, y: f64, t: Temper) -> Result<f64, TemperedError> {
    if t.is_classical() {
        check_positive("t_div", x)?;
        check_positive("t_div", y)?;
        return Ok(x / y);
    }
    exp_t(log_t(x, t)? - log_t(y, t)?, t)
}

fn check_positive(op: &'static str, v: f64) -> Result<(), TemperedError> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(TemperedError::Domain { op, value: v })
    }
}

/// `lift_t(z) = log_t(exp z) = (exp((1 - t) z) - 1) / (1 - t)`.
///
/// Strictly increasing and sign preserving for every `t`; convex for `t < 1`,
/// concave for `t > 1` where it saturates at `1 / (t - 1)`. Returns `+inf`
/// when the exact value overflows (`t < 1`, large `z`); see [`ln_lift`] for
/// the log-space value in that regime.
#[inline]
pub fn lift(z: f64, t: Temper) -> f64 {
    if t.is_classical() {
        return z;
    }
    let k = t.one_minus();
    (k * z).exp_m1() / k
}

/// Natural log of `lift_t(z)` for `z > 0`, finite even where `lift` overflows.
pub fn ln_lift(z: f64, t: Temper) -> Result<f64, TemperedError> {
    if !(z > 0.0) {
        return Err(TemperedError::Domain {
            op: "ln_lift",
            value: z,
        });
    }
    if t.is_classical() {
        return Ok(z.ln());
    }
    let k = t.one_minus();
    let u = k * z;
    if u > 0.0 {
        // ln(e^u - 1) = u + ln(1 - e^{-u})
        Ok(u + (-(-u).exp()).ln_1p() - k.ln())
    } else {
        Ok((-u.exp_m1()).ln() - (-k).ln())
    }
}

/// Inverse of [`lift`]: `ln(exp_t(y))`, defined when `1 + (1 - t) y > 0`.
pub fn lift_inv(y: f64, t: Temper) -> Result<f64, TemperedError> {
    if t.is_classical() {
        return Ok(y);
    }
    let k = t.one_minus();
    let x = k * y;
    if !(x > -1.0) {
        return Err(TemperedError::Domain {
            op: "lift_inv",
            value: y,
        });
    }
    Ok(x.ln_1p() / k)
}

/// `sup_z lift_t(z)`: `1 / (t - 1)` when `t > 1`, `+inf` otherwise.
pub fn lift_sup(t: Temper) -> f64 {
    if t.value() > 1.0 && !t.is_classical() {
        1.0 / (t.value() - 1.0)
    } else {
        f64::INFINITY
    }
}

/// Tempered hyperbolic cosine `(exp_t z + exp_t(-z)) / 2`.
pub fn cosh_t(z: f64, t: Temper) -> Result<f64, TemperedError> {
    if t.is_classical() {
        return Ok(z.cosh());
    }
    Ok(0.5 * (exp_t(z, t)? + exp_t(-z, t)?))
}

/// Variant of [`cosh_t`] built on the tempered negation `0 ⊖_t z` instead of `-z`.
///
/// `exp_t(0 ⊖_t lift_t(a)) = e^{-a}`, so `cosh_t_dual(lift_t(a)) = cosh(a)`
/// and the Pythagorean relation of right hyperbolic triangles carries over
/// exactly to lifted side lengths.
pub fn cosh_t_dual(z: f64, t: Temper) -> Result<f64, TemperedError> {
    if t.is_classical() {
        return Ok(z.cosh());
    }
    Ok(0.5 * (exp_t(z, t)? + exp_t(t_neg(z, t)?, t)?))
}
