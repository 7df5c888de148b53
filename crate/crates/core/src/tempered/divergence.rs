//! Tsallis divergence and tempered relative entropy.
//!
//! Both are `t`-additive over product measures: Tsallis on positive measures
//! through `⊕_t`, the tempered relative entropy on the co-simplex through
//! `D1 + D2 - (1 - t) D1 D2`.

use super::{Temper, TemperedError};

const SIMPLEX_TOL: f64 = 1e-12;

/// A nonnegative measure on a finite support, optionally on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    entries: Vec<f64>,
    normalized: bool,
}

impl ProbVector {
    /// A general positive measure.
    pub fn measure(entries: Vec<f64>) -> Result<Self, TemperedError> {
        if entries.is_empty() {
            return Err(TemperedError::InvalidProbVector("empty support".into()));
        }
        if let Some(bad) = entries.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(TemperedError::InvalidProbVector(format!(
                "entry {bad} is not a finite nonnegative real"
            )));
        }
        Ok(ProbVector {
            entries,
            normalized: false,
        })
    }

    /// A point of the simplex: entries must sum to 1 within 1e-12.
    pub fn simplex(entries: Vec<f64>) -> Result<Self, TemperedError> {
        let mut p = Self::measure(entries)?;
        let total: f64 = p.entries.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(TemperedError::InvalidProbVector(format!(
                "entries sum to {total}, not 1"
            )));
        }
        p.normalized = true;
        Ok(p)
    }

    /// Normalizes nonnegative weights onto the simplex.
    pub fn normalize(weights: Vec<f64>) -> Result<Self, TemperedError> {
        let p = Self::measure(weights)?;
        let total: f64 = p.entries.iter().sum();
        if !(total > 0.0) {
            return Err(TemperedError::InvalidProbVector(
                "total mass is zero".into(),
            ));
        }
        Ok(ProbVector {
            entries: p.entries.iter().map(|v| v / total).collect(),
            normalized: true,
        })
    }

    /// Rescales onto the co-simplex `{p : Σ p_k^{2-t} = 1}` (the simplex at `t = 1`).
    pub fn co_simplex(&self, t: Temper) -> Result<Self, TemperedError> {
        let e = 2.0 - t.value();
        if !(e > 0.0) {
            return Err(TemperedError::InvalidProbVector(format!(
                "co-simplex undefined for t = {t}"
            )));
        }
        let s: f64 = self
            .entries
            .iter()
            .filter(|v| **v > 0.0)
            .map(|v| v.powf(e))
            .sum();
        if !(s > 0.0) {
            return Err(TemperedError::InvalidProbVector(
                "total mass is zero".into(),
            ));
        }
        let scale = s.powf(-1.0 / e);
        Ok(ProbVector {
            entries: self.entries.iter().map(|v| v * scale).collect(),
            normalized: t.is_classical(),
        })
    }

    /// Product measure on the cartesian product of supports, row-major.
    pub fn product(&self, other: &ProbVector) -> ProbVector {
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        ProbVector {
            entries,
            normalized: self.normalized && other.normalized,
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_pair(p: &ProbVector, q: &ProbVector) -> Result<(), TemperedError> {
    if p.len() != q.len() {
        return Err(TemperedError::DimensionMismatch(p.len(), q.len()));
    }
    for (index, (a, b)) in p.entries.iter().zip(&q.entries).enumerate() {
        if *a > 0.0 && !(*b > 0.0) {
            return Err(TemperedError::Support { index });
        }
    }
    Ok(())
}

/// `Σ p_k log(p_k / q_k)` with the `0 log 0 = 0` convention.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<f64, TemperedError> {
    check_pair(p, q)?;
    Ok(p.entries
        .iter()
        .zip(&q.entries)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum())
}

/// Tsallis divergence `(Σ p_k (p_k / q_k)^{1-t} - 1) / (1 - t)`; KL at `t = 1`.
pub fn tsallis_div(p: &ProbVector, q: &ProbVector, t: Temper) -> Result<f64, TemperedError> {
    check_pair(p, q)?;
    if t.is_classical() {
        return kl_divergence(p, q);
    }
    let k = t.one_minus();
    let s: f64 = p
        .entries
        .iter()
        .zip(&q.entries)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (k * (a / b).ln()).exp())
        .sum();
    Ok((s - 1.0) / k)
}

/// Tempered relative entropy `(1 - Σ p_k q_k^{1-t}) / (1 - t)`, meant for
/// points of the co-simplex; KL at `t = 1`.
pub fn tempered_rel_entropy(
    p: &ProbVector,
    q: &ProbVector,
    t: Temper,
) -> Result<f64, TemperedError> {
    check_pair(p, q)?;
    if t.is_classical() {
        return kl_divergence(p, q);
    }
    let k = t.one_minus();
    let s: f64 = p
        .entries
        .iter()
        .zip(&q.entries)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (k * b.ln()).exp())
        .sum();
    Ok((1.0 - s) / k)
}
