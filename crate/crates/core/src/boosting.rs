//! LOGISTICBOOST: boosting decision trees under the logistic loss, each tree
//! leveraged through the secant upper bound of the loss.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Sample, Value};
use crate::trees::{dt_predict, induce_dt, softplus, DecisionTree, TreeError, LINK_EPS};

/// Upper clamp on the normalized edge.
pub const R_MAX: f64 = 1.0 - 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoostError {
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error("both classes must be present to boost (positives {0}, negatives {1})")]
    OneClass(usize, usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Leveraging of one tree: `((κ)_j, (κ)*_j, r_j, α_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leverage {
    pub kappa: f64,
    pub kappa_star: f64,
    pub r: f64,
    pub alpha: f64,
    /// `r` reached 1 (perfect weak learner) and was clamped to [`R_MAX`].
    #[serde(default)]
    pub r_clamped: bool,
}

/// Weight update `w / (w + (1 - w) exp(α y h))`, evaluated on the logit
/// scale so that it saturates inside `(0, 1)` instead of overflowing.
pub fn weight_update(w: f64, alpha: f64, y: i8, h: f64) -> f64 {
    let logit = (-w).ln_1p() - w.ln() + alpha * f64::from(y) * h;
    let v = if logit > 0.0 {
        let e = (-logit).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + logit.exp())
    };
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Secant upper bound on the expected logistic loss of adding `α H`, for a
/// tree of normalized edge `r` and maximal confidence `κ*`:
/// `(1 + r)/2 · softplus(-α κ*) + (1 - r)/2 · softplus(α κ*)`.
/// [`leverage`]'s `α` is its minimizer.
pub fn secant_bound(alpha: f64, r: f64, kappa_star: f64) -> f64 {
    0.5 * (1.0 + r) * softplus(-alpha * kappa_star) + 0.5 * (1.0 - r) * softplus(alpha * kappa_star)
}

/// Normalized edge and leveraging coefficient of `tree` under `weights`.
/// Leaf posteriors are first re-estimated from `weights`.
pub fn leverage(
    tree: &DecisionTree,
    sample: &Sample,
    weights: &[f64],
) -> Result<Leverage, BoostError> {
    let mut tree = tree.clone();
    tree.reestimate(sample, weights)?;
    leverage_fitted(&tree, sample, weights)
}

fn leverage_fitted(
    tree: &DecisionTree,
    sample: &Sample,
    weights: &[f64],
) -> Result<Leverage, BoostError> {
    let kappa_star = tree.max_abs_confidence(LINK_EPS);
    let total: f64 = weights.iter().sum();
    if kappa_star == 0.0 {
        return Ok(Leverage {
            kappa: 0.0,
            kappa_star,
            r: 0.0,
            alpha: 0.0,
            r_clamped: false,
        });
    }
    let mut edge = 0.0;
    for i in 0..sample.len() {
        if weights[i] == 0.0 {
            continue;
        }
        let h = dt_predict(tree, &sample.row(i))?.real_value;
        edge += weights[i] / total * f64::from(sample.labels()[i]) * h;
    }
    let raw = edge / kappa_star;
    let r_clamped = raw >= R_MAX;
    let r = raw.clamp(0.0, R_MAX);
    let kappa = 2.0 * r.atanh();
    Ok(Leverage {
        kappa,
        kappa_star,
        r,
        alpha: kappa / kappa_star,
        r_clamped,
    })
}

/// A boosted sequence of leveraged trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    pub trees: Vec<DecisionTree>,
    pub leverages: Vec<Leverage>,
    /// Training logistic loss before the first tree and after each tree.
    pub train_loss: Vec<f64>,
    /// Set when an induced tree had zero edge; it is kept with `α = 0` and
    /// boosting stops.
    #[serde(default)]
    pub early_stopped: bool,
    /// Example weights `w_1, …, w_{T+1}` (not serialized).
    #[serde(skip)]
    pub weight_trajectory: Vec<Vec<f64>>,
}

impl BoostedEnsemble {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.leverages.iter().map(|l| l.alpha)
    }
}

/// `H̃(x) = Σ_j α_j H_j(x)`.
pub fn ensemble_predict(ens: &BoostedEnsemble, x: &[Value]) -> Result<f64, BoostError> {
    let mut s = 0.0;
    for (tree, lev) in ens.trees.iter().zip(&ens.leverages) {
        if lev.alpha != 0.0 {
            s += lev.alpha * dt_predict(tree, x)?.real_value;
        }
    }
    Ok(s)
}

/// Mean of `log(1 + exp(-y H̃(x)))` over `sample` (unweighted).
pub fn logistic_loss(ens: &BoostedEnsemble, sample: &Sample) -> Result<f64, BoostError> {
    let losses = (0..sample.len())
        .into_par_iter()
        .map(|i| {
            Ok(softplus(
                -f64::from(sample.labels()[i]) * ensemble_predict(ens, &sample.row(i))?,
            ))
        })
        .collect::<Result<Vec<f64>, BoostError>>()?;
    Ok(losses.iter().sum::<f64>() / sample.len() as f64)
}

/// Runs `iterations` rounds of LOGISTICBOOST with trees of at most `max_nodes` nodes.
pub fn boost(
    sample: &Sample,
    iterations: usize,
    max_nodes: usize,
) -> Result<BoostedEnsemble, BoostError> {
    if iterations == 0 {
        return Err(BoostError::NoIterations);
    }
    let (pos, neg) = sample.class_counts();
    if pos == 0 || neg == 0 {
        return Err(BoostError::OneClass(pos, neg));
    }
    let m = sample.len();
    let rows: Vec<Vec<Value>> = sample.rows().collect();
    let y = sample.labels();
    let mut w = vec![0.5; m];
    let mut margins = vec![0.0; m];
    let mut ens = BoostedEnsemble {
        trees: Vec::with_capacity(iterations),
        leverages: Vec::with_capacity(iterations),
        train_loss: vec![std::f64::consts::LN_2],
        early_stopped: false,
        weight_trajectory: vec![w.clone()],
    };
    for _ in 0..iterations {
        let total: f64 = w.iter().sum();
        let wn: Vec<f64> = w.iter().map(|v| v / total).collect();
        let tree = induce_dt(sample, &wn, max_nodes)?;
        let lev = leverage_fitted(&tree, sample, &wn)?;
        let h: Vec<f64> = rows
            .par_iter()
            .map(|x| dt_predict(&tree, x).map(|p| p.real_value))
            .collect::<Result<_, _>>()?;
        w = (0..m)
            .into_par_iter()
            .map(|i| weight_update(w[i], lev.alpha, y[i], h[i]))
            .collect();
        for i in 0..m {
            margins[i] += lev.alpha * h[i];
        }
        let loss = (0..m)
            .map(|i| softplus(-f64::from(y[i]) * margins[i]))
            .sum::<f64>()
            / m as f64;
        ens.trees.push(tree);
        ens.leverages.push(lev);
        ens.train_loss.push(loss);
        ens.weight_trajectory.push(w.clone());
        if lev.r == 0.0 {
            ens.early_stopped = true;
            break;
        }
    }
    Ok(ens)
}

/// Fraction of examples whose sign of `score` disagrees with the label
/// (a zero score counts as an error).
pub fn error_rate<F>(sample: &Sample, mut score: F) -> Result<f64, BoostError>
where
    F: FnMut(&[Value]) -> Result<f64, BoostError>,
{
    let mut errors = 0usize;
    for i in 0..sample.len() {
        let s = score(&sample.row(i))?;
        if s * f64::from(sample.labels()[i]) <= 0.0 {
            errors += 1;
        }
    }
    Ok(errors as f64 / sample.len() as f64)
}
