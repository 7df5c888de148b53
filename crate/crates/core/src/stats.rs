//! Summary statistics for cross-validation results.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and sample standard deviation (`n - 1` denominator; 0 for `n < 2`).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTTest {
    pub mean_diff: f64,
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p_value: f64,
}

impl PairedTTest {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// Student paired t-test of `a - b`. Returns `None` for fewer than two pairs
/// or unequal lengths. When every difference is identical the statistic is
/// undefined; the test then reports `p = 1` for zero differences and `p = 0`
/// otherwise.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Option<PairedTTest> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (mean, sd) = mean_std(&d);
    let df = (d.len() - 1) as f64;
    if sd == 0.0 {
        let p_value = if mean == 0.0 { 1.0 } else { 0.0 };
        let t = if mean == 0.0 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        };
        return Some(PairedTTest {
            mean_diff: mean,
            t,
            df,
            p_value,
        });
    }
    let t = mean / (sd / (d.len() as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    let p_value = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Some(PairedTTest {
        mean_diff: mean,
        t,
        df,
        p_value,
    })
}
