//! Random generators for self-checks: polynomials, decision trees with
//! arbitrary posteriors, observations, disk points.

use std::f64::consts::TAU;

use rand::Rng;

use crate::data::Value;
use crate::geometry::DiskPoint;
use crate::trees::{DecisionTree, Node, Split};

/// Dense polynomial `Σ c_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Polynomial {
        let mut coeffs = vec![0.0];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Polynomial { coeffs }
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }
}

/// Degree uniform in `0..=max_degree`, coefficients uniform in `[-1, 1]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, max_degree: usize) -> Polynomial {
    let degree = rng.random_range(0..=max_degree);
    Polynomial {
        coeffs: (0..=degree).map(|_| rng.random_range(-1.0..=1.0)).collect(),
    }
}

/// Random `a < b` inside `[-1, 1]`, at least `min_len` apart.
pub fn random_interval<R: Rng + ?Sized>(rng: &mut R, min_len: f64) -> (f64, f64) {
    loop {
        let (u, v): (f64, f64) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        let (a, b) = (u.min(v), u.max(v));
        if b - a >= min_len {
            return (a, b);
        }
    }
}

/// How random node posteriors are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Posteriors {
    Uniform,
    /// Multiples of `1/n` (`n` a power of two keeps `1 - p` and `2p - 1`
    /// exact, so confidence ties are real ties).
    Grid(u32),
}

fn draw_posterior<R: Rng + ?Sized>(rng: &mut R, kind: Posteriors) -> f64 {
    match kind {
        Posteriors::Uniform => rng.random::<f64>(),
        Posteriors::Grid(n) => f64::from(rng.random_range(0..=n)) / f64::from(n),
    }
}

/// Random binary tree of depth at most `max_depth` over `n_features` numeric
/// features in `[0, 1]`. The root splits whenever `max_depth > 0`; other
/// nodes split with probability `split_prob`.
pub fn random_dt<R: Rng + ?Sized>(
    rng: &mut R,
    max_depth: usize,
    n_features: usize,
    split_prob: f64,
    kind: Posteriors,
) -> DecisionTree {
    let mut nodes = vec![Node {
        id: 0,
        parent: None,
        depth: 0,
        p_plus: draw_posterior(rng, kind),
        mass: 0.0,
        split: None,
        children: None,
    }];
    let mut k = 0;
    while k < nodes.len() {
        let depth = nodes[k].depth;
        let split = depth < max_depth && (k == 0 || rng.random_bool(split_prob));
        if split {
            let ids = [nodes.len(), nodes.len() + 1];
            for id in ids {
                nodes.push(Node {
                    id,
                    parent: Some(k),
                    depth: depth + 1,
                    p_plus: draw_posterior(rng, kind),
                    mass: 0.0,
                    split: None,
                    children: None,
                });
            }
            nodes[k].split = Some(Split::Numeric {
                feature: rng.random_range(0..n_features),
                threshold: rng.random::<f64>(),
            });
            nodes[k].children = Some(ids);
        }
        k += 1;
    }
    DecisionTree::from_nodes(nodes).expect("generator builds valid trees")
}

/// `n` observations uniform on `[0, 1]^d`.
pub fn random_observations<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Vec<Vec<Value>> {
    (0..n)
        .map(|_| (0..d).map(|_| Value::Num(rng.random::<f64>())).collect())
        .collect()
}

/// Point with norm `max_r · sqrt(U)` (area-uniform in the disk of radius `max_r`).
pub fn random_disk_point<R: Rng + ?Sized>(rng: &mut R, max_r: f64) -> DiskPoint {
    DiskPoint::from_polar(
        max_r * rng.random::<f64>().sqrt(),
        rng.random::<f64>() * TAU,
    )
    .expect("max_r < 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polynomial_calculus() {
        let p = Polynomial {
            coeffs: vec![1.0, -2.0, 3.0],
        };
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative().coeffs, vec![-2.0, 6.0]);
        assert!((p.integral(0.0, 1.0) - (1.0 - 1.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn random_trees_respect_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t = random_dt(&mut rng, 5, 3, 0.6, Posteriors::Grid(32));
            assert!(t.depth() <= 5 && t.len() <= 63);
            assert!(t.len() >= 3);
        }
    }
}
