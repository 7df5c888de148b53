//! Top-down decision-tree induction with the log-loss Bayes risk (binary
//! entropy) as splitting criterion, over weighted samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Column, Sample, Value};

/// Default clamp applied to posteriors before the canonical link.
pub const LINK_EPS: f64 = 1e-10;

/// Sample sizes below which split search stays on the calling thread.
const PAR_THRESHOLD: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("cannot induce a tree on an empty sample")]
    EmptySample,
    #[error("max_nodes must be odd and at least 1, got {0}")]
    InvalidMaxNodes(usize),
    #[error("{0} weights for {1} examples")]
    WeightCount(usize, usize),
    #[error("weights must be finite, nonnegative and not all zero")]
    InvalidWeights,
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("observation has {0} features, tree needs feature {1}")]
    MissingFeature(usize, usize),
    #[error("feature {feature} is {found} but the test expects {expected}")]
    FeatureKind {
        feature: usize,
        expected: &'static str,
        found: &'static str,
    },
}

/// Binary entropy `-p log p - (1-p) log(1-p)`, the Bayes risk of the log-loss.
pub fn cbr_log(p: f64) -> f64 {
    let h = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// `log(p / (1 - p))` with `p` clamped to `[eps, 1 - eps]`.
pub fn canonical_link(p: f64, eps: f64) -> f64 {
    // Work on the smaller tail (1 - p is exact for p >= 1/2) so that
    // link(1 - p) = -link(p) holds exactly.
    if p > 0.5 {
        return -canonical_link(1.0 - p, eps);
    }
    let p = p.max(eps);
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    p.ln() - (-p).ln_1p()
}

/// Inverse of the canonical link, `1 / (1 + e^{-v})`.
pub fn inverse_link(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// One side of a binary test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Atomic Boolean test on one feature; the label of a DT arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Literal {
    Le { feature: usize, threshold: f64 },
    Gt { feature: usize, threshold: f64 },
    In { feature: usize, set: Vec<u32> },
    NotIn { feature: usize, set: Vec<u32> },
}

fn feature_value(x: &[Value], feature: usize) -> Result<Value, TreeError> {
    x.get(feature)
        .copied()
        .ok_or(TreeError::MissingFeature(x.len(), feature))
}

fn num(x: &[Value], feature: usize) -> Result<f64, TreeError> {
    match feature_value(x, feature)? {
        Value::Num(v) => Ok(v),
        Value::Cat(_) => Err(TreeError::FeatureKind {
            feature,
            expected: "numeric",
            found: "categorical",
        }),
    }
}

fn cat(x: &[Value], feature: usize) -> Result<u32, TreeError> {
    match feature_value(x, feature)? {
        Value::Cat(c) => Ok(c),
        Value::Num(_) => Err(TreeError::FeatureKind {
            feature,
            expected: "categorical",
            found: "numeric",
        }),
    }
}

impl Literal {
    pub fn eval(&self, x: &[Value]) -> Result<bool, TreeError> {
        Ok(match self {
            Literal::Le { feature, threshold } => num(x, *feature)? <= *threshold,
            Literal::Gt { feature, threshold } => num(x, *feature)? > *threshold,
            Literal::In { feature, set } => set.binary_search(&cat(x, *feature)?).is_ok(),
            Literal::NotIn { feature, set } => set.binary_search(&cat(x, *feature)?).is_err(),
        })
    }

    pub fn feature(&self) -> usize {
        match self {
            Literal::Le { feature, .. }
            | Literal::Gt { feature, .. }
            | Literal::In { feature, .. }
            | Literal::NotIn { feature, .. } => *feature,
        }
    }
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |s: &[u32]| s.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match self {
            Literal::Le { feature, threshold } => write!(f, "x{feature} <= {threshold}"),
            Literal::Gt { feature, threshold } => write!(f, "x{feature} > {threshold}"),
            Literal::In { feature, set } => write!(f, "x{feature} in {{{}}}", list(set)),
            Literal::NotIn { feature, set } => write!(f, "x{feature} notin {{{}}}", list(set)),
        }
    }
}

/// Test held by an internal node.
///
/// For categorical splits, categories outside `left ∪ right` (unseen at
/// induction time) follow `default`, the heavier child.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Split {
    Numeric {
        feature: usize,
        threshold: f64,
    },
    Categorical {
        feature: usize,
        left: Vec<u32>,
        right: Vec<u32>,
        default: Side,
    },
}

impl Split {
    pub fn feature(&self) -> usize {
        match self {
            Split::Numeric { feature, .. } | Split::Categorical { feature, .. } => *feature,
        }
    }

    /// The literal labelling the arc towards `side`.
    pub fn literal(&self, side: Side) -> Literal {
        match (self, side) {
            (Split::Numeric { feature, threshold }, Side::Left) => Literal::Le {
                feature: *feature,
                threshold: *threshold,
            },
            (Split::Numeric { feature, threshold }, Side::Right) => Literal::Gt {
                feature: *feature,
                threshold: *threshold,
            },
            (
                Split::Categorical {
                    feature,
                    left,
                    right,
                    default,
                },
                side,
            ) => {
                let (own, other) = if side == Side::Left {
                    (left, right)
                } else {
                    (right, left)
                };
                if *default == side {
                    Literal::NotIn {
                        feature: *feature,
                        set: other.clone(),
                    }
                } else {
                    Literal::In {
                        feature: *feature,
                        set: own.clone(),
                    }
                }
            }
        }
    }

    /// Side taken by `x`, and whether it was decided by the unseen-category default.
    pub fn route(&self, x: &[Value]) -> Result<(Side, bool), TreeError> {
        match self {
            Split::Numeric { feature, threshold } => Ok((
                if num(x, *feature)? <= *threshold {
                    Side::Left
                } else {
                    Side::Right
                },
                false,
            )),
            Split::Categorical {
                feature,
                left,
                right,
                default,
            } => {
                let c = cat(x, *feature)?;
                if left.binary_search(&c).is_ok() {
                    Ok((Side::Left, false))
                } else if right.binary_search(&c).is_ok() {
                    Ok((Side::Right, false))
                } else {
                    Ok((*default, true))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    /// Weighted proportion of positive examples reaching the node.
    pub p_plus: f64,
    /// Weight mass reaching the node, under weights normalized to sum 1.
    pub mass: f64,
    pub split: Option<Split>,
    /// `[left, right]` for internal nodes.
    pub children: Option<[usize; 2]>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Binary decision tree; node `i` sits at index `i`, the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

/// Output of [`dt_predict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub posterior: f64,
    pub real_value: f64,
    pub leaf: usize,
    /// Set when a categorical test met a category unseen at induction and
    /// routed the observation to the heavier child.
    pub unknown_category: bool,
}

impl DecisionTree {
    /// Checks ids, parent/child links, depths and posteriors.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self, TreeError> {
        let bad = |m: String| Err(TreeError::Malformed(m));
        if nodes.is_empty() {
            return bad("no nodes".into());
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return bad(format!("node at index {i} has id {}", n.id));
            }
            if !(0.0..=1.0).contains(&n.p_plus) {
                return bad(format!("node {i} posterior {} outside [0, 1]", n.p_plus));
            }
            if n.split.is_some() != n.children.is_some() {
                return bad(format!(
                    "node {i} must have both a split and children, or neither"
                ));
            }
            match (i, n.parent) {
                (0, None) if n.depth == 0 => {}
                (0, _) => return bad("root must have no parent and depth 0".into()),
                (_, None) => return bad(format!("node {i} has no parent")),
                (_, Some(p)) => {
                    let ok = nodes
                        .get(p)
                        .and_then(|pn| pn.children)
                        .is_some_and(|c| c.contains(&i))
                        && nodes[p].depth + 1 == n.depth;
                    if !ok {
                        return bad(format!("node {i} is not a child of its parent {p}"));
                    }
                }
            }
            if let Some(c) = n.children {
                if c[0] == c[1]
                    || c.iter()
                        .any(|&k| k >= nodes.len() || nodes[k].parent != Some(i))
                {
                    return bad(format!("node {i} has invalid children {c:?}"));
                }
            }
        }
        Ok(DecisionTree { nodes })
    }

    pub fn leaf(p_plus: f64) -> Self {
        DecisionTree {
            nodes: vec![Node {
                id: 0,
                parent: None,
                depth: 0,
                p_plus,
                mass: 1.0,
                split: None,
                children: None,
            }],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// `(κ)*`: the largest leaf `|canonical_link(p⁺)|`.
    pub fn max_abs_confidence(&self, eps: f64) -> f64 {
        self.leaves()
            .map(|n| canonical_link(n.p_plus, eps).abs())
            .fold(0.0, f64::max)
    }

    /// Literal on the arc from `id`'s parent to `id`.
    pub fn incoming_literal(&self, id: usize) -> Option<Literal> {
        let p = self.nodes[id].parent?;
        let parent = &self.nodes[p];
        let side = if parent.children?[0] == id {
            Side::Left
        } else {
            Side::Right
        };
        Some(parent.split.as_ref()?.literal(side))
    }

    /// Root-to-leaf node ids followed by `x`, and whether an unseen category was met.
    pub fn path(&self, x: &[Value]) -> Result<(Vec<usize>, bool), TreeError> {
        let mut id = 0;
        let mut path = vec![0];
        let mut unknown = false;
        while let (Some(split), Some(children)) = (&self.nodes[id].split, self.nodes[id].children) {
            let (side, u) = split.route(x)?;
            unknown |= u;
            id = children[side as usize];
            path.push(id);
        }
        Ok((path, unknown))
    }

    /// Tree with every node in `collapse` turned into a leaf (descendants
    /// dropped). Returns the pruned tree and, per new id, the old id.
    pub fn pruned(&self, collapse: &[usize]) -> (DecisionTree, Vec<usize>) {
        let mut old_of = vec![0usize];
        let mut nodes = vec![Node {
            split: None,
            children: None,
            ..self.nodes[0].clone()
        }];
        let mut k = 0;
        while k < old_of.len() {
            let old = old_of[k];
            if let (false, Some(c)) = (collapse.contains(&old), self.nodes[old].children) {
                let ids = [old_of.len(), old_of.len() + 1];
                for (&oc, &nid) in c.iter().zip(&ids) {
                    old_of.push(oc);
                    nodes.push(Node {
                        id: nid,
                        parent: Some(k),
                        split: None,
                        children: None,
                        ..self.nodes[oc].clone()
                    });
                }
                nodes[k].split = self.nodes[old].split.clone();
                nodes[k].children = Some(ids);
            }
            k += 1;
        }
        (DecisionTree { nodes }, old_of)
    }

    /// Recomputes every node's posterior and mass from `weights`.
    /// Nodes receiving no mass get posterior 1/2.
    pub fn reestimate(&mut self, sample: &Sample, weights: &[f64]) -> Result<(), TreeError> {
        check_weights(sample, weights)?;
        let total: f64 = weights.iter().sum();
        let mut pos = vec![0.0; self.nodes.len()];
        let mut mass = vec![0.0; self.nodes.len()];
        for i in 0..sample.len() {
            let w = weights[i] / total;
            for id in self.path(&sample.row(i))?.0 {
                mass[id] += w;
                if sample.labels()[i] > 0 {
                    pos[id] += w;
                }
            }
        }
        for (n, (p, m)) in self.nodes.iter_mut().zip(pos.into_iter().zip(mass)) {
            n.mass = m;
            n.p_plus = if m > 0.0 { (p / m).min(1.0) } else { 0.5 };
        }
        Ok(())
    }
}

/// Posterior at the leaf reached by `x` and its canonical link (default clamp).
pub fn dt_predict(tree: &DecisionTree, x: &[Value]) -> Result<Prediction, TreeError> {
    let (path, unknown_category) = tree.path(x)?;
    let leaf = *path.last().unwrap();
    let posterior = tree.nodes[leaf].p_plus;
    Ok(Prediction {
        posterior,
        real_value: canonical_link(posterior, LINK_EPS),
        leaf,
        unknown_category,
    })
}

/// Weighted empirical risk `Σ_ℓ mass_ℓ · cbr_log(p⁺_ℓ)` over the leaves
/// (masses normalized to sum 1).
pub fn leaf_risk(tree: &DecisionTree) -> f64 {
    tree.leaves().map(|n| n.mass * cbr_log(n.p_plus)).sum()
}

/// Weighted mean of `log(1 + exp(-y H(x)))` with `H = canonical_link(p⁺, eps)`.
/// Zero-weight examples are skipped.
pub fn logistic_risk(
    tree: &DecisionTree,
    sample: &Sample,
    weights: &[f64],
    eps: f64,
) -> Result<f64, TreeError> {
    check_weights(sample, weights)?;
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for i in 0..sample.len() {
        if weights[i] == 0.0 {
            continue;
        }
        let (path, _) = tree.path(&sample.row(i))?;
        let h = canonical_link(tree.nodes[*path.last().unwrap()].p_plus, eps);
        acc += weights[i] / total * softplus(-f64::from(sample.labels()[i]) * h);
    }
    Ok(acc)
}

/// `log(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn check_weights(sample: &Sample, weights: &[f64]) -> Result<(), TreeError> {
    if weights.len() != sample.len() {
        return Err(TreeError::WeightCount(weights.len(), sample.len()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || !(weights.iter().sum::<f64>() > 0.0)
    {
        return Err(TreeError::InvalidWeights);
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Candidate {
    risk: f64,
    feature: usize,
    /// Threshold, or prefix length for categorical splits; orders ties.
    key: f64,
    split: Split,
    left: Vec<usize>,
    right: Vec<usize>,
}

struct Stats {
    pos: f64,
    mass: f64,
}

impl Stats {
    fn of(idx: &[usize], w: &[f64], y: &[i8]) -> Stats {
        let mut s = Stats {
            pos: 0.0,
            mass: 0.0,
        };
        for &i in idx {
            s.mass += w[i];
            if y[i] > 0 {
                s.pos += w[i];
            }
        }
        s
    }

    fn p_plus(&self) -> f64 {
        if self.mass > 0.0 {
            (self.pos / self.mass).min(1.0)
        } else {
            0.5
        }
    }

    fn risk(&self) -> f64 {
        part_risk(self.pos, self.mass)
    }
}

fn part_risk(pos: f64, mass: f64) -> f64 {
    if mass > 0.0 {
        mass * cbr_log((pos / mass).min(1.0))
    } else {
        0.0
    }
}

fn best_numeric(
    feature: usize,
    values: &[f64],
    idx: &[usize],
    w: &[f64],
    y: &[i8],
    total: &Stats,
) -> Option<Candidate> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let (mut pos, mut mass) = (0.0, 0.0);
    let mut best: Option<(f64, usize, f64)> = None;
    for k in 0..order.len() - 1 {
        let i = order[k];
        mass += w[i];
        if y[i] > 0 {
            pos += w[i];
        }
        let (a, b) = (values[i], values[order[k + 1]]);
        if a == b {
            continue;
        }
        let risk = part_risk(pos, mass) + part_risk(total.pos - pos, total.mass - mass);
        if best.is_none_or(|(r, _, _)| risk < r) {
            let mut thr = 0.5 * (a + b);
            if !(thr >= a && thr < b) {
                thr = a;
            }
            best = Some((risk, k, thr));
        }
    }
    let (risk, k, threshold) = best?;
    Some(Candidate {
        risk,
        feature,
        key: threshold,
        split: Split::Numeric { feature, threshold },
        left: {
            let mut l = order[..=k].to_vec();
            l.sort_unstable();
            l
        },
        right: {
            let mut r = order[k + 1..].to_vec();
            r.sort_unstable();
            r
        },
    })
}

fn best_categorical(
    feature: usize,
    codes: &[u32],
    idx: &[usize],
    w: &[f64],
    y: &[i8],
    total: &Stats,
) -> Option<Candidate> {
    use std::collections::BTreeMap;
    let mut per: BTreeMap<u32, (f64, f64, usize)> = BTreeMap::new();
    for &i in idx {
        let e = per.entry(codes[i]).or_insert((0.0, 0.0, 0));
        e.1 += w[i];
        e.2 += 1;
        if y[i] > 0 {
            e.0 += w[i];
        }
    }
    if per.len() < 2 {
        return None;
    }
    let mut cats: Vec<(u32, f64, f64, usize)> =
        per.into_iter().map(|(c, (p, m, n))| (c, p, m, n)).collect();
    let post = |p: f64, m: f64| if m > 0.0 { p / m } else { 0.5 };
    cats.sort_by(|a, b| {
        post(a.1, a.2)
            .total_cmp(&post(b.1, b.2))
            .then(a.0.cmp(&b.0))
    });
    let (mut pos, mut mass) = (0.0, 0.0);
    let mut best: Option<(f64, usize)> = None;
    for k in 0..cats.len() - 1 {
        pos += cats[k].1;
        mass += cats[k].2;
        let risk = part_risk(pos, mass) + part_risk(total.pos - pos, total.mass - mass);
        if best.is_none_or(|(r, _)| risk < r) {
            best = Some((risk, k));
        }
    }
    let (risk, k) = best?;
    let mut left: Vec<u32> = cats[..=k].iter().map(|c| c.0).collect();
    let mut right: Vec<u32> = cats[k + 1..].iter().map(|c| c.0).collect();
    left.sort_unstable();
    right.sort_unstable();
    let side_weight = |s: &[(u32, f64, f64, usize)]| {
        (
            s.iter().map(|c| c.2).sum::<f64>(),
            s.iter().map(|c| c.3).sum::<usize>(),
        )
    };
    let (lw, ln) = side_weight(&cats[..=k]);
    let (rw, rn) = side_weight(&cats[k + 1..]);
    let default = if (lw, ln) > (rw, rn) {
        Side::Left
    } else {
        Side::Right
    };
    let (mut li, mut ri) = (Vec::new(), Vec::new());
    for &i in idx {
        if left.binary_search(&codes[i]).is_ok() {
            li.push(i);
        } else {
            ri.push(i);
        }
    }
    Some(Candidate {
        risk,
        feature,
        key: (k + 1) as f64,
        split: Split::Categorical {
            feature,
            left,
            right,
            default,
        },
        left: li,
        right: ri,
    })
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    (a.risk, a.feature).partial_cmp(&(b.risk, b.feature)) == Some(std::cmp::Ordering::Less)
        || (a.risk == b.risk && a.feature == b.feature && a.key < b.key)
}

fn best_split(sample: &Sample, idx: &[usize], w: &[f64], total: &Stats) -> Option<Candidate> {
    let y = sample.labels();
    let eval = |j: usize| match sample.column(j) {
        Column::Numeric(v) => best_numeric(j, v, idx, w, y, total),
        Column::Categorical(c) => best_categorical(j, c, idx, w, y, total),
    };
    let per_feature: Vec<Option<Candidate>> = if idx.len() >= PAR_THRESHOLD {
        (0..sample.n_features()).into_par_iter().map(eval).collect()
    } else {
        (0..sample.n_features()).map(eval).collect()
    };
    per_feature
        .into_iter()
        .flatten()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
}

/// Greedy induction: repeatedly split the heaviest non-pure leaf with the
/// split of least weighted entropy, until the next split would exceed
/// `max_nodes`, every leaf is pure, or no split strictly lowers the risk.
/// A leaf without an improving split is frozen and the next heaviest tried.
pub fn induce_dt(
    sample: &Sample,
    weights: &[f64],
    max_nodes: usize,
) -> Result<DecisionTree, TreeError> {
    if sample.is_empty() {
        return Err(TreeError::EmptySample);
    }
    if max_nodes == 0 || max_nodes % 2 == 0 {
        return Err(TreeError::InvalidMaxNodes(max_nodes));
    }
    check_weights(sample, weights)?;
    let total: f64 = weights.iter().sum();
    let w: Vec<f64> = weights.iter().map(|v| v / total).collect();
    let y = sample.labels();

    let all: Vec<usize> = (0..sample.len()).collect();
    let root = Stats::of(&all, &w, y);
    let mut nodes = vec![Node {
        id: 0,
        parent: None,
        depth: 0,
        p_plus: root.p_plus(),
        mass: root.mass,
        split: None,
        children: None,
    }];
    let mut members: Vec<Vec<usize>> = vec![all];
    let mut open: Vec<bool> = vec![true];

    while nodes.len() + 2 <= max_nodes {
        let mut tried = false;
        let mut order: Vec<usize> = (0..nodes.len())
            .filter(|&i| {
                open[i] && nodes[i].is_leaf() && nodes[i].p_plus > 0.0 && nodes[i].p_plus < 1.0
            })
            .collect();
        order.sort_by(|&a, &b| nodes[b].mass.total_cmp(&nodes[a].mass).then(a.cmp(&b)));
        for leaf in order {
            let idx = &members[leaf];
            let stats = Stats::of(idx, &w, y);
            let parent_risk = stats.risk();
            let cand = best_split(sample, idx, &w, &stats)
                .filter(|c| !c.left.is_empty() && !c.right.is_empty())
                .filter(|c| c.risk < parent_risk - 1e-14 * stats.mass.max(f64::MIN_POSITIVE));
            let Some(c) = cand else {
                open[leaf] = false;
                continue;
            };
            let depth = nodes[leaf].depth + 1;
            let ids = [nodes.len(), nodes.len() + 1];
            for (id, part) in ids.iter().zip([&c.left, &c.right]) {
                let s = Stats::of(part, &w, y);
                nodes.push(Node {
                    id: *id,
                    parent: Some(leaf),
                    depth,
                    p_plus: s.p_plus(),
                    mass: s.mass,
                    split: None,
                    children: None,
                });
                open.push(true);
            }
            nodes[leaf].split = Some(c.split);
            nodes[leaf].children = Some(ids);
            members.push(c.left);
            members.push(c.right);
            members[leaf] = Vec::new();
            tried = true;
            break;
        }
        if !tried {
            break;
        }
    }
    Ok(DecisionTree { nodes })
}
