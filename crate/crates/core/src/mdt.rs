//! Monotonic decision trees: conversion from a DT (CREATEMDT) and checks of
//! invariant (M).

use serde::{Deserialize, Serialize};

use crate::boosting::Leverage;
use crate::data::Value;
use crate::trees::{canonical_link, DecisionTree, Literal, TreeError, LINK_EPS};

/// A DT leaf rerouted to an MDT node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafTag {
    pub leaf: usize,
    pub p_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdtNode {
    pub id: usize,
    /// Id of the DT node this node copies.
    pub source: usize,
    pub p_plus: f64,
    /// `canonical_link(p_plus)`.
    pub prediction: f64,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<LeafTag>,
}

impl MdtNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Arc `head → tail` labelled by a conjunction of DT literals; its width is
/// the number of literals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdtArc {
    pub head: usize,
    pub tail: usize,
    pub test: Vec<Literal>,
    pub width: usize,
}

impl MdtArc {
    pub fn eval(&self, x: &[Value]) -> Result<bool, TreeError> {
        for lit in &self.test {
            if !lit.eval(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Node `i` is at index `i`; the arc into node `i > 0` is `arcs[i - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicDecisionTree {
    nodes: Vec<MdtNode>,
    arcs: Vec<MdtArc>,
}

impl MonotonicDecisionTree {
    pub fn nodes(&self) -> &[MdtNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &MdtNode {
        &self.nodes[id]
    }

    pub fn arcs(&self) -> &[MdtArc] {
        &self.arcs
    }

    /// The arc entering `id` (none for the root).
    pub fn arc_to(&self, id: usize) -> Option<&MdtArc> {
        id.checked_sub(1).map(|k| &self.arcs[k])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Number of leaves in the subtree rooted at each node.
    pub fn leaf_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nodes.len()];
        // Children always have larger ids than their parent.
        for id in (0..self.nodes.len()).rev() {
            let n = &self.nodes[id];
            counts[id] = if n.is_leaf() {
                1
            } else {
                n.children.iter().map(|&c| counts[c]).sum()
            };
        }
        counts
    }

    pub fn max_abs_prediction(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.prediction.abs())
            .fold(0.0, f64::max)
    }

    fn push(&mut self, dt: &DecisionTree, source: usize, head: usize, test: Vec<Literal>) -> usize {
        let id = self.nodes.len();
        let p = dt.node(source).p_plus;
        self.nodes.push(MdtNode {
            id,
            source,
            p_plus: p,
            prediction: canonical_link(p, LINK_EPS),
            parent: Some(head),
            depth: self.nodes[head].depth + 1,
            children: Vec::new(),
            tags: Vec::new(),
        });
        self.nodes[head].children.push(id);
        let width = test.len();
        self.arcs.push(MdtArc {
            head,
            tail: id,
            test,
            width,
        });
        id
    }
}

fn interval(p: f64) -> (f64, f64) {
    let q = 1.0 - p;
    (p.min(q), p.max(q))
}

fn inside(p: f64, (lo, hi): (f64, f64)) -> bool {
    lo <= p && p <= hi
}

/// CREATEMDT. A DT node is copied iff its posterior lies outside the closed
/// forbidden interval of its nearest copied ancestor; DT leaves inside it tag
/// that ancestor instead. Tests along skipped nodes are conjoined.
pub fn create_mdt(dt: &DecisionTree) -> MonotonicDecisionTree {
    let root = dt.root();
    let mut mdt = MonotonicDecisionTree {
        nodes: vec![MdtNode {
            id: 0,
            source: 0,
            p_plus: root.p_plus,
            prediction: canonical_link(root.p_plus, LINK_EPS),
            parent: None,
            depth: 0,
            children: Vec::new(),
            tags: Vec::new(),
        }],
        arcs: Vec::new(),
    };
    // Explicit stack instead of recursion: (dt node, conjunction, mdt node, interval).
    let mut stack = vec![(0usize, Vec::<Literal>::new(), 0usize, interval(root.p_plus))];
    while let Some((v, b, v_prime, forbidden)) = stack.pop() {
        let node = dt.node(v);
        let p = node.p_plus;
        match node.children {
            None => {
                if inside(p, forbidden) {
                    mdt.nodes[v_prime].tags.push(LeafTag { leaf: v, p_plus: p });
                } else {
                    mdt.push(dt, v, v_prime, b);
                }
            }
            Some(children) => {
                let (b_new, v_new, i_new) = if !inside(p, forbidden) {
                    let created = mdt.push(dt, v, v_prime, b);
                    (Vec::new(), created, interval(p))
                } else {
                    (b, v_prime, forbidden)
                };
                // Right first so that the left child is processed first.
                for &c in children.iter().rev() {
                    let mut bc = b_new.clone();
                    bc.push(dt.incoming_literal(c).expect("child has an incoming test"));
                    stack.push((c, bc, v_new, i_new));
                }
            }
        }
    }
    mdt
}

/// Prediction of the bottommost node reachable from the root.
pub fn mdt_predict(mdt: &MonotonicDecisionTree, x: &[Value]) -> Result<f64, TreeError> {
    Ok(mdt.nodes[mdt_reach(mdt, x)?].prediction)
}

/// `Σ_j α_j · MDT_j(x)`: an ensemble with every tree replaced by its MDT and
/// the leveraging coefficients kept.
pub fn mdt_ensemble_predict(
    mdts: &[MonotonicDecisionTree],
    leverages: &[Leverage],
    x: &[Value],
) -> Result<f64, TreeError> {
    let mut s = 0.0;
    for (mdt, lev) in mdts.iter().zip(leverages) {
        if lev.alpha != 0.0 {
            s += lev.alpha * mdt_predict(mdt, x)?;
        }
    }
    Ok(s)
}

/// Id of the bottommost node reachable by `x`.
pub fn mdt_reach(mdt: &MonotonicDecisionTree, x: &[Value]) -> Result<usize, TreeError> {
    let mut id = 0;
    'descend: loop {
        for &c in &mdt.nodes[id].children {
            if mdt.arcs[c - 1].eval(x)? {
                id = c;
                continue 'descend;
            }
        }
        return Ok(id);
    }
}

/// `|2p - 1|`, the confidence used by the (M) oracle.
fn confidence(p: f64) -> f64 {
    (2.0 * p - 1.0).abs()
}

/// Brute-force (M) oracle: the canonical link of the deepest node of the
/// greedy strictly-confidence-increasing subsequence of `x`'s DT path.
pub fn monotone_oracle(dt: &DecisionTree, x: &[Value]) -> Result<f64, TreeError> {
    let (path, _) = dt.path(x)?;
    let mut best = path[0];
    for &v in &path[1..] {
        if confidence(dt.node(v).p_plus) > confidence(dt.node(best).p_plus) {
            best = v;
        }
    }
    Ok(canonical_link(dt.node(best).p_plus, LINK_EPS))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub index: usize,
    pub expected: f64,
    pub got: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvariantReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    /// Observations satisfying more than one outgoing arc at some node.
    pub non_exclusive: usize,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty() && self.non_exclusive == 0
    }
}

/// Compares `mdt_predict` against [`monotone_oracle`] on every observation.
pub fn check_invariant_m(
    dt: &DecisionTree,
    mdt: &MonotonicDecisionTree,
    xs: &[Vec<Value>],
) -> Result<InvariantReport, TreeError> {
    let mut report = InvariantReport::default();
    for (index, x) in xs.iter().enumerate() {
        let expected = monotone_oracle(dt, x)?;
        let got = mdt_predict(mdt, x)?;
        report.checked += 1;
        if expected != got {
            report.mismatches.push(Mismatch {
                index,
                expected,
                got,
            });
        }
        let mut id = 0;
        loop {
            let mut hits = mdt.nodes[id]
                .children
                .iter()
                .filter(|&&c| mdt.arcs[c - 1].eval(x).unwrap_or(false));
            let Some(&first) = hits.next() else { break };
            if hits.next().is_some() {
                report.non_exclusive += 1;
                break;
            }
            id = first;
        }
    }
    Ok(report)
}

/// Structural properties of an MDT relative to its source DT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    /// `|prediction|` strictly increases along every arc.
    pub strictly_monotone: bool,
    pub depth_equal: bool,
    pub node_count_ok: bool,
    /// Largest `|prediction|` equals the largest `|link|` over all DT nodes
    /// (the leaf maximum when posteriors are mass-weighted averages).
    pub max_confidence_equal: bool,
}

pub fn check_structure(dt: &DecisionTree, mdt: &MonotonicDecisionTree) -> StructureReport {
    let strictly_monotone = mdt
        .arcs
        .iter()
        .all(|a| mdt.nodes[a.tail].prediction.abs() > mdt.nodes[a.head].prediction.abs());
    StructureReport {
        strictly_monotone,
        depth_equal: mdt.depth() == dt.depth(),
        node_count_ok: mdt.len() <= dt.len(),
        max_confidence_equal: mdt.max_abs_prediction()
            == dt
                .nodes()
                .iter()
                .map(|n| canonical_link(n.p_plus, LINK_EPS).abs())
                .fold(0.0, f64::max),
    }
}

/// Checks that `small` embeds in `big` through the map sending each node to
/// the `big` node with the same source DT node (after translating sources
/// through `old_of`, the id map returned by [`DecisionTree::pruned`]):
/// the map must exist, preserve parents, predictions and arc tests.
pub fn embeds_via_source(
    small: &MonotonicDecisionTree,
    big: &MonotonicDecisionTree,
    old_of: &[usize],
) -> bool {
    let find = |src: usize| big.nodes.iter().position(|n| n.source == src);
    let mut image = Vec::with_capacity(small.len());
    for n in &small.nodes {
        match find(old_of[n.source]) {
            Some(m) => image.push(m),
            None => return false,
        }
    }
    small.nodes.iter().all(|n| {
        let m = &big.nodes[image[n.id]];
        m.prediction == n.prediction
            && match n.parent {
                None => m.parent.is_none(),
                Some(p) => {
                    m.parent == Some(image[p])
                        && big.arcs[m.id - 1].test == small.arcs[n.id - 1].test
                }
            }
    })
}
