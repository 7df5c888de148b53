//! Placement of an MDT in the Poincaré disk (a Sarkar-style recursive
//! layout with leaf-proportional fans), the embedding error ρ and the t-self
//! norm remap.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    embed_t_radius, mobius_translate, mobius_translate_inv, origin_dist, DiskPoint, GeometryError,
};
use crate::mdt::MonotonicDecisionTree;
use crate::tempered::{lift, Temper};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("fan angle {0} outside (0, 2π]")]
    InvalidFan(f64),
    #[error("minimum gap {0} must be nonnegative")]
    InvalidGap(f64),
    #[error("t-self must start from a t = 1 layout, this one has t = {0}")]
    NotClassical(f64),
    #[error("layout has {0} points but the tree has {1} nodes")]
    NodeCount(usize, usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    /// Fan available to the root's children.
    pub root_fan: f64,
    /// Fan available to the children of any other node.
    pub fan: f64,
    /// Minimum angle between sibling sectors.
    pub min_gap: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            root_fan: TAU,
            fan: PI,
            min_gap: 0.05,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), LayoutError> {
        for f in [self.root_fan, self.fan] {
            if !(f > 0.0 && f <= TAU) {
                return Err(LayoutError::InvalidFan(f));
            }
        }
        if !(self.min_gap >= 0.0 && self.min_gap.is_finite()) {
            return Err(LayoutError::InvalidGap(self.min_gap));
        }
        Ok(())
    }
}

/// Angular sector allocated to a node, seen from its parent moved to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub bisector: f64,
    pub half_width: f64,
}

/// A node whose children did not fit in its fan at the minimum gap; the gap
/// was shrunk to `used_gap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorUnderflow {
    pub node: usize,
    pub children: usize,
    pub fan: f64,
    pub used_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskLayout {
    pub points: Vec<DiskPoint>,
    pub rho: f64,
    pub t: Temper,
    pub params: LayoutParams,
    /// Per node, its sector in its parent's frame (t = 1 layouts only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sectors: Vec<Option<Sector>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub underflows: Vec<SectorUnderflow>,
    /// Nodes whose norm had to be clamped below the boundary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub saturated: Vec<usize>,
    /// Nodes whose confidence does not exceed their parent's.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flat_arcs: Vec<usize>,
}

/// Length `L` of a ray from a point at distance `a` from the origin, leaving
/// at angle `phi` from the outward radial direction, that ends at distance
/// `target` from the origin. Solves
/// `cosh a cosh L + sinh a sinh L cos φ = cosh target` as
/// `L = acosh(C / R) - ψ`, `R = sqrt(A² - B²)`, `tanh ψ = B / A`.
pub fn ray_length(a: f64, phi: f64, target: f64) -> f64 {
    if a == 0.0 {
        return target;
    }
    let (ca, sa) = (a.cosh(), a.sinh());
    let b = sa * phi.cos();
    // Factor e^a out of A, B and C to stay finite for large distances.
    let scale = (-a).exp();
    let (a_s, b_s) = (ca * scale, b * scale);
    let c_s = 0.5 * ((target - a).exp() + (-target - a).exp());
    let r_s = ((a_s - b_s) * (a_s + b_s)).sqrt();
    let psi = (b_s / a_s).atanh();
    ((c_s / r_s).max(1.0)).acosh() - psi
}

/// Half-angle, seen from a child at distance `l` on the bisector of a wedge
/// of half-angle `beta`, of the directions whose geodesic rays stay inside
/// the wedge.
fn cone_half_angle(beta: f64, l: f64) -> f64 {
    if beta >= PI {
        return PI;
    }
    let c = Complex64::new((0.5 * l).tanh(), 0.0);
    let e = Complex64::from_polar(1.0, beta);
    ((e - c) / (Complex64::new(1.0, 0.0) - c * e)).arg().abs()
}

fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Recursive placement: each node is moved to the origin, its children get
/// sectors of its fan proportional to their leaf counts (centred on the
/// direction away from its parent) and sit on their sector bisectors at the
/// exact distance from the disk origin given by their `|prediction|`.
/// A child's own fan is narrowed, when needed, to the directions whose rays
/// stay in its sector, so every subtree stays inside its sector.
pub fn sarkar_layout(
    mdt: &MonotonicDecisionTree,
    params: &LayoutParams,
) -> Result<DiskLayout, LayoutError> {
    params.validate()?;
    let n = mdt.len();
    // Clamped links can tie a child with its parent; such children are
    // placed just beyond the parent and reported.
    let flat_arcs: Vec<usize> = mdt
        .arcs()
        .iter()
        .filter(|a| !(mdt.node(a.tail).prediction.abs() > mdt.node(a.head).prediction.abs()))
        .map(|a| a.tail)
        .collect();
    let leaves = mdt.leaf_counts();
    let mut points = vec![DiskPoint::ORIGIN; n];
    let mut sectors: Vec<Option<Sector>> = vec![None; n];
    let mut fans = vec![params.fan; n];
    let mut underflows = Vec::new();

    let root_conf = mdt.node(0).prediction.abs();
    if root_conf > 0.0 {
        points[0] = DiskPoint::at_distance(root_conf, 0.0)?;
    }
    fans[0] = params.root_fan;

    for v in 0..n {
        let node = mdt.node(v);
        let k = node.children.len();
        if k == 0 {
            continue;
        }
        let zv = points[v];
        let a = origin_dist(zv.norm());
        let outward = if zv.norm() > 0.0 { zv.arg() } else { 0.0 };
        let away = match node.parent {
            None => outward,
            Some(p) => (-mobius_translate(points[p], zv).complex()).arg(),
        };
        let fan = fans[v];
        let total: usize = node.children.iter().map(|&c| leaves[c]).sum();
        let mut gap = params.min_gap;
        if fan - k as f64 * gap <= 0.0 {
            gap = fan / (2.0 * k as f64);
            underflows.push(SectorUnderflow {
                node: v,
                children: k,
                fan,
                used_gap: gap,
            });
        }
        let usable = fan - k as f64 * gap;
        let mut start = away - 0.5 * fan;
        for &c in &node.children {
            let width = usable * leaves[c] as f64 / total as f64;
            let bisector = start + 0.5 * gap + 0.5 * width;
            start += width + gap;
            let target = mdt.node(c).prediction.abs();
            let mut l = ray_length(a, bisector - outward, target.max(a));
            if !(l > 0.0) {
                l = 1e-9;
            }
            let w = DiskPoint::at_distance(l, bisector)?;
            points[c] = mobius_translate_inv(w, zv);
            let half_width = 0.5 * width;
            sectors[c] = Some(Sector {
                bisector: wrap(bisector),
                half_width,
            });
            fans[c] = params.fan.min(2.0 * cone_half_angle(half_width, l));
        }
    }
    let saturated = (0..n).filter(|&i| points[i].is_clamped()).collect();
    let mut layout = DiskLayout {
        points,
        rho: 0.0,
        t: Temper::CLASSICAL,
        params: *params,
        sectors,
        underflows,
        saturated,
        flat_arcs,
    };
    layout.rho = embedding_error(mdt, &layout)?;
    Ok(layout)
}

/// ρ: mean over nodes with nonzero confidence of
/// `|(|α_ν| - d_t(0, z_ν)) / |α_ν||`, with `d_t` the t-self distance at the
/// layout's `t`.
pub fn embedding_error(
    mdt: &MonotonicDecisionTree,
    layout: &DiskLayout,
) -> Result<f64, LayoutError> {
    if layout.points.len() != mdt.len() {
        return Err(LayoutError::NodeCount(layout.points.len(), mdt.len()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (node, z) in mdt.nodes().iter().zip(&layout.points) {
        let alpha = node.prediction.abs();
        if alpha == 0.0 {
            continue;
        }
        let d = lift(origin_dist(z.norm()), layout.t);
        sum += ((alpha - d) / alpha).abs();
        count += 1;
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// Remaps every norm through `embed_t_radius(·, t)` keeping angles, and
/// recomputes ρ against t-self distances.
pub fn apply_t_self(
    mdt: &MonotonicDecisionTree,
    layout: &DiskLayout,
    t: Temper,
) -> Result<DiskLayout, LayoutError> {
    if !layout.t.is_classical() {
        return Err(LayoutError::NotClassical(layout.t.value()));
    }
    if layout.points.len() != mdt.len() {
        return Err(LayoutError::NodeCount(layout.points.len(), mdt.len()));
    }
    let mut saturated = Vec::new();
    let mut points = Vec::with_capacity(layout.points.len());
    for (i, z) in layout.points.iter().enumerate() {
        let e = embed_t_radius(z.norm(), t)?;
        if e.saturated || z.is_clamped() {
            saturated.push(i);
        }
        points.push(if z.norm() == 0.0 {
            *z
        } else {
            DiskPoint::from_polar(e.radius, z.arg())?
        });
    }
    let mut out = DiskLayout {
        points,
        rho: 0.0,
        t,
        params: layout.params,
        sectors: Vec::new(),
        underflows: layout.underflows.clone(),
        saturated,
        flat_arcs: layout.flat_arcs.clone(),
    };
    out.rho = embedding_error(mdt, &out)?;
    Ok(out)
}

/// Number of (node, descendant) pairs where the descendant, seen from the
/// node's parent moved to the origin, lies outside the node's sector.
pub fn containment_violations(mdt: &MonotonicDecisionTree, layout: &DiskLayout, tol: f64) -> usize {
    let mut violations = 0;
    for v in 1..mdt.len() {
        let Some(sector) = layout.sectors.get(v).copied().flatten() else {
            continue;
        };
        let parent = layout.points[mdt.node(v).parent.unwrap()];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let w = mobius_translate(layout.points[u], parent);
            if wrap(w.arg() - sector.bisector).abs() > sector.half_width + tol {
                violations += 1;
            }
            stack.extend(&mdt.node(u).children);
        }
    }
    violations
}
