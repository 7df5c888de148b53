//! Fast invariant suites run by `tempered selftest`.
//!
//! Each suite uses a fixed seed and small corpora, so a run takes a few
//! seconds and its outcome is reproducible.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boosting::{boost, weight_update};
use crate::data::{Sample, Value};
use crate::geometry::{
    embed_t_radius, lorentz_dist, lorentz_tself_dist, mobius_translate, origin_dist, poincare_dist,
    DiskPoint, LorentzPoint,
};
use crate::mdt::{check_invariant_m, check_structure, create_mdt};
use crate::synth::{
    random_disk_point, random_dt, random_interval, random_observations, random_polynomial,
    Posteriors,
};
use crate::tempered::{
    cosh_t_dual, lift, t_add, t_derivative_default, t_integrate, t_riemann_sum, t_sub, Partition,
    Temper, DEFAULT_QUAD_TOL,
};
use crate::trees::dt_predict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Geometry,
    Mdt,
    Boost,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(Suite::Core),
            "geometry" => Ok(Suite::Geometry),
            "mdt" => Ok(Suite::Mdt),
            "boost" => Ok(Suite::Boost),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (expected core, geometry, mdt, boost or all)"
            )),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Core => "core",
            Suite::Geometry => "geometry",
            Suite::Mdt => "mdt",
            Suite::Boost => "boost",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{status} {}::{}  {}", self.suite, self.name, self.detail)
    }
}

fn check(suite: Suite, name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        suite,
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
    }
}

fn temper(t: f64) -> Temper {
    Temper::new(t).expect("finite temper")
}

/// Runs `suite` (every suite for [`Suite::All`]).
pub fn run(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Core => core(),
        Suite::Geometry => geometry(),
        Suite::Mdt => mdt(),
        Suite::Boost => boosting(),
        Suite::All => [core(), geometry(), mdt(), boosting()].concat(),
    }
}

fn core() -> Vec<Check> {
    let s = Suite::Core;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let temps = [-1.0, 0.0, 0.5, 1.0, 2.0].map(temper);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b): (f64, f64) = (rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
        for &t in &temps {
            let back = t_sub(t_add(a, b, t), b, t).expect("away from the pole");
            worst = worst.max((back - a).abs());
        }
    }
    out.push(check(s, "t_add_t_sub_round_trip", worst, 1e-12));

    let mut riemann = 0.0f64;
    let mut monotone = true;
    let mut volterra = 0.0f64;
    for _ in 0..5 {
        let p = random_polynomial(&mut rng, 4);
        let (a, b) = random_interval(&mut rng, 0.1);
        for &t in &temps {
            let exact = t_integrate(|x| p.eval(x), a, b, t, DEFAULT_QUAD_TOL).expect("polynomial");
            let mut prev = f64::INFINITY;
            for n in [100, 1_000, 10_000] {
                let part = Partition::regular(a, b, n).expect("a < b");
                let sum = t_riemann_sum(|x| p.eval(x), &part, t).expect("finite");
                let err = (sum - exact).abs();
                monotone &= err <= prev + 1e-12;
                prev = err;
            }
            riemann = riemann.max(prev / exact.abs().max(1e-3));
        }
        let i0 =
            t_integrate(|x| p.eval(x), a, b, temper(0.0), DEFAULT_QUAD_TOL).expect("polynomial");
        let i1 = p.integral(a, b);
        volterra = volterra.max((1.0 + i0 - i1.exp()).abs());
    }
    let mut c = check(s, "riemann_sums_converge", riemann, 1e-2);
    c.passed &= monotone;
    out.push(c);
    out.push(check(s, "volterra_identity", volterra, 1e-10));

    let mut ftc = 0.0f64;
    let p = random_polynomial(&mut rng, 3);
    for &t in &[0.0, 0.5, 1.0, 2.0].map(temper) {
        for k in 0..5 {
            let z = -0.5 + 0.25 * k as f64;
            let prim = |u: f64| t_integrate(|x| p.eval(x), -1.0, u, t, 1e-12).expect("polynomial");
            let d = t_derivative_default(prim, z, t).expect("regular point");
            ftc = ftc.max((d.value - p.eval(z)).abs());
        }
    }
    out.push(check(s, "fundamental_theorem", ftc, 1e-4));

    let mut order = true;
    for _ in 0..100 {
        let xs: Vec<f64> = (0..8).map(|_| rng.random_range(-5.0..5.0)).collect();
        for &t in &temps {
            let ys: Vec<f64> = xs.iter().map(|&x| lift(x, t)).collect();
            for i in 0..xs.len() {
                for j in 0..xs.len() {
                    order &= (xs[i] < xs[j]) == (ys[i] < ys[j]);
                }
            }
        }
    }
    out.push(Check {
        suite: s,
        name: "lift_preserves_order",
        passed: order,
        detail: String::new(),
    });
    out
}

fn geometry() -> Vec<Check> {
    let s = Suite::Geometry;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut out = Vec::new();

    let mut fidelity = 0.0f64;
    for &t in &[0.0, 0.3, 0.6, 1.0].map(temper) {
        for k in 1..1000 {
            let r = k as f64 / 1000.0;
            let e = embed_t_radius(r, t).expect("r < 1");
            let d = origin_dist(r);
            fidelity = fidelity.max((lift(origin_dist(e.radius), t) - d).abs() / d);
        }
    }
    // Relative residual: |d^(t)(z^(t), 0) - d(z, 0)| / d(z, 0).
    out.push(check(s, "t_self_fidelity", fidelity, 1e-9));

    let mut hpt = 0.0f64;
    for _ in 0..100 {
        let x = DiskPoint::new(rng.random_range(0.01..0.9), 0.0).expect("inside");
        let y = DiskPoint::new(0.0, rng.random_range(0.01..0.9)).expect("inside");
        let (a, b, c) = (
            origin_dist(x.norm()),
            origin_dist(y.norm()),
            poincare_dist(x, y),
        );
        for &t in &[0.0, 0.5, 1.0, 2.0].map(temper) {
            let lhs = cosh_t_dual(lift(c, t), t).expect("in domain");
            let rhs = cosh_t_dual(lift(a, t), t).expect("in domain")
                * cosh_t_dual(lift(b, t), t).expect("in domain");
            hpt = hpt.max((lhs - rhs).abs() / rhs);
        }
    }
    out.push(check(s, "pythagoras_with_tempered_negation", hpt, 1e-9));

    let mut iso = 0.0f64;
    for _ in 0..1000 {
        let (x, y, a) = (
            random_disk_point(&mut rng, 0.95),
            random_disk_point(&mut rng, 0.95),
            random_disk_point(&mut rng, 0.95),
        );
        let d = poincare_dist(x, y);
        iso = iso.max(
            (poincare_dist(mobius_translate(x, a), mobius_translate(y, a)) - d).abs() / d.max(1.0),
        );
    }
    out.push(check(s, "mobius_isometry", iso, 1e-9));

    let mut excess = f64::NEG_INFINITY;
    let mut witness = false;
    for delta in [0.1, 0.01] {
        let (t, c) = (temper(1.0 + 1.0 / delta), 2.0 / delta);
        for _ in 0..10_000 {
            let p: Vec<LorentzPoint> = (0..3)
                .map(|_| LorentzPoint::random(&mut rng, 2, c, 1.0).expect("valid curvature"))
                .collect();
            let d =
                |i: usize, j: usize| lorentz_tself_dist(&p[i], &p[j], t).expect("same curvature");
            excess = excess.max(d(0, 2) - d(0, 1) - d(1, 2) - delta);
            let raw = |i: usize, j: usize| lorentz_dist(&p[i], &p[j]).expect("same curvature");
            witness |= raw(0, 2) > raw(0, 1) + raw(1, 2);
        }
    }
    out.push(Check {
        suite: s,
        name: "lorentz_delta_triangle",
        passed: excess <= 1e-12,
        detail: format!("max excess {excess:.3e}"),
    });
    out.push(Check {
        suite: s,
        name: "lorentz_raw_violation_found",
        passed: witness,
        detail: String::new(),
    });
    out
}

fn mdt() -> Vec<Check> {
    let s = Suite::Mdt;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut mismatches, mut exclusive, mut structure) = (0usize, 0usize, true);
    for i in 0..100 {
        let kind = if i % 2 == 0 {
            Posteriors::Uniform
        } else {
            Posteriors::Grid(16)
        };
        let dt = random_dt(&mut rng, 6, 3, 0.7, kind);
        let mdt = create_mdt(&dt);
        let xs = random_observations(&mut rng, 50, 3);
        let report = check_invariant_m(&dt, &mdt, &xs).expect("numeric features");
        mismatches += report.mismatches.len();
        exclusive += report.non_exclusive;
        let st = check_structure(&dt, &mdt);
        structure &= st.strictly_monotone && st.node_count_ok && st.max_confidence_equal;
    }
    vec![
        Check {
            suite: s,
            name: "invariant_m",
            passed: mismatches == 0 && exclusive == 0,
            detail: format!("{mismatches} mismatches, {exclusive} non-exclusive sibling tests"),
        },
        Check {
            suite: s,
            name: "structure",
            passed: structure,
            detail: String::new(),
        },
    ]
}

/// Two noisy overlapping clusters in `[0, 1]^2`.
fn toy_sample(rng: &mut ChaCha8Rng, n: usize) -> Sample {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y: i8 = if i % 2 == 0 { 1 } else { -1 };
        let shift = if y > 0 { 0.15 } else { -0.15 };
        rows.push(vec![
            (0.5 + shift + rng.random_range(-0.35f64..0.35)).clamp(0.0, 1.0),
            (0.5 - shift + rng.random_range(-0.35f64..0.35)).clamp(0.0, 1.0),
        ]);
        labels.push(y);
    }
    Sample::from_numeric_rows(&rows, labels).expect("well-formed rows")
}

fn boosting() -> Vec<Check> {
    let s = Suite::Boost;
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sample = toy_sample(&mut rng, 400);
    let ens = boost(&sample, 10, 15).expect("two classes");
    let rise = ens
        .train_loss
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);

    let rows: Vec<Vec<Value>> = sample.rows().collect();
    let mut identity = 0.0f64;
    let mut margins = vec![0.0; rows.len()];
    for (j, (tree, lev)) in ens.trees.iter().zip(&ens.leverages).enumerate() {
        for (i, x) in rows.iter().enumerate() {
            margins[i] += lev.alpha * dt_predict(tree, x).expect("numeric").real_value;
            let y = f64::from(sample.labels()[i]);
            let closed = 1.0 / (1.0 + (y * margins[i]).exp());
            identity = identity.max((ens.weight_trajectory[j + 1][i] - closed).abs());
        }
    }
    let mut kappa = 0.0f64;
    for (tree, lev) in ens.trees.iter().zip(&ens.leverages) {
        kappa = kappa.max((create_mdt(tree).max_abs_prediction() - lev.kappa_star).abs());
    }
    let step = weight_update(0.5, 0.0, 1, 3.0);
    vec![
        Check {
            suite: s,
            name: "loss_non_increasing",
            passed: rise <= 1e-12,
            detail: format!("largest increase {rise:.3e}"),
        },
        check(s, "weight_closed_form", identity, 1e-10),
        check(s, "kappa_star_is_mdt_max", kappa, 0.0),
        Check {
            suite: s,
            name: "zero_leverage_keeps_weight",
            passed: step == 0.5,
            detail: String::new(),
        },
    ]
}
