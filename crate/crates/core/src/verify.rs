//! Grid-wide invariant suites shared by the CLI and the acceptance tests.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelParams, FeedbackDist};
use crate::entropy::{check_joints, evaluate_scheme_bounds, joint_family, verify_dominance};
use crate::error::Result;
use crate::rational::{frac, Rational};
use crate::regions::{
    feedback_families_redundant, inner_region, outer_region, p_star, scheme_constants, sym_capacity, symmetric_params, RegionComparison,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} checked, {} failed)",
            self.suite,
            if self.passes() { "pass" } else { "FAIL" },
            self.checked,
            self.failures.len()
        )
    }
}

/// `{0, 1/4, 1/2, 3/4, 1}`.
pub fn quarter_grid() -> Vec<Rational> {
    (0..=4).map(|k| frac(k, 4)).collect()
}

fn pairs(ps: &[Rational]) -> Vec<(Rational, Rational)> {
    ps.iter().flat_map(|&a| ps.iter().map(move |&b| (a, b))).collect()
}

fn tag(p: &ChannelParams) -> String {
    format!("n=({},{},{},{})", p.n11, p.n12, p.n21, p.n22)
}

/// Runs `check` over every grid point in parallel and keeps failures in grid order.
fn run_suite<T, F>(suite: &str, points: Vec<T>, check: F) -> Result<SuiteReport>
where
    T: Send + Sync,
    F: Fn(&T) -> Result<Option<String>> + Send + Sync,
{
    let results: Vec<Option<String>> = points.par_iter().map(&check).collect::<Result<_>>()?;
    Ok(SuiteReport { suite: suite.to_string(), checked: points.len(), failures: results.into_iter().flatten().collect() })
}

/// Eliminated inner region against the outer bound at one point.
pub fn theorem1_point(params: &ChannelParams, p1: Rational, p2: Rational) -> Result<RegionComparison> {
    let inner = inner_region(&scheme_constants(params, p1, p2)?)?;
    inner.compare(&outer_region(params, p1, p2)?)
}

pub fn theorem1_grid(nmax: usize, pgrid: &[Rational]) -> Result<SuiteReport> {
    let points: Vec<_> =
        ChannelParams::grid(nmax).into_iter().flat_map(|n| pairs(pgrid).into_iter().map(move |(a, b)| (n, a, b))).collect();
    run_suite("theorem1-grid", points, |(n, p1, p2)| {
        Ok(match theorem1_point(n, *p1, *p2)? {
            RegionComparison::Equal => None,
            RegionComparison::Different { witness, in_first } => Some(format!(
                "{} p=({p1},{p2}): point ({}, {}) only in the {} region",
                tag(n),
                witness[0],
                witness[1],
                if in_first { "inner" } else { "outer" }
            )),
        })
    })
}

/// `t1 <= p1c + s2` and `t2 <= p2c + s1`.
pub fn fact1_grid(nmax: usize, pgrid: &[Rational]) -> Result<SuiteReport> {
    let points: Vec<_> =
        ChannelParams::grid(nmax).into_iter().flat_map(|n| pairs(pgrid).into_iter().map(move |(a, b)| (n, a, b))).collect();
    run_suite("fact1", points, |(n, p1, p2)| {
        let k = scheme_constants(n, *p1, *p2)?;
        Ok(match k.fact1() {
            (true, true) => None,
            (a, b) => Some(format!("{} p=({p1},{p2}): user1 {a}, user2 {b}", tag(n))),
        })
    })
}

/// At `p1 = p2 = 1` the three feedback-dependent families are implied by the
/// perfect-feedback ones.
pub fn collapse_grid(nmax: usize) -> Result<SuiteReport> {
    run_suite("perfect-feedback-collapse", ChannelParams::grid(nmax), |n| {
        let flags = feedback_families_redundant(n, Rational::one(), Rational::one())?;
        let kept: Vec<String> = flags.iter().filter(|(_, r)| !r).map(|(f, _)| format!("{f:?}")).collect();
        Ok((!kept.is_empty()).then(|| format!("{}: {} not redundant", tag(n), kept.join(", "))))
    })
}

/// Closed-form entropies, weighted-bound dominance and marginal sufficiency
/// under the three joints with marginals `(p1, p2)`.
pub fn appendix_a_grid(nmax: usize, p1: Rational, p2: Rational) -> Result<SuiteReport> {
    run_suite("appendix-a", ChannelParams::grid(nmax), |n| {
        let mut bad = Vec::new();
        let joints = check_joints(n, p1, p2)?;
        for (name, ok) in &joints.all_match {
            if !ok {
                bad.push(format!("{name}: entropy mismatch"));
            }
        }
        if !joints.identical {
            bad.push("final constraint sets differ across joints".to_string());
        }
        for (name, dist) in joint_family(p1, p2)? {
            if !verify_dominance(n, &dist)?.passes() {
                bad.push(format!("{name}: dominance fails"));
            }
        }
        Ok((!bad.is_empty()).then(|| format!("{}: {}", tag(n), bad.join("; "))))
    })
}

/// Every scheme-bound entropy against its closed form under independent states.
pub fn entropy_bounds_grid(nmax: usize, pgrid: &[Rational]) -> Result<SuiteReport> {
    let points: Vec<_> =
        ChannelParams::grid(nmax).into_iter().flat_map(|n| pairs(pgrid).into_iter().map(move |(a, b)| (n, a, b))).collect();
    run_suite("entropy-bounds", points, |(n, p1, p2)| {
        let rep = evaluate_scheme_bounds(n, &FeedbackDist::independent(*p1, *p2)?)?;
        let bad: Vec<String> = rep.mismatches().map(|r| format!("{} = {} vs {}", r.expression, r.computed, r.closed_form)).collect();
        Ok((!bad.is_empty()).then(|| format!("{} p=({p1},{p2}): {}", tag(n), bad.join("; "))))
    })
}

/// Every `alpha` in `(0, 3]` with `alpha n` integral.
pub fn alpha_grid(n: usize) -> Vec<Rational> {
    (1..=3 * n as i64).map(|k| frac(k, n as i64)).collect()
}

/// Closed-form symmetric capacity against the symmetric corner of the outer
/// region, and the `p*` bound.
pub fn closed_forms(n: usize, pgrid: &[Rational]) -> Result<SuiteReport> {
    let mut points = Vec::new();
    for a in alpha_grid(n) {
        for &p in pgrid {
            points.push((a, Some(p)));
        }
        points.push((a, None));
    }
    run_suite("closed-forms", points, |(a, p)| match p {
        Some(p) => {
            let closed = sym_capacity(n, *a, *p)?;
            let corner = outer_region(&symmetric_params(n, *a)?, *p, *p)?.symmetric_corner()?;
            Ok((closed != corner).then(|| format!("alpha={a} p={p}: closed form {closed}, region corner {corner}")))
        }
        None => {
            let ps = p_star(*a)?;
            if ps > frac(1, 2) || ps < Rational::zero() {
                return Ok(Some(format!("alpha={a}: p* = {ps} outside [0, 1/2]")));
            }
            Ok(None)
        }
    })
}
