//! Exact rational rate regions.
//!
//! A [`RateRegion`] is a list of `≤` constraints over named rate variables,
//! all of which are implicitly nonnegative. Everything here is exact: the
//! redundancy certificate, Fourier-Motzkin projection and region equality all
//! run on rationals through the small simplex in [`crate::lp`].

mod bounds;

pub use bounds::*;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::rational::{self, Rational};

/// `coeffs · x <= bound`, with `coeffs` aligned to the owning region's
/// variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, bound: Rational) -> Self {
        LinearConstraint { coeffs, bound }
    }

    /// All coefficients zero: the constraint reads `0 <= bound`.
    pub fn is_degenerate(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        self.lhs(x) <= self.bound
    }

    /// Positive rescaling to coprime integer coefficients; the bound stays
    /// rational.
    pub fn normalized(&self) -> LinearConstraint {
        let denom = rational::common_denominator(&self.coeffs);
        let g = self.coeffs.iter().map(|x| (x * denom).to_integer()).fold(0i128, |acc, v| acc.gcd(&v));
        if g == 0 {
            return self.clone();
        }
        let scale = Rational::new(denom, g);
        LinearConstraint { coeffs: self.coeffs.iter().map(|c| c * scale).collect(), bound: self.bound * scale }
    }

    fn sort_key(&self) -> (Rational, Vec<Rational>, Rational) {
        let weight = self.coeffs.iter().map(|c| c.abs()).sum();
        let neg: Vec<Rational> = self.coeffs.iter().map(|c| -c).collect();
        (weight, neg, self.bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateRegion {
    variables: Vec<String>,
    constraints: Vec<LinearConstraint>,
}

/// Outcome of comparing two regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionComparison {
    Equal,
    /// `witness` lies in the first region but not the second when
    /// `in_first` is true, and the other way round otherwise. Coordinates
    /// follow the first region's variable order.
    Different {
        witness: Vec<Rational>,
        in_first: bool,
    },
}

impl RegionComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, RegionComparison::Equal)
    }
}

impl RateRegion {
    pub fn new(variables: Vec<String>, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let n = variables.len();
        if let Some(c) = constraints.iter().find(|c| c.coeffs.len() != n) {
            return Err(Error::dim("RateRegion::new", n, c.coeffs.len()));
        }
        let mut seen = variables.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::param("duplicate variable name"));
        }
        Ok(RateRegion { variables, constraints })
    }

    /// Region with no constraints besides nonnegativity.
    pub fn unconstrained<S: AsRef<str>>(variables: &[S]) -> Self {
        RateRegion { variables: variables.iter().map(|v| v.as_ref().to_string()).collect(), constraints: Vec::new() }
    }

    /// Adds `Σ coeff·var <= bound`; variables not listed get coefficient 0.
    pub fn push(&mut self, terms: &[(&str, Rational)], bound: Rational) -> Result<()> {
        let mut coeffs = vec![Rational::zero(); self.variables.len()];
        for (name, c) in terms {
            let i = self.index_of(name)?;
            coeffs[i] += c;
        }
        self.constraints.push(LinearConstraint { coeffs, bound });
        Ok(())
    }

    pub fn with(mut self, terms: &[(&str, Rational)], bound: Rational) -> Result<Self> {
        self.push(terms, bound)?;
        Ok(self)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables.iter().position(|v| v == name).ok_or_else(|| Error::param(format!("unknown variable {name:?}")))
    }

    /// Coefficient of `name` in constraint `i`.
    pub fn coeff(&self, i: usize, name: &str) -> Result<Rational> {
        Ok(self.constraints[i].coeffs[self.index_of(name)?])
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim() && x.iter().all(|v| !v.is_negative()) && self.constraints.iter().all(|c| c.holds(x))
    }

    fn system(cons: &[LinearConstraint]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        (cons.iter().map(|c| c.coeffs.clone()).collect(), cons.iter().map(|c| c.bound).collect())
    }

    pub fn is_empty(&self) -> bool {
        let (a, b) = Self::system(&self.constraints);
        !lp::feasible(&a, &b, self.dim())
    }

    /// `max objective·x` over the region.
    pub fn maximize(&self, objective: &[Rational]) -> LpOutcome {
        let (a, b) = Self::system(&self.constraints);
        lp::maximize(objective, &a, &b)
    }

    /// Whether `target` is implied by `others` plus nonnegativity. The LP is
    /// capped at `bound + 1` so it never goes unbounded.
    fn implied_by(target: &LinearConstraint, others: &[LinearConstraint]) -> bool {
        implied_witness(target, others).is_none()
    }

    /// Whether constraint `i` is implied by the remaining ones.
    pub fn is_redundant(&self, i: usize) -> bool {
        let others: Vec<LinearConstraint> = self.constraints.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.clone()).collect();
        Self::implied_by(&self.constraints[i], &others)
    }

    /// Whether `c` (over this region's variables) holds on the whole region.
    pub fn implies(&self, c: &LinearConstraint) -> bool {
        Self::implied_by(c, &self.constraints)
    }

    fn empty_like(&self) -> RateRegion {
        RateRegion {
            variables: self.variables.clone(),
            constraints: vec![LinearConstraint::new(vec![Rational::zero(); self.dim()], -Rational::one())],
        }
    }

    /// Irredundant, normalised, deterministically ordered equivalent system.
    ///
    /// Constraints are dropped one at a time, each only if it is implied by
    /// all constraints still kept, so the feasible set never changes. An
    /// empty region canonicalises to the single constraint `0 <= -1`.
    pub fn canonicalize(&self) -> RateRegion {
        let mut cons: Vec<LinearConstraint> = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            if c.is_degenerate() {
                if c.bound.is_negative() {
                    return self.empty_like();
                }
                continue;
            }
            cons.push(c.normalized());
        }
        let (a, b) = Self::system(&cons);
        if !lp::feasible(&a, &b, self.dim()) {
            return self.empty_like();
        }
        cons.sort_by_key(|x| x.sort_key());
        cons.dedup();
        // Looser bounds first, so that ties keep the tightest statement.
        let mut order: Vec<usize> = (0..cons.len()).collect();
        order.sort_by(|&i, &j| cons[j].bound.cmp(&cons[i].bound).then(i.cmp(&j)));
        let mut keep = vec![true; cons.len()];
        for &i in &order {
            let others: Vec<LinearConstraint> =
                cons.iter().enumerate().filter(|(j, _)| *j != i && keep[*j]).map(|(_, c)| c.clone()).collect();
            if Self::implied_by(&cons[i], &others) {
                keep[i] = false;
            }
        }
        let constraints = cons.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
        RateRegion { variables: self.variables.clone(), constraints }
    }

    /// Fourier-Motzkin projection eliminating `var`; canonicalised.
    pub fn eliminate(&self, var: &str) -> Result<RateRegion> {
        let k = self.index_of(var)?;
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut rest = Vec::new();
        for c in &self.constraints {
            match c.coeffs[k].cmp(&Rational::zero()) {
                Ordering::Greater => upper.push(c.clone()),
                Ordering::Less => lower.push(c.clone()),
                Ordering::Equal => rest.push(c.clone()),
            }
        }
        let mut nonneg = vec![Rational::zero(); self.dim()];
        nonneg[k] = -Rational::one();
        lower.push(LinearConstraint::new(nonneg, Rational::zero()));

        let drop_k = |v: &[Rational]| -> Vec<Rational> { v.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| *x).collect() };
        let mut out: Vec<LinearConstraint> = rest.iter().map(|c| LinearConstraint::new(drop_k(&c.coeffs), c.bound)).collect();
        for u in &upper {
            for l in &lower {
                let au = u.coeffs[k];
                let al = -l.coeffs[k];
                let coeffs: Vec<Rational> = u.coeffs.iter().zip(&l.coeffs).map(|(x, y)| x * al + y * au).collect();
                out.push(LinearConstraint::new(drop_k(&coeffs), u.bound * al + l.bound * au));
            }
        }
        let variables = self.variables.iter().filter(|v| *v != var).cloned().collect();
        Ok(RateRegion { variables, constraints: out }.canonicalize())
    }

    /// Eliminates the listed variables in order.
    pub fn eliminate_all<S: AsRef<str>>(&self, vars: &[S]) -> Result<RateRegion> {
        vars.iter().try_fold(self.clone(), |r, v| r.eliminate(v.as_ref()))
    }

    /// Copy of this region with variables in the order given.
    pub fn reordered<S: AsRef<str>>(&self, order: &[S]) -> Result<RateRegion> {
        if order.len() != self.dim() {
            return Err(Error::param("variable sets differ"));
        }
        let idx: Vec<usize> = order.iter().map(|v| self.index_of(v.as_ref())).collect::<Result<_>>()?;
        Ok(RateRegion {
            variables: order.iter().map(|v| v.as_ref().to_string()).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| LinearConstraint::new(idx.iter().map(|&i| c.coeffs[i]).collect(), c.bound))
                .collect(),
        })
    }

    /// A point of `self` outside `other`, if any.
    pub fn point_outside(&self, other: &RateRegion) -> Result<Option<Vec<Rational>>> {
        let other = other.reordered(&self.variables)?;
        if self.is_empty() {
            return Ok(None);
        }
        for c in &other.constraints {
            if let Some(w) = implied_witness(c, &self.constraints) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    pub fn is_subset_of(&self, other: &RateRegion) -> Result<bool> {
        Ok(self.point_outside(other)?.is_none())
    }

    /// Exact set equality, with a witness from the symmetric difference.
    pub fn compare(&self, other: &RateRegion) -> Result<RegionComparison> {
        if let Some(w) = self.point_outside(other)? {
            return Ok(RegionComparison::Different { witness: w, in_first: true });
        }
        let reordered = other.reordered(&self.variables)?;
        if let Some(w) = reordered.point_outside(self)? {
            return Ok(RegionComparison::Different { witness: w, in_first: false });
        }
        Ok(RegionComparison::Equal)
    }

    /// Vertices of a bounded 2-variable region, counterclockwise, starting
    /// from the lexicographically smallest point.
    pub fn vertices(&self) -> Result<Vec<[Rational; 2]>> {
        if self.dim() != 2 {
            return Err(Error::param(format!("vertex enumeration needs 2 variables, got {}", self.dim())));
        }
        if self.is_empty() {
            return Ok(Vec::new());
        }
        for obj in [[Rational::one(), Rational::zero()], [Rational::zero(), Rational::one()]] {
            if self.maximize(&obj) == LpOutcome::Unbounded {
                return Err(Error::Unbounded);
            }
        }
        let mut lines: Vec<(&[Rational], Rational)> =
            self.constraints.iter().filter(|c| !c.is_degenerate()).map(|c| (c.coeffs.as_slice(), c.bound)).collect();
        let axis_x = [-Rational::one(), Rational::zero()];
        let axis_y = [Rational::zero(), -Rational::one()];
        lines.push((&axis_x, Rational::zero()));
        lines.push((&axis_y, Rational::zero()));

        let mut pts: Vec<[Rational; 2]> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a, b) = (lines[i], lines[j]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.is_zero() {
                    continue;
                }
                let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
                let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
                let p = [x, y];
                if self.contains(&p) && !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        Ok(order_ccw(pts))
    }

    /// Largest `t` with `(t, t)` in a 2-variable region.
    pub fn symmetric_corner(&self) -> Result<Rational> {
        if self.dim() != 2 {
            return Err(Error::param("symmetric corner needs 2 variables"));
        }
        let one = Rational::one();
        let mut diag = self.clone();
        diag.constraints.push(LinearConstraint::new(vec![one, -one], Rational::zero()));
        diag.constraints.push(LinearConstraint::new(vec![-one, one], Rational::zero()));
        match diag.maximize(&[one, Rational::zero()]) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Unbounded => Err(Error::Unbounded),
            LpOutcome::Infeasible => Err(Error::param("empty region has no symmetric corner")),
        }
    }

    /// Two-variable region that is only the origin.
    pub fn origin<S: AsRef<str>>(variables: &[S]) -> RateRegion {
        let mut r = RateRegion::unconstrained(variables);
        for i in 0..r.dim() {
            let mut coeffs = vec![Rational::zero(); r.dim()];
            coeffs[i] = Rational::one();
            r.constraints.push(LinearConstraint::new(coeffs, Rational::zero()));
        }
        r
    }

    pub fn to_json(&self) -> RegionJson {
        let constraints = self
            .constraints
            .iter()
            .map(|c| ConstraintJson {
                coeffs: self
                    .variables
                    .iter()
                    .zip(&c.coeffs)
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(v, a)| (v.clone(), rational::format(a)))
                    .collect(),
                bound: rational::format(&c.bound),
            })
            .collect();
        let vertices = if self.dim() == 2 {
            self.vertices().ok().map(|vs| vs.iter().map(|p| [rational::format(&p[0]), rational::format(&p[1])]).collect())
        } else {
            None
        };
        RegionJson { variables: self.variables.clone(), constraints, vertices }
    }

    pub fn from_json(json: &RegionJson) -> Result<RateRegion> {
        let mut r = RateRegion::new(json.variables.clone(), Vec::new())?;
        for c in &json.constraints {
            let terms: Vec<(String, Rational)> =
                c.coeffs.iter().map(|(k, v)| Ok((k.clone(), rational::parse(v)?))).collect::<Result<_>>()?;
            let refs: Vec<(&str, Rational)> = terms.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            r.push(&refs, rational::parse(&c.bound)?)?;
        }
        Ok(r)
    }

    /// Human-readable constraint lines such as `R1 + 2 R2 <= 7/2`.
    pub fn describe(&self) -> Vec<String> {
        self.constraints
            .iter()
            .map(|c| {
                let mut s = String::new();
                for (v, a) in self.variables.iter().zip(&c.coeffs) {
                    if a.is_zero() {
                        continue;
                    }
                    let mag = a.abs();
                    if s.is_empty() {
                        if a.is_negative() {
                            s.push('-');
                        }
                    } else {
                        s.push_str(if a.is_negative() { " - " } else { " + " });
                    }
                    if !mag.is_one() {
                        s.push_str(&format!("{mag} "));
                    }
                    s.push_str(v);
                }
                if s.is_empty() {
                    s.push('0');
                }
                format!("{s} <= {}", c.bound)
            })
            .collect()
    }
}

fn implied_witness(target: &LinearConstraint, others: &[LinearConstraint]) -> Option<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = others.iter().map(|c| c.coeffs.clone()).collect();
    let mut b: Vec<Rational> = others.iter().map(|c| c.bound).collect();
    a.push(target.coeffs.clone());
    b.push(target.bound + Rational::one());
    match lp::maximize(&target.coeffs, &a, &b) {
        LpOutcome::Optimal { value, point } if value > target.bound => Some(point),
        LpOutcome::Optimal { .. } | LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("objective is capped by its own constraint"),
    }
}

fn order_ccw(mut pts: Vec<[Rational; 2]>) -> Vec<[Rational; 2]> {
    if pts.len() < 2 {
        return pts;
    }
    let n = Rational::from_integer(pts.len() as i128);
    let cx = pts.iter().map(|p| p[0]).sum::<Rational>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<Rational>() / n;
    let half = |p: &[Rational; 2]| {
        let (dx, dy) = (p[0] - cx, p[1] - cy);
        dy.is_negative() || (dy.is_zero() && dx.is_negative())
    };
    pts.sort_by(|a, b| {
        let (ha, hb) = (half(a), half(b));
        if ha != hb {
            return ha.cmp(&hb);
        }
        let cross = (a[0] - cx) * (b[1] - cy) - (a[1] - cy) * (b[0] - cx);
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    let start = (0..pts.len()).min_by(|&i, &j| pts[i].cmp(&pts[j])).unwrap_or(0);
    pts.rotate_left(start);
    pts
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub coeffs: BTreeMap<String, String>,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionJson {
    pub variables: Vec<String>,
    pub constraints: Vec<ConstraintJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[String; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r12() -> RateRegion {
        RateRegion::unconstrained(&["R1", "R2"])
    }

    fn pt(x: Rational, y: Rational) -> [Rational; 2] {
        [x, y]
    }

    #[test]
    fn square_vertices() {
        let sq = r12().with(&[("R1", int(1))], int(1)).unwrap().with(&[("R2", int(1))], int(1)).unwrap();
        assert_eq!(sq.vertices().unwrap(), vec![pt(int(0), int(0)), pt(int(1), int(0)), pt(int(1), int(1)), pt(int(0), int(1))]);
    }

    #[test]
    fn pentagon_vertices() {
        let p = r12()
            .with(&[("R1", int(1))], int(2))
            .unwrap()
            .with(&[("R2", int(1))], int(2))
            .unwrap()
            .with(&[("R1", int(1)), ("R2", int(1))], int(3))
            .unwrap();
        let v = p.vertices().unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.contains(&pt(int(2), int(1))) && v.contains(&pt(int(1), int(2))));
        assert_eq!(v[0], pt(int(0), int(0)));
        assert_eq!(v[1], pt(int(2), int(0)));
    }

    #[test]
    fn vertices_of_unbounded_and_degenerate() {
        let half = r12().with(&[("R1", int(1))], int(1)).unwrap();
        assert!(matches!(half.vertices(), Err(Error::Unbounded)));
        let origin = RateRegion::origin(&["R1", "R2"]);
        assert_eq!(origin.vertices().unwrap(), vec![pt(int(0), int(0))]);
        let segment = r12().with(&[("R1", int(1))], int(2)).unwrap().with(&[("R2", int(1))], int(0)).unwrap();
        assert_eq!(segment.vertices().unwrap().len(), 2);
    }

    #[test]
    fn fm_spec_example() {
        // {x <= 3, y - x <= 0} over (x, y): eliminating x leaves y <= 3.
        let r = RateRegion::unconstrained(&["x", "y"])
            .with(&[("x", int(1))], int(3))
            .unwrap()
            .with(&[("x", int(-1))], int(0))
            .unwrap()
            .with(&[("y", int(1)), ("x", int(-1))], int(0))
            .unwrap();
        let p = r.eliminate("x").unwrap();
        assert_eq!(p.variables(), ["y"]);
        assert_eq!(p.constraints(), &[LinearConstraint::new(vec![int(1)], int(3))]);
    }

    #[test]
    fn fm_on_unmentioned_variable_keeps_constraints() {
        let r = RateRegion::unconstrained(&["x", "y", "z"])
            .with(&[("x", int(1)), ("y", int(2))], int(4))
            .unwrap()
            .with(&[("y", int(1))], int(1))
            .unwrap();
        let p = r.eliminate("z").unwrap();
        let expected = RateRegion::unconstrained(&["x", "y"])
            .with(&[("x", int(1)), ("y", int(2))], int(4))
            .unwrap()
            .with(&[("y", int(1))], int(1))
            .unwrap();
        assert!(p.compare(&expected).unwrap().is_equal());
        assert_eq!(p.constraints().len(), 2);
    }

    #[test]
    fn canonical_form_drops_redundant_and_normalises() {
        let r = r12()
            .with(&[("R1", int(2))], int(6))
            .unwrap()
            .with(&[("R1", int(1))], int(3))
            .unwrap()
            .with(&[("R1", int(1)), ("R2", int(1))], int(10))
            .unwrap()
            .with(&[("R2", int(1))], int(3))
            .unwrap()
            .with(&[("R1", int(-1))], int(0))
            .unwrap();
        let c = r.canonicalize();
        assert_eq!(c.describe(), vec!["R1 <= 3", "R2 <= 3"]);
        for i in 0..c.constraints().len() {
            assert!(!c.is_redundant(i));
        }
        assert!(c.compare(&r).unwrap().is_equal());
    }

    #[test]
    fn canonical_empty_region() {
        let r = r12().with(&[("R1", int(-1))], int(-1)).unwrap().with(&[("R1", int(1))], frac(1, 2)).unwrap();
        let c = r.canonicalize();
        assert!(c.is_empty());
        assert_eq!(c.constraints().len(), 1);
        assert!(c.constraints()[0].is_degenerate());
        assert!(c.is_subset_of(&RateRegion::origin(&["R1", "R2"])).unwrap());
    }

    #[test]
    fn comparison_of_permuted_and_tightened() {
        let a = r12()
            .with(&[("R1", int(1))], int(3))
            .unwrap()
            .with(&[("R2", int(1))], int(3))
            .unwrap()
            .with(&[("R1", int(1)), ("R2", int(1))], int(4))
            .unwrap();
        let permuted = a.reordered(&["R2", "R1"]).unwrap();
        assert!(a.compare(&permuted).unwrap().is_equal());

        let tightened = r12()
            .with(&[("R1", int(1))], int(3))
            .unwrap()
            .with(&[("R2", int(1))], int(3))
            .unwrap()
            .with(&[("R1", int(1)), ("R2", int(1))], int(4) - frac(1, 7))
            .unwrap();
        match a.compare(&tightened).unwrap() {
            RegionComparison::Different { witness, in_first } => {
                assert!(in_first);
                assert!(a.contains(&witness) && !tightened.contains(&witness));
                assert_eq!(witness[0] + witness[1], int(4));
            }
            RegionComparison::Equal => panic!("regions differ"),
        }
        match tightened.compare(&a).unwrap() {
            RegionComparison::Different { witness, in_first } => {
                assert!(!in_first);
                assert!(a.contains(&witness) && !tightened.contains(&witness));
            }
            RegionComparison::Equal => panic!("regions differ"),
        }
        assert!(a.compare(&RateRegion::unconstrained(&["R1", "R3"])).is_err());
    }

    #[test]
    fn symmetric_corner_of_pentagon() {
        let p = r12().with(&[("R1", int(1))], int(2)).unwrap().with(&[("R1", int(1)), ("R2", int(1))], int(3)).unwrap();
        assert_eq!(p.symmetric_corner().unwrap(), frac(3, 2));
    }

    #[test]
    fn json_round_trip() {
        let p = r12()
            .with(&[("R1", int(1))], int(2))
            .unwrap()
            .with(&[("R1", int(2)), ("R2", int(1))], frac(7, 2))
            .unwrap()
            .with(&[("R2", int(1))], int(3))
            .unwrap();
        let json = p.to_json();
        assert_eq!(json.constraints[1].coeffs["R1"], "2");
        assert_eq!(json.constraints[1].bound, "7/2");
        assert!(json.vertices.is_some());
        let text = serde_json::to_string(&json).unwrap();
        let back = RateRegion::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    /// Exact fiber feasibility for two remaining unknowns: a nonempty
    /// polyhedron inside the nonnegative quadrant has a vertex, which is the
    /// intersection of two tight lines.
    fn fiber_feasible_2d(a: &[[Rational; 2]], b: &[Rational]) -> bool {
        let mut lines: Vec<([Rational; 2], Rational)> = a.iter().cloned().zip(b.iter().cloned()).collect();
        lines.push(([int(-1), int(0)], int(0)));
        lines.push(([int(0), int(-1)], int(0)));
        let ok = |x: Rational, y: Rational| x >= int(0) && y >= int(0) && a.iter().zip(b).all(|(r, bi)| r[0] * x + r[1] * y <= *bi);
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (p, q) = (&lines[i], &lines[j]);
                let det = p.0[0] * q.0[1] - p.0[1] * q.0[0];
                if det.is_zero() {
                    continue;
                }
                let x = (p.1 * q.0[1] - p.0[1] * q.1) / det;
                let y = (p.0[0] * q.1 - p.1 * q.0[0]) / det;
                if ok(x, y) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn projection_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let names = ["a", "b", "c", "d"];
        for _ in 0..60 {
            let mut r = RateRegion::unconstrained(&names);
            for _ in 0..rng.gen_range(3..7) {
                let terms: Vec<(&str, Rational)> = names.iter().map(|n| (*n, int(rng.gen_range(-2..3)))).collect();
                r.push(&terms, int(rng.gen_range(0..5))).unwrap();
            }
            // Keep every variable bounded so the quadrant polyhedron is pointed and small.
            for n in names {
                r.push(&[(n, int(1))], int(3)).unwrap();
            }
            let proj = r.eliminate_all(&["c", "d"]).unwrap();
            // Grid over (a, b) with denominators up to 4 in [0, 3].
            for da in 0..=12 {
                for db in 0..=12 {
                    let (x, y) = (frac(da, 4), frac(db, 4));
                    let mut rows = Vec::new();
                    let mut rhs = Vec::new();
                    for c in r.constraints() {
                        rows.push([c.coeffs[2], c.coeffs[3]]);
                        rhs.push(c.bound - c.coeffs[0] * x - c.coeffs[1] * y);
                    }
                    let oracle = fiber_feasible_2d(&rows, &rhs);
                    assert_eq!(proj.contains(&[x, y]), oracle, "point ({x}, {y}) on {:?}", r.describe());
                }
            }
        }
    }

    #[test]
    fn canonicalize_preserves_set_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..200 {
            let mut r = RateRegion::unconstrained(&["x", "y", "z"]);
            for _ in 0..rng.gen_range(1..8) {
                let terms = [
                    ("x", frac(rng.gen_range(-2..4), rng.gen_range(1..3))),
                    ("y", int(rng.gen_range(-2..4))),
                    ("z", int(rng.gen_range(-1..3))),
                ];
                r.push(&terms, frac(rng.gen_range(-1..7), rng.gen_range(1..3))).unwrap();
            }
            let c = r.canonicalize();
            assert!(c.compare(&r).unwrap().is_equal());
            if !c.is_empty() {
                for i in 0..c.constraints().len() {
                    assert!(!c.is_redundant(i));
                }
            }
            assert_eq!(c.canonicalize(), c);
        }
    }
}
