//! Closed-form bounds of the intermittent-feedback interference channel: the
//! outer region, the scheme constants and their projected inner region, and
//! the symmetric-capacity formulas.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{LinearConstraint, RateRegion};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::rational::{self, int, pos, Rational};

pub const RATE_VARS: [&str; 2] = ["R1", "R2"];
pub const SPLIT_VARS: [&str; 6] = ["R1", "R2", "R1p", "R1c", "R2p", "R2c"];
/// Order in which the split rates are projected away.
pub const ELIMINATION_ORDER: [&str; 4] = ["R1p", "R2p", "R1c", "R2c"];

fn r(n: usize) -> Rational {
    int(n as i64)
}

fn check_prob(p: Rational, name: &str) -> Result<()> {
    if p < Rational::zero() || p > Rational::one() {
        return Err(Error::param(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// The six families of the outer bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterFamily {
    /// `R1 <= min{max(n11,n12), n11 + p2 (n21-n11)^+}`
    Single1,
    Single2,
    /// Perfect-feedback sum-rate bound.
    Sum,
    /// Sum-rate bound that depends on both feedback probabilities.
    FeedbackSum,
    /// `2 R1 + R2`
    Weighted1,
    /// `R1 + 2 R2`
    Weighted2,
}

impl OuterFamily {
    pub const ALL: [OuterFamily; 6] = [
        OuterFamily::Single1,
        OuterFamily::Single2,
        OuterFamily::Sum,
        OuterFamily::FeedbackSum,
        OuterFamily::Weighted1,
        OuterFamily::Weighted2,
    ];

    /// Families that make up the perfect-feedback capacity region.
    pub fn is_perfect_feedback(self) -> bool {
        matches!(self, OuterFamily::Single1 | OuterFamily::Single2 | OuterFamily::Sum)
    }
}

/// Outer-bound constraints over `(R1, R2)`, one per family, uncanonicalised.
pub fn outer_constraints(params: &ChannelParams, p1: Rational, p2: Rational) -> Result<Vec<(OuterFamily, LinearConstraint)>> {
    check_prob(p1, "p1")?;
    check_prob(p2, "p2")?;
    let (n11, n12, n21, n22) = (r(params.n11), r(params.n12), r(params.n21), r(params.n22));
    let d1 = pos(n11 - n21);
    let d2 = pos(n22 - n12);
    let c = |a: i64, b: i64| vec![int(a), int(b)];
    let single1 = n11.max(n12).min(n11 + p2 * pos(n21 - n11));
    let single2 = n22.max(n21).min(n22 + p1 * pos(n12 - n22));
    let sum = (n11.max(n12) + d2).min(n22.max(n21) + d1);
    let fb_sum = n12.max(d1) + n21.max(d2) + p1 * n12.min(d1) + p2 * n21.min(d2);
    let w1 = n11.max(n12) + n21.max(d2) + d1 + p2 * n21.min(d2);
    let w2 = n22.max(n21) + n12.max(d1) + d2 + p1 * n12.min(d1);
    Ok(vec![
        (OuterFamily::Single1, LinearConstraint::new(c(1, 0), single1)),
        (OuterFamily::Single2, LinearConstraint::new(c(0, 1), single2)),
        (OuterFamily::Sum, LinearConstraint::new(c(1, 1), sum)),
        (OuterFamily::FeedbackSum, LinearConstraint::new(c(1, 1), fb_sum)),
        (OuterFamily::Weighted1, LinearConstraint::new(c(2, 1), w1)),
        (OuterFamily::Weighted2, LinearConstraint::new(c(1, 2), w2)),
    ])
}

/// Region cut out by the selected outer families; canonicalised.
pub fn outer_region_from(params: &ChannelParams, p1: Rational, p2: Rational, families: &[OuterFamily]) -> Result<RateRegion> {
    let cons = outer_constraints(params, p1, p2)?.into_iter().filter(|(f, _)| families.contains(f)).map(|(_, c)| c).collect();
    Ok(RateRegion::new(RATE_VARS.iter().map(|s| s.to_string()).collect(), cons)?.canonicalize())
}

/// The capacity outer bound over `(R1, R2)`, canonicalised.
pub fn outer_region(params: &ChannelParams, p1: Rational, p2: Rational) -> Result<RateRegion> {
    outer_region_from(params, p1, p2, &OuterFamily::ALL)
}

/// The perfect-feedback region.
pub fn perfect_feedback_region(params: &ChannelParams) -> Result<RateRegion> {
    let fams: Vec<OuterFamily> = OuterFamily::ALL.into_iter().filter(|f| f.is_perfect_feedback()).collect();
    outer_region_from(params, Rational::one(), Rational::one(), &fams)
}

/// For each family outside the perfect-feedback set, whether it is implied by
/// the perfect-feedback families at the given probabilities.
pub fn feedback_families_redundant(params: &ChannelParams, p1: Rational, p2: Rational) -> Result<Vec<(OuterFamily, bool)>> {
    let all = outer_constraints(params, p1, p2)?;
    let base: Vec<LinearConstraint> = all.iter().filter(|(f, _)| f.is_perfect_feedback()).map(|(_, c)| c.clone()).collect();
    let base = RateRegion::new(RATE_VARS.iter().map(|s| s.to_string()).collect(), base)?;
    Ok(all.into_iter().filter(|(f, _)| !f.is_perfect_feedback()).map(|(f, c)| (f, base.implies(&c))).collect())
}

/// Constants of the achievable split-rate region. `p1c`/`p2c` are the
/// private-level counts, named apart from the feedback probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SchemeConstants {
    #[serde(with = "rational::serde_str")]
    pub p1c: Rational,
    #[serde(with = "rational::serde_str")]
    pub s1: Rational,
    #[serde(with = "rational::serde_str")]
    pub t1: Rational,
    #[serde(with = "rational::serde_str")]
    pub n1: Rational,
    #[serde(with = "rational::serde_str")]
    pub p2c: Rational,
    #[serde(with = "rational::serde_str")]
    pub s2: Rational,
    #[serde(with = "rational::serde_str")]
    pub t2: Rational,
    #[serde(with = "rational::serde_str")]
    pub n2: Rational,
}

impl SchemeConstants {
    pub fn is_zero(&self) -> bool {
        [self.p1c, self.s1, self.t1, self.n1, self.p2c, self.s2, self.t2, self.n2].iter().all(Zero::is_zero)
    }

    /// `t1 <= p1c + s2` and `t2 <= p2c + s1`.
    pub fn fact1(&self) -> (bool, bool) {
        (self.t1 <= self.p1c + self.s2, self.t2 <= self.p2c + self.s1)
    }
}

pub fn scheme_constants(params: &ChannelParams, p1: Rational, p2: Rational) -> Result<SchemeConstants> {
    check_prob(p1, "p1")?;
    check_prob(p2, "p2")?;
    let (n11, n12, n21, n22) = (r(params.n11), r(params.n12), r(params.n21), r(params.n22));
    let p1c = pos(n11 - n21);
    let p2c = pos(n22 - n12);
    Ok(SchemeConstants {
        p1c,
        s1: p1c.max(n12) + p1 * p1c.min(n12),
        t1: n11 + p2 * pos(n21 - n11),
        n1: n11.max(n12),
        p2c,
        s2: p2c.max(n21) + p2 * p2c.min(n21),
        t2: n22 + p1 * pos(n12 - n22),
        n2: n22.max(n21),
    })
}

/// Split-rate system over `R1, R2, R1p, R1c, R2p, R2c` with `Ri = Rip + Ric`.
pub fn inner_system(k: &SchemeConstants) -> RateRegion {
    let one = Rational::one();
    let m = -one;
    let mut reg = RateRegion::unconstrained(&SPLIT_VARS);
    let rows: [(&[(&str, Rational)], Rational); 12] = [
        (&[("R1", one), ("R1p", m), ("R1c", m)], Rational::zero()),
        (&[("R1", m), ("R1p", one), ("R1c", one)], Rational::zero()),
        (&[("R2", one), ("R2p", m), ("R2c", m)], Rational::zero()),
        (&[("R2", m), ("R2p", one), ("R2c", one)], Rational::zero()),
        (&[("R1p", one)], k.p1c),
        (&[("R2c", one), ("R1p", one)], k.s1),
        (&[("R1", one)], k.t1),
        (&[("R2c", one), ("R1", one)], k.n1),
        (&[("R2p", one)], k.p2c),
        (&[("R1c", one), ("R2p", one)], k.s2),
        (&[("R2", one)], k.t2),
        (&[("R1c", one), ("R2", one)], k.n2),
    ];
    for (terms, bound) in rows {
        reg.push(terms, bound).expect("split variables are fixed");
    }
    reg
}

/// Projection of [`inner_system`] onto `(R1, R2)`.
pub fn inner_region(k: &SchemeConstants) -> Result<RateRegion> {
    if k.is_zero() {
        return Ok(RateRegion::origin(&RATE_VARS));
    }
    inner_system(k).eliminate_all(&ELIMINATION_ORDER)
}

/// The projected inner region written directly as six lines; canonicalised.
pub fn inner_closed_form(k: &SchemeConstants) -> RateRegion {
    let c = |a: i64, b: i64| vec![int(a), int(b)];
    let cons = vec![
        LinearConstraint::new(c(1, 0), k.t1.min(k.n1).min(k.p1c + k.s2)),
        LinearConstraint::new(c(0, 1), k.t2.min(k.n2).min(k.p2c + k.s1)),
        LinearConstraint::new(c(1, 1), (k.p1c + k.n2).min(k.p2c + k.n1)),
        LinearConstraint::new(c(1, 1), k.s1 + k.s2),
        LinearConstraint::new(c(2, 1), k.p1c + k.n1 + k.s2),
        LinearConstraint::new(c(1, 2), k.p2c + k.n2 + k.s1),
    ];
    RateRegion::new(RATE_VARS.iter().map(|s| s.to_string()).collect(), cons).expect("two rate variables").canonicalize()
}

/// Endpoint form of `t1 <= p1c + s2` at `p2 = 0` and `p2 = 1`, with the
/// mirrored pair for user 2. Each entry is (closed forms agree, inequality holds).
pub fn fact1_endpoints(params: &ChannelParams) -> Result<[(bool, bool); 4]> {
    let (n11, n12, n21, n22) = (r(params.n11), r(params.n12), r(params.n21), r(params.n22));
    let d1 = pos(n11 - n21);
    let d2 = pos(n22 - n12);
    let mut out = [(false, false); 4];
    for (i, p) in [Rational::zero(), Rational::one()].into_iter().enumerate() {
        // User 1 varies with p2; user 2 with p1. The other probability is irrelevant.
        let k1 = scheme_constants(params, Rational::zero(), p)?;
        let k2 = scheme_constants(params, p, Rational::zero())?;
        let (t1, rhs1, t2, rhs2) = if p.is_zero() {
            (n11, (d2 + d1).max(n21).max(n11), n22, (d1 + d2).max(n12).max(n22))
        } else {
            (n11.max(n21), d1 + n21 + d2, n22.max(n12), d2 + n12 + d1)
        };
        out[i] = (k1.t1 == t1 && k1.p1c + k1.s2 == rhs1, t1 <= rhs1);
        out[2 + i] = (k2.t2 == t2 && k2.p2c + k2.s1 == rhs2, t2 <= rhs2);
    }
    Ok(out)
}

fn alpha_n(n: usize, alpha: Rational) -> Result<usize> {
    if alpha < Rational::zero() {
        return Err(Error::param(format!("alpha = {alpha} must be nonnegative")));
    }
    let cross = alpha * r(n);
    if !cross.is_integer() {
        return Err(Error::param(format!("alpha * n = {cross} is not an integer")));
    }
    usize::try_from(*cross.numer()).map_err(|_| Error::param("alpha * n out of range"))
}

/// Symmetric-setting parameters `(n, alpha n, alpha n, n)`.
pub fn symmetric_params(n: usize, alpha: Rational) -> Result<ChannelParams> {
    Ok(ChannelParams::symmetric(n, alpha_n(n, alpha)?))
}

/// Symmetric capacity `C_sym` (not normalised by `n`).
pub fn sym_capacity(n: usize, alpha: Rational, p: Rational) -> Result<Rational> {
    alpha_n(n, alpha)?;
    check_prob(p, "p")?;
    let one = Rational::one();
    let half = Rational::new(1, 2);
    let a = alpha;
    let per_level = if a <= half {
        (one - a / 2).min(one - (one - p) * a)
    } else if a <= one {
        (one - a / 2).min(p + (one - p) * a)
    } else {
        (a / 2).min((one - p) + p * a)
    };
    Ok(per_level * r(n))
}

/// Smallest symmetric feedback probability that reaches the perfect-feedback
/// symmetric capacity.
pub fn p_star(alpha: Rational) -> Result<Rational> {
    let one = Rational::one();
    let two = int(2);
    if alpha < Rational::zero() {
        return Err(Error::param(format!("alpha = {alpha} must be nonnegative")));
    }
    Ok(if alpha <= Rational::new(1, 2) {
        Rational::new(1, 2)
    } else if alpha < one {
        pos(two - int(3) * alpha) / (two - two * alpha)
    } else if alpha == one {
        Rational::zero()
    } else {
        pos(alpha - two) / (two * alpha - two)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn p(n11: usize, n12: usize, n21: usize, n22: usize) -> ChannelParams {
        ChannelParams::new(n11, n12, n21, n22)
    }

    #[test]
    fn outer_hand_example() {
        let reg = outer_region(&p(3, 2, 2, 3), frac(1, 2), frac(1, 2)).unwrap();
        assert_eq!(reg.describe(), vec!["R1 <= 3", "R2 <= 3", "R1 + R2 <= 4", "2 R1 + R2 <= 13/2", "R1 + 2 R2 <= 13/2"]);
        let cons = outer_constraints(&p(3, 2, 2, 3), frac(1, 2), frac(1, 2)).unwrap();
        assert_eq!(cons[3].1.bound, int(5));
        assert_eq!(reg.symmetric_corner().unwrap(), int(2));
    }

    #[test]
    fn outer_at_full_feedback_is_perfect_feedback_region() {
        for params in ChannelParams::grid(3) {
            let a = outer_region(&params, int(1), int(1)).unwrap();
            let b = perfect_feedback_region(&params).unwrap();
            assert!(a.compare(&b).unwrap().is_equal(), "{params:?}");
            assert!(feedback_families_redundant(&params, int(1), int(1)).unwrap().iter().all(|(_, r)| *r));
        }
    }

    #[test]
    fn strong_interference_example() {
        let reg = outer_region(&p(1, 3, 3, 1), frac(1, 4), frac(1, 4)).unwrap();
        assert_eq!(reg.symmetric_corner().unwrap(), frac(3, 2));
        assert_eq!(sym_capacity(1, int(3), frac(1, 4)).unwrap(), frac(3, 2));
        assert_eq!(p_star(int(3)).unwrap(), frac(1, 4));
    }

    #[test]
    fn constants_hand_values() {
        let k = scheme_constants(&p(2, 1, 1, 2), int(0), int(0)).unwrap();
        assert_eq!((k.p1c, k.s1, k.t1, k.n1), (int(1), int(1), int(2), int(2)));
        assert_eq!((k.p2c, k.s2, k.t2, k.n2), (int(1), int(1), int(2), int(2)));
        let k = scheme_constants(&p(3, 2, 2, 3), int(1), int(1)).unwrap();
        assert_eq!((k.s1, k.t1, k.n1), (int(3), int(3), int(3)));
        let k = scheme_constants(&p(2, 0, 2, 1), frac(1, 2), frac(1, 2)).unwrap();
        assert_eq!(k.p1c, int(0));
        assert!(scheme_constants(&p(1, 1, 1, 1), frac(3, 2), int(0)).is_err());
    }

    #[test]
    fn inner_small_example() {
        let k = scheme_constants(&p(2, 1, 1, 2), int(0), int(0)).unwrap();
        let inner = inner_region(&k).unwrap();
        assert_eq!(inner.symmetric_corner().unwrap(), int(1));
        assert!(inner.describe().contains(&"R1 + R2 <= 2".to_string()));
        let outer = outer_region(&p(2, 1, 1, 2), int(0), int(0)).unwrap();
        // Triangle with (1, 1) in the middle of the sum-rate edge.
        assert_eq!(outer.vertices().unwrap(), vec![[int(0), int(0)], [int(2), int(0)], [int(0), int(2)]]);
        assert_eq!(outer.symmetric_corner().unwrap(), int(1));
    }

    #[test]
    fn inner_matches_closed_form_and_outer() {
        let probs = [int(0), frac(1, 3), int(1)];
        for params in ChannelParams::grid(2) {
            for &p1 in &probs {
                for &p2 in &probs {
                    let k = scheme_constants(&params, p1, p2).unwrap();
                    let inner = inner_region(&k).unwrap();
                    assert!(inner.compare(&inner_closed_form(&k)).unwrap().is_equal(), "{params:?}");
                    assert!(inner.compare(&outer_region(&params, p1, p2).unwrap()).unwrap().is_equal(), "{params:?}");
                }
            }
        }
    }

    #[test]
    fn zero_private_levels_collapse_individual_bounds() {
        let k = scheme_constants(&p(2, 3, 2, 2), frac(1, 2), frac(1, 4)).unwrap();
        assert_eq!((k.p1c, k.p2c), (int(0), int(0)));
        let inner = inner_region(&k).unwrap();
        let max_r1 = inner.maximize(&[int(1), int(0)]).value().unwrap();
        assert_eq!(max_r1, k.t1.min(k.n1).min(k.s2));
    }

    #[test]
    fn degenerate_channel_is_origin() {
        let zero = p(0, 0, 0, 0);
        let k = scheme_constants(&zero, frac(1, 2), frac(1, 2)).unwrap();
        let inner = inner_region(&k).unwrap();
        assert_eq!(inner.vertices().unwrap(), vec![[int(0), int(0)]]);
        let outer = outer_region(&zero, frac(1, 2), frac(1, 2)).unwrap();
        assert!(inner.compare(&outer).unwrap().is_equal());
    }

    #[test]
    fn fact1_holds_and_endpoints_match() {
        for params in ChannelParams::grid(4) {
            for e in fact1_endpoints(&params).unwrap() {
                assert_eq!(e, (true, true), "{params:?}");
            }
            let k = scheme_constants(&params, frac(1, 4), frac(3, 4)).unwrap();
            assert_eq!(k.fact1(), (true, true));
        }
    }

    #[test]
    fn symmetric_capacity_examples() {
        assert_eq!(sym_capacity(2, frac(1, 2), int(0)).unwrap(), int(1));
        for pp in [int(0), frac(1, 3), int(1)] {
            assert_eq!(sym_capacity(2, int(1), pp).unwrap(), int(1));
        }
        assert_eq!(sym_capacity(2, int(3), frac(1, 2)).unwrap(), int(3));
        assert!(sym_capacity(3, frac(1, 2), int(0)).is_err());
    }

    #[test]
    fn p_star_examples() {
        assert_eq!(p_star(frac(1, 3)).unwrap(), frac(1, 2));
        assert_eq!(p_star(frac(2, 3)).unwrap(), int(0));
        assert_eq!(p_star(int(1)).unwrap(), int(0));
        assert_eq!(p_star(int(3)).unwrap(), frac(1, 4));
        for num in 0..=96 {
            assert!(p_star(frac(num, 24)).unwrap() <= frac(1, 2));
        }
    }

    #[test]
    fn p_star_is_the_symmetric_threshold() {
        // At p*, the feedback-limited term meets the perfect-feedback term.
        for num in 1..=36 {
            let a = frac(num, 12);
            let ps = p_star(a).unwrap();
            let full = sym_capacity(12, a, int(1)).unwrap();
            assert_eq!(sym_capacity(12, a, ps).unwrap(), full, "alpha {a}");
            if ps > int(0) {
                let below = ps - frac(1, 1000);
                assert!(sym_capacity(12, a, below).unwrap() < full, "alpha {a}");
            }
        }
    }
}
