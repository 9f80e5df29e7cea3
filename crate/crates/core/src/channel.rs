//! The two-user linear deterministic interference channel and its
//! intermittent, passive feedback links.

use std::path::Path;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{shift_channel_matrix, Gf2Matrix, Gf2Vector};
use crate::rational::{self, Rational};

/// Bit-level exponents of the four links; `n_ij` counts the levels from
/// transmitter `j` that reach receiver `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelParams {
    pub n11: usize,
    pub n12: usize,
    pub n21: usize,
    pub n22: usize,
}

impl ChannelParams {
    pub fn new(n11: usize, n12: usize, n21: usize, n22: usize) -> Self {
        ChannelParams { n11, n12, n21, n22 }
    }

    /// Symmetric channel: direct links `n`, cross links `cross`.
    pub fn symmetric(n: usize, cross: usize) -> Self {
        ChannelParams::new(n, cross, cross, n)
    }

    pub fn q(&self) -> usize {
        self.n11.max(self.n12).max(self.n21).max(self.n22)
    }

    pub fn is_degenerate(&self) -> bool {
        self.q() == 0
    }

    /// `n_ij` for 1-based user indices.
    pub fn n(&self, rx: usize, tx: usize) -> usize {
        match (rx, tx) {
            (1, 1) => self.n11,
            (1, 2) => self.n12,
            (2, 1) => self.n21,
            (2, 2) => self.n22,
            _ => panic!("user indices are 1 or 2, got ({rx},{tx})"),
        }
    }

    /// Exchanges the roles of the two users.
    pub fn swapped(&self) -> Self {
        ChannelParams::new(self.n22, self.n21, self.n12, self.n11)
    }

    /// `H_ij = S^(q - n_ij)`.
    pub fn transfer(&self, rx: usize, tx: usize) -> Gf2Matrix {
        shift_channel_matrix(self.q(), self.n(rx, tx)).expect("n_ij <= q by construction")
    }

    /// All tuples with every exponent in `0..=nmax`, in lexicographic order.
    pub fn grid(nmax: usize) -> Vec<ChannelParams> {
        let mut out = Vec::with_capacity((nmax + 1).pow(4));
        for n11 in 0..=nmax {
            for n12 in 0..=nmax {
                for n21 in 0..=nmax {
                    for n22 in 0..=nmax {
                        out.push(ChannelParams::new(n11, n12, n21, n22));
                    }
                }
            }
        }
        out
    }
}

/// Joint distribution of the feedback states `(S1, S2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeedbackDist {
    q00: Rational,
    q01: Rational,
    q10: Rational,
    q11: Rational,
}

impl FeedbackDist {
    pub fn new(q00: Rational, q01: Rational, q10: Rational, q11: Rational) -> Result<Self> {
        let all = [q00, q01, q10, q11];
        if all.iter().any(|q| q.is_negative()) {
            return Err(Error::param("state probabilities must be nonnegative"));
        }
        if all.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::param("state probabilities must sum to 1"));
        }
        Ok(FeedbackDist { q00, q01, q10, q11 })
    }

    /// Independent links with on-probabilities `p1`, `p2`.
    pub fn independent(p1: Rational, p2: Rational) -> Result<Self> {
        check_prob(p1)?;
        check_prob(p2)?;
        let one = Rational::one();
        FeedbackDist::new((one - p1) * (one - p2), (one - p1) * p2, p1 * (one - p2), p1 * p2)
    }

    /// Maximally correlated joint with the given marginals (`q11 = min(p1, p2)`).
    pub fn correlated(p1: Rational, p2: Rational) -> Result<Self> {
        check_prob(p1)?;
        check_prob(p2)?;
        Self::from_q11(p1, p2, p1.min(p2))
    }

    /// Maximally anti-correlated joint (`q11 = (p1 + p2 - 1)^+`).
    pub fn anticorrelated(p1: Rational, p2: Rational) -> Result<Self> {
        check_prob(p1)?;
        check_prob(p2)?;
        Self::from_q11(p1, p2, rational::pos(p1 + p2 - Rational::one()))
    }

    fn from_q11(p1: Rational, p2: Rational, q11: Rational) -> Result<Self> {
        let q10 = p1 - q11;
        let q01 = p2 - q11;
        FeedbackDist::new(Rational::one() - q10 - q01 - q11, q01, q10, q11)
    }

    /// Probability of the state pair `(s1, s2)`.
    pub fn prob(&self, s: StatePair) -> Rational {
        match (s.s1, s.s2) {
            (false, false) => self.q00,
            (false, true) => self.q01,
            (true, false) => self.q10,
            (true, true) => self.q11,
        }
    }

    pub fn q00(&self) -> Rational {
        self.q00
    }
    pub fn q01(&self) -> Rational {
        self.q01
    }
    pub fn q10(&self) -> Rational {
        self.q10
    }
    pub fn q11(&self) -> Rational {
        self.q11
    }

    /// `P(S1 = 1)`
    pub fn p1(&self) -> Rational {
        self.q10 + self.q11
    }

    /// `P(S2 = 1)`
    pub fn p2(&self) -> Rational {
        self.q01 + self.q11
    }

    /// Distribution seen with the users relabelled.
    pub fn swapped(&self) -> Self {
        FeedbackDist { q00: self.q00, q01: self.q10, q10: self.q01, q11: self.q11 }
    }

    /// The four state pairs with their probabilities.
    pub fn support(&self) -> [(StatePair, Rational); 4] {
        StatePair::ALL.map(|s| (s, self.prob(s)))
    }
}

fn check_prob(p: Rational) -> Result<()> {
    if p.is_negative() || p > Rational::one() {
        return Err(Error::param(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct StatePair {
    pub s1: bool,
    pub s2: bool,
}

impl StatePair {
    pub const ALL: [StatePair; 4] = [
        StatePair { s1: false, s2: false },
        StatePair { s1: false, s2: true },
        StatePair { s1: true, s2: false },
        StatePair { s1: true, s2: true },
    ];

    pub fn new(s1: bool, s2: bool) -> Self {
        StatePair { s1, s2 }
    }

    /// State of feedback link `user` (1 or 2).
    pub fn of(&self, user: usize) -> bool {
        match user {
            1 => self.s1,
            2 => self.s2,
            _ => panic!("user index is 1 or 2, got {user}"),
        }
    }
}

/// Feedback states organised by block and symbol.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateSeq {
    blocks: Vec<Vec<StatePair>>,
}

impl StateSeq {
    pub fn from_blocks(blocks: Vec<Vec<StatePair>>) -> Result<Self> {
        if let Some(first) = blocks.first() {
            if blocks.iter().any(|b| b.len() != first.len()) {
                return Err(Error::param("all state blocks must have the same length"));
            }
        }
        Ok(StateSeq { blocks })
    }

    /// Every symbol of every block in state `s`.
    pub fn constant(blocks: usize, len: usize, s: StatePair) -> Self {
        StateSeq { blocks: vec![vec![s; len]; blocks] }
    }

    pub fn sample<R: Rng + ?Sized>(dist: &FeedbackDist, blocks: usize, len: usize, rng: &mut R) -> Self {
        StateSeq { blocks: (0..blocks).map(|_| sample_states(dist, len, rng)).collect() }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_len(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    /// States of block `b` (0-based).
    pub fn block(&self, b: usize) -> &[StatePair] {
        &self.blocks[b]
    }
}

/// Draws `count` i.i.d. state pairs. Sampling is exact: one uniform integer
/// below the common denominator of the four probabilities per symbol.
pub fn sample_states<R: Rng + ?Sized>(dist: &FeedbackDist, count: usize, rng: &mut R) -> Vec<StatePair> {
    let support = dist.support();
    let denom = rational::common_denominator(support.iter().map(|(_, p)| p));
    let thresholds: Vec<(StatePair, i128)> = support
        .iter()
        .scan(0i128, |acc, (s, p)| {
            *acc += (p * denom).to_integer();
            Some((*s, *acc))
        })
        .collect();
    (0..count)
        .map(|_| {
            let u = rng.gen_range(0..denom);
            thresholds.iter().find(|(_, t)| u < *t).map(|(s, _)| *s).expect("thresholds end at the common denominator")
        })
        .collect()
}

/// Outputs of one channel use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transmission {
    pub y1: Gf2Vector,
    pub y2: Gf2Vector,
    /// `V1 = H21 x1`, the part of user 1's signal seen at receiver 2.
    pub v1: Gf2Vector,
    /// `V2 = H12 x2`.
    pub v2: Gf2Vector,
}

/// `y1 = H11 x1 + H12 x2`, `y2 = H22 x2 + H21 x1`.
pub fn transmit(x1: &Gf2Vector, x2: &Gf2Vector, params: &ChannelParams) -> Result<Transmission> {
    let q = params.q();
    if x1.len() != q || x2.len() != q {
        return Err(Error::dim("transmit", q, format!("({}, {})", x1.len(), x2.len())));
    }
    let own1 = shift(x1, q, params.n11);
    let own2 = shift(x2, q, params.n22);
    let v1 = shift(x1, q, params.n21);
    let v2 = shift(x2, q, params.n12);
    let mut y1 = own1;
    y1.xor_assign(&v2);
    let mut y2 = own2;
    y2.xor_assign(&v1);
    Ok(Transmission { y1, y2, v1, v2 })
}

/// `S^(q-n) x` without materialising the matrix.
pub(crate) fn shift(x: &Gf2Vector, q: usize, n: usize) -> Gf2Vector {
    let mut out = Gf2Vector::zeros(q);
    let s = q - n;
    for k in x.ones().filter(|&k| k < n) {
        out.set(k + s, true);
    }
    out
}

/// What a transmitter receives over its feedback link for one symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feedback {
    Erased,
    Present(Gf2Vector),
}

impl Feedback {
    pub fn is_erased(&self) -> bool {
        matches!(self, Feedback::Erased)
    }

    pub fn value(&self) -> Option<&Gf2Vector> {
        match self {
            Feedback::Erased => None,
            Feedback::Present(v) => Some(v),
        }
    }
}

/// `Ỹ = S·Y` with an explicit erasure marker.
pub fn feedback(y: &Gf2Vector, s: bool) -> Feedback {
    if s {
        Feedback::Present(y.clone())
    } else {
        Feedback::Erased
    }
}

/// On-disk channel description: exponents plus the joint state law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub n11: usize,
    pub n12: usize,
    pub n21: usize,
    pub n22: usize,
    #[serde(with = "rational::serde_str")]
    pub q00: Rational,
    #[serde(with = "rational::serde_str")]
    pub q01: Rational,
    #[serde(with = "rational::serde_str")]
    pub q10: Rational,
    #[serde(with = "rational::serde_str")]
    pub q11: Rational,
}

impl ChannelFile {
    pub fn new(params: ChannelParams, dist: &FeedbackDist) -> Self {
        ChannelFile {
            n11: params.n11,
            n12: params.n12,
            n21: params.n21,
            n22: params.n22,
            q00: dist.q00,
            q01: dist.q01,
            q10: dist.q10,
            q11: dist.q11,
        }
    }

    pub fn params(&self) -> ChannelParams {
        ChannelParams::new(self.n11, self.n12, self.n21, self.n22)
    }

    pub fn dist(&self) -> Result<FeedbackDist> {
        FeedbackDist::new(self.q00, self.q01, self.q10, self.q11)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ChannelFile = serde_json::from_str(s)?;
        file.dist()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

/// Always-off feedback on both links.
pub fn no_feedback() -> FeedbackDist {
    FeedbackDist::new(Rational::one(), Rational::zero(), Rational::zero(), Rational::zero()).unwrap()
}

/// Always-on feedback on both links.
pub fn perfect_feedback() -> FeedbackDist {
    FeedbackDist::new(Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_is_max_exponent() {
        assert_eq!(ChannelParams::new(1, 3, 2, 0).q(), 3);
        assert_eq!(ChannelParams::new(0, 0, 0, 0).q(), 0);
        assert_eq!(ChannelParams::grid(2).len(), 81);
    }

    #[test]
    fn dist_validation_and_marginals() {
        let d = FeedbackDist::new(frac(1, 8), frac(1, 8), frac(1, 4), frac(1, 2)).unwrap();
        assert_eq!(d.p1(), frac(3, 4));
        assert_eq!(d.p2(), frac(5, 8));
        assert!(FeedbackDist::new(frac(1, 2), frac(1, 2), frac(1, 2), int(0)).is_err());
        assert!(FeedbackDist::new(frac(3, 2), frac(-1, 2), int(0), int(0)).is_err());
        for make in [FeedbackDist::independent, FeedbackDist::correlated, FeedbackDist::anticorrelated] {
            let d = make(frac(1, 3), frac(3, 4)).unwrap();
            assert_eq!((d.p1(), d.p2()), (frac(1, 3), frac(3, 4)));
        }
        let c = FeedbackDist::correlated(frac(1, 2), frac(1, 2)).unwrap();
        assert_eq!((c.q00(), c.q11()), (frac(1, 2), frac(1, 2)));
        let a = FeedbackDist::anticorrelated(frac(1, 2), frac(1, 2)).unwrap();
        assert_eq!((a.q01(), a.q10()), (frac(1, 2), frac(1, 2)));
    }

    #[test]
    fn transmit_zero_inputs() {
        let p = ChannelParams::new(3, 1, 2, 2);
        let t = transmit(&Gf2Vector::zeros(3), &Gf2Vector::zeros(3), &p).unwrap();
        assert!(t.y1.is_zero() && t.y2.is_zero());
    }

    #[test]
    fn transmit_without_interference() {
        let p = ChannelParams::new(3, 0, 0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x1 = Gf2Vector::random(3, &mut rng);
            let x2 = Gf2Vector::random(3, &mut rng);
            let t = transmit(&x1, &x2, &p).unwrap();
            assert_eq!(t.y1, p.transfer(1, 1).mul_vec(&x1).unwrap());
            assert_eq!(t.y2, p.transfer(2, 2).mul_vec(&x2).unwrap());
        }
    }

    #[test]
    fn transmit_hand_example() {
        // n11 = 2, n12 = 1 (q = 2): H11 = I, H12 = S.
        // y1 = (1,0) + S(1,0) = (1,0) + (0,1) = (1,1).
        let p = ChannelParams::new(2, 1, 1, 2);
        let t = transmit(&Gf2Vector::from_bits(&[1, 0]), &Gf2Vector::from_bits(&[1, 0]), &p).unwrap();
        assert_eq!(t.y1, Gf2Vector::from_bits(&[1, 1]));
        assert_eq!(t.v2, Gf2Vector::from_bits(&[0, 1]));
        assert_eq!(t.y2, Gf2Vector::from_bits(&[1, 1]));
    }

    #[test]
    fn transmit_matches_matrix_form_and_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in ChannelParams::grid(3).into_iter().filter(|p| p.q() > 0) {
            let q = p.q();
            let x1 = Gf2Vector::random(q, &mut rng);
            let x2 = Gf2Vector::random(q, &mut rng);
            let t = transmit(&x1, &x2, &p).unwrap();
            let y1 = p.transfer(1, 1).mul_vec(&x1).unwrap().add(&p.transfer(1, 2).mul_vec(&x2).unwrap()).unwrap();
            let y2 = p.transfer(2, 2).mul_vec(&x2).unwrap().add(&p.transfer(2, 1).mul_vec(&x1).unwrap()).unwrap();
            assert_eq!((t.y1.clone(), t.y2.clone()), (y1, y2));
            assert_eq!(t.v1, p.transfer(2, 1).mul_vec(&x1).unwrap());
            assert_eq!(transmit(&x1, &x2, &p).unwrap(), t);
        }
    }

    #[test]
    fn high_levels_beyond_exponent_never_reach_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for p in ChannelParams::grid(3).into_iter().filter(|p| p.q() > 0) {
            let q = p.q();
            let x1 = Gf2Vector::random(q, &mut rng);
            let x2 = Gf2Vector::random(q, &mut rng);
            let base = transmit(&x1, &x2, &p).unwrap();
            // Levels at index >= n (below the top n) of x1 do not reach a link with exponent n.
            for level in 0..q {
                let mut x1p = x1.clone();
                x1p.flip(level);
                let t = transmit(&x1p, &x2, &p).unwrap();
                if level >= p.n11 && level >= p.n21 {
                    assert_eq!(t, base);
                }
                if level >= p.n21 {
                    assert_eq!(t.v1, base.v1);
                }
            }
        }
    }

    #[test]
    fn transmit_rejects_wrong_length() {
        let p = ChannelParams::new(2, 1, 1, 2);
        assert!(transmit(&Gf2Vector::zeros(3), &Gf2Vector::zeros(2), &p).is_err());
    }

    #[test]
    fn sampling_degenerate_dists() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_states(&perfect_feedback(), 100, &mut rng).iter().all(|s| s.s1 && s.s2));
        assert!(sample_states(&no_feedback(), 100, &mut rng).iter().all(|s| !s.s1 && !s.s2));
    }

    #[test]
    fn sampling_is_seeded() {
        let d = FeedbackDist::independent(frac(1, 3), frac(2, 3)).unwrap();
        let a = sample_states(&d, 500, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_states(&d, 500, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_marginal_concentrates() {
        let d = FeedbackDist::new(frac(1, 4), frac(1, 4), frac(1, 4), frac(1, 4)).unwrap();
        let n = 100_000;
        let s = sample_states(&d, n, &mut ChaCha8Rng::seed_from_u64(17));
        let ones = s.iter().filter(|s| s.s1).count() as f64;
        let se = (0.25 / n as f64).sqrt();
        assert!((ones / n as f64 - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn feedback_flag_semantics() {
        let y = Gf2Vector::from_bits(&[1, 0, 1]);
        assert_eq!(feedback(&y, true), Feedback::Present(y.clone()));
        assert_eq!(feedback(&y, false), Feedback::Erased);
        let zero = feedback(&Gf2Vector::zeros(3), true);
        assert!(!zero.is_erased());
        assert_ne!(zero, Feedback::Erased);
    }

    #[test]
    fn channel_file_parsing() {
        let json = r#"{"n11":3,"n12":2,"n21":2,"n22":3,"q00":"1/4","q01":"0.25","q10":"1/4","q11":"1/4"}"#;
        let f = ChannelFile::from_json(json).unwrap();
        assert_eq!(f.params(), ChannelParams::new(3, 2, 2, 3));
        assert_eq!(f.dist().unwrap().p1(), frac(1, 2));
        let again = ChannelFile::from_json(&f.to_json()).unwrap();
        assert_eq!(again, f);
        let bad = r#"{"n11":1,"n12":1,"n21":1,"n22":1,"q00":"1/2","q01":"1/2","q10":"1/2","q11":"0"}"#;
        assert!(ChannelFile::from_json(bad).is_err());
        let float = r#"{"n11":1,"n12":1,"n21":1,"n22":1,"q00":"1e0","q01":"0","q10":"0","q11":"0"}"#;
        assert!(ChannelFile::from_json(float).is_err());
    }
}
