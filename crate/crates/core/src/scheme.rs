//! Block-Markov quantize-map-and-forward with linear codebooks and backward
//! decoding.
//!
//! Each user sends `B` message blocks of `N` symbols and then one terminal
//! block. In block `b` transmitter `i` superposes three parts:
//!
//! * a common overlay `GC_i [W_ic; q(b-1)]` on the `n_ji` levels seen at the
//!   other receiver;
//! * a private overlay `GP_i [W_ip; W_ic; q(b-1)]` on the remaining levels;
//! * `X_ie = XE_i q(b-1)` spread over every level of `supp X_i`.
//!
//! `q(b-1) = (q1, q2)` are hashes of the previous block's feedback-filtered
//! cross signals, which both transmitters compute. The overlays are indexed
//! by `q(b-1)` as well as by the message, so the cloud centre selects the
//! codebook. The terminal block carries only `q(B)`.
//!
//! Receivers decode backwards. With `q(b)` known from block `b+1`, they solve
//! one GF(2) linear system for the messages of block `b` and for `q(b-1)`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{self, feedback, ChannelFile, ChannelParams, Feedback, FeedbackDist, StatePair, StateSeq};
use crate::entropy::Levels;
use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, Gf2Vector, Solution};
use crate::rational::{self, int, Rational};

const CODEBOOK_RETRIES: usize = 64;

pub fn default_delta() -> Rational {
    Rational::new(1, 2)
}

/// Message rates in bits per symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRates {
    #[serde(with = "rational::serde_str")]
    pub r1p: Rational,
    #[serde(with = "rational::serde_str")]
    pub r1c: Rational,
    #[serde(with = "rational::serde_str")]
    pub r2p: Rational,
    #[serde(with = "rational::serde_str")]
    pub r2c: Rational,
}

impl SplitRates {
    pub fn zero() -> Self {
        SplitRates::symmetric(Rational::zero(), Rational::zero())
    }

    pub fn symmetric(private: Rational, common: Rational) -> Self {
        SplitRates { r1p: private, r1c: common, r2p: private, r2c: common }
    }

    pub fn private(&self, user: usize) -> Rational {
        if user == 1 {
            self.r1p
        } else {
            self.r2p
        }
    }

    pub fn common(&self, user: usize) -> Rational {
        if user == 1 {
            self.r1c
        } else {
            self.r2c
        }
    }

    pub fn total(&self, user: usize) -> Rational {
        self.private(user) + self.common(user)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeConfig {
    pub params: ChannelParams,
    pub dist: FeedbackDist,
    pub blocks: usize,
    pub block_len: usize,
    pub rates: SplitRates,
    /// Quantizer rates `r1`, `r2` in bits per symbol.
    pub quant: [Rational; 2],
    pub delta: Rational,
    /// Count an ambiguous `W_jc` at receiver `i` as a block error.
    pub strict_cross_common: bool,
}

/// Bit counts per block derived from a [`SchemeConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BitBudget {
    pub private: [usize; 2],
    pub common: [usize; 2],
    pub quant: [usize; 2],
    /// Symbols in the terminal block.
    pub terminal_len: usize,
}

impl BitBudget {
    pub fn quant_total(&self) -> usize {
        self.quant[0] + self.quant[1]
    }
}

/// `H(V̄_i) = p_j n_ji`, the covering-side rate floor for user `i`.
pub fn quantizer_floor(params: &ChannelParams, dist: &FeedbackDist, user: usize) -> Rational {
    let (p_other, cross) = if user == 1 { (dist.p2(), params.n21) } else { (dist.p1(), params.n12) };
    p_other * int(cross as i64)
}

fn bits(n: usize, rate: Rational, what: &str) -> Result<usize> {
    let v = rate * int(n as i64);
    if !v.is_integer() {
        return Err(Error::param(format!("N * {what} = {n} * {rate} = {v} is not an integer")));
    }
    Ok(v.to_integer() as usize)
}

impl SchemeConfig {
    /// Config with the default slack and quantizer rates `r_i = p_j n_ji + δ`.
    pub fn new(params: ChannelParams, dist: FeedbackDist, blocks: usize, block_len: usize, rates: SplitRates) -> Result<Self> {
        Self::with_delta(params, dist, blocks, block_len, rates, default_delta())
    }

    pub fn with_delta(
        params: ChannelParams,
        dist: FeedbackDist,
        blocks: usize,
        block_len: usize,
        rates: SplitRates,
        delta: Rational,
    ) -> Result<Self> {
        let quant = [quantizer_floor(&params, &dist, 1) + delta, quantizer_floor(&params, &dist, 2) + delta];
        let cfg = SchemeConfig { params, dist, blocks, block_len, rates, quant, delta, strict_cross_common: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 || self.block_len == 0 {
            return Err(Error::param("blocks and block length must be positive"));
        }
        if self.delta < Rational::zero() {
            return Err(Error::param("slack must be nonnegative"));
        }
        let r = &self.rates;
        for (name, v) in [("R1p", r.r1p), ("R1c", r.r1c), ("R2p", r.r2p), ("R2c", r.r2c)] {
            if v < Rational::zero() {
                return Err(Error::param(format!("{name} = {v} is negative")));
            }
        }
        for user in [1, 2] {
            let floor = quantizer_floor(&self.params, &self.dist, user) + self.delta;
            if self.quant[user - 1] < floor {
                return Err(Error::param(format!("r{user} = {} is below p_j n_ji + delta = {floor}", self.quant[user - 1])));
            }
        }
        self.budget().map(|_| ())
    }

    pub fn budget(&self) -> Result<BitBudget> {
        let n = self.block_len;
        let r = &self.rates;
        let quant = [bits(n, self.quant[0], "r1")?, bits(n, self.quant[1], "r2")?];
        let p = &self.params;
        let visible = [p.n11.max(p.n12), p.n22.max(p.n21)];
        let per_symbol = visible.iter().copied().filter(|&v| v > 0).min();
        let load = self.quant[0] + self.quant[1];
        let factor = match per_symbol {
            Some(v) if !load.is_zero() => 1 + (load / int(v as i64)).ceil().to_integer() as usize,
            _ => 1,
        };
        Ok(BitBudget {
            private: [bits(n, r.r1p, "R1p")?, bits(n, r.r2p, "R2p")?],
            common: [bits(n, r.r1c, "R1c")?, bits(n, r.r2c, "R2c")?],
            quant,
            terminal_len: n * factor,
        })
    }

    /// Fraction of symbols that carry fresh messages, `BN / (BN + N_T)`.
    pub fn rate_loss_factor(&self) -> Result<Rational> {
        let t = self.budget()?.terminal_len;
        let msg = self.blocks * self.block_len;
        Ok(Rational::new(msg as i128, (msg + t) as i128))
    }

    fn levels(&self, user: usize) -> Levels {
        Levels::of(&self.params, user)
    }
}

/// JSON form of a [`SchemeConfig`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeConfigFile {
    pub channel: ChannelFile,
    pub blocks: usize,
    pub block_len: usize,
    #[serde(flatten)]
    pub rates: SplitRates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<String>,
    #[serde(default)]
    pub strict_cross_common: bool,
}

impl SchemeConfigFile {
    pub fn to_config(&self) -> Result<SchemeConfig> {
        let delta = self.delta.as_deref().map(rational::parse).transpose()?.unwrap_or_else(default_delta);
        let mut cfg = SchemeConfig {
            params: self.channel.params(),
            dist: self.channel.dist()?,
            blocks: self.blocks,
            block_len: self.block_len,
            rates: self.rates,
            quant: [Rational::zero(); 2],
            delta,
            strict_cross_common: self.strict_cross_common,
        };
        for (user, given) in [(1, &self.r1), (2, &self.r2)] {
            cfg.quant[user - 1] = match given {
                Some(s) => rational::parse(s)?,
                None => quantizer_floor(&cfg.params, &cfg.dist, user) + delta,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_config(cfg: &SchemeConfig) -> Self {
        SchemeConfigFile {
            channel: ChannelFile::new(cfg.params, &cfg.dist),
            blocks: cfg.blocks,
            block_len: cfg.block_len,
            rates: cfg.rates,
            delta: Some(rational::format(&cfg.delta)),
            r1: Some(rational::format(&cfg.quant[0])),
            r2: Some(rational::format(&cfg.quant[1])),
            strict_cross_common: cfg.strict_cross_common,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Generators of one user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserCodebook {
    /// `(N n_ji) x (k_ic + k_q)` common overlay.
    pub common: Gf2Matrix,
    /// `(N (m_i - n_ji)) x (k_ip + k_ic + k_q)` private overlay.
    pub private: Gf2Matrix,
    /// `(N m_i) x k_q` map from `q(b-1)` to `X_ie`.
    pub spread: Gf2Matrix,
    /// `(N_T m_i) x k_q` terminal-block map.
    pub terminal: Gf2Matrix,
    /// `k_qi x (N n_ji)` quantizer hash on `V̄_i`.
    pub hash: Gf2Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodebookSet {
    pub users: [UserCodebook; 2],
}

fn full_rank_draw<R: Rng + ?Sized>(rows: usize, cols: usize, check_cols: usize, what: &'static str, rng: &mut R) -> Result<Gf2Matrix> {
    let need = rows.min(check_cols);
    for _ in 0..CODEBOOK_RETRIES {
        let m = Gf2Matrix::random(rows, cols, rng);
        if m.col_range(0, check_cols).rank() == need {
            return Ok(m);
        }
    }
    Err(Error::RetriesExhausted(what))
}

/// Draws all generators i.i.d. uniform, resampling any whose message block
/// (or hash) falls short of full rank.
pub fn generate_codebooks<R: Rng + ?Sized>(cfg: &SchemeConfig, rng: &mut R) -> Result<CodebookSet> {
    let bb = cfg.budget()?;
    let n = cfg.block_len;
    let kq = bb.quant_total();
    let mut users = Vec::with_capacity(2);
    for user in [1, 2] {
        let u = user - 1;
        let lv = cfg.levels(user);
        let (kp, kc) = (bb.private[u], bb.common[u]);
        let common = full_rank_draw(n * lv.common, kc + kq, kc, "common overlay", rng)?;
        let private = full_rank_draw(n * lv.private(), kp + kc + kq, kp, "private overlay", rng)?;
        let spread = full_rank_draw(n * lv.support, kq, kq, "spreading map", rng)?;
        let terminal = full_rank_draw(bb.terminal_len * lv.support, kq, kq, "terminal map", rng)?;
        let hash = full_rank_draw(bb.quant[u], n * lv.common, n * lv.common, "quantizer hash", rng)?;
        users.push(UserCodebook { common, private, spread, terminal, hash });
    }
    let [a, b]: [UserCodebook; 2] = users.try_into().expect("two users");
    Ok(CodebookSet { users: [a, b] })
}

/// Fresh message bits of one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMessages {
    pub common: [Gf2Vector; 2],
    pub private: [Gf2Vector; 2],
}

impl BlockMessages {
    pub fn zeros(bb: &BitBudget) -> Self {
        BlockMessages {
            common: [Gf2Vector::zeros(bb.common[0]), Gf2Vector::zeros(bb.common[1])],
            private: [Gf2Vector::zeros(bb.private[0]), Gf2Vector::zeros(bb.private[1])],
        }
    }

    pub fn random<R: Rng + ?Sized>(bb: &BitBudget, rng: &mut R) -> Self {
        BlockMessages {
            common: [Gf2Vector::random(bb.common[0], rng), Gf2Vector::random(bb.common[1], rng)],
            private: [Gf2Vector::random(bb.private[0], rng), Gf2Vector::random(bb.private[1], rng)],
        }
    }
}

/// Lays out per-symbol level vectors from block-wide overlay vectors.
fn assemble(
    q: usize,
    lv: Levels,
    len: usize,
    common: Option<&Gf2Vector>,
    private: Option<&Gf2Vector>,
    spread: &Gf2Vector,
) -> Vec<Gf2Vector> {
    let pl = lv.private();
    (0..len)
        .map(|t| {
            let mut x = Gf2Vector::zeros(q);
            for k in 0..lv.support {
                let mut bit = spread.get(t * lv.support + k);
                if k < lv.common {
                    bit ^= common.is_some_and(|c| c.get(t * lv.common + k));
                } else {
                    bit ^= private.is_some_and(|p| p.get(t * pl + k - lv.common));
                }
                x.set(k, bit);
            }
            x
        })
        .collect()
}

/// `X_ie^N = XE_i q(b-1)` as a block vector of `N m_i` bits.
pub fn spread_block(books: &CodebookSet, user: usize, qprev: &Gf2Vector) -> Result<Gf2Vector> {
    books.users[user - 1].spread.mul_vec(qprev)
}

/// Codeword `X_i^N(b)` from the block's messages and `q(b-1)`.
pub fn encode_block(
    cfg: &SchemeConfig,
    books: &CodebookSet,
    user: usize,
    msgs: &BlockMessages,
    qprev: &Gf2Vector,
) -> Result<Vec<Gf2Vector>> {
    let u = user - 1;
    let book = &books.users[u];
    let wc = &msgs.common[u];
    let wp = &msgs.private[u];
    let common = book.common.mul_vec(&Gf2Vector::concat(&[wc, qprev]))?;
    let private = book.private.mul_vec(&Gf2Vector::concat(&[wp, wc, qprev]))?;
    let spread = spread_block(books, user, qprev)?;
    Ok(assemble(cfg.params.q(), cfg.levels(user), cfg.block_len, Some(&common), Some(&private), &spread))
}

/// Terminal-block codeword carrying only `q(B)`.
pub fn encode_terminal(cfg: &SchemeConfig, books: &CodebookSet, user: usize, q: &Gf2Vector) -> Result<Vec<Gf2Vector>> {
    let spread = books.users[user - 1].terminal.mul_vec(q)?;
    Ok(assemble(cfg.params.q(), cfg.levels(user), cfg.budget()?.terminal_len, None, None, &spread))
}

/// Bit positions of `V̄_user` that can be nonzero in a block with `states`.
pub fn active_positions(cfg: &SchemeConfig, user: usize, states: &[StatePair]) -> Vec<usize> {
    let c = cfg.levels(user).common;
    let other = 3 - user;
    states.iter().enumerate().filter(|(_, s)| s.of(other)).flat_map(|(t, _)| (0..c).map(move |k| t * c + k)).collect()
}

/// Whether the hash of `user` is injective on the active bits.
pub fn hash_covers(cfg: &SchemeConfig, books: &CodebookSet, user: usize, states: &[StatePair]) -> bool {
    let act = active_positions(cfg, user, states);
    books.users[user - 1].hash.select_cols(&act).rank() == act.len()
}

/// What one transmitter derives at the end of a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TxView {
    pub vbar: [Gf2Vector; 2],
    pub q: [Gf2Vector; 2],
    pub spread: [Gf2Vector; 2],
}

impl TxView {
    pub fn q_concat(&self) -> Gf2Vector {
        Gf2Vector::concat(&[&self.q[0], &self.q[1]])
    }
}

/// Transmitter `user`'s estimate of both `V̄` blocks and their hashes.
///
/// Its own `V̄_i` comes from its own codeword and the other link's state.
/// The other user's `V̄_j` is read off its feedback as
/// `Ỹ_i - S_i H_ii X_i - S_i H_ij X_je`.
pub fn transmitter_view(
    cfg: &SchemeConfig,
    books: &CodebookSet,
    user: usize,
    own_x: &[Gf2Vector],
    fb: &[Feedback],
    states: &[StatePair],
    qprev: &Gf2Vector,
) -> Result<TxView> {
    let n = cfg.block_len;
    if own_x.len() != n || fb.len() != n || states.len() != n {
        return Err(Error::param(format!(
            "block of {n} symbols, got {} codeword / {} feedback / {} states",
            own_x.len(),
            fb.len(),
            states.len()
        )));
    }
    let q = cfg.params.q();
    let other = 3 - user;
    let spread = [spread_block(books, 1, qprev)?, spread_block(books, 2, qprev)?];
    let mut vbar = [Gf2Vector::zeros(0), Gf2Vector::zeros(0)];

    let lv = cfg.levels(user);
    let mut own = Gf2Vector::zeros(n * lv.common);
    for t in (0..n).filter(|&t| states[t].of(other)) {
        for k in 0..lv.common {
            own.set(t * lv.common + k, own_x[t].get(k) ^ spread[user - 1].get(t * lv.support + k));
        }
    }
    vbar[user - 1] = own;

    let lo = cfg.levels(other);
    let n_own = cfg.params.n(user, user);
    let mut theirs = Gf2Vector::zeros(n * lo.common);
    for t in (0..n).filter(|&t| states[t].of(user)) {
        let y = fb[t].value().ok_or_else(|| Error::param(format!("feedback erased at symbol {t} while the link state is on")))?;
        let mut cross = y.clone();
        cross.xor_assign(&channel::shift(&own_x[t], q, n_own));
        for k in 0..lo.common {
            theirs.set(t * lo.common + k, cross.get(q - lo.common + k) ^ spread[other - 1].get(t * lo.support + k));
        }
    }
    vbar[other - 1] = theirs;

    let q = [books.users[0].hash.mul_vec(&vbar[0])?, books.users[1].hash.mul_vec(&vbar[1])?];
    Ok(TxView { vbar, q, spread })
}

/// Decoder output for one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecode {
    pub common: Gf2Vector,
    pub private: Gf2Vector,
    /// Decoded `q(b-1)`, both users concatenated.
    pub qprev: Gf2Vector,
    pub consistent: bool,
    /// Own messages and `q(b-1)` are pinned down.
    pub unique: bool,
    /// The other user's common message is pinned down too.
    pub cross_unique: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub user: usize,
    pub terminal_consistent: bool,
    pub terminal_unique: bool,
    /// Index 0 is block 1.
    pub blocks: Vec<BlockDecode>,
}

fn block_diag(a: &Gf2Matrix, b: &Gf2Matrix) -> Result<Gf2Matrix> {
    let top = a.hstack(&Gf2Matrix::zeros(a.nrows(), b.ncols()))?;
    let bottom = Gf2Matrix::zeros(b.nrows(), a.ncols()).hstack(b)?;
    top.vstack(&bottom)
}

/// `m` shifted into columns `offset..` of a `total`-column matrix.
fn place(m: &Gf2Matrix, offset: usize, total: usize) -> Result<Gf2Matrix> {
    let left = Gf2Matrix::zeros(m.nrows(), offset);
    let right = Gf2Matrix::zeros(m.nrows(), total - offset - m.ncols());
    left.hstack(m)?.hstack(&right)
}

/// Hash restricted to the active positions of a block, both users stacked
/// block-diagonally: `q = Qa a`.
fn active_hash(cfg: &SchemeConfig, books: &CodebookSet, states: Option<&[StatePair]>) -> Result<(Gf2Matrix, [usize; 2])> {
    let bb = cfg.budget()?;
    match states {
        None => Ok((Gf2Matrix::zeros(bb.quant_total(), 0), [0, 0])),
        Some(s) => {
            let a1 = active_positions(cfg, 1, s);
            let a2 = active_positions(cfg, 2, s);
            let qa = block_diag(&books.users[0].hash.select_cols(&a1), &books.users[1].hash.select_cols(&a2))?;
            Ok((qa, [a1.len(), a2.len()]))
        }
    }
}

/// Rows of `Y_i^N` over the unknowns, given each user's per-level rows.
fn output_rows(
    cfg: &SchemeConfig,
    rx: usize,
    len: usize,
    x_rows: [&dyn Fn(usize, usize) -> Gf2Vector; 2],
    total: usize,
) -> Result<Gf2Matrix> {
    let q = cfg.params.q();
    let tx = 3 - rx;
    let n_own = cfg.params.n(rx, rx);
    let n_cross = cfg.params.n(rx, tx);
    let mut rows = Vec::with_capacity(len * q);
    for t in 0..len {
        for lvl in 0..q {
            let mut row = Gf2Vector::zeros(total);
            if lvl >= q - n_own {
                row.xor_assign(&x_rows[rx - 1](t, lvl - (q - n_own)));
            }
            if lvl >= q - n_cross {
                row.xor_assign(&x_rows[tx - 1](t, lvl - (q - n_cross)));
            }
            rows.push(row);
        }
    }
    Gf2Matrix::from_rows(total, rows)
}

fn flatten(xs: &[Gf2Vector]) -> Gf2Vector {
    let refs: Vec<&Gf2Vector> = xs.iter().collect();
    Gf2Vector::concat(&refs)
}

fn decode_terminal(
    cfg: &SchemeConfig,
    books: &CodebookSet,
    rx: usize,
    y: &[Gf2Vector],
    last_states: &[StatePair],
) -> Result<(Gf2Vector, bool, bool)> {
    let (qa, _) = active_hash(cfg, books, Some(last_states))?;
    let total = qa.ncols();
    let maps = [books.users[0].terminal.mul(&qa)?, books.users[1].terminal.mul(&qa)?];
    let lv = [cfg.levels(1), cfg.levels(2)];
    let f1 = |t: usize, k: usize| maps[0].row(t * lv[0].support + k).clone();
    let f2 = |t: usize, k: usize| maps[1].row(t * lv[1].support + k).clone();
    let sys = output_rows(cfg, rx, y.len(), [&f1, &f2], total)?;
    match sys.solve_all(&flatten(y))? {
        Solution::Inconsistent => Ok((Gf2Vector::zeros(qa.nrows()), false, false)),
        Solution::Affine(sol) => {
            let qhat = qa.mul_vec(&sol.particular)?;
            Ok((qhat, true, sol.is_unique_under(&qa, 0)))
        }
    }
}

fn decode_block(
    cfg: &SchemeConfig,
    books: &CodebookSet,
    rx: usize,
    y: &[Gf2Vector],
    states: &[StatePair],
    prev_states: Option<&[StatePair]>,
    q_known: &Gf2Vector,
) -> Result<BlockDecode> {
    let bb = cfg.budget()?;
    let tx = 3 - rx;
    let (ri, ti) = (rx - 1, tx - 1);
    let (qa, _) = active_hash(cfg, books, prev_states)?;
    let kq = bb.quant_total();
    // Unknowns: [W_ic | W_ip | W_jc | a1 | a2].
    let o_wc = 0;
    let o_wp = bb.common[ri];
    let o_xc = o_wp + bb.private[ri];
    let o_a = o_xc + bb.common[ti];
    let total = o_a + qa.ncols();

    let common_rows = |user: usize, w_off: usize| -> Result<Gf2Matrix> {
        let gc = &books.users[user - 1].common;
        let kc = bb.common[user - 1];
        let msg = place(&gc.col_range(0, kc), w_off, total)?;
        let fb = place(&gc.col_range(kc, kc + kq).mul(&qa)?, o_a, total)?;
        msg.add(&fb)
    };
    let cr = [common_rows(1, if rx == 1 { o_wc } else { o_xc })?, common_rows(2, if rx == 2 { o_wc } else { o_xc })?];
    let er = [place(&books.users[0].spread.mul(&qa)?, o_a, total)?, place(&books.users[1].spread.mul(&qa)?, o_a, total)?];
    let gp = &books.users[ri].private;
    let (kp, kc) = (bb.private[ri], bb.common[ri]);
    let pr = place(&gp.col_range(0, kp), o_wp, total)?.add(&place(&gp.col_range(kp, kp + kc), o_wc, total)?)?.add(&place(
        &gp.col_range(kp + kc, kp + kc + kq).mul(&qa)?,
        o_a,
        total,
    )?)?;
    let lv = [cfg.levels(1), cfg.levels(2)];
    let x_row = |u: usize, t: usize, k: usize| -> Gf2Vector {
        let l = lv[u];
        let mut row = er[u].row(t * l.support + k).clone();
        if k < l.common {
            row.xor_assign(cr[u].row(t * l.common + k));
        } else if u == ri {
            row.xor_assign(pr.row(t * l.private() + k - l.common));
        }
        row
    };
    let f1 = |t: usize, k: usize| x_row(0, t, k);
    let f2 = |t: usize, k: usize| x_row(1, t, k);
    let mut sys = output_rows(cfg, rx, cfg.block_len, [&f1, &f2], total)?;
    for user in [1, 2] {
        let act = active_positions(cfg, user, states);
        let rows = books.users[user - 1].hash.select_cols(&act).mul(&cr[user - 1].select_rows(&act))?;
        sys = sys.vstack(&rows)?;
    }
    let rhs = Gf2Vector::concat(&[&flatten(y), q_known]);
    match sys.solve_all(&rhs)? {
        Solution::Inconsistent => Ok(BlockDecode {
            common: Gf2Vector::zeros(bb.common[ri]),
            private: Gf2Vector::zeros(bb.private[ri]),
            qprev: Gf2Vector::zeros(kq),
            consistent: false,
            unique: false,
            cross_unique: false,
        }),
        Solution::Affine(sol) => {
            let own: Vec<usize> = (o_wc..o_xc).collect();
            let cross: Vec<usize> = (o_xc..o_a).collect();
            Ok(BlockDecode {
                common: sol.particular.slice(o_wc, o_wp),
                private: sol.particular.slice(o_wp, o_xc),
                qprev: qa.mul_vec(&sol.particular.slice(o_a, total))?,
                consistent: true,
                unique: sol.is_unique_on(&own) && sol.is_unique_under(&qa, o_a),
                cross_unique: sol.is_unique_on(&cross),
            })
        }
    }
}

/// Backward decoding at receiver `rx` over `B + 1` received blocks.
///
/// With `genie`, the true `q(b)` of every message block replaces the
/// decoded value.
pub fn backward_decode(
    cfg: &SchemeConfig,
    books: &CodebookSet,
    rx: usize,
    ys: &[Vec<Gf2Vector>],
    states: &StateSeq,
    genie: Option<&[Gf2Vector]>,
) -> Result<DecodeOutcome> {
    let b_count = cfg.blocks;
    if ys.len() != b_count + 1 || states.num_blocks() != b_count {
        return Err(Error::param(format!(
            "expected {} received blocks and {b_count} state blocks, got {} and {}",
            b_count + 1,
            ys.len(),
            states.num_blocks()
        )));
    }
    let (mut q_known, terminal_consistent, terminal_unique) = match genie {
        Some(g) => (g[b_count - 1].clone(), true, true),
        None => decode_terminal(cfg, books, rx, &ys[b_count], states.block(b_count - 1))?,
    };
    let mut blocks = vec![None; b_count];
    for b in (0..b_count).rev() {
        let prev = if b == 0 { None } else { Some(states.block(b - 1)) };
        let d = decode_block(cfg, books, rx, &ys[b], states.block(b), prev, &q_known)?;
        q_known = match (genie, b) {
            (Some(g), b) if b > 0 => g[b - 1].clone(),
            _ => d.qprev.clone(),
        };
        blocks[b] = Some(d);
    }
    Ok(DecodeOutcome {
        user: rx,
        terminal_consistent,
        terminal_unique,
        blocks: blocks.into_iter().map(|d| d.expect("every block decoded")).collect(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOptions {
    pub genie: bool,
    pub trace: bool,
}

/// Hex dump of one block, for debugging and fixtures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockTrace {
    pub block: usize,
    pub x: [String; 2],
    pub y: [String; 2],
    pub v: [String; 2],
    pub vtilde: [String; 2],
    pub vbar: [String; 2],
    pub q: [String; 2],
    pub decoded_common: [String; 2],
    pub decoded_private: [String; 2],
    pub success: [bool; 2],
    pub outage: [bool; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialTrace {
    pub blocks: Vec<BlockTrace>,
    pub terminal_x: [String; 2],
    pub terminal_y: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub message_error: [bool; 2],
    /// Per user, per message block.
    pub block_errors: [Vec<bool>; 2],
    /// Blocks where a hash was not injective on the active bits.
    pub outages: usize,
    /// Decoder systems with no solution.
    pub inconsistent: usize,
    /// Blocks where the other user's common message stayed ambiguous.
    pub cross_ambiguous: usize,
    pub transmitters_agree: bool,
    /// `V̄` from the transmitters equals `Ṽ - Ṽ_e` rebuilt from channel outputs.
    pub vbar_recomputed: bool,
    pub trace: Option<TrialTrace>,
}

impl TrialOutcome {
    pub fn any_error(&self) -> bool {
        self.message_error[0] || self.message_error[1]
    }
}

fn hex_of(xs: &[Gf2Vector]) -> String {
    flatten(xs).to_hex()
}

/// Everything the channel produced in one trial, before decoding.
struct Transcript {
    books: CodebookSet,
    states: StateSeq,
    msgs: Vec<BlockMessages>,
    x: Vec<[Vec<Gf2Vector>; 2]>,
    y: Vec<[Vec<Gf2Vector>; 2]>,
    v: Vec<[Vec<Gf2Vector>; 2]>,
    views: Vec<[TxView; 2]>,
    q: Vec<Gf2Vector>,
    recomputed_ok: bool,
}

fn transmit_all<R: Rng + ?Sized>(cfg: &SchemeConfig, rng: &mut R) -> Result<Transcript> {
    let bb = cfg.budget()?;
    let books = generate_codebooks(cfg, rng)?;
    let states = StateSeq::sample(&cfg.dist, cfg.blocks, cfg.block_len, rng);
    let msgs: Vec<BlockMessages> = (0..cfg.blocks).map(|_| BlockMessages::random(&bb, rng)).collect();
    let mut qprev = Gf2Vector::zeros(bb.quant_total());
    let (mut xs, mut ys, mut vs, mut views, mut qs) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut recomputed_ok = true;
    for (b, m) in msgs.iter().enumerate() {
        let st = states.block(b);
        let x1 = encode_block(cfg, &books, 1, m, &qprev)?;
        let x2 = encode_block(cfg, &books, 2, m, &qprev)?;
        let (mut y1, mut y2, mut v1, mut v2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for t in 0..cfg.block_len {
            let out = channel::transmit(&x1[t], &x2[t], &cfg.params)?;
            y1.push(out.y1);
            y2.push(out.y2);
            v1.push(out.v1);
            v2.push(out.v2);
        }
        let fb1: Vec<Feedback> = y1.iter().zip(st).map(|(y, s)| feedback(y, s.s1)).collect();
        let fb2: Vec<Feedback> = y2.iter().zip(st).map(|(y, s)| feedback(y, s.s2)).collect();
        let view1 = transmitter_view(cfg, &books, 1, &x1, &fb1, st, &qprev)?;
        let view2 = transmitter_view(cfg, &books, 2, &x2, &fb2, st, &qprev)?;

        // Independent rebuild: V̄_i = S_j (V_i - H_ji X_ie) from the channel outputs.
        for user in [1, 2] {
            let other = 3 - user;
            let lv = cfg.levels(user);
            let q = cfg.params.q();
            let n_cross = cfg.params.n(other, user);
            let spread = assemble(q, lv, cfg.block_len, None, None, &view1.spread[user - 1]);
            let v = if user == 1 { &v1 } else { &v2 };
            let mut rebuilt = Gf2Vector::zeros(cfg.block_len * lv.common);
            for t in (0..cfg.block_len).filter(|&t| st[t].of(other)) {
                let mut d = v[t].clone();
                d.xor_assign(&channel::shift(&spread[t], q, n_cross));
                for k in 0..lv.common {
                    rebuilt.set(t * lv.common + k, d.get(q - n_cross + k));
                }
            }
            recomputed_ok &= rebuilt == view1.vbar[user - 1];
        }
        qprev = view1.q_concat();
        qs.push(qprev.clone());
        xs.push([x1, x2]);
        ys.push([y1, y2]);
        vs.push([v1, v2]);
        views.push([view1, view2]);
    }
    let x1 = encode_terminal(cfg, &books, 1, &qprev)?;
    let x2 = encode_terminal(cfg, &books, 2, &qprev)?;
    let (mut y1, mut y2) = (Vec::new(), Vec::new());
    for (a, b) in x1.iter().zip(&x2) {
        let out = channel::transmit(a, b, &cfg.params)?;
        y1.push(out.y1);
        y2.push(out.y2);
    }
    xs.push([x1, x2]);
    ys.push([y1, y2]);
    Ok(Transcript { books, states, msgs, x: xs, y: ys, v: vs, views, q: qs, recomputed_ok })
}

/// One end-to-end trial: codebooks, states, messages, transmission and
/// decoding at both receivers, all drawn from `rng`.
pub fn run_trial<R: Rng + ?Sized>(cfg: &SchemeConfig, rng: &mut R, opts: TrialOptions) -> Result<TrialOutcome> {
    let tr = transmit_all(cfg, rng)?;
    let genie = opts.genie.then_some(tr.q.as_slice());
    let mut outcomes = Vec::new();
    for rx in [1, 2] {
        let ys: Vec<Vec<Gf2Vector>> = tr.y.iter().map(|pair| pair[rx - 1].clone()).collect();
        outcomes.push(backward_decode(cfg, &tr.books, rx, &ys, &tr.states, genie)?);
    }
    let mut block_errors = [Vec::new(), Vec::new()];
    let mut inconsistent = 0;
    let mut cross_ambiguous = 0;
    for (u, out) in outcomes.iter().enumerate() {
        inconsistent += usize::from(!out.terminal_consistent);
        for (b, d) in out.blocks.iter().enumerate() {
            inconsistent += usize::from(!d.consistent);
            cross_ambiguous += usize::from(d.consistent && !d.cross_unique);
            let wrong = d.common != tr.msgs[b].common[u] || d.private != tr.msgs[b].private[u];
            let strict = cfg.strict_cross_common && !d.cross_unique;
            block_errors[u].push(wrong || strict);
        }
    }
    let mut outages = 0;
    let mut outage_flags = Vec::new();
    for b in 0..cfg.blocks {
        let st = tr.states.block(b);
        let flags = [!hash_covers(cfg, &tr.books, 1, st), !hash_covers(cfg, &tr.books, 2, st)];
        outages += flags.iter().filter(|f| **f).count();
        outage_flags.push(flags);
    }
    let transmitters_agree = tr.views.iter().all(|[a, b]| a == b);
    let trace = opts.trace.then(|| {
        let blocks = (0..cfg.blocks)
            .map(|b| {
                let st = tr.states.block(b);
                let vt = |u: usize| -> String {
                    let other = 3 - u;
                    let gated: Vec<Gf2Vector> = tr.v[b][u - 1]
                        .iter()
                        .zip(st)
                        .map(|(v, s)| if s.of(other) { v.clone() } else { Gf2Vector::zeros(v.len()) })
                        .collect();
                    hex_of(&gated)
                };
                BlockTrace {
                    block: b + 1,
                    x: [hex_of(&tr.x[b][0]), hex_of(&tr.x[b][1])],
                    y: [hex_of(&tr.y[b][0]), hex_of(&tr.y[b][1])],
                    v: [hex_of(&tr.v[b][0]), hex_of(&tr.v[b][1])],
                    vtilde: [vt(1), vt(2)],
                    vbar: [tr.views[b][0].vbar[0].to_hex(), tr.views[b][0].vbar[1].to_hex()],
                    q: [tr.views[b][0].q[0].to_hex(), tr.views[b][0].q[1].to_hex()],
                    decoded_common: [outcomes[0].blocks[b].common.to_hex(), outcomes[1].blocks[b].common.to_hex()],
                    decoded_private: [outcomes[0].blocks[b].private.to_hex(), outcomes[1].blocks[b].private.to_hex()],
                    success: [!block_errors[0][b], !block_errors[1][b]],
                    outage: outage_flags[b],
                }
            })
            .collect();
        let last = cfg.blocks;
        TrialTrace {
            blocks,
            terminal_x: [hex_of(&tr.x[last][0]), hex_of(&tr.x[last][1])],
            terminal_y: [hex_of(&tr.y[last][0]), hex_of(&tr.y[last][1])],
        }
    });
    Ok(TrialOutcome {
        message_error: [block_errors[0].iter().any(|e| *e), block_errors[1].iter().any(|e| *e)],
        block_errors,
        outages,
        inconsistent,
        cross_ambiguous,
        transmitters_agree,
        vbar_recomputed: tr.recomputed_ok,
        trace,
    })
}

pub fn run_trial_seeded(cfg: &SchemeConfig, seed: u64, opts: TrialOptions) -> Result<TrialOutcome> {
    run_trial(cfg, &mut ChaCha8Rng::seed_from_u64(seed), opts)
}

/// Symmetric rate point at `fraction` of the symmetric corner of the outer
/// region. The total is rounded to a multiple of `1/grid`, then
/// `private_share` of it goes to the private part (also rounded).
pub fn symmetric_rate_point(
    params: &ChannelParams,
    p: Rational,
    fraction: Rational,
    private_share: Rational,
    grid: i64,
    round_up: bool,
) -> Result<SplitRates> {
    if private_share < Rational::zero() || private_share > Rational::one() {
        return Err(Error::param(format!("private share {private_share} outside [0, 1]")));
    }
    let corner = crate::regions::outer_region(params, p, p)?.symmetric_corner()?;
    let g = int(grid);
    let snap = |x: Rational| {
        let scaled = x * g;
        (if round_up { scaled.ceil() } else { scaled.floor() }) / g
    };
    let total = snap(corner * fraction);
    let private = snap(total * private_share);
    Ok(SplitRates::symmetric(private, total - private))
}
