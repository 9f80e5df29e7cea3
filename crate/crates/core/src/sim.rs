//! Seeded Monte Carlo over scheme trials.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(master_seed)` with its
//! stream set to `i`. Trials run on rayon workers and are folded back in
//! index order, so the aggregate is independent of scheduling.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scheme::{run_trial, SchemeConfig, TrialOptions, TrialOutcome};

/// Generator for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Aggregate counts; deterministic in (config, master seed, trials).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimResult {
    pub trials: usize,
    pub blocks: usize,
    pub block_len: usize,
    pub rates: crate::scheme::SplitRates,
    /// Trials where any block of user `i` failed.
    pub message_errors: [usize; 2],
    /// Failures per message block, per user.
    pub block_errors: [Vec<usize>; 2],
    /// Trials with at least one hash outage.
    pub outage_trials: usize,
    pub inconsistent: usize,
    pub cross_ambiguous: usize,
    /// Trials where the two transmitters disagreed; always 0 when correct.
    pub disagreements: usize,
    /// Trials where the stored `V̄` differed from its rebuild; always 0 when correct.
    pub vbar_mismatches: usize,
    /// Per-trial error flags `[user1, user2]`, in trial order.
    pub per_trial: Vec<[bool; 2]>,
}

impl SimResult {
    fn empty(cfg: &SchemeConfig) -> Self {
        SimResult {
            trials: 0,
            blocks: cfg.blocks,
            block_len: cfg.block_len,
            rates: cfg.rates,
            message_errors: [0, 0],
            block_errors: [vec![0; cfg.blocks], vec![0; cfg.blocks]],
            outage_trials: 0,
            inconsistent: 0,
            cross_ambiguous: 0,
            disagreements: 0,
            vbar_mismatches: 0,
            per_trial: Vec::new(),
        }
    }

    fn absorb(&mut self, t: &TrialOutcome) {
        self.trials += 1;
        for u in 0..2 {
            self.message_errors[u] += usize::from(t.message_error[u]);
            for (b, e) in t.block_errors[u].iter().enumerate() {
                self.block_errors[u][b] += usize::from(*e);
            }
        }
        self.outage_trials += usize::from(t.outages > 0);
        self.inconsistent += t.inconsistent;
        self.cross_ambiguous += t.cross_ambiguous;
        self.disagreements += usize::from(!t.transmitters_agree);
        self.vbar_mismatches += usize::from(!t.vbar_recomputed);
        self.per_trial.push(t.message_error);
    }

    /// Trials where either user failed.
    pub fn any_errors(&self) -> usize {
        self.per_trial.iter().filter(|e| e[0] || e[1]).count()
    }

    pub fn error_rate(&self, user: usize) -> f64 {
        self.message_errors[user - 1] as f64 / self.trials as f64
    }

    pub fn any_error_rate(&self) -> f64 {
        self.any_errors() as f64 / self.trials as f64
    }

    pub fn csv_header() -> &'static str {
        "trial_count,r1p,r1c,r2p,r2c,N,B,err1,err2,outage"
    }

    pub fn csv_row(&self) -> String {
        let r = &self.rates;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.trials,
            rational::format(&r.r1p),
            rational::format(&r.r1c),
            rational::format(&r.r2p),
            rational::format(&r.r2c),
            self.block_len,
            self.blocks,
            self.message_errors[0],
            self.message_errors[1],
            self.outage_trials
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// A result together with how long it took; the time is kept apart so the
/// result itself stays reproducible.
#[derive(Clone, Debug)]
pub struct TimedResult {
    pub result: SimResult,
    pub wall_time: Duration,
}

pub fn run_monte_carlo(cfg: &SchemeConfig, trials: usize, master_seed: u64) -> Result<SimResult> {
    run_monte_carlo_with(cfg, trials, master_seed, TrialOptions::default())
}

pub fn run_monte_carlo_with(cfg: &SchemeConfig, trials: usize, master_seed: u64, opts: TrialOptions) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::param("at least one trial is required"));
    }
    let opts = TrialOptions { trace: false, ..opts };
    let outcomes: Vec<TrialOutcome> =
        (0..trials as u64).into_par_iter().map(|i| run_trial(cfg, &mut trial_rng(master_seed, i), opts)).collect::<Result<_>>()?;
    let mut res = SimResult::empty(cfg);
    for t in &outcomes {
        res.absorb(t);
    }
    Ok(res)
}

pub fn run_timed(cfg: &SchemeConfig, trials: usize, master_seed: u64) -> Result<TimedResult> {
    let start = Instant::now();
    let result = run_monte_carlo(cfg, trials, master_seed)?;
    Ok(TimedResult { result, wall_time: start.elapsed() })
}

/// Wilson score interval for `errors / trials` at confidence `level`.
pub fn wilson_interval(errors: usize, trials: usize, level: Rational) -> Result<(f64, f64)> {
    if trials == 0 || errors > trials {
        return Err(Error::param(format!("need 0 <= errors <= trials and trials > 0, got {errors}/{trials}")));
    }
    let level = rational::to_f64(&level);
    if !(0.0..1.0).contains(&level) || level == 0.0 {
        return Err(Error::param(format!("confidence level {level} outside (0, 1)")));
    }
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{perfect_feedback, ChannelParams};
    use crate::rational::frac;
    use crate::scheme::SplitRates;

    #[test]
    fn wilson_examples() {
        let l = frac(95, 100);
        assert_eq!(wilson_interval(0, 100, l).unwrap().0, 0.0);
        assert_eq!(wilson_interval(100, 100, l).unwrap().1, 1.0);
        let (lo, hi) = wilson_interval(10, 100, l).unwrap();
        assert!(lo < 0.1 && 0.1 < hi);
        // Reference values for z = 1.959964.
        assert!((lo - 0.05523).abs() < 1e-4 && (hi - 0.17437).abs() < 1e-4, "{lo} {hi}");
        assert!(wilson_interval(3, 2, l).is_err());
    }

    #[test]
    fn deterministic_and_order_free() {
        let cfg =
            SchemeConfig::new(ChannelParams::symmetric(2, 1), perfect_feedback(), 2, 16, SplitRates::symmetric(frac(3, 4), frac(1, 2)))
                .unwrap();
        let a = run_monte_carlo(&cfg, 24, 9).unwrap();
        let b = run_monte_carlo(&cfg, 24, 9).unwrap();
        assert_eq!(a, b);
        // The same trials run one by one in reverse agree with the pooled run.
        let mut rev: Vec<[bool; 2]> =
            (0..24u64).rev().map(|i| run_trial(&cfg, &mut trial_rng(9, i), TrialOptions::default()).unwrap().message_error).collect();
        rev.reverse();
        assert_eq!(rev, a.per_trial);
        assert_eq!(a.disagreements + a.vbar_mismatches + a.inconsistent, 0);
    }

    #[test]
    fn zero_rate_has_no_errors() {
        let cfg = SchemeConfig::new(ChannelParams::new(2, 1, 2, 1), perfect_feedback(), 2, 8, SplitRates::zero()).unwrap();
        let r = run_monte_carlo(&cfg, 20, 1).unwrap();
        assert_eq!(r.message_errors, [0, 0]);
        assert_eq!(SimResult::csv_header().split(',').count(), r.csv_row().split(',').count());
    }
}
