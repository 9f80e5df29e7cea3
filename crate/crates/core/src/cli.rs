//! The `ldic` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::channel::{ChannelFile, ChannelParams};
use crate::error::{Error, Result};
use crate::rational::{self, frac, Rational};
use crate::regions::{inner_region, outer_region, p_star, scheme_constants, sym_capacity, RateRegion, RegionComparison};
use crate::scheme::{run_trial, SchemeConfigFile, TrialOptions};
use crate::sim::{run_timed, trial_rng, wilson_interval, SimResult};
use crate::verify::{self, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "ldic", version, about = "Capacity regions and QMF simulation for the linear deterministic IC with intermittent feedback")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,
    /// Master seed for simulation.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outer bound, eliminated achievable region, or their comparison.
    Region {
        #[arg(value_enum)]
        kind: RegionKind,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Symmetric capacity C_sym for (n, alpha n, alpha n, n).
    Symcap {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rat)]
        alpha: Rational,
        #[arg(long, value_parser = rat)]
        p: Rational,
    },
    /// Feedback threshold p* of the symmetric setting.
    Pstar {
        #[arg(long, value_parser = rat)]
        alpha: Rational,
    },
    /// Run an invariant suite over a parameter grid.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Comma-separated probabilities.
        #[arg(long, value_parser = rat_list, default_value = "0,1/4,1/2,3/4,1")]
        pgrid: RatList,
        /// n for the closed-forms suite.
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// Symmetric capacity and p* over an (alpha, p) grid.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rat_list)]
        alphas: RatList,
        #[arg(long, value_parser = rat_list)]
        ps: RatList,
    },
    /// Monte Carlo of the block-Markov scheme.
    Simulate {
        /// Scheme config JSON.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Dump the trace of trial 0 as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Give decoders the true quantization indices.
        #[arg(long)]
        genie: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegionKind {
    Outer,
    Inner,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theorem1Grid,
    AppendixA,
    Fact1,
    EntropyBounds,
    Collapse,
    ClosedForms,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel JSON; overrides the inline flags.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub n11: usize,
    #[arg(long, default_value_t = 0)]
    pub n12: usize,
    #[arg(long, default_value_t = 0)]
    pub n21: usize,
    #[arg(long, default_value_t = 0)]
    pub n22: usize,
    #[arg(long, value_parser = rat, default_value = "0")]
    pub p1: Rational,
    #[arg(long, value_parser = rat, default_value = "0")]
    pub p2: Rational,
}

impl ChannelArgs {
    fn resolve(&self) -> Result<(ChannelParams, Rational, Rational)> {
        match &self.channel {
            Some(path) => {
                let f = ChannelFile::load(path)?;
                let d = f.dist()?;
                Ok((f.params(), d.p1(), d.p2()))
            }
            None => Ok((ChannelParams::new(self.n11, self.n12, self.n21, self.n22), self.p1, self.p2)),
        }
    }
}

pub type RatList = Vec<Rational>;

fn rat(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn rat_list(s: &str) -> std::result::Result<RatList, String> {
    s.split(',').map(rat).collect()
}

/// Failure that maps to an exit code.
enum Fail {
    Usage(String),
    Other(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Parse { .. } | Error::Json(_) => Fail::Usage(e.to_string()),
            other => Fail::Other(other.to_string()),
        }
    }
}

fn dec(x: &Rational) -> String {
    format!("{:.6}", rational::to_f64(x))
}

fn region_human(name: &str, r: &RateRegion) -> String {
    let mut s = format!("{name} region\n");
    for line in r.describe() {
        s.push_str(&format!("  {line}\n"));
    }
    if let Ok(vs) = r.vertices() {
        let pts: Vec<String> = vs.iter().map(|v| format!("({}, {})", v[0], v[1])).collect();
        s.push_str(&format!("  vertices: {}\n", pts.join(" ")));
    }
    s
}

fn region_csv(r: &RateRegion) -> String {
    let mut s = format!("{},bound\n", r.variables().join(","));
    for c in r.constraints() {
        let cells: Vec<String> = c.coeffs.iter().map(rational::format).collect();
        s.push_str(&format!("{},{}\n", cells.join(","), rational::format(&c.bound)));
    }
    s
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn cmd_region(fmt: Format, kind: RegionKind, ch: &ChannelArgs) -> std::result::Result<(String, bool), Fail> {
    let (params, p1, p2) = ch.resolve()?;
    let outer = outer_region(&params, p1, p2)?;
    let inner = inner_region(&scheme_constants(&params, p1, p2)?)?;
    let single = |name: &str, r: &RateRegion| match fmt {
        Format::Json => pretty(&r.to_json()),
        Format::Csv => region_csv(r),
        Format::Human => region_human(name, r),
    };
    Ok(match kind {
        RegionKind::Outer => (single("outer", &outer), true),
        RegionKind::Inner => (single("inner", &inner), true),
        RegionKind::Compare => {
            let cmp = inner.compare(&outer)?;
            let (witness, in_first) = match &cmp {
                RegionComparison::Equal => (None, None),
                RegionComparison::Different { witness, in_first } => (Some(witness.clone()), Some(*in_first)),
            };
            let witness_s = witness.as_ref().map(|w| w.iter().map(rational::format).collect::<Vec<_>>());
            let text = match fmt {
                Format::Json => pretty(&json!({
                    "equal": cmp.is_equal(),
                    "witness": witness_s,
                    "witness_in": in_first.map(|f| if f { "inner" } else { "outer" }),
                    "inner": inner.to_json(),
                    "outer": outer.to_json(),
                })),
                Format::Csv => format!(
                    "equal,witness_r1,witness_r2\n{},{}\n",
                    cmp.is_equal(),
                    witness_s.map(|w| w.join(",")).unwrap_or_else(|| ",".to_string())
                ),
                Format::Human => match &witness_s {
                    None => "inner and outer regions are equal\n".to_string(),
                    Some(w) => format!(
                        "regions differ: ({}, {}) lies only in the {} region\n{}{}",
                        w[0],
                        w[1],
                        if in_first == Some(true) { "inner" } else { "outer" },
                        region_human("inner", &inner),
                        region_human("outer", &outer)
                    ),
                },
            };
            (text, cmp.is_equal())
        }
    })
}

fn scalar(fmt: Format, name: &str, fields: &[(&str, String)], value: &Rational) -> String {
    match fmt {
        Format::Json => {
            let mut m = serde_json::Map::new();
            for (k, v) in fields {
                m.insert(k.to_string(), json!(v));
            }
            m.insert(name.to_string(), json!(rational::format(value)));
            m.insert("decimal".to_string(), json!(dec(value)));
            pretty(&m)
        }
        Format::Csv => {
            let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let vals: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
            format!("{},{name}\n{},{}\n", keys.join(","), vals.join(","), rational::format(value))
        }
        Format::Human => format!("{name} = {} ({})\n", value, dec(value)),
    }
}

fn suite_report(fmt: Format, rep: &SuiteReport) -> String {
    match fmt {
        Format::Json => pretty(rep),
        Format::Csv => {
            let mut s = "suite,failure\n".to_string();
            for f in &rep.failures {
                s.push_str(&format!("{},\"{}\"\n", rep.suite, f.replace('"', "'")));
            }
            s
        }
        Format::Human => {
            let mut s = format!("{}\n", rep.summary());
            for f in &rep.failures {
                s.push_str(&format!("  {f}\n"));
            }
            s
        }
    }
}

fn cmd_verify(fmt: Format, suite: Suite, nmax: usize, pgrid: &[Rational], n: usize) -> std::result::Result<(String, bool), Fail> {
    if nmax > 6 {
        eprintln!("warning: nmax = {nmax} makes the grid large");
    }
    let rep = match suite {
        Suite::Theorem1Grid => verify::theorem1_grid(nmax, pgrid)?,
        Suite::Fact1 => verify::fact1_grid(nmax, pgrid)?,
        Suite::Collapse => verify::collapse_grid(nmax)?,
        Suite::AppendixA => verify::appendix_a_grid(nmax, frac(1, 2), frac(1, 2))?,
        Suite::EntropyBounds => verify::entropy_bounds_grid(nmax, pgrid)?,
        Suite::ClosedForms => verify::closed_forms(n, pgrid)?,
    };
    Ok((suite_report(fmt, &rep), rep.passes()))
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(with = "rational::serde_str")]
    alpha: Rational,
    #[serde(with = "rational::serde_str")]
    p: Rational,
    #[serde(with = "rational::serde_str")]
    csym: Rational,
    #[serde(with = "rational::serde_str")]
    pstar: Rational,
}

fn cmd_sweep(fmt: Format, n: usize, alphas: &[Rational], ps: &[Rational]) -> std::result::Result<String, Fail> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        for &p in ps {
            rows.push(SweepRow { alpha, p, csym: sym_capacity(n, alpha, p)?, pstar: p_star(alpha)? });
        }
    }
    Ok(match fmt {
        Format::Json => pretty(&rows),
        Format::Csv | Format::Human => {
            let mut s = "alpha,p,csym,pstar\n".to_string();
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.alpha, r.p, r.csym, r.pstar));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct SimReport<'a> {
    result: &'a SimResult,
    /// 95% Wilson intervals of the per-user message error rate.
    wilson95: [(f64, f64); 2],
    #[serde(with = "rational::serde_str")]
    rate_loss_factor: Rational,
}

fn cmd_simulate(
    fmt: Format,
    seed: u64,
    config: &PathBuf,
    trials: usize,
    trace: Option<&PathBuf>,
    genie: bool,
) -> std::result::Result<String, Fail> {
    let cfg = SchemeConfigFile::from_json(&std::fs::read_to_string(config).map_err(Error::from)?)?.to_config()?;
    if trials == 0 {
        return Err(Fail::Usage("at least one trial is required".to_string()));
    }
    let timed = if genie {
        let start = std::time::Instant::now();
        let result = crate::sim::run_monte_carlo_with(&cfg, trials, seed, TrialOptions { genie: true, trace: false })?;
        crate::sim::TimedResult { result, wall_time: start.elapsed() }
    } else {
        run_timed(&cfg, trials, seed)?
    };
    if let Some(path) = trace {
        let out = run_trial(&cfg, &mut trial_rng(seed, 0), TrialOptions { genie, trace: true })?;
        std::fs::write(path, pretty(&out.trace)).map_err(Error::from)?;
    }
    let res = &timed.result;
    let level = frac(95, 100);
    let wilson = [wilson_interval(res.message_errors[0], trials, level)?, wilson_interval(res.message_errors[1], trials, level)?];
    let loss = cfg.rate_loss_factor()?;
    Ok(match fmt {
        Format::Json => pretty(&SimReport { result: res, wilson95: wilson, rate_loss_factor: loss }),
        Format::Csv => format!("{}\n{}\n", SimResult::csv_header(), res.csv_row()),
        Format::Human => {
            let mut s = format!(
                "{} trials, B = {}, N = {}, rates R1p={} R1c={} R2p={} R2c={}\n",
                res.trials, res.blocks, res.block_len, res.rates.r1p, res.rates.r1c, res.rates.r2p, res.rates.r2c
            );
            for (u, (lo, hi)) in wilson.iter().enumerate() {
                s.push_str(&format!(
                    "  user {}: {} message errors, rate {:.4}, 95% CI [{lo:.4}, {hi:.4}]\n",
                    u + 1,
                    res.message_errors[u],
                    res.error_rate(u + 1),
                ));
            }
            s.push_str(&format!(
                "  outage trials {}, inconsistent systems {}, rate loss factor {}\n",
                res.outage_trials, res.inconsistent, loss
            ));
            if let Some(path) = trace {
                s.push_str(&format!("  trace written to {}\n", path.display()));
            }
            s.push_str(&format!("  wall time {:.2?}\n", timed.wall_time));
            s
        }
    })
}

fn dispatch(cli: &Cli) -> std::result::Result<(String, bool), Fail> {
    let fmt = cli.format;
    match &cli.command {
        Command::Region { kind, channel } => cmd_region(fmt, *kind, channel),
        Command::Symcap { n, alpha, p } => {
            let c = sym_capacity(*n, *alpha, *p)?;
            let fields = [("n", n.to_string()), ("alpha", rational::format(alpha)), ("p", rational::format(p))];
            Ok((scalar(fmt, "csym", &fields, &c), true))
        }
        Command::Pstar { alpha } => {
            let v = p_star(*alpha)?;
            Ok((scalar(fmt, "pstar", &[("alpha", rational::format(alpha))], &v), true))
        }
        Command::Verify { suite, nmax, pgrid, n } => {
            if pgrid.iter().any(|p| *p < Rational::from_integer(0) || *p > Rational::one()) {
                return Err(Fail::Usage("probabilities must lie in [0, 1]".to_string()));
            }
            cmd_verify(fmt, *suite, *nmax, pgrid, *n)
        }
        Command::Sweep { n, alphas, ps } => Ok((cmd_sweep(fmt, *n, alphas, ps)?, true)),
        Command::Simulate { config, trials, trace, genie } => {
            Ok((cmd_simulate(fmt, cli.seed, config, *trials, trace.as_ref(), *genie)?, true))
        }
    }
}

/// Parses `args` and runs the command, writing results to `stdout` or `--out`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (text, ok) = match dispatch(&cli) {
        Ok(r) => r,
        Err(Fail::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Fail::Other(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_FAILED;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILED;
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
