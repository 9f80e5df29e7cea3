//! One end-to-end trial of the block-Markov scheme with its per-block trace.

use intermittent_ic::channel::{perfect_feedback, ChannelParams};
use intermittent_ic::rational::frac;
use intermittent_ic::scheme::{run_trial_seeded, SchemeConfig, SplitRates, TrialOptions};

fn main() {
    let params = ChannelParams::symmetric(2, 1);
    let rates = SplitRates::symmetric(frac(7, 8), frac(7, 16));
    let cfg = SchemeConfig::new(params, perfect_feedback(), 3, 16, rates).unwrap();
    let bb = cfg.budget().unwrap();
    println!(
        "bits per block: private {:?} common {:?} quantizer {:?}; terminal block {} symbols",
        bb.private, bb.common, bb.quant, bb.terminal_len
    );
    let out = run_trial_seeded(&cfg, 5, TrialOptions { genie: false, trace: true }).unwrap();
    println!("message errors {:?}, transmitters agree {}", out.message_error, out.transmitters_agree);
    println!("{}", serde_json::to_string_pretty(&out.trace).unwrap());
}
