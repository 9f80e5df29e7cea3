//! Error rates inside and outside the capacity region as the block length
//! grows, with paired seeds.

use intermittent_ic::channel::{perfect_feedback, ChannelParams};
use intermittent_ic::rational::{frac, int};
use intermittent_ic::scheme::{symmetric_rate_point, SchemeConfig};
use intermittent_ic::sim::{run_timed, wilson_interval};

fn main() {
    let params = ChannelParams::symmetric(2, 1);
    let share = frac(2, 3);
    let inside = symmetric_rate_point(&params, int(1), frac(9, 10), share, 16, false).unwrap();
    let outside = symmetric_rate_point(&params, int(1), frac(6, 5), share, 16, true).unwrap();
    let trials = 100;
    println!("N,point,trials,errors,low95,high95,seconds");
    for n in [16, 32, 64] {
        for (name, rates) in [("inside", inside), ("outside", outside)] {
            let cfg = SchemeConfig::new(params, perfect_feedback(), 4, n, rates).unwrap();
            let t = run_timed(&cfg, trials, 2024).unwrap();
            let errors = t.result.any_errors();
            let (lo, hi) = wilson_interval(errors, trials, frac(95, 100)).unwrap();
            println!("{n},{name},{trials},{errors},{lo:.3},{hi:.3},{:.2}", t.wall_time.as_secs_f64());
        }
    }
}
