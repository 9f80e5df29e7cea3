//! Eliminates the split-rate achievable system and compares it with the
//! outer bound on a small grid.

use intermittent_ic::channel::ChannelParams;
use intermittent_ic::rational::frac;
use intermittent_ic::regions::{inner_system, scheme_constants};
use intermittent_ic::verify::{theorem1_grid, theorem1_point};

fn main() {
    let params = ChannelParams::new(3, 2, 2, 3);
    let p = frac(1, 2);
    let k = scheme_constants(&params, p, p).unwrap();
    println!("split-rate system before elimination:");
    for line in inner_system(&k).describe() {
        println!("  {line}");
    }
    println!("inner == outer: {}", theorem1_point(&params, p, p).unwrap().is_equal());

    let rep = theorem1_grid(2, &[frac(0, 1), frac(1, 3), frac(1, 1)]).unwrap();
    println!("{}", rep.summary());
}
