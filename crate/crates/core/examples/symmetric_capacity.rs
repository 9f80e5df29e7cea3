//! Normalised symmetric capacity and the feedback threshold p* across
//! interference levels.

use intermittent_ic::rational::{frac, to_f64};
use intermittent_ic::regions::{p_star, sym_capacity};

fn main() {
    let n = 12;
    let ps = [frac(0, 1), frac(1, 4), frac(1, 2), frac(1, 1)];
    print!("{:>6}", "alpha");
    for p in &ps {
        print!("{:>10}", format!("p={p}"));
    }
    println!("{:>8}", "p*");
    for k in 1..=36 {
        let alpha = frac(k, 12);
        print!("{:>6}", alpha.to_string());
        for &p in &ps {
            let c = sym_capacity(n, alpha, p).unwrap() / frac(n as i64, 1);
            print!("{:>10.4}", to_f64(&c));
        }
        println!("{:>8}", p_star(alpha).unwrap().to_string());
    }
}
