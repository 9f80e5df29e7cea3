//! The outer bound of a channel at given feedback probabilities, printed as
//! canonical constraints and vertices.
//!
//! Usage: `outer_region [n11 n12 n21 n22 p1 p2]`

use intermittent_ic::channel::ChannelParams;
use intermittent_ic::rational::parse;
use intermittent_ic::regions::{outer_region, perfect_feedback_region};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let args = if args.len() == 6 { args } else { ["3", "2", "2", "3", "1/2", "1/2"].map(String::from).to_vec() };
    let n: Vec<usize> = args[..4].iter().map(|s| s.parse().expect("integer exponent")).collect();
    let params = ChannelParams::new(n[0], n[1], n[2], n[3]);
    let (p1, p2) = (parse(&args[4]).unwrap(), parse(&args[5]).unwrap());

    let region = outer_region(&params, p1, p2).unwrap();
    println!("outer bound at n = {n:?}, p = ({p1}, {p2})");
    for line in region.describe() {
        println!("  {line}");
    }
    for v in region.vertices().unwrap() {
        println!("  vertex ({}, {})", v[0], v[1]);
    }
    println!("symmetric corner {}", region.symmetric_corner().unwrap());

    let full = perfect_feedback_region(&params).unwrap();
    println!("perfect-feedback symmetric corner {}", full.symmetric_corner().unwrap());
}
