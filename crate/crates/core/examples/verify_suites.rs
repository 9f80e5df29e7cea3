//! Runs every invariant suite on a reduced grid.

use intermittent_ic::rational::frac;
use intermittent_ic::verify::{appendix_a_grid, closed_forms, collapse_grid, entropy_bounds_grid, fact1_grid, quarter_grid, theorem1_grid};

fn main() {
    let pg = quarter_grid();
    let reports = [
        theorem1_grid(2, &pg).unwrap(),
        fact1_grid(3, &pg).unwrap(),
        collapse_grid(3).unwrap(),
        appendix_a_grid(2, frac(1, 2), frac(1, 2)).unwrap(),
        entropy_bounds_grid(2, &pg).unwrap(),
        closed_forms(12, &pg).unwrap(),
    ];
    for r in &reports {
        println!("{}", r.summary());
    }
    std::process::exit(if reports.iter().all(|r| r.passes()) { 0 } else { 1 });
}
