//! Evaluates the scheme's mutual-information bounds as exact expected GF(2)
//! ranks and checks each against its closed form.

use intermittent_ic::channel::{ChannelParams, FeedbackDist};
use intermittent_ic::entropy::{evaluate_scheme_bounds, verify_dominance};
use intermittent_ic::rational::frac;

fn main() {
    let params = ChannelParams::new(3, 1, 2, 2);
    let dist = FeedbackDist::independent(frac(1, 2), frac(1, 3)).unwrap();
    let rep = evaluate_scheme_bounds(&params, &dist).unwrap();
    for row in &rep.rows {
        println!(
            "user {} {:<22} {:<60} = {:<5} closed form {:<5} {}",
            row.user,
            row.constraint,
            row.expression,
            row.computed.to_string(),
            row.closed_form.to_string(),
            if row.matches { "ok" } else { "MISMATCH" }
        );
    }
    println!("final constants {}", serde_json::to_string(&rep.final_constants).unwrap());

    let dom = verify_dominance(&params, &dist).unwrap();
    for u in &dom.users {
        println!("user {}: weighted bound {} dominates: {}", u.user, u.weighted, u.dominated);
    }
}
