//! One symbol through the deterministic channel, then through the
//! intermittent feedback links.

use intermittent_ic::channel::{feedback, sample_states, transmit, ChannelParams, FeedbackDist};
use intermittent_ic::gf2::Gf2Vector;
use intermittent_ic::rational::frac;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits(v: &Gf2Vector) -> String {
    v.iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn main() {
    let params = ChannelParams::new(3, 2, 1, 2);
    let x1 = Gf2Vector::from_bits(&[1, 0, 1]);
    let x2 = Gf2Vector::from_bits(&[1, 1, 0]);
    let out = transmit(&x1, &x2, &params).unwrap();
    println!("n = (3, 2, 1, 2), levels listed top first");
    println!("x1 = {}  x2 = {}", bits(&x1), bits(&x2));
    println!("y1 = {}  y2 = {}", bits(&out.y1), bits(&out.y2));
    println!("v1 = {}  v2 = {}", bits(&out.v1), bits(&out.v2));

    let dist = FeedbackDist::independent(frac(1, 2), frac(3, 4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in sample_states(&dist, 6, &mut rng) {
        let f = feedback(&out.y1, s.s1);
        let seen = f.value().map_or("erased".to_string(), bits);
        println!("s = ({}, {}): Tx1 sees {seen}", u8::from(s.s1), u8::from(s.s2));
    }
}
