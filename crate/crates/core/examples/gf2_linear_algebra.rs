//! Rank, solving and uniqueness checks over GF(2).

use intermittent_ic::gf2::{Gf2Matrix, Gf2Vector, Solution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let a = Gf2Matrix::from_bits(3, 4, &[1, 1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0]).unwrap();
    println!("A is {} with rank {}", a.shape(), a.rank());

    let b = Gf2Vector::from_bits(&[1, 0, 1]);
    match a.solve_all(&b).unwrap() {
        Solution::Inconsistent => println!("A x = b has no solution"),
        Solution::Affine(sol) => {
            println!("particular solution {:?}", sol.particular.iter().map(u8::from).collect::<Vec<_>>());
            println!("solution space has dimension {}", sol.dimension());
            println!("x3 determined: {}", sol.is_unique_on(&[3]));
            println!("x0 determined: {}", sol.is_unique_on(&[0]));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = Gf2Matrix::random(64, 64, &mut rng);
    println!("random 64x64 rank {}", r.rank());
}
