//! Continual release of a bounded stream with the Binary Mechanism.
//!
//!     cargo run --example binary_mechanism -- [eps_prime] [length]

use dprl::mechanisms::{bm_sensitivity_audit, tree_depth, BinaryMechanismCounter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dprl::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps_prime: f64 = args.next().map_or(1.0, |s| s.parse().expect("eps_prime"));
    let length: u64 = args.next().map_or(16, |s| s.parse().expect("length"));

    let mut data = ChaCha8Rng::seed_from_u64(0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counter = BinaryMechanismCounter::new(length, eps_prime)?;
    println!(
        "capacity {length}, tree depth {}, eps' = {eps_prime}",
        tree_depth(length)
    );
    println!(
        "{:>4} {:>6} {:>10} {:>10}  nodes in release",
        "t", "x_t", "true", "released"
    );
    for _ in 0..length {
        let x = if data.gen_bool(0.5) { 1.0 } else { 0.0 };
        counter.append(x, &mut rng)?;
        println!(
            "{:>4} {:>6} {:>10} {:>10.3}  {:?}",
            counter.steps(),
            x,
            counter.exact_prefix_for_audit(),
            counter.release()?,
            counter.release_cover()
        );
    }

    let worst = (1..=length)
        .map(|k| bm_sensitivity_audit(length, k))
        .collect::<dprl::Result<Vec<_>>>()?;
    println!("noisy nodes touched per position: {worst:?}");
    println!(
        "error bound at beta = 0.01: {:.2}",
        BinaryMechanismCounter::max_error_bound(eps_prime, length, 0.01)
    );
    Ok(())
}
