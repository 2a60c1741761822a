//! Weighted Poincare inequality on closed-form and random test functions.

use std::sync::Arc;

use bumpflow::analysis::{poincare_batch, poincare_check, random_gaussian_case, PoincareCase};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bumpflow::Result<()> {
    let r = poincare_check(&PoincareCase::constant(1.0, 3.0))?;
    println!("g = 1, l = 3: {:.9} <= {:.9}", r.lhs, r.rhs);
    let decaying = PoincareCase::new(
        0.0,
        None,
        4.0,
        Arc::new(|s: f64| s * (-s).exp()),
        Arc::new(|s: f64| (1.0 - s) * (-s).exp()),
    );
    let r = poincare_check(&decaying)?;
    println!("g = s exp(-s), l = 4: {:.12} <= {:.12}", r.lhs, r.rhs);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for l in [2.5, 3.0, 4.0, 6.0] {
        let cases: Vec<_> = (0..25).map(|_| random_gaussian_case(&mut rng, l)).collect();
        let results = poincare_batch(&cases)?;
        let worst = results.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
        let held = results.iter().filter(|r| r.holds).count();
        println!("l = {l}: {held}/25 hold, largest lhs/rhs = {worst:.4}");
    }
    Ok(())
}
