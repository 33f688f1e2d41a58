//! States on the two separating surfaces: r1 r2 r3 = 0, where Λ² is always
//! 1/2, and l² = 1/2 + abcd/l², where both closed forms agree.
//!
//!     cargo run --example shared_states

use gme::measure::{
    convex_branch_value, lambda_value, sample_diagonal_surface, sample_shared_surface,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    println!("r1 r2 r3 = 0");
    for _ in 0..5 {
        let p = sample_diagonal_surface(&mut rng);
        let (value, regime) = lambda_value(&p);
        println!(
            "  {:?}  r = {:+.1e}  Λ² = {value:.12}  {regime}",
            p.coeffs(),
            p.invariants().r
        );
    }

    println!("l² = 1/2 + abcd/l²");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut shown = 0;
    for _ in 0..2000 {
        let Some(p) = sample_shared_surface(&mut rng) else {
            continue;
        };
        let (value, _) = lambda_value(&p);
        lo = lo.min(value);
        hi = hi.max(value);
        if shown < 5 {
            shown += 1;
            let l2 = p.invariants().l.powi(2);
            let convex = convex_branch_value(&p).unwrap_or(f64::NAN);
            println!("  {:?}  l² = {l2:.12}  4R_q² = {convex:.12}", p.coeffs());
        }
    }
    println!(
        "  Λ² over samples in [{lo:.6}, {hi:.6}], bounds 1/2 and 4/7 = {:.6}",
        4.0 / 7.0
    );
}
