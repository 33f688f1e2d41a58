//! Compares the closed form with the multi-start ascent oracle on random
//! W-type states and reports the worst disagreement.
//!
//!     cargo run --release --example oracle_check [samples] [seed]

use gme::measure::{lambda_value, sample_unit_orthant};
use gme::solver::{alternating_ascent, OracleConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = OracleConfig::with_seed(seed);
    let mut worst = (0.0f64, [0.0; 4]);
    for _ in 0..samples {
        let p = sample_unit_orthant(&mut rng);
        let (closed, _) = lambda_value(&p);
        let res = alternating_ascent(&p.embed(), &cfg)?;
        let dev = (closed - res.lambda_max_sq).abs();
        if dev > worst.0 {
            worst = (dev, p.coeffs());
        }
    }
    println!("{samples} states, seed {seed}");
    println!("max |closed - oracle| = {:.3e} at {:?}", worst.0, worst.1);
    Ok(())
}
