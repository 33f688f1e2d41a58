//! Coarse map of which closed form applies over the slice a = b with
//! c and d free, printed as a character grid.
//!
//!     cargo run --example regime_map

use gme::measure::{lambda_value, Regime};
use gme::WStateParams;

fn main() {
    let n = 36;
    println!("rows: c from 1 down to 0, columns: d from 0 to 1, a = b");
    println!("Q convex quadrangle, L largest coefficient, - shared");
    for i in (0..=n / 2).rev() {
        let c = i as f64 / (n / 2) as f64;
        let row: String = (0..=n)
            .map(|j| {
                let d = j as f64 / n as f64;
                let rest = 1.0 - c * c - d * d;
                if rest < 0.0 {
                    return ' ';
                }
                let a = (rest / 2.0).sqrt();
                match WStateParams::renormalized(a, a, c, d).map(|p| lambda_value(&p).1) {
                    Ok(Regime::ConvexQuadrangle) => 'Q',
                    Ok(Regime::LargestCoefficient) => 'L',
                    Ok(_) => '-',
                    Err(_) => '?',
                }
            })
            .collect();
        println!("{c:4.2} {row}");
    }
}
