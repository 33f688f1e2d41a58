//! Random sampling of normalized nonnegative tuples and of the two
//! separating surfaces.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::bisect;
use crate::state::WStateParams;

/// Uniform point on the nonnegative orthant of the unit 3-sphere.
pub fn sample_unit_orthant<R: Rng + ?Sized>(rng: &mut R) -> WStateParams {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| {
            let x: f64 = rng.sample(StandardNormal);
            x.abs()
        });
        if let Ok(p) = WStateParams::from_coeffs(v, true) {
            return p;
        }
    }
}

/// Random point on `r1 r2 r3 = 0`: one factor is pinned to zero by splitting
/// the norm equally between two coefficient pairs.
pub fn sample_diagonal_surface<R: Rng + ?Sized>(rng: &mut R) -> WStateParams {
    let angle = Uniform::new_inclusive(0.0, std::f64::consts::FRAC_PI_2).unwrap();
    let factor = rng.random_range(0..3usize);
    let (t, f) = (angle.sample(rng), angle.sample(rng));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (x, y) = (h * t.cos(), h * t.sin());
    let (z, w) = (h * f.cos(), h * f.sin());
    // r1 = 0 pairs (b, c)|(a, d); r2 = 0 pairs (a, c)|(b, d);
    // r3 = 0 pairs (a, b)|(c, d)
    let coeffs = match factor {
        0 => [z, x, y, w],
        1 => [x, z, y, w],
        _ => [x, y, z, w],
    };
    WStateParams::from_coeffs(coeffs, true).expect("point on the unit sphere")
}

/// Random point on `l² = 1/2 + abcd/l²`, found by bisection along a ray
/// that starts at a basis state and heads into the orthant. Returns `None`
/// when the ray has no bracketed crossing.
pub fn sample_shared_surface<R: Rng + ?Sized>(rng: &mut R) -> Option<WStateParams> {
    let largest = rng.random_range(0..4usize);
    let dir = sample_direction(rng);
    let prod = dir[0] * dir[1] * dir[2];
    let max_dir = dir.iter().cloned().fold(0.0, f64::max);
    // largest stays the largest coefficient while cos t >= max_dir * sin t
    let t_tie = (1.0 / max_dir).atan();
    let gap = |t: f64| {
        let l = t.cos();
        l * l - 0.5 - t.sin().powi(3) * prod / l
    };
    if !(gap(0.0) > 0.0 && gap(t_tie) <= 0.0) {
        return None;
    }
    let (lo, hi) = bisect(gap, 0.0, t_tie);
    let t = 0.5 * (lo + hi);
    let mut coeffs = [0.0; 4];
    let mut rest = dir.iter();
    for (k, slot) in coeffs.iter_mut().enumerate() {
        *slot = if k == largest {
            t.cos()
        } else {
            t.sin() * rest.next().unwrap()
        };
    }
    WStateParams::from_coeffs(coeffs, true).ok()
}

fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| {
            let x: f64 = rng.sample(StandardNormal);
            x.abs()
        });
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}
