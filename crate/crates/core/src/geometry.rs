//! Cyclic quadrilaterals with sides `(a, b, c, d)`: the convex figure and the
//! crossed figure obtained by letting two sides intersect.
//!
//! All quantities are homogeneous polynomials in the sides, so no
//! normalization is assumed here. Signs are never clamped: a negative squared
//! area or numerator is how nonexistence is reported.

use serde::Serialize;

use crate::error::{CircumcircleFailure, GeometryError};

/// Relative degeneracy threshold; denominators of degree `k` are compared
/// against `DEGENERACY * scale^k` with `scale` the (absolute) semiperimeter.
pub const DEGENERACY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSides {
    sides: [f64; 4],
}

impl QuadSides {
    /// Nonnegative side lengths.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        let sides = [a, b, c, d];
        for (index, &value) in sides.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(GeometryError::InvalidSide { index, value });
            }
        }
        Ok(Self { sides })
    }

    /// Signed entries, used by the crossed-figure research path where a sign
    /// flip maps convex configurations onto crossed ones.
    pub fn signed(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        let sides = [a, b, c, d];
        if let Some(index) = sides.iter().position(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidSide {
                index,
                value: sides[index],
            });
        }
        Ok(Self { sides })
    }

    pub fn sides(&self) -> [f64; 4] {
        self.sides
    }

    pub fn semiperimeter(&self) -> f64 {
        self.sides.iter().sum::<f64>() / 2.0
    }

    fn scale(&self) -> f64 {
        self.sides.iter().map(|x| x.abs()).sum::<f64>() / 2.0
    }

    fn threshold(&self, degree: i32) -> f64 {
        DEGENERACY * self.scale().powi(degree)
    }

    /// Copy with the sign of side `index` flipped.
    pub fn flip_sign(&self, index: usize) -> Self {
        let mut sides = self.sides;
        sides[index] = -sides[index];
        Self { sides }
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.sides.iter().map(|x| x * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadKind {
    Convex,
    Crossed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircumradiusResult {
    pub radius_sq: f64,
    /// `S_q^2` or `S_x^2`, depending on `kind`.
    pub area_sq: f64,
    pub kind: QuadKind,
}

/// `S_q^2 = (p-a)(p-b)(p-c)(p-d)`; negative when no cyclic convex
/// quadrilateral exists.
pub fn convex_area_sq(sides: &QuadSides) -> f64 {
    let p = sides.semiperimeter();
    sides.sides.iter().map(|x| p - x).product()
}

/// `(ab+cd)(ac+bd)(ad+bc)`.
pub fn convex_numerator(sides: &QuadSides) -> f64 {
    let [a, b, c, d] = sides.sides;
    (a * b + c * d) * (a * c + b * d) * (a * d + b * c)
}

pub fn convex_circumradius_sq(sides: &QuadSides) -> Result<CircumradiusResult, GeometryError> {
    let area_sq = convex_area_sq(sides);
    if area_sq <= sides.threshold(4) {
        return Err(GeometryError::NoCircumcircle(
            CircumcircleFailure::ConvexArea,
        ));
    }
    Ok(CircumradiusResult {
        radius_sq: convex_numerator(sides) / (16.0 * area_sq),
        area_sq,
        kind: QuadKind::Convex,
    })
}

/// `S_x^2 = p(p-c-d)(p-b-d)(p-a-d)`, the squared difference of the two
/// triangle areas cut off by the diagonal. Reported with its sign.
pub fn crossed_area_sq(sides: &QuadSides) -> f64 {
    let [a, b, c, d] = sides.sides;
    let p = sides.semiperimeter();
    p * (p - c - d) * (p - b - d) * (p - a - d)
}

/// `(ac-bd)(bc-ad)(ab-cd)`.
pub fn crossed_numerator(sides: &QuadSides) -> f64 {
    let [a, b, c, d] = sides.sides;
    (a * c - b * d) * (b * c - a * d) * (a * b - c * d)
}

/// Circumradius of the crossed figure. Fails when the numerator is negative
/// (checked first) or when `S_x^2` is not positive.
pub fn crossed_circumradius_sq(sides: &QuadSides) -> Result<CircumradiusResult, GeometryError> {
    let numerator = crossed_numerator(sides);
    if numerator < -sides.threshold(6) {
        return Err(GeometryError::NoCircumcircle(
            CircumcircleFailure::CrossedNumerator,
        ));
    }
    let area_sq = crossed_area_sq(sides);
    if area_sq <= sides.threshold(4) {
        return Err(GeometryError::NoCircumcircle(
            CircumcircleFailure::CrossedArea,
        ));
    }
    Ok(CircumradiusResult {
        radius_sq: numerator.max(0.0) / (16.0 * area_sq),
        area_sq,
        kind: QuadKind::Crossed,
    })
}

/// Squared diagonal `AC^2 = (ac-bd)(bc-ad)/(ab-cd)` of the crossed figure
/// with `AB=a, BC=b, CD=c, DA=d`. A negative value means no real crossed
/// configuration.
pub fn crossed_diagonal_sq(sides: &QuadSides) -> Result<f64, GeometryError> {
    let [a, b, c, d] = sides.sides;
    let denom = a * b - c * d;
    if denom.abs() <= sides.threshold(2) {
        return Err(GeometryError::DegenerateDiagonal);
    }
    Ok((a * c - b * d) * (b * c - a * d) / denom)
}

/// `4R_q^2 - 4R_x^2`, evaluated from the two radii.
pub fn circumradius_difference(sides: &QuadSides) -> Result<f64, GeometryError> {
    let convex = convex_circumradius_sq(sides)?;
    let crossed = crossed_circumradius_sq(sides)?;
    Ok(4.0 * convex.radius_sq - 4.0 * crossed.radius_sq)
}

/// The same difference through `(r/32) abcd / (S_q^2 S_x^2)`, where
/// `r = r1 r2 r3` is built from the sides read as state coefficients.
/// Follows from `S_q^2 - S_x^2 = abcd` and
/// `4R^2 = (a²+b²+c²+d²)/2 - r/(32 S^2)` for either figure.
pub fn circumradius_difference_identity(sides: &QuadSides) -> Result<f64, GeometryError> {
    let sq = convex_area_sq(sides);
    if sq <= sides.threshold(4) {
        return Err(GeometryError::NoCircumcircle(
            CircumcircleFailure::ConvexArea,
        ));
    }
    let sx = crossed_area_sq(sides);
    if sx <= sides.threshold(4) {
        return Err(GeometryError::NoCircumcircle(
            CircumcircleFailure::CrossedArea,
        ));
    }
    let [a, b, c, d] = sides.sides;
    Ok(sides_r(sides) / 32.0 * (a * b * c * d) / (sq * sx))
}

/// `r1 r2 r3` with `r1 = b²+c²-a²-d²`, `r2 = a²+c²-b²-d²`, `r3 = a²+b²-c²-d²`.
pub fn sides_r(sides: &QuadSides) -> f64 {
    let [a, b, c, d] = sides.sides.map(|x| x * x);
    (b + c - a - d) * (a + c - b - d) * (a + b - c - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(a: f64, b: f64, c: f64, d: f64) -> QuadSides {
        QuadSides::new(a, b, c, d).unwrap()
    }

    #[test]
    fn convex_area_examples() {
        assert_eq!(convex_area_sq(&q(1.0, 1.0, 1.0, 1.0)), 1.0);
        assert_eq!(convex_area_sq(&q(3.0, 0.0, 0.0, 1.0)), -4.0);
        assert_eq!(convex_area_sq(&q(0.5, 0.5, 0.5, 0.5)), 1.0 / 16.0);
    }

    #[test]
    fn unit_square_circumradius() {
        let r = convex_circumradius_sq(&q(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.radius_sq, 0.5);
        assert_eq!(r.kind, QuadKind::Convex);
    }

    #[test]
    fn triangle_limit() {
        let t = 1.0 / 3f64.sqrt();
        let r = convex_circumradius_sq(&q(t, t, t, 0.0)).unwrap();
        assert_abs_diff_eq!(4.0 * r.radius_sq, 4.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn frozen_unnormalized_radius() {
        // direct evaluation in an independent script, see tests/oracle.rs for
        // the alternating-ascent cross-check
        let r = convex_circumradius_sq(&q(0.55076, 0.55076, 0.55076, 0.3)).unwrap();
        assert_abs_diff_eq!(r.radius_sq, 0.12354368435455373, epsilon = 1e-15);
    }

    #[test]
    fn convex_circumradius_rejects_nonexistent() {
        assert_eq!(
            convex_circumradius_sq(&q(3.0, 0.0, 0.0, 1.0)),
            Err(GeometryError::NoCircumcircle(
                CircumcircleFailure::ConvexArea
            ))
        );
    }

    #[test]
    fn crossed_area_examples() {
        assert_eq!(crossed_area_sq(&q(1.0, 1.0, 1.0, 1.0)), 0.0);
        assert_eq!(crossed_area_sq(&q(2.0, 2.0, 1.0, 1.0)), 0.0);
        // (1, 2, 3, 1): p = 3.5, 3.5 * (-0.5) * (0.5) * (1.5) < 0, kept negative
        let s = crossed_area_sq(&q(1.0, 2.0, 3.0, 1.0));
        assert_eq!(s, 3.5 * -0.5 * 0.5 * 1.5);
    }

    #[test]
    fn crossed_numerator_failure() {
        // l = 0.9, s = 0.1: l²s² = 0.0081 > abcd = 0.0036
        let sides = q(0.9, 0.2, 0.2, 0.1);
        assert_eq!(
            crossed_circumradius_sq(&sides),
            Err(GeometryError::NoCircumcircle(
                CircumcircleFailure::CrossedNumerator
            ))
        );
        assert_eq!(
            crossed_circumradius_sq(&q(0.5, 0.5, 0.5, 0.5)),
            Err(GeometryError::NoCircumcircle(
                CircumcircleFailure::CrossedArea
            ))
        );
    }

    #[test]
    fn sign_flip_maps_convex_to_crossed() {
        let sides = q(0.6, 0.5, 0.45, 0.3);
        let convex = convex_circumradius_sq(&sides).unwrap();
        let crossed = crossed_circumradius_sq(&sides.flip_sign(3)).unwrap();
        assert_abs_diff_eq!(convex.radius_sq, crossed.radius_sq, epsilon = 1e-14);
        assert_abs_diff_eq!(convex.area_sq, crossed.area_sq, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_examples() {
        assert_eq!(crossed_diagonal_sq(&q(2.0, 1.0, 1.0, 1.0)).unwrap(), -1.0);
        assert_eq!(
            crossed_diagonal_sq(&q(1.0, 2.0, 2.0, 1.0)),
            Err(GeometryError::DegenerateDiagonal)
        );
        let sides = q(0.7, 0.3, 0.5, 0.2);
        let [a, b, c, d] = sides.sides();
        let ac = crossed_diagonal_sq(&sides).unwrap();
        assert_abs_diff_eq!(
            ac * (a * b - c * d),
            (a * c - b * d) * (b * c - a * d),
            epsilon = 1e-15
        );
    }

    #[test]
    fn difference_identity_and_sign() {
        let sides = QuadSides::new(0.6, 0.5, 0.45, 0.3).unwrap();
        let direct = circumradius_difference(&sides).unwrap();
        let identity = circumradius_difference_identity(&sides).unwrap();
        assert_abs_diff_eq!(direct, identity, epsilon = 1e-12);
        assert!(sides_r(&sides) > 0.0 && direct > 0.0);
    }

    #[test]
    fn half_r_prefactor_overstates_difference_by_sixteen() {
        // the difference is sometimes quoted with prefactor r/2; the radii
        // themselves fix it at r/32
        let mut checked = 0;
        for sides in [
            q(0.6, 0.5, 0.45, 0.3),
            q(0.7, 0.4, 0.45, 0.35),
            q(0.55, 0.52, 0.5, 0.42),
        ] {
            let Ok(direct) = circumradius_difference(&sides) else {
                continue;
            };
            checked += 1;
            let [a, b, c, d] = sides.sides();
            let half_r = sides_r(&sides) / 2.0 * (a * b * c * d)
                / (convex_area_sq(&sides) * crossed_area_sq(&sides));
            assert_abs_diff_eq!(half_r / direct, 16.0, epsilon = 1e-10);
        }
        assert!(checked >= 2);
    }

    #[test]
    fn rejects_bad_sides() {
        assert!(QuadSides::new(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(QuadSides::signed(f64::INFINITY, 1.0, 1.0, 1.0).is_err());
        assert!(QuadSides::signed(-1.0, 1.0, 1.0, 1.0).is_ok());
    }
}
