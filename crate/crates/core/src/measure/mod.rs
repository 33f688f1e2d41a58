//! Closed-form entanglement eigenvalue `Λ²_max` of W-type states.
//!
//! Parameter space splits into two domains separated by the surface
//! `l² = 1/2 + abcd/l²` (`l` the largest coefficient):
//!
//! * below it `Λ² = 4R_q²`, four times the squared circumradius of the cyclic
//!   convex quadrilateral with sides `(a, b, c, d)`;
//! * above it `Λ² = l²` and the closest product state is the basis state
//!   carrying the largest coefficient.
//!
//! States on `r1 r2 r3 = 0` have the constant `Λ² = 1/2`. The crossed
//! quadrilateral branch only matters for signed coefficients and is exposed
//! separately through [`crossed_branch_lambda`].

mod surface;
mod sweep;

pub use surface::{sample_diagonal_surface, sample_shared_surface, sample_unit_orthant};
pub use sweep::{
    locate_boundary, sweep, transition_rows, BoundaryCrossing, BoundaryKind, Family, SweepPoint,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CircumcircleFailure, GeometryError, MeasureError, StateError};
use crate::geometry::{self, QuadSides};
use crate::state::{BlochVector, Ket, WStateParams};

/// Absolute width of the band around each separating surface inside which a
/// state is reported as shared.
pub const BOUNDARY_EPS: f64 = 1e-10;

/// Smallest admissible x-component of `u`, `v` in the convex construction.
pub const DIRECTION_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    ConvexQuadrangle,
    LargestCoefficient,
    /// On `l² = 1/2 + abcd/l²`; both branches agree.
    SharedConvexLargest,
    /// On `r1 r2 r3 = 0`; `Λ² = 1/2`.
    SharedDiagonal,
    /// Crossed figure, reachable only through signed coefficients.
    CrossedQuadrangle,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ConvexQuadrangle => "ConvexQuadrangle",
            Regime::LargestCoefficient => "LargestCoefficient",
            Regime::SharedConvexLargest => "SharedConvexLargest",
            Regime::SharedDiagonal => "SharedDiagonal",
            Regime::CrossedQuadrangle => "CrossedQuadrangle",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Product state `|α⟩ ⊗ |β⟩ ⊗ |γ⟩` maximizing the overlap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosestProduct {
    /// Bloch vector of qubit A.
    pub u: BlochVector,
    /// Bloch vector of qubit B.
    pub v: BlochVector,
    /// Bloch vector of the reconstructed qubit C.
    pub w: BlochVector,
    pub kets: [Ket; 3],
    /// `|⟨α β γ|ψ⟩|²`.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    pub coeffs: [f64; 4],
    pub lambda_max_sq: f64,
    /// `1 - lambda_max_sq`.
    pub geometric_measure: f64,
    pub regime: Regime,
    pub closest_product: ClosestProduct,
    /// `(λ1, λ2)` of the convex construction when it applies.
    pub lagrange: Option<(f64, f64)>,
}

impl MeasureResult {
    pub fn overlap_residual(&self) -> f64 {
        (self.closest_product.overlap - self.lambda_max_sq).abs()
    }
}

fn sorted_desc(coeffs: [f64; 4]) -> [f64; 4] {
    let mut s = coeffs;
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn sides(coeffs: [f64; 4]) -> QuadSides {
    let [a, b, c, d] = coeffs;
    QuadSides::signed(a, b, c, d).expect("finite coefficients")
}

/// `l² - 1/2 - abcd/l²`: negative in the convex domain, positive in the
/// largest-coefficient domain.
pub fn boundary_gap(params: &WStateParams) -> f64 {
    gap_sorted(sorted_desc(params.coeffs()))
}

fn gap_sorted(s: [f64; 4]) -> f64 {
    let l2 = s[0] * s[0];
    l2 - 0.5 - s[0] * s[1] * s[2] * s[3] / l2
}

fn r_sorted(s: [f64; 4]) -> f64 {
    geometry::sides_r(&sides(s))
}

fn classify_sorted(s: [f64; 4]) -> Regime {
    let gap = gap_sorted(s);
    if gap > BOUNDARY_EPS {
        return Regime::LargestCoefficient;
    }
    // |1/2 - 4R_q²| = |r| / (32 S_q²), so this band keeps the constant within
    // BOUNDARY_EPS of the convex value.
    let area = geometry::convex_area_sq(&sides(s));
    let band = BOUNDARY_EPS * (32.0 * area).clamp(0.0, 1.0);
    if r_sorted(s).abs() <= band {
        return Regime::SharedDiagonal;
    }
    if gap >= -BOUNDARY_EPS {
        return Regime::SharedConvexLargest;
    }
    Regime::ConvexQuadrangle
}

pub fn classify(params: &WStateParams) -> Regime {
    classify_sorted(sorted_desc(params.coeffs()))
}

/// `4R_q²` for a normalized tuple, or `None` when no cyclic convex
/// quadrilateral exists. Ignores the validity domain.
pub fn convex_branch_value(params: &WStateParams) -> Option<f64> {
    convex_value_sorted(sorted_desc(params.coeffs()))
}

fn convex_value_sorted(s: [f64; 4]) -> Option<f64> {
    geometry::convex_circumradius_sq(&sides(s))
        .ok()
        .map(|res| 4.0 * res.radius_sq)
}

fn value_for(regime: Regime, s: [f64; 4]) -> f64 {
    let l2 = s[0] * s[0];
    match regime {
        Regime::LargestCoefficient | Regime::SharedConvexLargest => l2,
        Regime::SharedDiagonal => 0.5,
        // S_q -> 0 leaves the convex domain; fall back to l²
        Regime::ConvexQuadrangle | Regime::CrossedQuadrangle => {
            convex_value_sorted(s).unwrap_or(l2)
        }
    }
}

/// `Λ²_max` and its regime, without the product-state reconstruction.
pub fn lambda_value(params: &WStateParams) -> (f64, Regime) {
    let s = sorted_desc(params.coeffs());
    let regime = classify_sorted(s);
    (value_for(regime, s), regime)
}

/// Lagrange multipliers of the convex branch,
/// `λ1 = 2ω (bc+ad)/(ac+bd)`, `λ2 = 2ω (ac+bd)/(bc+ad)`.
pub fn convex_lagrange(params: &WStateParams) -> Option<(f64, f64)> {
    let [a, b, c, d] = params.coeffs();
    let omega = a * b + d * c;
    let (x, y) = (b * c + a * d, a * c + b * d);
    if x <= 0.0 || y <= 0.0 {
        return None;
    }
    Some((2.0 * omega * x / y, 2.0 * omega * y / x))
}

/// z-components `(u_k, v_k)` of the convex-branch Bloch vectors. Values
/// outside `[-1, 1]` signal that the branch is not realized.
pub fn convex_z_components(params: &WStateParams) -> Option<(f64, f64)> {
    let (l1, l2) = convex_lagrange(params)?;
    let inv = params.invariants();
    let [a, b, c, d] = params.coeffs();
    let denom = 16.0 * geometry::convex_area_sq(&sides([a, b, c, d]));
    if denom <= 0.0 {
        return None;
    }
    Some((
        (l2 * inv.r1 - inv.r2 * inv.r3) / denom,
        (l1 * inv.r2 - inv.r1 * inv.r3) / denom,
    ))
}

/// The four factorizations of `(4ω² - r3²)(1 ± u_k)` and
/// `(4ω² - r3²)(1 ± v_k)`, as `(lhs, rhs)` pairs in the order
/// `1+u_k, 1-u_k, 1+v_k, 1-v_k`. The bracket factors are multiplied through
/// by their coefficient so no division by a vanishing coefficient occurs.
pub fn board_factorizations(params: &WStateParams) -> Option<[(f64, f64); 4]> {
    let (uk, vk) = convex_z_components(params)?;
    let [a, b, c, d] = params.coeffs();
    let denom = 16.0 * geometry::convex_area_sq(&sides([a, b, c, d]));
    let [fa, fb, fc, fd] = board_brackets(params);
    let (x, y) = (b * c + a * d, a * c + b * d);
    Some([
        (denom * (1.0 + uk), 2.0 * fa * fd / x),
        (denom * (1.0 - uk), 2.0 * fb * fc / x),
        (denom * (1.0 + vk), 2.0 * fb * fd / y),
        (denom * (1.0 - vk), 2.0 * fa * fc / y),
    ])
}

/// `x (Σ_{y≠x} y² - x²) + 2 Π_{y≠x} y` for each coefficient `x`; each
/// vanishes exactly where the circumcenter reaches the side `x`.
pub fn board_brackets(params: &WStateParams) -> [f64; 4] {
    let co = params.coeffs();
    let total: f64 = co.iter().map(|x| x * x).sum();
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let x = co[k];
        let others: f64 = (0..4).filter(|&j| j != k).map(|j| co[j]).product();
        *slot = x * (total - 2.0 * x * x) + 2.0 * others;
    }
    out
}

/// Basis product state carrying coefficient `index` of `(a, b, c, d)`.
fn basis_product(params: &WStateParams, index: usize) -> ClosestProduct {
    let idx = WStateParams::SUPPORT[index];
    let bits = [idx >> 2, (idx >> 1) & 1, idx & 1];
    let kets = bits.map(|bit| {
        if bit == 0 {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        }
    });
    let axis = |bit: usize| BlochVector::axis_z(if bit == 0 { 1.0 } else { -1.0 });
    let overlap = params.embed().product_overlap(&kets);
    ClosestProduct {
        u: axis(bits[0]),
        v: axis(bits[1]),
        w: axis(bits[2]),
        kets,
        overlap,
    }
}

fn largest_index(params: &WStateParams) -> usize {
    let co = params.coeffs();
    (0..4).fold(0, |best, k| if co[k] > co[best] { k } else { best })
}

/// Qubit-C state from the normalized conditional state given qubits A, B.
fn complete_product(params: &WStateParams, u: BlochVector, v: BlochVector) -> ClosestProduct {
    let state = params.embed();
    let mut kets = [u.ket(), v.ket(), [Complex64::new(1.0, 0.0); 2]];
    let cond = state.contract_except(2, &kets);
    let norm_sq = cond[0].norm_sqr() + cond[1].norm_sqr();
    let n = norm_sq.sqrt();
    kets[2] = if n > 0.0 {
        [cond[0] / n, cond[1] / n]
    } else {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    };
    ClosestProduct {
        u,
        v,
        w: BlochVector::from_ket(&kets[2]),
        kets,
        overlap: norm_sq,
    }
}

fn convex_product(params: &WStateParams) -> Result<ClosestProduct, MeasureError> {
    let (uk, vk) = convex_z_components(params)
        .ok_or(MeasureError::DegenerateDirection { x_component: 0.0 })?;
    let ux = (1.0 - uk * uk).max(0.0).sqrt();
    let vx = (1.0 - vk * vk).max(0.0).sqrt();
    let x_component = ux.min(vx);
    if x_component < DIRECTION_EPS {
        return Err(MeasureError::DegenerateDirection { x_component });
    }
    Ok(complete_product(
        params,
        BlochVector::new(ux, 0.0, uk),
        BlochVector::new(vx, 0.0, vk),
    ))
}

/// Closest product state. In the convex domain `u`, `v` lie in the xz-plane
/// with nonnegative x-components; in the largest-coefficient domain they are
/// `±k̂`. Qubit C is the normalized conditional state.
pub fn closest_product_state(params: &WStateParams) -> Result<ClosestProduct, MeasureError> {
    match classify(params) {
        Regime::LargestCoefficient | Regime::SharedConvexLargest => {
            Ok(basis_product(params, largest_index(params)))
        }
        Regime::SharedDiagonal if convex_branch_value(params).is_none() => {
            Ok(basis_product(params, largest_index(params)))
        }
        _ => convex_product(params),
    }
}

pub fn lambda_max_sq(params: &WStateParams) -> MeasureResult {
    let (value, regime) = lambda_value(params);
    let convex = matches!(regime, Regime::ConvexQuadrangle | Regime::SharedDiagonal);
    let closest_product = closest_product_state(params)
        .unwrap_or_else(|_| basis_product(params, largest_index(params)));
    let lagrange = if convex && convex_branch_value(params).is_some() {
        convex_lagrange(params)
    } else {
        None
    };
    MeasureResult {
        coeffs: params.coeffs(),
        lambda_max_sq: value,
        geometric_measure: 1.0 - value,
        regime,
        closest_product,
        lagrange,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossedBranch {
    pub lambda_max_sq: f64,
    pub regime: Regime,
}

/// `4R_x²` for signed coefficients (rescaled to unit norm), the crossed
/// quadrilateral branch. With `r = 0` and a vanishing `S_x²` the value is
/// the shared-diagonal limit `1/2`.
///
/// This never applies to nonnegative states away from `r = 0`; it exists to
/// study sign-flipped configurations.
pub fn crossed_branch_lambda(coeffs: [f64; 4]) -> Result<CrossedBranch, MeasureError> {
    let raw = QuadSides::signed(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?;
    let n2 = raw.sum_of_squares();
    if n2 == 0.0 {
        return Err(StateError::ZeroNorm.into());
    }
    let n = n2.sqrt();
    let s = sides(coeffs.map(|x| x / n));
    match geometry::crossed_circumradius_sq(&s) {
        Ok(res) => Ok(CrossedBranch {
            lambda_max_sq: 4.0 * res.radius_sq,
            regime: Regime::CrossedQuadrangle,
        }),
        Err(GeometryError::NoCircumcircle(CircumcircleFailure::CrossedArea))
            if geometry::sides_r(&s).abs() <= BOUNDARY_EPS =>
        {
            Ok(CrossedBranch {
                lambda_max_sq: 0.5,
                regime: Regime::SharedDiagonal,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Bisection on a sign change of `f` over `[lo, hi]`; returns the final
/// bracket.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return (lo, lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return (mid, mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn w(a: f64, b: f64, c: f64, d: f64) -> WStateParams {
        WStateParams::new(a, b, c, d).unwrap()
    }

    #[test]
    fn classify_examples() {
        let t = 1.0 / 3f64.sqrt();
        assert_eq!(classify(&w(t, t, t, 0.0)), Regime::ConvexQuadrangle);
        let a = 1.0 / 7f64.sqrt();
        assert_eq!(
            classify(&w(a, a, a, (4.0f64 / 7.0).sqrt())),
            Regime::SharedConvexLargest
        );
        assert_eq!(classify(&w(0.8, 0.4, 0.4, 0.2)), Regime::LargestCoefficient);
        assert_eq!(classify(&w(0.5, 0.5, 0.5, 0.5)), Regime::SharedDiagonal);
    }

    #[test]
    fn equal_triple_values() {
        let t = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(
            lambda_max_sq(&w(t, t, t, 0.0)).lambda_max_sq,
            4.0 / 9.0,
            epsilon = 1e-15
        );
        assert_eq!(lambda_max_sq(&w(0.5, 0.5, 0.5, 0.5)).lambda_max_sq, 0.5);
        let a = 1.0 / 7f64.sqrt();
        let shared = lambda_max_sq(&w(a, a, a, (4.0f64 / 7.0).sqrt()));
        assert_abs_diff_eq!(shared.lambda_max_sq, 4.0 / 7.0, epsilon = 1e-15);
        let product = lambda_max_sq(&w(0.0, 0.0, 0.0, 1.0));
        assert_eq!(product.lambda_max_sq, 1.0);
        assert_eq!(product.geometric_measure, 0.0);
    }

    #[test]
    fn bell_pair_boundary() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let res = lambda_max_sq(&w(h, h, 0.0, 0.0));
        assert_abs_diff_eq!(res.lambda_max_sq, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(res.closest_product.overlap, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn frozen_oracle_golden() {
        // alternating-ascent value computed independently before the closed
        // form was written: 0.49417003835399537
        let a = (0.91f64 / 3.0).sqrt();
        let res = lambda_max_sq(&w(a, a, a, 0.3));
        assert_eq!(res.regime, Regime::ConvexQuadrangle);
        assert_abs_diff_eq!(res.lambda_max_sq, 0.49417003835399537, epsilon = 1e-12);
    }

    #[test]
    fn lagrange_multipliers_w_state() {
        let t = 1.0 / 3f64.sqrt();
        let (l1, l2) = convex_lagrange(&w(t, t, t, 0.0)).unwrap();
        assert_abs_diff_eq!(l1, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l2, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn product_input_has_unit_overlap() {
        let res = lambda_max_sq(&w(1.0, 0.0, 0.0, 0.0));
        assert_eq!(res.lambda_max_sq, 1.0);
        // r1 = -1: u = -k̂
        assert_eq!(res.closest_product.u, BlochVector::axis_z(-1.0));
        assert_eq!(res.closest_product.v, BlochVector::axis_z(1.0));
        assert_eq!(res.closest_product.overlap, 1.0);
    }

    #[test]
    fn w_state_product_is_symmetric() {
        let t = 1.0 / 3f64.sqrt();
        let p = closest_product_state(&w(t, t, t, 0.0)).unwrap();
        assert_abs_diff_eq!(p.u.x, p.v.x, epsilon = 1e-15);
        assert_abs_diff_eq!(p.u.z, p.v.z, epsilon = 1e-15);
        // qubit C reconstructs the same Bloch vector by symmetry
        assert_abs_diff_eq!(p.w.z, p.u.z, epsilon = 1e-14);
        assert_abs_diff_eq!(p.overlap, 4.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn largest_coefficient_product() {
        let p = w(0.8, 0.4, 0.4, 0.2);
        let res = lambda_max_sq(&p);
        assert_abs_diff_eq!(res.lambda_max_sq, 0.64, epsilon = 1e-15);
        let inv = p.invariants();
        assert_eq!(res.closest_product.u.z, inv.r1.signum());
        assert_eq!(res.closest_product.v.z, inv.r2.signum());
        assert_abs_diff_eq!(res.closest_product.overlap, 0.64, epsilon = 1e-15);
        assert!(res.lagrange.is_none());
    }

    #[test]
    fn degenerate_direction_on_boundary() {
        // symmetric shared point: center on side d, u and v are axis-aligned
        let a = 1.0 / 7f64.sqrt();
        let p = w(a, a, a, (4.0f64 / 7.0).sqrt());
        assert!(matches!(
            convex_product(&p),
            Err(MeasureError::DegenerateDirection { .. })
        ));
        let res = lambda_max_sq(&p);
        assert_abs_diff_eq!(res.closest_product.overlap, 4.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn crossed_branch_examples() {
        let res = crossed_branch_lambda([0.5; 4]).unwrap();
        assert_eq!(res.lambda_max_sq, 0.5);
        assert!(matches!(
            crossed_branch_lambda([0.9, 0.2, 0.2, 0.1]),
            Err(MeasureError::Geometry(GeometryError::NoCircumcircle(
                CircumcircleFailure::CrossedNumerator
            )))
        ));
        let p = WStateParams::renormalized(0.6, 0.5, 0.45, 0.3).unwrap();
        let [a, b, c, d] = p.coeffs();
        let crossed = crossed_branch_lambda([a, b, c, -d]).unwrap();
        assert_eq!(crossed.regime, Regime::CrossedQuadrangle);
        assert_abs_diff_eq!(
            crossed.lambda_max_sq,
            convex_branch_value(&p).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn crossed_equals_convex_on_diagonal_surface() {
        // r1 = 0 with S_x² > 0
        let (t, f) = (0.3f64, 1.1f64);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = w(h * f.cos(), h * t.cos(), h * t.sin(), h * f.sin());
        assert!(p.invariants().r1.abs() < 1e-15);
        let crossed = crossed_branch_lambda(p.coeffs()).unwrap();
        assert_abs_diff_eq!(crossed.lambda_max_sq, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(convex_branch_value(&p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn bisect_finds_root() {
        let (lo, hi) = bisect(|x| x * x - 2.0, 0.0, 2.0);
        assert!(hi - lo < 1e-15);
        assert_abs_diff_eq!(lo, 2f64.sqrt(), epsilon = 1e-15);
        let (lo, hi) = bisect(|x| x * x - 2.0, -0.5, -2.0);
        assert!(lo <= hi && hi - lo < 1e-15);
        assert_abs_diff_eq!(hi, -(2f64.sqrt()), epsilon = 1e-15);
    }
}
