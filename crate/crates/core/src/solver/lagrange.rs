//! Stationary points through the Lagrange multipliers.
//!
//! Write `g = Σ σ_j m_j n_jᵀ` (singular value decomposition) and
//! `α_j = m_j·r_A`, `β_j = n_j·r_B`. For `D_j = λ1 λ2 - σ_j² ≠ 0` the
//! stationarity equations solve to
//!
//! ```text
//! u_j = (λ2 α_j + σ_j β_j) / D_j,    v_j = (λ1 β_j + σ_j α_j) / D_j
//! ```
//!
//! in the rotated frames, leaving the two equations `|u|² = 1`, `|v|² = 1`
//! in `(λ1, λ2)`. Any stationary point has `|λ1| = |u·(r_A + g v)| ≤ 2` and
//! likewise for `λ2`, since `|r_A|, |r_B| ≤ 1` and `‖g‖ ≤ 1`, so scanning
//! `[-2, 2]²` finds all of them.
//!
//! When some `D_j` vanishes at a solution the formula above does not apply.
//! This happens for states with `α_j = β_j = 0` on a singular direction
//! (W-type states, GHZ): the component along `m_j` is then free and the
//! points lie on the hyperbola `λ1 λ2 = σ_j²`, which is searched separately.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::residual_with;
use crate::state::{BlochVector, CorrelationData, ThreeQubitPureState};

pub const DEFAULT_GRID_RESOLUTION: usize = 512;

/// Resolvent condition number above which a candidate is discarded.
pub const MAX_CONDITION: f64 = 1e12;
/// Multiplier pairs closer than this are the same point.
pub const DEDUP_DISTANCE: f64 = 1e-6;
pub const MAX_RESIDUAL: f64 = 1e-9;
pub const UNIT_TOLERANCE: f64 = 1e-10;

const BOUND: f64 = 2.0;
/// Extra cells on each side so roots at `|λ| = 2` are bracketed.
const PAD_CELLS: usize = 2;
const KERNEL_EPS: f64 = 1e-12;
const NEWTON_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Resolvent {
    /// `λ1 λ2 I - g gᵀ` invertible at the point.
    Regular,
    /// Point on `λ1 λ2 = σ²` for a singular value whose directions carry no
    /// local Bloch component.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub u: BlochVector,
    pub v: BlochVector,
    /// `¼(1 + u·r_A + v·r_B + uᵀ g v)`.
    pub value: f64,
    pub residual: f64,
    pub resolvent: Resolvent,
}

/// Candidate whose resolvent is (numerically) singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularCandidate {
    pub lambda1: f64,
    pub lambda2: f64,
    pub condition: f64,
    /// Whether the point was recovered on the singular hyperbola.
    pub recovered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryScan {
    /// Sorted by decreasing value.
    pub points: Vec<StationaryPoint>,
    pub singular: Vec<SingularCandidate>,
}

impl StationaryScan {
    pub fn max_value(&self) -> Option<f64> {
        self.points.first().map(|p| p.value)
    }

    pub fn best(&self) -> Option<&StationaryPoint> {
        self.points.first()
    }
}

struct Frame {
    cd: CorrelationData,
    m: Matrix3<f64>,
    n: Matrix3<f64>,
    sigma: Vector3<f64>,
    alpha: Vector3<f64>,
    beta: Vector3<f64>,
}

impl Frame {
    fn new(cd: CorrelationData) -> Self {
        let svd = cd.g.svd(true, true);
        let m = svd.u.expect("requested");
        let n = svd.v_t.expect("requested").transpose();
        let alpha = m.transpose() * cd.r_a;
        let beta = n.transpose() * cd.r_b;
        Self {
            cd,
            m,
            n,
            sigma: svd.singular_values,
            alpha,
            beta,
        }
    }

    fn denominators(&self, l1: f64, l2: f64) -> Vector3<f64> {
        self.sigma.map(|s| l1 * l2 - s * s)
    }

    fn condition(&self, l1: f64, l2: f64) -> f64 {
        let d = self.denominators(l1, l2).abs();
        let (lo, hi) = (d.min(), d.max());
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Rotated `(u, v)` at `(λ1, λ2)`.
    fn resolve(&self, l1: f64, l2: f64) -> (Vector3<f64>, Vector3<f64>) {
        let d = self.denominators(l1, l2);
        let u = Vector3::from_fn(|j, _| (l2 * self.alpha[j] + self.sigma[j] * self.beta[j]) / d[j]);
        let v = Vector3::from_fn(|j, _| (l1 * self.beta[j] + self.sigma[j] * self.alpha[j]) / d[j]);
        (u, v)
    }

    fn equations(&self, l1: f64, l2: f64) -> Vector2<f64> {
        let (u, v) = self.resolve(l1, l2);
        Vector2::new(u.norm_squared() - 1.0, v.norm_squared() - 1.0)
    }

    fn jacobian(&self, l1: f64, l2: f64) -> Matrix2<f64> {
        let d = self.denominators(l1, l2);
        let (u, v) = self.resolve(l1, l2);
        let mut jac = Matrix2::zeros();
        for j in 0..3 {
            let du1 = -l2 * u[j] / d[j];
            let du2 = (self.alpha[j] - l1 * u[j]) / d[j];
            let dv1 = (self.beta[j] - l2 * v[j]) / d[j];
            let dv2 = -l1 * v[j] / d[j];
            jac[(0, 0)] += 2.0 * u[j] * du1;
            jac[(0, 1)] += 2.0 * u[j] * du2;
            jac[(1, 0)] += 2.0 * v[j] * dv1;
            jac[(1, 1)] += 2.0 * v[j] * dv2;
        }
        jac
    }

    /// Damped Newton on `(|u|² - 1, |v|² - 1)`.
    fn polish(&self, start: Vector2<f64>) -> Option<Vector2<f64>> {
        let mut x = start;
        let mut f = self.equations(x[0], x[1]);
        for _ in 0..NEWTON_STEPS {
            if f.norm() < 1e-15 {
                break;
            }
            let step = self.jacobian(x[0], x[1]).lu().solve(&f)?;
            let mut t = 1.0;
            loop {
                let trial = x - t * step;
                let ft = self.equations(trial[0], trial[1]);
                if ft.iter().all(|z| z.is_finite()) && ft.norm() < f.norm() {
                    x = trial;
                    f = ft;
                    break;
                }
                t *= 0.5;
                if t < 1e-6 {
                    return (f.norm() < 1e-12).then_some(x);
                }
            }
        }
        (f.norm() < 1e-12).then_some(x)
    }

    fn point(
        &self,
        u_rot: Vector3<f64>,
        v_rot: Vector3<f64>,
        l1: f64,
        l2: f64,
        resolvent: Resolvent,
    ) -> Option<StationaryPoint> {
        let u = self.m * u_rot;
        let v = self.n * v_rot;
        if (u.norm() - 1.0).abs() > UNIT_TOLERANCE || (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return None;
        }
        let (u, v) = (u.normalize(), v.normalize());
        let residual = residual_with(&self.cd, &u, &v, l1, l2);
        if residual >= MAX_RESIDUAL {
            return None;
        }
        Some(StationaryPoint {
            lambda1: l1,
            lambda2: l2,
            u: u.into(),
            v: v.into(),
            value: self.cd.objective(&u, &v),
            residual,
            resolvent,
        })
    }
}

fn sign_change(values: [f64; 4]) -> bool {
    let pos = values.iter().any(|&x| x >= 0.0);
    let neg = values.iter().any(|&x| x <= 0.0);
    pos && neg
}

fn regular_points(
    frame: &Frame,
    resolution: usize,
    singular: &mut Vec<SingularCandidate>,
) -> Vec<StationaryPoint> {
    let cells = resolution.max(2);
    let h = 2.0 * BOUND / cells as f64;
    let total = cells + 2 * PAD_CELLS;
    let lo = -BOUND - PAD_CELLS as f64 * h;
    let coord = |i: usize| lo + i as f64 * h;
    let values: Vec<Vector2<f64>> = (0..=total)
        .into_par_iter()
        .flat_map_iter(|i| (0..=total).map(move |j| frame.equations(coord(i), coord(j))))
        .collect();
    let at = |i: usize, j: usize| values[i * (total + 1) + j];

    let candidates: Vec<(Option<Vector2<f64>>, Vector2<f64>)> = (0..total)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..total).filter_map(move |j| {
                let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
                if corners
                    .iter()
                    .any(|c| !c[0].is_finite() || !c[1].is_finite())
                {
                    return None;
                }
                if !sign_change(corners.map(|c| c[0])) || !sign_change(corners.map(|c| c[1])) {
                    return None;
                }
                let center = Vector2::new(coord(i) + 0.5 * h, coord(j) + 0.5 * h);
                Some((frame.polish(center), center))
            })
        })
        .collect();

    let mut points = Vec::new();
    for (root, _) in candidates {
        let Some(x) = root else { continue };
        let (l1, l2) = (x[0], x[1]);
        let cond = frame.condition(l1, l2);
        if cond > MAX_CONDITION {
            singular.push(SingularCandidate {
                lambda1: l1,
                lambda2: l2,
                condition: cond,
                recovered: false,
            });
            continue;
        }
        let (u, v) = frame.resolve(l1, l2);
        if let Some(p) = frame.point(u, v, l1, l2, Resolvent::Regular) {
            points.push(p);
        }
    }
    points
}

/// Points on `λ1 λ2 = σ_k²` for singular directions with `α_k = β_k = 0`.
fn singular_points(
    frame: &Frame,
    resolution: usize,
    singular: &mut Vec<SingularCandidate>,
) -> Vec<StationaryPoint> {
    let mut points = Vec::new();
    let mut seen: Vec<f64> = Vec::new();
    for k in 0..3 {
        let s = frame.sigma[k];
        if s <= KERNEL_EPS || seen.iter().any(|&t| (t - s).abs() < KERNEL_EPS) {
            continue;
        }
        let group: Vec<usize> = (0..3)
            .filter(|&j| (frame.sigma[j] - s).abs() < KERNEL_EPS)
            .collect();
        if group
            .iter()
            .any(|&j| frame.alpha[j].abs() > KERNEL_EPS || frame.beta[j].abs() > KERNEL_EPS)
        {
            continue;
        }
        seen.push(s);
        // particular part from the remaining directions
        let partial = |l1: f64| {
            let l2 = s * s / l1;
            let mut u = Vector3::zeros();
            let mut v = Vector3::zeros();
            for j in (0..3).filter(|j| !group.contains(j)) {
                let d = s * s - frame.sigma[j] * frame.sigma[j];
                u[j] = (l2 * frame.alpha[j] + frame.sigma[j] * frame.beta[j]) / d;
                v[j] = (l1 * frame.beta[j] + frame.sigma[j] * frame.alpha[j]) / d;
            }
            (u, v)
        };
        let h_fn = |l1: f64| {
            let (u, v) = partial(l1);
            (l1 * l1 / (s * s)) * (1.0 - u.norm_squared()) - (1.0 - v.norm_squared())
        };
        // |λ2| ≤ 2 bounds |λ1| from below
        let inner = (s * s / BOUND).min(BOUND);
        let samples = 4 * resolution.max(2);
        let mut roots = Vec::new();
        for sign in [-1.0, 1.0] {
            let grid: Vec<f64> = (0..=samples)
                .map(|i| sign * (inner + (BOUND - inner) * i as f64 / samples as f64))
                .collect();
            for w in grid.windows(2) {
                let (fa, fb) = (h_fn(w[0]), h_fn(w[1]));
                if fa == 0.0 {
                    roots.push(w[0]);
                } else if fa * fb < 0.0 {
                    let (lo, hi) = crate::measure::bisect(h_fn, w[0], w[1]);
                    roots.push(0.5 * (lo + hi));
                }
            }
            if h_fn(*grid.last().unwrap()) == 0.0 {
                roots.push(*grid.last().unwrap());
            }
        }
        for l1 in roots {
            let l2 = s * s / l1;
            let (u_p, v_p) = partial(l1);
            let free = 1.0 - u_p.norm_squared();
            if free < -UNIT_TOLERANCE {
                continue;
            }
            let t = free.max(0.0).sqrt();
            let signs: &[f64] = if t > 0.0 { &[1.0, -1.0] } else { &[1.0] };
            let before = points.len();
            for &sg in signs {
                let mut u = u_p;
                let mut v = v_p;
                u[group[0]] = sg * t;
                v[group[0]] = sg * t * l1 / s;
                if let Some(p) = frame.point(u, v, l1, l2, Resolvent::Singular) {
                    points.push(p);
                }
            }
            singular.push(SingularCandidate {
                lambda1: l1,
                lambda2: l2,
                condition: frame.condition(l1, l2),
                recovered: points.len() > before,
            });
        }
    }
    points
}

fn same_point(p: &StationaryPoint, q: &StationaryPoint) -> bool {
    let dl = (p.lambda1 - q.lambda1).hypot(p.lambda2 - q.lambda2);
    let du =
        (p.u.as_vector() - q.u.as_vector()).norm() + (p.v.as_vector() - q.v.as_vector()).norm();
    dl < DEDUP_DISTANCE && du < DEDUP_DISTANCE
}

/// Enumerates the stationary points of the reduced overlap by scanning
/// `(λ1, λ2)` on a `grid_resolution × grid_resolution` grid over `[-2, 2]²`,
/// polishing every cell where both equations change sign, and searching the
/// singular hyperbolas described in the module docs.
///
/// Regular candidates whose resolvent condition number exceeds
/// [`MAX_CONDITION`] are dropped and listed in [`StationaryScan::singular`].
pub fn lagrange_stationary_points(
    state: &ThreeQubitPureState,
    grid_resolution: usize,
) -> StationaryScan {
    let frame = Frame::new(state.correlation_data());
    let mut singular = Vec::new();
    let mut found = regular_points(&frame, grid_resolution, &mut singular);
    found.extend(singular_points(&frame, grid_resolution, &mut singular));
    found.sort_by(|p, q| {
        q.value
            .total_cmp(&p.value)
            .then(p.lambda1.total_cmp(&q.lambda1))
    });
    let mut points: Vec<StationaryPoint> = Vec::new();
    for p in found {
        if !points.iter().any(|q| same_point(&p, q)) {
            points.push(p);
        }
    }
    StationaryScan { points, singular }
}
