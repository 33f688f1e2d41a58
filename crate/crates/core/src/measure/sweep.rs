use rayon::prelude::*;
use serde::Serialize;

use super::{bisect, convex_branch_value, lambda_value, Regime};
use crate::error::MeasureError;
use crate::state::WStateParams;

const NAMES: [char; 4] = ['a', 'b', 'c', 'd'];

/// One-parameter curve through the W-type parameter space.
///
/// Grammar: comma-separated equality chains over `{a, b, c, d}` and numeric
/// literals (`"a=b=c"`, `"b=c,d=0"`), one free parameter swept over a range,
/// and exactly one remaining group of tied coefficients fixed by
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    spec: String,
    /// Group id of each coefficient.
    group: [usize; 4],
    /// Constant value of each group, if any.
    constant: Vec<Option<f64>>,
    param_group: usize,
    free_group: usize,
    pub lo: f64,
    pub hi: f64,
}

fn family_err(msg: impl Into<String>) -> MeasureError {
    MeasureError::Family(msg.into())
}

fn name_index(token: &str) -> Option<usize> {
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(ch), None) => NAMES.iter().position(|&n| n == ch),
        _ => None,
    }
}

impl Family {
    pub fn parse(spec: &str, param: &str, range: (f64, f64)) -> Result<Self, MeasureError> {
        let (lo, hi) = range;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(family_err(format!("bad range {lo}:{hi}")));
        }
        let param = name_index(param.trim())
            .ok_or_else(|| family_err(format!("unknown parameter {param:?}")))?;

        // union-find over the four coefficients
        let mut parent = [0, 1, 2, 3];
        fn root(parent: &mut [usize; 4], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut literals: Vec<(usize, f64)> = Vec::new();
        for chain in spec.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            let mut members = Vec::new();
            let mut value = None;
            for token in chain.split('=').map(str::trim) {
                if let Some(idx) = name_index(token) {
                    members.push(idx);
                } else if let Ok(v) = token.parse::<f64>() {
                    if value.replace(v).is_some() {
                        return Err(family_err(format!("two literals in {chain:?}")));
                    }
                } else {
                    return Err(family_err(format!("bad token {token:?} in {chain:?}")));
                }
            }
            let Some(&first) = members.first() else {
                return Err(family_err(format!("no coefficient in {chain:?}")));
            };
            if members.len() < 2 && value.is_none() {
                return Err(family_err(format!("chain {chain:?} constrains nothing")));
            }
            for &m in &members[1..] {
                let (ra, rb) = (root(&mut parent, first), root(&mut parent, m));
                parent[rb] = ra;
            }
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(family_err(format!("literal {v} must be nonnegative")));
                }
                literals.push((first, v));
            }
        }

        let mut roots: Vec<usize> = Vec::new();
        let mut group = [0; 4];
        for (k, slot) in group.iter_mut().enumerate() {
            let r = root(&mut parent, k);
            *slot = roots.iter().position(|&x| x == r).unwrap_or_else(|| {
                roots.push(r);
                roots.len() - 1
            });
        }
        let mut constant = vec![None; roots.len()];
        for (member, v) in literals {
            let g = group[member];
            if constant[g].is_some_and(|old| old != v) {
                return Err(family_err("conflicting literals"));
            }
            constant[g] = Some(v);
        }
        let param_group = group[param];
        if constant[param_group].is_some() {
            return Err(family_err("free parameter is pinned by a literal"));
        }
        let unknown: Vec<usize> = (0..roots.len())
            .filter(|&g| g != param_group && constant[g].is_none())
            .collect();
        match unknown.len() {
            1 => {}
            0 => {
                return Err(family_err(
                    "over-determined: nothing left for normalization",
                ))
            }
            n => {
                return Err(family_err(format!(
                    "under-determined: {n} independent coefficient groups remain"
                )))
            }
        }
        Ok(Self {
            spec: spec.to_string(),
            group,
            constant,
            param_group,
            free_group: unknown[0],
            lo,
            hi,
        })
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn param_name(&self) -> char {
        NAMES[(0..4).find(|&k| self.group[k] == self.param_group).unwrap()]
    }

    /// Normalized coefficients at parameter value `t`.
    pub fn params_at(&self, t: f64) -> Result<WStateParams, MeasureError> {
        let mut values = self.constant.clone();
        values[self.param_group] = Some(t);
        let mut fixed = 0.0;
        let mut free_count = 0.0;
        for g in self.group {
            match values[g] {
                Some(v) if g != self.free_group => fixed += v * v,
                _ => free_count += 1.0,
            }
        }
        let rest = 1.0 - fixed;
        if rest < -1e-12 {
            return Err(family_err(format!(
                "no normalized state at {}={t}",
                self.param_name()
            )));
        }
        values[self.free_group] = Some((rest.max(0.0) / free_count).sqrt());
        let coeffs = self.group.map(|g| values[g].unwrap());
        Ok(WStateParams::from_coeffs(coeffs, false)?)
    }

    /// Evenly spaced grid of `steps` values over the range.
    pub fn grid(&self, steps: usize) -> Vec<f64> {
        match steps {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.hi
                    } else {
                        self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub coeffs: [f64; 4],
    pub lambda_max_sq: f64,
    pub regime: Regime,
    /// `r1 r2 r3`.
    pub r: f64,
    /// Regime label or sign of `r` differs from the previous row.
    pub transition: bool,
}

pub fn sweep(family: &Family, steps: usize) -> Result<Vec<SweepPoint>, MeasureError> {
    if steps == 0 {
        return Err(family_err("steps must be at least 1"));
    }
    let mut points = family
        .grid(steps)
        .into_par_iter()
        .map(|t| {
            let params = family.params_at(t)?;
            let (lambda_max_sq, regime) = lambda_value(&params);
            Ok(SweepPoint {
                param: t,
                coeffs: params.coeffs(),
                lambda_max_sq,
                regime,
                r: params.invariants().r,
                transition: false,
            })
        })
        .collect::<Result<Vec<_>, MeasureError>>()?;
    for i in transition_rows(&points) {
        points[i].transition = true;
    }
    Ok(points)
}

/// Rows whose regime label or `r` sign differs from the row before.
pub fn transition_rows(points: &[SweepPoint]) -> Vec<usize> {
    (1..points.len())
        .filter(|&i| {
            let (prev, cur) = (&points[i - 1], &points[i]);
            prev.regime != cur.regime || prev.r * cur.r < 0.0
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    /// `l² = 1/2 + abcd/l²`.
    ConvexLargest,
    /// `r1 r2 r3 = 0`.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCrossing {
    pub kind: BoundaryKind,
    pub location: f64,
    /// Branch formula of the left-hand domain, evaluated at the boundary.
    pub left: f64,
    /// Branch formula of the right-hand domain, evaluated at the boundary.
    pub right: f64,
}

impl BoundaryCrossing {
    pub fn jump(&self) -> f64 {
        (self.left - self.right).abs()
    }
}

/// Refines a separating surface crossed between parameter values `t0 < t1`
/// by bisection and evaluates both adjacent branch formulas there.
pub fn locate_boundary(
    family: &Family,
    t0: f64,
    t1: f64,
) -> Result<Option<BoundaryCrossing>, MeasureError> {
    let gap = |t: f64| family.params_at(t).map(|p| super::boundary_gap(&p));
    let r = |t: f64| family.params_at(t).map(|p| p.invariants().r);
    let (g0, g1) = (gap(t0)?, gap(t1)?);
    let (r0, r1) = (r(t0)?, r(t1)?);

    let eval = |t: f64| family.params_at(t).expect("bracket stays admissible");
    if g0 * g1 <= 0.0 && (g0 != 0.0 || g1 != 0.0) {
        let (lo, hi) = bisect(|t| super::boundary_gap(&eval(t)), t0, t1);
        let location = 0.5 * (lo + hi);
        let p = eval(location);
        let largest = p.invariants().l.powi(2);
        let convex = convex_branch_value(&p).unwrap_or(largest);
        let (left, right) = if g0 < g1 {
            (convex, largest)
        } else {
            (largest, convex)
        };
        return Ok(Some(BoundaryCrossing {
            kind: BoundaryKind::ConvexLargest,
            location,
            left,
            right,
        }));
    }
    if r0 * r1 <= 0.0 && (r0 != 0.0 || r1 != 0.0) {
        let (lo, hi) = bisect(|t| eval(t).invariants().r, t0, t1);
        let value = |t: f64| convex_branch_value(&eval(t)).unwrap_or(0.5);
        return Ok(Some(BoundaryCrossing {
            kind: BoundaryKind::Diagonal,
            location: 0.5 * (lo + hi),
            left: value(lo),
            right: value(hi),
        }));
    }
    Ok(None)
}
