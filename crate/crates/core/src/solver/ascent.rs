use nalgebra::{SMatrix, SVector, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::SolverError;
use crate::state::{BlochVector, CorrelationData, Ket, ThreeQubitPureState};

/// Agreement required between the Bloch objective and the direct overlap of
/// the reconstructed product state.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop once the objective changes by less than this between sweeps.
    pub convergence_threshold: f64,
    pub rng_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 10_000,
            convergence_threshold: 1e-13,
            rng_seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.restarts == 0 {
            return Err(SolverError::InvalidConfig("restarts must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig(
                "max_iterations must be at least 1",
            ));
        }
        if !(self.convergence_threshold > 0.0 && self.convergence_threshold.is_finite()) {
            return Err(SolverError::InvalidConfig(
                "convergence_threshold must be positive and finite",
            ));
        }
        Ok(())
    }

    /// Generator for one restart, keyed by `(seed, restart)` so the draw does
    /// not depend on which thread runs it.
    fn restart_rng(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(restart as u64);
        rng
    }
}

/// Stationarity residual a Newton-polished pair must reach.
const POLISH_RESIDUAL: f64 = 1e-12;
const POLISH_STEPS: usize = 80;
/// Pairs further than this from stationarity are not polished.
const POLISH_START: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestartStatus {
    Converged {
        iterations: usize,
    },
    /// The sweeps hit the iteration limit (typically at a degenerate
    /// maximum, where they converge sublinearly) but the Newton polish
    /// reached a stationary point.
    Polished {
        iterations: usize,
    },
    IterationLimit,
}

impl RestartStatus {
    pub fn is_converged(&self) -> bool {
        !matches!(self, RestartStatus::IterationLimit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub value: f64,
    pub u: BlochVector,
    pub v: BlochVector,
    pub status: RestartStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AscentResult {
    pub lambda_max_sq: f64,
    pub u: BlochVector,
    pub v: BlochVector,
    /// Bloch vector of the conditional state of qubit C.
    pub w: BlochVector,
    pub kets: [Ket; 3],
    /// `|⟨α β γ|ψ⟩|²` of `kets`, evaluated on the full state.
    pub direct_overlap: f64,
    pub best_restart: usize,
    pub restarts: Vec<RestartOutcome>,
}

impl AscentResult {
    pub fn converged_restarts(&self) -> usize {
        self.restarts
            .iter()
            .filter(|r| r.status.is_converged())
            .count()
    }
}

fn best_response(target: Vector3<f64>, current: Vector3<f64>) -> Vector3<f64> {
    let n = target.norm();
    if n > 0.0 {
        target / n
    } else {
        current
    }
}

/// One sweep `u ← r_A + g v`, `v ← r_B + gᵀ u` (each normalized). Neither
/// step can lower the objective.
fn sweep(cd: &CorrelationData, u: &mut Vector3<f64>, v: &mut Vector3<f64>) {
    *u = best_response(cd.r_a + cd.g * *v, *u);
    *v = best_response(cd.r_b + cd.g.transpose() * *u, *v);
}

type Unknowns = SVector<f64, 8>;

fn stationarity_system(cd: &CorrelationData, x: &Unknowns) -> (Unknowns, SMatrix<f64, 8, 8>) {
    let u = x.fixed_rows::<3>(0).into_owned();
    let v = x.fixed_rows::<3>(3).into_owned();
    let (l1, l2) = (x[6], x[7]);
    let gt = cd.g.transpose();
    let mut f = Unknowns::zeros();
    f.fixed_rows_mut::<3>(0)
        .copy_from(&(cd.r_a + cd.g * v - l1 * u));
    f.fixed_rows_mut::<3>(3)
        .copy_from(&(cd.r_b + gt * u - l2 * v));
    f[6] = 0.5 * (u.norm_squared() - 1.0);
    f[7] = 0.5 * (v.norm_squared() - 1.0);
    let mut jac = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..3 {
        jac[(i, i)] = -l1;
        jac[(3 + i, 3 + i)] = -l2;
        jac[(i, 6)] = -u[i];
        jac[(3 + i, 7)] = -v[i];
        jac[(6, i)] = u[i];
        jac[(7, 3 + i)] = v[i];
        for j in 0..3 {
            jac[(i, 3 + j)] = cd.g[(i, j)];
            jac[(3 + i, j)] = gt[(i, j)];
        }
    }
    (f, jac)
}

/// Newton on `r_A + g v = λ1 u`, `r_B + gᵀ u = λ2 v`, `|u| = |v| = 1`
/// started from a nearly stationary pair. Returns the polished pair only if
/// it is stationary and does not lower the objective.
fn newton_polish(
    cd: &CorrelationData,
    u: Vector3<f64>,
    v: Vector3<f64>,
) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let (l1, l2) = super::multipliers(cd, &u, &v);
    if super::residual_with(cd, &u, &v, l1, l2) > POLISH_START {
        return None;
    }
    let mut x = Unknowns::zeros();
    x.fixed_rows_mut::<3>(0).copy_from(&u);
    x.fixed_rows_mut::<3>(3).copy_from(&v);
    x[6] = l1;
    x[7] = l2;
    for _ in 0..POLISH_STEPS {
        let (f, jac) = stationarity_system(cd, &x);
        if f.norm() < 1e-15 {
            break;
        }
        let Some(step) = jac.lu().solve(&f) else {
            break;
        };
        x -= step;
    }
    let pu = x.fixed_rows::<3>(0).into_owned().normalize();
    let pv = x.fixed_rows::<3>(3).into_owned().normalize();
    let (l1, l2) = super::multipliers(cd, &pu, &pv);
    let stationary = super::residual_with(cd, &pu, &pv, l1, l2) < POLISH_RESIDUAL;
    let not_lower = cd.objective(&pu, &pv) >= cd.objective(&u, &v) - 1e-15;
    (stationary && not_lower).then_some((pu, pv))
}

fn run_restart(cd: &CorrelationData, config: &OracleConfig, restart: usize) -> RestartOutcome {
    let mut rng = config.restart_rng(restart);
    let mut u = Vector3::from(UnitSphere.sample(&mut rng));
    let mut v = Vector3::from(UnitSphere.sample(&mut rng));
    let mut value = cd.objective(&u, &v);
    let mut status = RestartStatus::IterationLimit;
    for iteration in 1..=config.max_iterations {
        sweep(cd, &mut u, &mut v);
        let next = cd.objective(&u, &v);
        let change = (next - value).abs();
        value = next;
        if change < config.convergence_threshold {
            status = RestartStatus::Converged {
                iterations: iteration,
            };
            break;
        }
    }
    if let Some((pu, pv)) = newton_polish(cd, u, v) {
        (u, v) = (pu, pv);
        value = cd.objective(&u, &v);
        if status == RestartStatus::IterationLimit {
            status = RestartStatus::Polished {
                iterations: config.max_iterations,
            };
        }
    }
    RestartOutcome {
        value,
        u: u.into(),
        v: v.into(),
        status,
    }
}

/// Objective values along `steps` sweeps started from `(u, v)`; the first
/// entry is the starting value.
pub fn ascent_trace(
    state: &ThreeQubitPureState,
    u: Vector3<f64>,
    v: Vector3<f64>,
    steps: usize,
) -> Vec<f64> {
    let cd = state.correlation_data();
    let (mut u, mut v) = (u.normalize(), v.normalize());
    let mut trace = vec![cd.objective(&u, &v)];
    for _ in 0..steps {
        sweep(&cd, &mut u, &mut v);
        trace.push(cd.objective(&u, &v));
    }
    trace
}

fn normalize_ket(ket: Ket) -> Ket {
    let n = (ket[0].norm_sqr() + ket[1].norm_sqr()).sqrt();
    if n > 0.0 {
        [ket[0] / n, ket[1] / n]
    } else {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }
}

fn overlap_amplitude(state: &ThreeQubitPureState, kets: &[Ket; 3]) -> Complex64 {
    let partial = state.contract_except(2, kets);
    kets[2][0].conj() * partial[0] + kets[2][1].conj() * partial[1]
}

/// Multi-start maximization of the product-state overlap.
///
/// Restarts run in parallel; the best value wins, ties going to the lowest
/// restart index, so the result is identical for a given seed regardless of
/// scheduling. Restarts that hit `max_iterations` are reported in
/// [`AscentResult::restarts`]; the call fails only when none converged.
pub fn alternating_ascent(
    state: &ThreeQubitPureState,
    config: &OracleConfig,
) -> Result<AscentResult, SolverError> {
    config.validate()?;
    let cd = state.correlation_data();
    let restarts: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|k| run_restart(&cd, config, k))
        .collect();

    let mut best: Option<usize> = None;
    for (k, outcome) in restarts.iter().enumerate() {
        if !outcome.status.is_converged() {
            continue;
        }
        if best.is_none_or(|b| outcome.value > restarts[b].value) {
            best = Some(k);
        }
    }
    let best_restart = best.ok_or(SolverError::NonConvergence {
        max_iterations: config.max_iterations,
    })?;
    let winner = restarts[best_restart];

    let (alpha, beta) = (winner.u.ket(), winner.v.ket());
    let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let gamma = normalize_ket(state.contract_except(2, &[alpha, beta, zero]));
    let kets = [alpha, beta, gamma];
    let direct_overlap = overlap_amplitude(state, &kets).norm_sqr();
    if (direct_overlap - winner.value).abs() > CROSS_CHECK_TOLERANCE {
        return Err(SolverError::CrossCheckMismatch {
            bloch: winner.value,
            direct: direct_overlap,
        });
    }
    Ok(AscentResult {
        lambda_max_sq: winner.value,
        u: winner.u,
        v: winner.v,
        w: BlochVector::from_ket(&gamma),
        kets,
        direct_overlap,
        best_restart,
        restarts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullStateResult {
    pub lambda_max_sq: f64,
    pub kets: [Ket; 3],
    pub best_restart: usize,
    pub converged: usize,
}

/// Same search carried out on the full state: each qubit in turn is replaced
/// by its normalized conditional state given the other two. Independent of
/// the reduced AB data, so it serves as a check on it.
pub fn full_state_ascent(
    state: &ThreeQubitPureState,
    config: &OracleConfig,
) -> Result<FullStateResult, SolverError> {
    config.validate()?;
    let runs: Vec<(f64, [Ket; 3], bool)> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = config.restart_rng(k);
            let mut kets: [Ket; 3] =
                std::array::from_fn(|_| BlochVector::from(UnitSphere.sample(&mut rng)).ket());
            let mut value = overlap_amplitude(state, &kets).norm_sqr();
            for _ in 0..config.max_iterations {
                for q in 0..3 {
                    kets[q] = normalize_ket(state.contract_except(q, &kets));
                }
                let next = overlap_amplitude(state, &kets).norm_sqr();
                let change = (next - value).abs();
                value = next;
                if change < config.convergence_threshold {
                    return (value, kets, true);
                }
            }
            (value, kets, false)
        })
        .collect();

    let converged = runs.iter().filter(|r| r.2).count();
    let mut best: Option<usize> = None;
    for (k, run) in runs.iter().enumerate() {
        if run.2 && best.is_none_or(|b| run.0 > runs[b].0) {
            best = Some(k);
        }
    }
    let best_restart = best.ok_or(SolverError::NonConvergence {
        max_iterations: config.max_iterations,
    })?;
    Ok(FullStateResult {
        lambda_max_sq: runs[best_restart].0,
        kets: runs[best_restart].1,
        best_restart,
        converged,
    })
}
