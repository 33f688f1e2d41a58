//! Three-qubit pure states, W-type coefficient tuples, and the reduced
//! two-qubit data (Bloch vectors and correlation matrix) the closed forms
//! are written in.
//!
//! Amplitudes are stored in a flat array indexed by `q_A * 4 + q_B * 2 + q_C`,
//! and Pauli matrices follow the convention `σ_z |0⟩ = +|0⟩`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::StateError;

/// Normalization slack accepted by the strict constructors.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Single-qubit state vector `(⟨0|φ⟩, ⟨1|φ⟩)`.
pub type Ket = [Complex64; 2];

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

const PAULI: [Mat2; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]],
];

/// Basis index of `|q_A q_B q_C⟩`.
#[inline]
pub const fn basis_index(qa: usize, qb: usize, qc: usize) -> usize {
    qa * 4 + qb * 2 + qc
}

/// Real 3-vector describing a single-qubit state; unit length for pure states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", from = "[f64; 3]")]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// `±k̂`, the Bloch vector of `|0⟩` (`+`) or `|1⟩` (`-`).
    pub const fn axis_z(sign: f64) -> Self {
        Self::new(0.0, 0.0, sign)
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_ket(ket: &Ket) -> Self {
        let n = ket[0].norm_sqr() + ket[1].norm_sqr();
        let cross = ket[0].conj() * ket[1] / n;
        Self::new(
            2.0 * cross.re,
            2.0 * cross.im,
            (ket[0].norm_sqr() - ket[1].norm_sqr()) / n,
        )
    }

    /// Pure-state ket with this Bloch vector. The `|0⟩` amplitude is real and
    /// nonnegative; the vector is normalized first.
    pub fn ket(&self) -> Ket {
        let v = self.as_vector();
        let n = v.norm();
        let (x, y, z) = if n > 0.0 {
            (v.x / n, v.y / n, v.z / n)
        } else {
            (0.0, 0.0, 1.0)
        };
        let up = ((1.0 + z) / 2.0).max(0.0).sqrt();
        let down = ((1.0 - z) / 2.0).max(0.0).sqrt();
        let transverse = x.hypot(y);
        let phase = if transverse > 0.0 {
            Complex64::new(x / transverse, y / transverse)
        } else {
            ONE
        };
        [Complex64::new(up, 0.0), phase * down]
    }
}

impl From<Vector3<f64>> for BlochVector {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        [v.x, v.y, v.z]
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Nonnegative real coefficients of `a|100⟩ + b|010⟩ + c|001⟩ + d|111⟩`,
/// normalized to unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WStateParams {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl WStateParams {
    /// Accepts coefficients whose squared norm is within [`NORM_TOLERANCE`]
    /// of one; the residual rounding is divided out.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, StateError> {
        Self::from_coeffs([a, b, c, d], false)
    }

    /// Rescales any nonnegative, nonzero tuple onto the unit sphere.
    pub fn renormalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self, StateError> {
        Self::from_coeffs([a, b, c, d], true)
    }

    pub fn from_coeffs(coeffs: [f64; 4], renormalize: bool) -> Result<Self, StateError> {
        for (index, &value) in coeffs.iter().enumerate() {
            if !value.is_finite() {
                return Err(StateError::NonFinite { index });
            }
            if value < 0.0 {
                return Err(StateError::Negative { index, value });
            }
        }
        let norm_sq: f64 = coeffs.iter().map(|x| x * x).sum();
        if norm_sq == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        if !renormalize && (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized {
                norm_sq,
                tolerance: NORM_TOLERANCE,
            });
        }
        let n = norm_sq.sqrt();
        let [a, b, c, d] = if n == 1.0 {
            coeffs
        } else {
            coeffs.map(|x| x / n)
        };
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Basis index carrying each coefficient, in `(a, b, c, d)` order.
    pub const SUPPORT: [usize; 4] = [
        basis_index(1, 0, 0),
        basis_index(0, 1, 0),
        basis_index(0, 0, 1),
        basis_index(1, 1, 1),
    ];

    pub fn embed(&self) -> ThreeQubitPureState {
        embed_w_state(self)
    }

    pub fn invariants(&self) -> ReducedInvariants {
        reduced_invariants(self)
    }
}

/// Eight complex amplitudes of a normalized three-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitPureState {
    amplitudes: [Complex64; 8],
}

impl ThreeQubitPureState {
    /// Strict constructor; see [`WStateParams::new`] for the policy.
    pub fn new(amplitudes: [Complex64; 8]) -> Result<Self, StateError> {
        Self::build(amplitudes, false)
    }

    pub fn normalized(amplitudes: [Complex64; 8]) -> Result<Self, StateError> {
        Self::build(amplitudes, true)
    }

    fn build(amplitudes: [Complex64; 8], renormalize: bool) -> Result<Self, StateError> {
        if let Some(index) = amplitudes.iter().position(|z| !z.is_finite()) {
            return Err(StateError::NonFinite { index });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        if !renormalize && (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized {
                norm_sq,
                tolerance: NORM_TOLERANCE,
            });
        }
        let n = norm_sq.sqrt();
        Ok(Self {
            amplitudes: amplitudes.map(|z| z / n),
        })
    }

    pub fn basis(index: usize) -> Self {
        let mut amplitudes = [ZERO; 8];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    /// `(|000⟩ + |111⟩)/√2`.
    pub fn ghz() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amplitudes = [ZERO; 8];
        amplitudes[0] = h;
        amplitudes[7] = h;
        Self { amplitudes }
    }

    pub fn product(kets: &[Ket; 3]) -> Result<Self, StateError> {
        let mut amplitudes = [ZERO; 8];
        for (idx, amp) in amplitudes.iter_mut().enumerate() {
            *amp = kets[0][idx >> 2] * kets[1][(idx >> 1) & 1] * kets[2][idx & 1];
        }
        Self::normalized(amplitudes)
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut amplitudes = [ZERO; 8];
        for amp in amplitudes.iter_mut() {
            *amp = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        Self::normalized(amplitudes).expect("gaussian vector is nonzero")
    }

    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amplitudes
    }

    pub fn amplitude(&self, qa: usize, qb: usize, qc: usize) -> Complex64 {
        self.amplitudes[basis_index(qa, qb, qc)]
    }

    /// Applies a single-qubit unitary to `qubit` (0 = A, 1 = B, 2 = C).
    pub fn apply_local(&self, qubit: usize, unitary: &[[Complex64; 2]; 2]) -> Self {
        let shift = 2 - qubit;
        let mut out = [ZERO; 8];
        for (idx, amp) in out.iter_mut().enumerate() {
            let bit = (idx >> shift) & 1;
            let base = idx & !(1 << shift);
            *amp = unitary[bit][0] * self.amplitudes[base]
                + unitary[bit][1] * self.amplitudes[base | (1 << shift)];
        }
        Self { amplitudes: out }
    }

    /// Contracts the state with the conjugates of the kets on every qubit but
    /// `skip`, returning the unnormalized conditional state of `skip`.
    pub fn contract_except(&self, skip: usize, kets: &[Ket; 3]) -> Ket {
        let mut out = [ZERO; 2];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let bits = [idx >> 2, (idx >> 1) & 1, idx & 1];
            let mut weight = *amp;
            for q in (0..3).filter(|&q| q != skip) {
                weight *= kets[q][bits[q]].conj();
            }
            out[bits[skip]] += weight;
        }
        out
    }

    /// `|⟨α ⊗ β ⊗ γ|ψ⟩|^2` for normalized kets.
    pub fn product_overlap(&self, kets: &[Ket; 3]) -> f64 {
        let partial = self.contract_except(2, kets);
        (kets[2][0].conj() * partial[0] + kets[2][1].conj() * partial[1]).norm_sqr()
    }

    /// `⟨ψ| O_A ⊗ O_B ⊗ 1 |ψ⟩`.
    fn expect_ab(&self, op_a: &Mat2, op_b: &Mat2) -> Complex64 {
        let mut acc = ZERO;
        for (row, bra) in self.amplitudes.iter().enumerate() {
            if *bra == ZERO {
                continue;
            }
            for (col, ket) in self.amplitudes.iter().enumerate() {
                if (row & 1) != (col & 1) {
                    continue;
                }
                let elem = op_a[row >> 2][col >> 2] * op_b[(row >> 1) & 1][(col >> 1) & 1];
                acc += bra.conj() * elem * ket;
            }
        }
        acc
    }

    pub fn correlation_data(&self) -> CorrelationData {
        correlation_data(self)
    }
}

/// Scalars derived from `(a, b, c, d)` that every closed form consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedInvariants {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub omega: f64,
    pub mu: f64,
    /// Semiperimeter `(a + b + c + d) / 2`.
    pub p: f64,
    /// Largest coefficient.
    pub l: f64,
    /// Smallest coefficient.
    pub s: f64,
    /// `r1 * r2 * r3`.
    pub r: f64,
}

/// Single-qubit Bloch vectors of A and B plus the AB correlation matrix
/// `g_ij = tr(ρ_AB σ_i ⊗ σ_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationData {
    pub r_a: Vector3<f64>,
    pub r_b: Vector3<f64>,
    pub g: Matrix3<f64>,
}

impl CorrelationData {
    /// `¼(1 + u·r_A + v·r_B + uᵀ g v)`: overlap of `ρ_AB` with the product of
    /// the single-qubit states with Bloch vectors `u`, `v`.
    pub fn objective(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        0.25 * (1.0 + u.dot(&self.r_a) + v.dot(&self.r_b) + u.dot(&(self.g * v)))
    }
}

pub fn embed_w_state(params: &WStateParams) -> ThreeQubitPureState {
    let mut amplitudes = [ZERO; 8];
    for (idx, coeff) in WStateParams::SUPPORT.iter().zip(params.coeffs()) {
        amplitudes[*idx] = Complex64::new(coeff, 0.0);
    }
    ThreeQubitPureState { amplitudes }
}

pub fn reduced_invariants(params: &WStateParams) -> ReducedInvariants {
    let [a, b, c, d] = params.coeffs();
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let r1 = b2 + c2 - a2 - d2;
    let r2 = a2 + c2 - b2 - d2;
    let r3 = a2 + b2 - c2 - d2;
    ReducedInvariants {
        r1,
        r2,
        r3,
        omega: a * b + d * c,
        mu: a * b - d * c,
        p: (a + b + c + d) / 2.0,
        l: a.max(b).max(c).max(d),
        s: a.min(b).min(c).min(d),
        r: r1 * r2 * r3,
    }
}

pub fn correlation_data(state: &ThreeQubitPureState) -> CorrelationData {
    let identity: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
    let mut r_a = Vector3::zeros();
    let mut r_b = Vector3::zeros();
    let mut g = Matrix3::zeros();
    for i in 0..3 {
        r_a[i] = state.expect_ab(&PAULI[i], &identity).re;
        r_b[i] = state.expect_ab(&identity, &PAULI[i]).re;
        for j in 0..3 {
            g[(i, j)] = state.expect_ab(&PAULI[i], &PAULI[j]).re;
        }
    }
    CorrelationData { r_a, r_b, g }
}
