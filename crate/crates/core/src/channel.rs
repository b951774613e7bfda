//! Single-qubit Pauli noise for fiber transmission and memory storage.
//!
//! Fiber attenuation acts as a depolarizing channel, storage in a quantum
//! memory as a bit-flip channel. Edge cost is the fidelity lost by a fresh
//! input state after passing through the fiber and then the memory.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

const STATE_TOL: f64 = 1e-9;
/// Smallest eigenvalue below which a state is treated as pure. Float noise in
/// the matrix entries is ~1e-16, so anything under this is indistinguishable
/// from a rank-one projector.
const PURE_TOL: f64 = 1e-14;

/// Dense 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// Eigenvalues (ascending) and the projector onto the upper eigenvector
    /// of a Hermitian matrix.
    fn hermitian_eigen(&self) -> ([f64; 2], Mat2) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let (lo, hi) = (mean - half_gap, mean + half_gap);

        let zero = Complex64::new(0.0, 0.0);
        let projector = if half_gap == 0.0 {
            // Degenerate spectrum: any projector works since both weights match.
            Mat2([[Complex64::new(1.0, 0.0), zero], [zero, zero]])
        } else {
            // Pick the better-conditioned of the two null-space rows of (A - hi I).
            let v = if a >= d {
                [Complex64::new(hi - d, 0.0), b.conj()]
            } else {
                [b, Complex64::new(hi - a, 0.0)]
            };
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            let v = [v[0] / norm, v[1] / norm];
            Mat2([
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ])
        };
        ([lo, hi], projector)
    }
}

/// A qubit pure state |psi> = alpha|0> + beta|1>.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    bloch: [f64; 3],
}

impl PureState {
    /// Builds a state from a Bloch vector; the vector is normalized and must
    /// be nonzero.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput(format!(
                "Bloch vector ({x}, {y}, {z}) cannot be normalized"
            )));
        }
        Ok(Self {
            bloch: [x / norm, y / norm, z / norm],
        })
    }

    pub fn from_amplitudes(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if !norm2.is_finite() || norm2 == 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let cross = alpha.conj() * beta;
        Self::from_bloch(
            2.0 * cross.re / norm2,
            2.0 * cross.im / norm2,
            (alpha.norm_sqr() - beta.norm_sqr()) / norm2,
        )
    }

    /// |0>
    pub fn zero() -> Self {
        Self {
            bloch: [0.0, 0.0, 1.0],
        }
    }

    /// |1>
    pub fn one() -> Self {
        Self {
            bloch: [0.0, 0.0, -1.0],
        }
    }

    /// |+>
    pub fn plus() -> Self {
        Self {
            bloch: [1.0, 0.0, 0.0],
        }
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn density(&self) -> DensityMatrix {
        let [x, y, z] = self.bloch;
        DensityMatrix(Mat2([
            [
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
            ],
            [
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        ]))
    }
}

impl Default for PureState {
    fn default() -> Self {
        Self::zero()
    }
}

/// A validated single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Mat2) -> Result<Self> {
        let herm = m.max_abs_diff(&m.adjoint());
        if !herm.is_finite() || herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let ([lo, _], _) = m.hermitian_eigen();
        if lo < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lo:e}"
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.0.hermitian_eigen().0
    }

    pub fn is_pure(&self) -> bool {
        self.eigenvalues()[0] <= PURE_TOL
    }

    /// Principal square root via the spectral decomposition.
    fn sqrt(&self) -> Mat2 {
        let ([lo, hi], upper) = self.0.hermitian_eigen();
        let (slo, shi) = (lo.max(0.0).sqrt(), hi.max(0.0).sqrt());
        let lower = Mat2::identity().add(&upper.scale(-1.0));
        upper.scale(shi).add(&lower.scale(slo))
    }
}

/// Pauli weights (pI, pX, pY, pZ) of a single-qubit channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannel {
    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        for (what, v) in [("pI", p_i), ("pX", p_x), ("pY", p_y), ("pZ", p_z)] {
            check_probability(what, v)?;
        }
        let total = p_i + p_x + p_y + p_z;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "Pauli weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { p_i, p_x, p_y, p_z })
    }

    pub fn identity() -> Self {
        Self {
            p_i: 1.0,
            p_x: 0.0,
            p_y: 0.0,
            p_z: 0.0,
        }
    }

    /// Depolarizing channel for a fiber link that degrades with probability `p`.
    pub fn fiber(p: f64) -> Result<Self> {
        let p = check_probability("fiber degradation", p)?;
        Ok(Self {
            p_i: 1.0 - 0.75 * p,
            p_x: 0.25 * p,
            p_y: 0.25 * p,
            p_z: 0.25 * p,
        })
    }

    /// Bit-flip channel for a memory that degrades with probability `p`.
    pub fn memory(p: f64) -> Result<Self> {
        let p = check_probability("memory degradation", p)?;
        Ok(Self {
            p_i: 1.0 - p,
            p_x: p,
            p_y: 0.0,
            p_z: 0.0,
        })
    }

    pub fn weights(&self) -> [f64; 4] {
        [self.p_i, self.p_x, self.p_y, self.p_z]
    }

    /// sum_v p_v O_v rho O_v^dagger
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let [[a, b], [c, d]] = rho.0 .0;
        let x = Mat2([[d, c], [b, a]]);
        let y = Mat2([[d, -c], [-b, a]]);
        let z = Mat2([[a, -b], [-c, d]]);
        let out = rho
            .0
            .scale(self.p_i)
            .add(&x.scale(self.p_x))
            .add(&y.scale(self.p_y))
            .add(&z.scale(self.p_z));
        DensityMatrix(out)
    }
}

/// Fiber attenuation (dB/km) and link length (km).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberParams {
    pub attenuation_db_per_km: f64,
    pub length_km: f64,
}

impl FiberParams {
    pub fn new(attenuation_db_per_km: f64, length_km: f64) -> Result<Self> {
        if !(attenuation_db_per_km >= 0.0 && attenuation_db_per_km.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "attenuation must be >= 0, got {attenuation_db_per_km}"
            )));
        }
        if !(length_km >= 0.0 && length_km.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fiber length must be >= 0, got {length_km}"
            )));
        }
        Ok(Self {
            attenuation_db_per_km,
            length_km,
        })
    }

    /// 1 - 10^(-eta l / 10)
    pub fn degradation(&self) -> f64 {
        let exponent = -self.attenuation_db_per_km * self.length_km / 10.0;
        -(exponent * std::f64::consts::LN_10).exp_m1()
    }
}

/// Dwell time and loss time constant of a quantum memory, both in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryParams {
    pub wait_time_s: f64,
    pub time_constant_s: f64,
}

impl MemoryParams {
    pub fn new(wait_time_s: f64, time_constant_s: f64) -> Result<Self> {
        if !(wait_time_s >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "memory wait time must be >= 0, got {wait_time_s}"
            )));
        }
        if !(time_constant_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "memory time constant must be > 0, got {time_constant_s}"
            )));
        }
        Ok(Self {
            wait_time_s,
            time_constant_s,
        })
    }

    /// 1 - exp(-t_w / T)
    pub fn degradation(&self) -> f64 {
        -(-self.wait_time_s / self.time_constant_s).exp_m1()
    }
}

pub fn p_fiber(fp: &FiberParams) -> f64 {
    fp.degradation()
}

pub fn p_memory(mp: &MemoryParams) -> f64 {
    mp.degradation()
}

/// Uhlmann fidelity Tr[sqrt(sqrt(rho) sigma sqrt(rho))]^2.
///
/// When either argument is pure the overlap <psi|sigma|psi> is returned
/// directly; otherwise the general spectral route is used.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let value = if rho.is_pure() {
        rho.0.mul(&sigma.0).trace().re
    } else if sigma.is_pure() {
        sigma.0.mul(&rho.0).trace().re
    } else {
        spectral_fidelity(rho, sigma)
    };
    value.clamp(0.0, 1.0)
}

fn spectral_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let root = rho.sqrt();
    let inner = root.mul(&sigma.0).mul(&root);
    // Symmetrize away rounding before the eigen-solve.
    let inner = inner.add(&inner.adjoint()).scale(0.5);
    let ([lo, hi], _) = inner.hermitian_eigen();
    let s = lo.max(0.0).sqrt() + hi.max(0.0).sqrt();
    s * s
}

/// Fidelity lost by `state` after the fiber channel followed by the memory
/// channel.
pub fn edge_cost(state: &PureState, fiber: &FiberParams, memory: &MemoryParams) -> Result<f64> {
    let rho = state.density();
    let after_fiber = PauliChannel::fiber(fiber.degradation())?.apply(&rho);
    let after_memory = PauliChannel::memory(memory.degradation())?.apply(&after_fiber);
    Ok(1.0 - fidelity(&rho, &after_memory))
}
