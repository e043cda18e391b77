//! Variational Hamiltonian diagonalization at statevector scale.
//!
//! This crate trains an ansatz `H̃(θ, γ) = W(θ) D(γ) W(θ)†` to match a target
//! Pauli-sum Hamiltonian `H`, where `W` is a layered hardware-efficient circuit
//! and `D` is a sum of commuting `Z`-strings. A trained pair `(θ, γ)` gives a
//! fast-forwarded simulation `V(T) = W exp(-iDT) W†` of `exp(-iHT)` whose
//! circuit depth does not grow with `T`.
//!
//! The main pieces:
//!
//! - [`pauli`]: signed Pauli strings over bit masks, real-weighted Pauli sums,
//!   the XY-chain builder, and a line-oriented text format.
//! - [`linalg`]: dense complex kernels — Hermitian eigendecomposition, unitary
//!   exponentials, average gate fidelity, partial trace. These double as the
//!   brute-force oracle for everything else.
//! - [`ansatz`]: the layered circuit `W(θ)` and diagonal exponentials.
//! - [`cost`]: the diagonalization cost, exact and shot-sampled, with
//!   parameter-shift and closed-form gradients.
//! - [`vff`]: pre-training against a first-order Trotter step using the local
//!   Hilbert-Schmidt test, plus transfer of the pre-trained parameters.
//! - [`optimize`]: gradient descent, the fidelity-based termination threshold,
//!   and the full multi-restart two-phase pipeline.
//! - [`fastforward`]: fast-forwarded unitaries and infidelity-vs-time sweeps.
//! - [`variance`]: gradient-variance scans over random initializations.
//! - [`verify`]: named, seeded property suites runnable from a driver.
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals go
//! through `libm`. Qubit indices are 0-based and qubit 0 is the least
//! significant bit of a basis-state index. Everything is deterministic given
//! the caller-provided seeds.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ansatz;
pub mod cost;
pub mod fastforward;
pub mod linalg;
pub mod math;
pub mod optimize;
pub mod pauli;
pub mod rng;
pub mod variance;
pub mod verify;
pub mod vff;

use alloc::string::String;
use core::fmt;

pub use num_complex::Complex64;

/// Largest qubit count for which dense `2^n x 2^n` matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Error type shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Qubit count exceeds [`MAX_DENSE_QUBITS`] (or is zero).
    DimensionOverflow { qubits: usize },
    /// Operands live on different Hilbert spaces.
    DimensionMismatch { left: usize, right: usize },
    /// A qubit or parameter index is out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// Parameter vector length does not match the ansatz.
    ParameterCount { expected: usize, got: usize },
    /// Matrix failed the Hermiticity tolerance check.
    NotHermitian { residual: f64 },
    /// Invalid argument outside any of the above categories.
    InvalidArgument(String),
    /// A text document failed to parse.
    Parse(String),
    /// An internal numerical consistency check tripped.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionOverflow { qubits } => {
                write!(f, "qubit count {qubits} outside supported range 1..={MAX_DENSE_QUBITS}")
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::ParameterCount { expected, got } => {
                write!(f, "expected {expected} parameters, got {got}")
            }
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (relative residual {residual:.3e})")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical consistency failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

/// Numerical tolerances used by the property suites and internal checks.
///
/// Kept in one record so the verification suites have a single knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity residual accepted by the eigensolver.
    pub hermiticity: f64,
    /// Unitarity residual `‖U†U - 1‖_HS` accepted for constructed unitaries.
    pub unitarity: f64,
    /// Relative eigendecomposition reconstruction residual.
    pub reconstruction: f64,
    /// Imaginary residue allowed on traces that must be real.
    pub imag_residue: f64,
    /// Agreement between diagonal exponentials and the dense route.
    pub exp_diagonal: f64,
    /// Relative agreement between the cost expansion and the dense cost.
    pub cost_expansion_rel: f64,
    /// Slack granted to exact inequalities under floating-point noise.
    pub inequality_slack: f64,
    /// Coefficients below this magnitude are dropped from Pauli sums.
    pub coefficient_prune: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-9,
        unitarity: 1e-9,
        reconstruction: 1e-9,
        imag_residue: 1e-10,
        exp_diagonal: 1e-10,
        cost_expansion_rel: 1e-9,
        inequality_slack: 1e-9,
        coefficient_prune: 1e-12,
    };

    /// Scale every tolerance by `s` (used to force-fail the property suites).
    #[must_use]
    pub fn scaled(&self, s: f64) -> Tolerances {
        Tolerances {
            hermiticity: self.hermiticity * s,
            unitarity: self.unitarity * s,
            reconstruction: self.reconstruction * s,
            imag_residue: self.imag_residue * s,
            exp_diagonal: self.exp_diagonal * s,
            cost_expansion_rel: self.cost_expansion_rel * s,
            inequality_slack: self.inequality_slack * s,
            coefficient_prune: self.coefficient_prune * s,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}
