//! Fast-forwarded evolution and infidelity-vs-time sweeps.
//!
//! A trained pair `(θ, γ)` simulates `U(T) = exp(-iHT)` as
//! `V(T) = W(θ) exp(-iD(γ)T) W(θ)†` — the circuit depth is set by `W` and
//! the diagonal exponential, independent of `T`. Sweeps report the average
//! gate infidelity `1 - F̄(T)` between the two on a time grid.
//!
//! The pre-training analogue steps in units of the Trotter interval:
//! `V_N = W exp(-iΔt N D) W†` targets `U(NΔt)`, so its sweep compares at the
//! matched times `NΔt`.

use alloc::vec::Vec;

use crate::ansatz::{exp_diagonal_phases, LayeredAnsatz};
use crate::linalg::{avg_gate_fidelity, expm_i, DenseOperator};
use crate::math;
use crate::pauli::{DiagonalPauliSum, PauliSum};
use crate::{Error, Result};

/// Which parameter set produced a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSource {
    Vff,
    Vhd,
}

impl SweepSource {
    pub fn label(&self) -> &'static str {
        match self {
            SweepSource::Vff => "vff",
            SweepSource::Vhd => "vhd",
        }
    }
}

/// Infidelity per grid point.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub times: Vec<f64>,
    pub infidelities: Vec<f64>,
    pub source: SweepSource,
}

/// `V(T) = W(θ) exp(-iD(γ)T) W(θ)†`.
pub fn fast_forward_unitary(
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    diag: &DiagonalPauliSum,
    t: f64,
) -> Result<DenseOperator> {
    let w = ansatz.unitary(theta)?;
    let phases = exp_diagonal_phases(diag, t);
    w.mul_diag_right(&phases)?.matmul_adjoint(&w)
}

/// `U(T) = exp(-iHT)` through the dense spectral route.
pub fn exact_evolution(h: &PauliSum, t: f64) -> Result<DenseOperator> {
    expm_i(&h.matrix()?, t)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `1 - F̄(T)` for the trained fast-forward against the exact evolution,
/// one value per grid point.
pub fn infidelity_sweep(
    h: &PauliSum,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    diag: &DiagonalPauliSum,
    grid: &[f64],
) -> Result<SweepResult> {
    check_grid(grid)?;
    let w = ansatz.unitary(theta)?;
    let eig = crate::linalg::eigh(&h.matrix()?)?;
    let mut infidelities = Vec::with_capacity(grid.len());
    for &t in grid {
        // U(T) from the cached spectral decomposition of H.
        let phases: Vec<_> = eig.eigenvalues.iter().map(|&l| math::cis(-l * t)).collect();
        let u = eig
            .eigenvectors
            .mul_diag_right(&phases)?
            .matmul_adjoint(&eig.eigenvectors)?;
        let v = w
            .mul_diag_right(&exp_diagonal_phases(diag, t))?
            .matmul_adjoint(&w)?;
        let f = avg_gate_fidelity(&u, &v)?;
        infidelities.push((1.0 - f).clamp(0.0, 1.0));
    }
    Ok(SweepResult {
        times: grid.to_vec(),
        infidelities,
        source: SweepSource::Vhd,
    })
}

/// The pre-training fast-forward to `N` Trotter intervals:
/// `W exp(-iΔt N Σ γ_k Z^k) W†`.
pub fn vff_forward_unitary(
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    diag: &DiagonalPauliSum,
    dt: f64,
    steps: u64,
) -> Result<DenseOperator> {
    fast_forward_unitary(ansatz, theta, diag, dt * steps as f64)
}

/// Infidelity of the pre-training fast-forward at the matched times `NΔt`,
/// with `N = max(1, round(T/Δt))` per grid point; duplicate step counts
/// collapse to one row. The reported times are the matched ones.
pub fn vff_infidelity_sweep(
    h: &PauliSum,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    diag: &DiagonalPauliSum,
    dt: f64,
    grid: &[f64],
) -> Result<SweepResult> {
    check_grid(grid)?;
    if dt <= 0.0 {
        return Err(Error::InvalidArgument("time step must be positive".into()));
    }
    let mut steps: Vec<u64> = grid
        .iter()
        .map(|&t| {
            let n = math::round(t / dt);
            if n < 1.0 {
                1
            } else {
                n as u64
            }
        })
        .collect();
    steps.dedup();
    let w = ansatz.unitary(theta)?;
    let eig = crate::linalg::eigh(&h.matrix()?)?;
    let mut times = Vec::with_capacity(steps.len());
    let mut infidelities = Vec::with_capacity(steps.len());
    for n_steps in steps {
        let t = dt * n_steps as f64;
        let phases: Vec<_> = eig.eigenvalues.iter().map(|&l| math::cis(-l * t)).collect();
        let u = eig
            .eigenvectors
            .mul_diag_right(&phases)?
            .matmul_adjoint(&eig.eigenvectors)?;
        let v = w
            .mul_diag_right(&exp_diagonal_phases(diag, t))?
            .matmul_adjoint(&w)?;
        let f = avg_gate_fidelity(&u, &v)?;
        times.push(t);
        infidelities.push((1.0 - f).clamp(0.0, 1.0));
    }
    Ok(SweepResult {
        times,
        infidelities,
        source: SweepSource::Vff,
    })
}

/// `points` logarithmically spaced times over `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if t_min <= 0.0 || t_max <= t_min {
        return Err(Error::InvalidArgument(
            "need 0 < t_min < t_max for a log grid".into(),
        ));
    }
    if points < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    let (lo, hi) = (math::ln(t_min), math::ln(t_max));
    Ok((0..points)
        .map(|i| math::exp(lo + (hi - lo) * i as f64 / (points - 1) as f64))
        .collect())
}
