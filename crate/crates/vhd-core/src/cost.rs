//! The diagonalization cost, its normalization, and its gradients.
//!
//! The cost is the squared Hilbert-Schmidt distance between the target
//! Hamiltonian and the rotated diagonal ansatz, divided by the Hilbert-space
//! dimension:
//!
//! ```text
//! C(θ, γ) = ‖H - W(θ) D(γ) W(θ)†‖²_HS / d
//!         = Σ h² + Σ γ² - 2 Σ_{i,k} h_i γ_k c_{ik}(θ)
//! c_{ik}(θ) = Tr(σ_i W(θ) Z^k W(θ)†) / d
//! ```
//!
//! Each `c` term is what a single Hadamard-test circuit measures: the
//! ancilla's zero-outcome probability is `(1 + c)/2`. Exact mode evaluates
//! the traces densely; sampled mode wraps each exact value in seeded
//! Bernoulli draws with that success probability, which is statistically
//! identical to simulating the test circuit and an order of magnitude
//! cheaper. Every c-term gets its own deterministic stream derived from the
//! master seed and the term's identity, mirroring per-circuit measurement.
//!
//! Gradients: the θ-gradient uses the two-point parameter-shift rule (exact
//! here because each parameter enters the trace as a conjugation by a
//! half-angle involutory generator); the γ-gradient is the closed form
//! `2γ_k - 2 Σ_i h_i c_{ik}` since the cost is quadratic in `γ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ansatz::LayeredAnsatz;
use crate::math;
use crate::pauli::{DiagonalPauliSum, PauliString, PauliSum};
use crate::rng::Rng;
use crate::{Error, Result, Tolerances};

const CTERM_SALT: u64 = 0x6374_6572_6d00_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Sampled,
}

/// How expectation values are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotConfig {
    pub mode: EvalMode,
    /// Shots per c-term in sampled mode.
    pub shots: u64,
    /// Master seed for the per-term streams.
    pub seed: u64,
}

impl ShotConfig {
    pub fn exact() -> ShotConfig {
        ShotConfig {
            mode: EvalMode::Exact,
            shots: 0,
            seed: 0,
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> ShotConfig {
        ShotConfig {
            mode: EvalMode::Sampled,
            shots,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == EvalMode::Sampled && self.shots == 0 {
            return Err(Error::InvalidArgument(
                "sampled mode needs at least one shot".into(),
            ));
        }
        Ok(())
    }
}

/// Identity of one measured c-term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CTermKey {
    pub x_bits: u64,
    pub z_bits: u64,
    pub k_bits: u64,
}

/// One cost evaluation.
#[derive(Debug, Clone)]
pub struct CostReport {
    pub c_vhd: f64,
    /// `C / (2 N)` with `N = Σh² + Σγ²`; lies in `[0, 1]`.
    pub c_vhd_normalized: f64,
    /// The normalization constant `N`.
    pub normalization: f64,
    /// All measured c-terms, Hamiltonian-term-major order.
    pub c_terms: Vec<(CTermKey, f64)>,
}

/// Shared evaluation engine: the target Hamiltonian, the diagonal budget
/// masks, and the circuit. Coefficients `γ` are passed per call so one
/// engine serves a whole optimization run.
pub struct VhdObjective<'a> {
    h: &'a PauliSum,
    ansatz: &'a LayeredAnsatz,
    masks: Vec<u64>,
    sum_h2: f64,
    tol: Tolerances,
}

/// Cost, γ-gradient, and raw c-terms at one point (they share the same
/// c-term evaluations).
#[derive(Debug, Clone)]
pub struct VhdPointEval {
    pub cost: f64,
    pub cost_normalized: f64,
    pub normalization: f64,
    pub grad_gamma: Vec<f64>,
    /// Row-major `num_h_terms x num_masks` c values.
    pub c_values: Vec<f64>,
}

impl<'a> VhdObjective<'a> {
    pub fn new(
        h: &'a PauliSum,
        diag: &DiagonalPauliSum,
        ansatz: &'a LayeredAnsatz,
    ) -> Result<VhdObjective<'a>> {
        if h.n_qubits() != ansatz.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: h.n_qubits(),
                right: ansatz.n_qubits(),
            });
        }
        if diag.n_qubits() != h.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: h.n_qubits(),
                right: diag.n_qubits(),
            });
        }
        Ok(VhdObjective {
            h,
            ansatz,
            masks: diag.masks(),
            sum_h2: h.coeff_norm_sq(),
            tol: Tolerances::DEFAULT,
        })
    }

    pub fn num_masks(&self) -> usize {
        self.masks.len()
    }

    pub fn num_c_terms(&self) -> usize {
        self.h.num_terms() * self.masks.len()
    }

    /// Exact c-matrix at `theta`: entry `[i * num_masks + k]` is
    /// `Tr(σ_i W Z^k W†)/d`.
    fn c_matrix_exact(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let w = self.ansatz.unitary(theta)?;
        let d = w.dim();
        let nk = self.masks.len();
        let mut out = vec![0.0; self.h.num_terms() * nk];
        let mut diag = vec![Complex64::new(0.0, 0.0); d];

        for (i, (_, sigma)) in self.h.terms().iter().enumerate() {
            // diag[b] = (W† σ W)[b][b] = Σ_r conj(W[r][b]) amp(r^x) W[r^x][b],
            // using that σ is a signed permutation.
            for v in diag.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            let x = sigma.x_bits() as usize;
            let data = w.data();
            for r in 0..d {
                let rx = r ^ x;
                let amp = sigma.column_amplitude(rx as u64);
                let row_r = &data[r * d..(r + 1) * d];
                let row_rx = &data[rx * d..(rx + 1) * d];
                for ((dst, &a), &b) in diag.iter_mut().zip(row_r.iter()).zip(row_rx.iter()) {
                    *dst += a.conj() * amp * b;
                }
            }
            for (k, &mask) in self.masks.iter().enumerate() {
                let mut tr = Complex64::new(0.0, 0.0);
                for (b, &v) in diag.iter().enumerate() {
                    if (mask & b as u64).count_ones().is_multiple_of(2) {
                        tr += v;
                    } else {
                        tr -= v;
                    }
                }
                let c = tr / d as f64;
                if math::abs(c.im) > self.tol.imag_residue {
                    return Err(Error::Numerical(format!(
                        "c-term trace has imaginary residue {:.3e}",
                        c.im
                    )));
                }
                if math::abs(c.re) > 1.0 + 1e-9 {
                    return Err(Error::Numerical(format!(
                        "c-term {:.3e} outside [-1, 1]",
                        c.re
                    )));
                }
                out[i * nk + k] = c.re.clamp(-1.0, 1.0);
            }
        }
        Ok(out)
    }

    /// c-matrix under the given shot configuration. `eval_tag` distinguishes
    /// repeated evaluations (iterations, gradient shifts) so each gets fresh
    /// deterministic randomness.
    pub fn c_matrix(&self, theta: &[f64], cfg: &ShotConfig, eval_tag: u64) -> Result<Vec<f64>> {
        cfg.validate()?;
        let exact = self.c_matrix_exact(theta)?;
        match cfg.mode {
            EvalMode::Exact => Ok(exact),
            EvalMode::Sampled => Ok(exact
                .iter()
                .enumerate()
                .map(|(flat, &c)| {
                    let mut rng = Rng::stream(cfg.seed, &[CTERM_SALT, eval_tag, flat as u64]);
                    bernoulli_estimate(c, cfg.shots, &mut rng)
                })
                .collect()),
        }
    }

    /// Cost, normalized cost, and γ-gradient from one set of c-terms.
    pub fn eval(
        &self,
        theta: &[f64],
        gammas: &[f64],
        cfg: &ShotConfig,
        eval_tag: u64,
    ) -> Result<VhdPointEval> {
        if gammas.len() != self.masks.len() {
            return Err(Error::ParameterCount {
                expected: self.masks.len(),
                got: gammas.len(),
            });
        }
        let c = self.c_matrix(theta, cfg, eval_tag)?;
        Ok(self.eval_from_c(gammas, c))
    }

    fn eval_from_c(&self, gammas: &[f64], c: Vec<f64>) -> VhdPointEval {
        let nk = self.masks.len();
        let sum_g2: f64 = gammas.iter().map(|g| g * g).sum();
        let mut cross = 0.0;
        let mut grad_gamma: Vec<f64> = gammas.iter().map(|&g| 2.0 * g).collect();
        for (i, (hcoeff, _)) in self.h.terms().iter().enumerate() {
            for (k, &g) in gammas.iter().enumerate() {
                let cval = c[i * nk + k];
                cross += hcoeff * g * cval;
                grad_gamma[k] -= 2.0 * hcoeff * cval;
            }
        }
        let raw = self.sum_h2 + sum_g2 - 2.0 * cross;
        // The distance form is non-negative; trim round-off noise near zero.
        let cost = if raw > 0.0 { raw } else { 0.0 };
        let normalization = self.sum_h2 + sum_g2;
        let cost_normalized = if normalization > 0.0 {
            cost / (2.0 * normalization)
        } else {
            0.0
        };
        VhdPointEval {
            cost,
            cost_normalized,
            normalization,
            grad_gamma,
            c_values: c,
        }
    }

    /// θ-gradient by the two-point parameter-shift rule:
    /// `∂_μ C = -2 Σ h γ [c(θ + π/2 e_μ) - c(θ - π/2 e_μ)] / 2`.
    ///
    /// Shifted evaluations get tags `eval_tag + 1 + 2μ` and `eval_tag + 2 + 2μ`.
    pub fn grad_theta(
        &self,
        theta: &[f64],
        gammas: &[f64],
        cfg: &ShotConfig,
        eval_tag: u64,
    ) -> Result<Vec<f64>> {
        if gammas.len() != self.masks.len() {
            return Err(Error::ParameterCount {
                expected: self.masks.len(),
                got: gammas.len(),
            });
        }
        let nk = self.masks.len();
        let mut grad = vec![0.0; theta.len()];
        let mut shifted = theta.to_vec();
        for mu in 0..theta.len() {
            let original = shifted[mu];
            shifted[mu] = original + math::PI / 2.0;
            let c_plus = self.c_matrix(&shifted, cfg, eval_tag + 1 + 2 * mu as u64)?;
            shifted[mu] = original - math::PI / 2.0;
            let c_minus = self.c_matrix(&shifted, cfg, eval_tag + 2 + 2 * mu as u64)?;
            shifted[mu] = original;
            let mut acc = 0.0;
            for (i, (hcoeff, _)) in self.h.terms().iter().enumerate() {
                for (k, &g) in gammas.iter().enumerate() {
                    let dc = 0.5 * (c_plus[i * nk + k] - c_minus[i * nk + k]);
                    acc += hcoeff * g * dc;
                }
            }
            grad[mu] = -2.0 * acc;
        }
        Ok(grad)
    }

    /// Full report with keyed c-terms (the per-circuit view).
    pub fn report(
        &self,
        theta: &[f64],
        gammas: &[f64],
        cfg: &ShotConfig,
        eval_tag: u64,
    ) -> Result<CostReport> {
        let eval = self.eval(theta, gammas, cfg, eval_tag)?;
        let nk = self.masks.len();
        let mut keyed = Vec::with_capacity(eval.c_values.len());
        for (i, (_, sigma)) in self.h.terms().iter().enumerate() {
            for (k, &mask) in self.masks.iter().enumerate() {
                keyed.push((
                    CTermKey {
                        x_bits: sigma.x_bits(),
                        z_bits: sigma.z_bits(),
                        k_bits: mask,
                    },
                    eval.c_values[i * nk + k],
                ));
            }
        }
        Ok(CostReport {
            c_vhd: eval.cost,
            c_vhd_normalized: eval.cost_normalized,
            normalization: eval.normalization,
            c_terms: keyed,
        })
    }
}

fn bernoulli_estimate(c: f64, shots: u64, rng: &mut Rng) -> f64 {
    let p0 = 0.5 * (1.0 + c);
    let mut successes = 0u64;
    for _ in 0..shots {
        if rng.next_f64() < p0 {
            successes += 1;
        }
    }
    2.0 * (successes as f64 / shots as f64) - 1.0
}

/// Exact `c = Tr(σ W(θ) Z^k W(θ)†)/d` for one string and one Z-mask.
pub fn c_term_exact(
    sigma: &PauliString,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    k_bits: u64,
) -> Result<f64> {
    let n = ansatz.n_qubits();
    if sigma.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: sigma.n_qubits(),
            right: n,
        });
    }
    let h = PauliSum::with_prune(n, vec![(1.0, *sigma)], 0.0)?;
    let diag = DiagonalPauliSum::new(n, vec![(0.0, k_bits)])?;
    let obj = VhdObjective::new(&h, &diag, ansatz)?;
    Ok(obj.c_matrix_exact(theta)?[0])
}

/// Shot-sampled c-term: Bernoulli draws with success probability `(1+c)/2`,
/// statistically identical to measuring the Hadamard-test ancilla. The
/// stream is derived from the seed and the term identity, so identical
/// inputs give identical outputs.
pub fn c_term_sampled(
    sigma: &PauliString,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    k_bits: u64,
    cfg: &ShotConfig,
) -> Result<f64> {
    if cfg.mode != EvalMode::Sampled {
        return Err(Error::InvalidArgument(
            "c_term_sampled requires sampled mode".into(),
        ));
    }
    cfg.validate()?;
    let c = c_term_exact(sigma, ansatz, theta, k_bits)?;
    let mut rng = Rng::stream(
        cfg.seed,
        &[CTERM_SALT, sigma.x_bits(), sigma.z_bits(), k_bits],
    );
    Ok(bernoulli_estimate(c, cfg.shots, &mut rng))
}

/// Cost via the measured-term expansion.
pub fn cost_vhd(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    cfg: &ShotConfig,
) -> Result<CostReport> {
    let obj = VhdObjective::new(h, diag, ansatz)?;
    obj.report(theta, &diag.gammas(), cfg, 0)
}

/// Cost via the dense matrices: `‖M_H - W D W†‖²_HS / d`. The brute-force
/// side of the dual-route check; exact by construction.
pub fn cost_vhd_dense(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
) -> Result<f64> {
    let mh = h.matrix()?;
    let w = ansatz.unitary(theta)?;
    let d = w.dim();
    let diag_entries: Vec<Complex64> = (0..d as u64)
        .map(|b| Complex64::new(diag.eigenvalue(b), 0.0))
        .collect();
    let rotated = w.mul_diag_right(&diag_entries)?.matmul_adjoint(&w)?;
    let delta = mh.sub(&rotated)?;
    Ok(delta.hs_inner(&delta)?.re / d as f64)
}

/// Parameter-shift θ-gradient of the cost.
pub fn grad_theta(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    cfg: &ShotConfig,
) -> Result<Vec<f64>> {
    let obj = VhdObjective::new(h, diag, ansatz)?;
    obj.grad_theta(theta, &diag.gammas(), cfg, 0)
}

/// Closed-form γ-gradient: `∂_ν C = 2 γ_ν - 2 Σ_i h_i c_{iν}`.
pub fn grad_gamma(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    theta: &[f64],
    cfg: &ShotConfig,
) -> Result<Vec<f64>> {
    let obj = VhdObjective::new(h, diag, ansatz)?;
    Ok(obj.eval(theta, &diag.gammas(), cfg, 0)?.grad_gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_layered_ansatz, GateKind, GateSpec};
    use crate::pauli::build_xy_hamiltonian;

    fn rx_rz_qubit() -> LayeredAnsatz {
        LayeredAnsatz::from_gates(
            1,
            0,
            vec![
                GateSpec {
                    kind: GateKind::Rx,
                    qubit: 0,
                    qubit2: None,
                    param_index: 0,
                },
                GateSpec {
                    kind: GateKind::Rz,
                    qubit: 0,
                    qubit2: None,
                    param_index: 1,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn c_term_identity_cases() {
        let a = build_layered_ansatz(2, 1).unwrap();
        let zeros = vec![0.0; a.num_params()];
        // W = 1, sigma = Z^k: trace of Z^k Z^k / d = 1.
        let sigma = PauliString::new(2, 0, 0b01).unwrap();
        let c = c_term_exact(&sigma, &a, &zeros, 0b01).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        // W = 1, sigma = X_0, k = Z_0: orthogonal.
        let sigma = PauliString::new(2, 0b01, 0).unwrap();
        let c = c_term_exact(&sigma, &a, &zeros, 0b01).unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn c_term_rotated_single_qubit() {
        // W = RX(pi/2): Tr(Y W Z W†)/2 = -1 with these conventions
        // (frozen against the dense oracle below).
        let a = rx_rz_qubit();
        let sigma = PauliString::new(1, 1, 1).unwrap();
        let c = c_term_exact(&sigma, &a, &[math::PI / 2.0, 0.0], 1).unwrap();
        assert!((c + 1.0).abs() < 1e-12, "c = {c}");

        let w = a.unitary(&[math::PI / 2.0, 0.0]).unwrap();
        let zmat = PauliString::new(1, 0, 1).unwrap().matrix().unwrap();
        let rot = w.matmul(&zmat).unwrap().matmul_adjoint(&w).unwrap();
        let oracle = sigma.matrix().unwrap().matmul(&rot).unwrap().trace().re / 2.0;
        assert!((c - oracle).abs() < 1e-12);
    }

    #[test]
    fn sampled_term_is_deterministic_and_exact_at_extremes() {
        let a = build_layered_ansatz(2, 1).unwrap();
        let zeros = vec![0.0; a.num_params()];
        let sigma = PauliString::new(2, 0, 0b01).unwrap();
        let cfg = ShotConfig::sampled(1000, 7);
        // Exact c = 1 -> every draw succeeds.
        let c = c_term_sampled(&sigma, &a, &zeros, 0b01, &cfg).unwrap();
        assert_eq!(c, 1.0);
        // Determinism.
        let sigma_x = PauliString::new(2, 0b01, 0).unwrap();
        let c1 = c_term_sampled(&sigma_x, &a, &zeros, 0b01, &cfg).unwrap();
        let c2 = c_term_sampled(&sigma_x, &a, &zeros, 0b01, &cfg).unwrap();
        assert_eq!(c1, c2);
        // Zero shots rejected.
        assert!(c_term_sampled(&sigma, &a, &zeros, 1, &ShotConfig::sampled(0, 1)).is_err());
    }

    #[test]
    fn cost_zero_when_target_matches() {
        // H = Z_0 on two qubits, D = Z_0, theta = 0.
        let h = PauliSum::new(2, vec![(1.0, PauliString::new(2, 0, 0b01).unwrap())]).unwrap();
        let diag = DiagonalPauliSum::new(2, vec![(1.0, 0b01)]).unwrap();
        let a = build_layered_ansatz(2, 1).unwrap();
        let zeros = vec![0.0; a.num_params()];
        let report = cost_vhd(&h, &diag, &a, &zeros, &ShotConfig::exact()).unwrap();
        assert!(report.c_vhd < 1e-12);
        assert!(report.c_vhd_normalized < 1e-12);
        assert_eq!(report.c_terms.len(), 1);
    }

    #[test]
    fn cost_orthogonal_target() {
        // H = X_0, D = Z_0, theta = 0: cost = 1 + 1 - 0 = 2.
        let h = PauliSum::new(2, vec![(1.0, PauliString::new(2, 0b01, 0).unwrap())]).unwrap();
        let diag = DiagonalPauliSum::new(2, vec![(1.0, 0b01)]).unwrap();
        let a = build_layered_ansatz(2, 1).unwrap();
        let zeros = vec![0.0; a.num_params()];
        let report = cost_vhd(&h, &diag, &a, &zeros, &ShotConfig::exact()).unwrap();
        assert!((report.c_vhd - 2.0).abs() < 1e-12);
        assert!((report.c_vhd_normalized - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cost_zero_at_constructed_basis_change() {
        // H = X, D = Z, W = RZ(pi/2)·RX(pi/2) maps Z to X exactly.
        let h = PauliSum::new(1, vec![(1.0, PauliString::new(1, 1, 0).unwrap())]).unwrap();
        let diag = DiagonalPauliSum::new(1, vec![(1.0, 1)]).unwrap();
        let a = rx_rz_qubit();
        let theta = vec![math::PI / 2.0, math::PI / 2.0];
        let report = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact()).unwrap();
        assert!(report.c_vhd < 1e-12, "cost = {}", report.c_vhd);
        let dense = cost_vhd_dense(&h, &diag, &a, &theta).unwrap();
        assert!(dense < 1e-12);

        // Gradients vanish at the minimum.
        let gt = grad_theta(&h, &diag, &a, &theta, &ShotConfig::exact()).unwrap();
        assert!(gt.iter().all(|g| g.abs() < 1e-8), "{gt:?}");
        let gg = grad_gamma(&h, &diag, &a, &theta, &ShotConfig::exact()).unwrap();
        assert!(gg.iter().all(|g| g.abs() < 1e-10), "{gg:?}");
    }

    #[test]
    fn expansion_matches_dense_on_random_instances() {
        let mut rng = Rng::from_seed(31);
        for trial in 0..10usize {
            let n = 2 + (trial % 3);
            let h = build_xy_hamiltonian(n).unwrap();
            let diag = DiagonalPauliSum::weight_one(n)
                .unwrap()
                .with_gammas(&(0..n).map(|_| rng.uniform(-2.0, 2.0)).collect::<Vec<_>>())
                .unwrap();
            let a = build_layered_ansatz(n, 2).unwrap();
            let theta: Vec<f64> = (0..a.num_params())
                .map(|_| rng.uniform(0.0, math::TAU))
                .collect();
            let report = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact()).unwrap();
            let dense = cost_vhd_dense(&h, &diag, &a, &theta).unwrap();
            let rel = (report.c_vhd - dense).abs() / dense.max(1e-30);
            assert!(rel < 1e-9, "n={n} rel={rel}");
            assert!((0.0..=1.0).contains(&report.c_vhd_normalized));
            assert_eq!(report.c_terms.len(), h.num_terms() * n);
        }
    }

    #[test]
    fn grad_theta_matches_finite_differences() {
        let mut rng = Rng::from_seed(37);
        let n = 2;
        let h = build_xy_hamiltonian(n).unwrap();
        let diag = DiagonalPauliSum::weight_one(n)
            .unwrap()
            .with_gammas(&[0.8, -1.3])
            .unwrap();
        let a = build_layered_ansatz(n, 1).unwrap();
        let theta: Vec<f64> = (0..a.num_params())
            .map(|_| rng.uniform(0.0, math::TAU))
            .collect();
        let cfg = ShotConfig::exact();
        let grad = grad_theta(&h, &diag, &a, &theta, &cfg).unwrap();
        let step = 1e-5;
        for mu in 0..theta.len() {
            let mut up = theta.clone();
            up[mu] += step;
            let mut dn = theta.clone();
            dn[mu] -= step;
            let fd = (cost_vhd(&h, &diag, &a, &up, &cfg).unwrap().c_vhd
                - cost_vhd(&h, &diag, &a, &dn, &cfg).unwrap().c_vhd)
                / (2.0 * step);
            let scale = grad[mu].abs().max(fd.abs()).max(1.0);
            assert!(
                (grad[mu] - fd).abs() / scale < 1e-6,
                "mu={mu}: shift {} vs fd {fd}",
                grad[mu]
            );
        }
    }

    #[test]
    fn grad_gamma_closed_form_cases() {
        // H = 0: gradient is 2 gamma.
        let h = PauliSum::new(2, vec![]).unwrap();
        let diag = DiagonalPauliSum::weight_one(2)
            .unwrap()
            .with_gammas(&[1.0, -0.5])
            .unwrap();
        let a = build_layered_ansatz(2, 1).unwrap();
        let zeros = vec![0.0; a.num_params()];
        let gg = grad_gamma(&h, &diag, &a, &zeros, &ShotConfig::exact()).unwrap();
        assert!((gg[0] - 2.0).abs() < 1e-12);
        assert!((gg[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn grad_gamma_matches_finite_differences() {
        let mut rng = Rng::from_seed(41);
        let n = 2;
        let h = build_xy_hamiltonian(n).unwrap();
        let gammas = [0.4, 1.7];
        let diag = DiagonalPauliSum::weight_one(n).unwrap().with_gammas(&gammas).unwrap();
        let a = build_layered_ansatz(n, 1).unwrap();
        let theta: Vec<f64> = (0..a.num_params())
            .map(|_| rng.uniform(0.0, math::TAU))
            .collect();
        let cfg = ShotConfig::exact();
        let grad = grad_gamma(&h, &diag, &a, &theta, &cfg).unwrap();
        let step = 1e-5;
        for nu in 0..gammas.len() {
            let mut up = gammas.to_vec();
            up[nu] += step;
            let mut dn = gammas.to_vec();
            dn[nu] -= step;
            let cost_up = cost_vhd(&h, &diag.with_gammas(&up).unwrap(), &a, &theta, &cfg)
                .unwrap()
                .c_vhd;
            let cost_dn = cost_vhd(&h, &diag.with_gammas(&dn).unwrap(), &a, &theta, &cfg)
                .unwrap()
                .c_vhd;
            let fd = (cost_up - cost_dn) / (2.0 * step);
            assert!((grad[nu] - fd).abs() < 1e-8, "nu={nu}");
        }
    }

    #[test]
    fn zero_gamma_kills_theta_gradient() {
        let n = 2;
        let h = build_xy_hamiltonian(n).unwrap();
        let diag = DiagonalPauliSum::weight_one(n).unwrap();
        let a = build_layered_ansatz(n, 1).unwrap();
        let theta = vec![0.3; a.num_params()];
        let grad = grad_theta(&h, &diag, &a, &theta, &ShotConfig::exact()).unwrap();
        assert!(grad.iter().all(|g| g.abs() < 1e-15));
    }
}
