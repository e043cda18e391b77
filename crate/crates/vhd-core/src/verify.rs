//! Named property suites.
//!
//! Every invariant the crate relies on is packaged as a seeded, deterministic
//! check so a driver can run them all and report violations by name. Each
//! check pits an implementation path against an independent oracle (dense
//! matrices, finite differences, Monte-Carlo sampling) or asserts an exact
//! inequality with a small floating-point slack.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ansatz::{
    build_layered_ansatz, exp_diagonal, gate_matrix, GateKind, GateSpec, LayeredAnsatz,
};
use crate::cost::{
    c_term_sampled, cost_vhd, cost_vhd_dense, grad_gamma, grad_theta, ShotConfig,
};
use crate::fastforward::{fast_forward_unitary, infidelity_sweep, log_grid};
use crate::linalg::{
    avg_gate_fidelity, eigh, expm_i, haar_state, min_phase_hs_distance, random_hermitian,
    random_unitary, DenseOperator,
};
use crate::math;
use crate::optimize::{fidelity_lower_bound, termination_cost};
use crate::pauli::{build_xy_hamiltonian, DiagonalPauliSum, PauliString, PauliSum};
use crate::rng::Rng;
use crate::variance::{scan_gradient_variance, GammaRule};
use crate::vff::{lhst_cost, transfer_parameters, trotter_first_order, vff_unitary};
use crate::{Result, Tolerances};

/// Settings for one verification run.
#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Multiplies each suite's default sample count.
    pub samples_scale: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0xC0FFEE,
            tolerances: Tolerances::DEFAULT,
            samples_scale: 1.0,
        }
    }
}

impl CheckConfig {
    fn samples(&self, base: usize) -> usize {
        let scaled = base as f64 * self.samples_scale;
        if scaled < 1.0 {
            1
        } else {
            scaled as usize
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub samples: usize,
    pub passed: bool,
    /// Human-readable worst case, e.g. the largest violation margin.
    pub detail: String,
}

impl CheckResult {
    fn from_worst(
        name: &'static str,
        samples: usize,
        worst: f64,
        limit: f64,
    ) -> CheckResult {
        CheckResult {
            name,
            samples,
            passed: worst <= limit,
            detail: format!("worst {worst:.3e}, limit {limit:.3e}"),
        }
    }
}

fn single_qubit_ansatz() -> LayeredAnsatz {
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
    .expect("static gate list is valid")
}

fn ansatz_for(n: usize) -> Result<LayeredAnsatz> {
    if n == 1 {
        Ok(single_qubit_ansatz())
    } else {
        build_layered_ansatz(n, 2)
    }
}

fn random_theta(a: &LayeredAnsatz, rng: &mut Rng) -> Vec<f64> {
    (0..a.num_params()).map(|_| rng.uniform(0.0, math::TAU)).collect()
}

fn random_pauli_sum(n: usize, max_terms: usize, rng: &mut Rng) -> Result<PauliSum> {
    let lim = 1u64 << n;
    let terms = (0..max_terms)
        .map(|_| {
            Ok((
                rng.uniform(-2.0, 2.0),
                PauliString::new(n, rng.below(lim), rng.below(lim))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PauliSum::new(n, terms)
}

fn random_gammas(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect()
}

pub fn check_pauli_orthogonality(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(200);
    let mut rng = Rng::stream(cfg.seed, &[1]);
    let mut worst: f64 = 0.0;
    for trial in 0..samples {
        let n = 1 + rng.below(5) as usize;
        let lim = 1u64 << n;
        let a = PauliString::new(n, rng.below(lim), rng.below(lim))?;
        // Force key collisions on a quarter of the trials.
        let b = if trial % 4 == 0 {
            a
        } else {
            PauliString::new(n, rng.below(lim), rng.below(lim))?
        };
        let d = (1usize << n) as f64;
        let tr = a.matrix()?.matmul(&b.matrix()?)?.trace();
        let normalized = tr.re / d;
        let expected = if a == b { 1.0 } else { 0.0 };
        worst = worst
            .max(math::abs(normalized - expected))
            .max(math::abs(tr.im) / d);
    }
    Ok(CheckResult::from_worst(
        "pauli_orthogonality",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_pauli_hs_norm(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(50);
    let mut rng = Rng::stream(cfg.seed, &[2]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 1 + rng.below(5) as usize;
        let sum = random_pauli_sum(n, 1 + rng.below(10) as usize, &mut rng)?;
        let m = sum.matrix()?;
        let dense = m.hs_inner(&m)?.re;
        let alg = sum.hs_norm_sq();
        let scale = dense.max(1.0);
        worst = worst.max(math::abs(alg - dense) / scale);
    }
    Ok(CheckResult::from_worst(
        "pauli_hs_norm",
        samples,
        worst,
        1e-10,
    ))
}

pub fn check_pauli_sum_linearity(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(20);
    let mut rng = Rng::stream(cfg.seed, &[3]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 1 + rng.below(4) as usize;
        let h1 = random_pauli_sum(n, 6, &mut rng)?;
        let h2 = random_pauli_sum(n, 6, &mut rng)?;
        let (a, b) = (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        let mut combined: Vec<(f64, PauliString)> = Vec::new();
        combined.extend(h1.terms().iter().map(|&(c, s)| (a * c, s)));
        combined.extend(h2.terms().iter().map(|&(c, s)| (b * c, s)));
        // Unpruned so tiny cancellations stay representable.
        let sum = PauliSum::with_prune(n, combined, 0.0)?;
        let lhs = sum.matrix()?;
        let rhs = h1
            .matrix()?
            .scaled(Complex64::new(a, 0.0))
            .add_scaled(&h2.matrix()?, Complex64::new(b, 0.0))?;
        let diff = lhs.sub(&rhs)?;
        worst = worst.max(
            diff.data()
                .iter()
                .map(|z| math::cabs(*z))
                .fold(0.0, f64::max),
        );
    }
    Ok(CheckResult::from_worst(
        "pauli_sum_linearity",
        samples,
        worst,
        1e-12,
    ))
}

pub fn check_evolution_distance_bound(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(100);
    let mut rng = Rng::stream(cfg.seed, &[4]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let n = 1 + rng.below(3) as usize;
        let a = random_hermitian(n, &mut rng)?;
        let b = random_hermitian(n, &mut rng)?;
        let t = rng.uniform(0.0, 5.0).max(1e-3);
        let lhs = expm_i(&a, -t)?.sub(&expm_i(&b, -t)?)?.hs_norm();
        let rhs = t * a.sub(&b)?.hs_norm();
        worst = worst.max(lhs - rhs);
    }
    Ok(CheckResult::from_worst(
        "evolution_distance_bound",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_unitary_power_bound(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(100);
    let mut rng = Rng::stream(cfg.seed, &[5]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let n = 1 + rng.below(3) as usize;
        let u = random_unitary(n, &mut rng)?;
        let v = random_unitary(n, &mut rng)?;
        let power = 2 + rng.below(9) as usize;
        let mut up = u.clone();
        let mut vp = v.clone();
        for _ in 1..power {
            up = up.matmul(&u)?;
            vp = vp.matmul(&v)?;
        }
        let lhs = up.sub(&vp)?.hs_norm();
        let rhs = power as f64 * u.sub(&v)?.hs_norm();
        worst = worst.max(lhs - rhs);
    }
    Ok(CheckResult::from_worst(
        "unitary_power_bound",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_phase_min_distance_bound(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(100);
    let mut rng = Rng::stream(cfg.seed, &[6]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let n = 1 + rng.below(3) as usize;
        let a = random_unitary(n, &mut rng)?;
        let b = random_unitary(n, &mut rng)?;
        worst = worst.max(min_phase_hs_distance(&a, &b)? - a.sub(&b)?.hs_norm());
    }
    Ok(CheckResult::from_worst(
        "phase_min_distance_bound",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_avg_fidelity_haar_mc(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(10_000);
    let mut rng = Rng::stream(cfg.seed, &[7]);
    let n = 2;
    let u = random_unitary(n, &mut rng)?;
    let v = random_unitary(n, &mut rng)?;
    let closed = avg_gate_fidelity(&u, &v)?;
    let m = u.adjoint().matmul(&v)?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let psi = haar_state(n, &mut rng)?;
        let out = m.apply(&psi)?;
        let amp: Complex64 = psi
            .iter()
            .zip(out.iter())
            .map(|(&p, &o)| p.conj() * o)
            .sum();
        let f = amp.norm_sqr();
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let stderr = math::sqrt(var / samples as f64);
    let dev = math::abs(mean - closed);
    Ok(CheckResult {
        name: "avg_fidelity_haar_mc",
        samples,
        passed: dev <= 3.0 * stderr,
        detail: format!("deviation {dev:.3e}, 3 SE = {:.3e}", 3.0 * stderr),
    })
}

pub fn check_ansatz_unitarity(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(100);
    let mut rng = Rng::stream(cfg.seed, &[8]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 2 + rng.below(4) as usize;
        let a = build_layered_ansatz(n, 1 + rng.below(3) as usize)?;
        let theta = random_theta(&a, &mut rng);
        worst = worst.max(a.unitary(&theta)?.unitarity_error());
    }
    Ok(CheckResult::from_worst(
        "ansatz_unitarity",
        samples,
        worst,
        cfg.tolerances.unitarity,
    ))
}

pub fn check_exp_diagonal_vs_dense(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(50);
    let mut rng = Rng::stream(cfg.seed, &[9]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 1 + rng.below(4) as usize;
        let diag = DiagonalPauliSum::weight_one(n)?.with_gammas(&random_gammas(n, &mut rng))?;
        let t = rng.uniform(-3.0, 3.0);
        let fast = exp_diagonal(&diag, t)?;
        let dense = expm_i(&diag.as_pauli_sum()?.matrix()?, t)?;
        worst = worst.max(fast.sub(&dense)?.hs_norm());
    }
    Ok(CheckResult::from_worst(
        "exp_diagonal_vs_dense",
        samples,
        worst,
        cfg.tolerances.exp_diagonal,
    ))
}

pub fn check_ansatz_composition(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(20);
    let mut rng = Rng::stream(cfg.seed, &[10]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 2 + rng.below(3) as usize;
        let a = build_layered_ansatz(n, 1 + rng.below(2) as usize)?;
        let theta = random_theta(&a, &mut rng);
        let w = a.unitary(&theta)?;
        let mut oracle = DenseOperator::identity(n)?;
        for g in a.gates() {
            oracle = gate_matrix(g, theta[g.param_index], n)?.matmul(&oracle)?;
        }
        worst = worst.max(w.sub(&oracle)?.hs_norm());

        let mut state = haar_state(n, &mut rng)?;
        let expected = w.apply(&state)?;
        a.apply_to_state(&theta, &mut state)?;
        let err: f64 = state
            .iter()
            .zip(expected.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        worst = worst.max(math::sqrt(err));
    }
    Ok(CheckResult::from_worst(
        "ansatz_composition",
        samples,
        worst,
        1e-10,
    ))
}

fn random_cost_instance(
    n: usize,
    rng: &mut Rng,
) -> Result<(PauliSum, DiagonalPauliSum, LayeredAnsatz, Vec<f64>)> {
    let h = random_pauli_sum(n, 2 * n, rng)?;
    let diag = DiagonalPauliSum::weight_one(n)?.with_gammas(&random_gammas(n, rng))?;
    let a = ansatz_for(n)?;
    let theta = random_theta(&a, rng);
    Ok((h, diag, a, theta))
}

pub fn check_cost_expansion_vs_dense(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(50);
    let mut rng = Rng::stream(cfg.seed, &[11]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 2 + rng.below(3) as usize; // n in 2..=4
        let (h, diag, a, theta) = random_cost_instance(n, &mut rng)?;
        let expansion = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact())?.c_vhd;
        let dense = cost_vhd_dense(&h, &diag, &a, &theta)?;
        worst = worst.max(math::abs(expansion - dense) / dense.max(1e-12));
    }
    Ok(CheckResult::from_worst(
        "cost_expansion_vs_dense",
        samples,
        worst,
        cfg.tolerances.cost_expansion_rel,
    ))
}

pub fn check_cost_normalized_range(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(200);
    let mut rng = Rng::stream(cfg.seed, &[12]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let n = 2 + rng.below(3) as usize;
        let (h, diag, a, theta) = random_cost_instance(n, &mut rng)?;
        let r = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact())?;
        worst = worst.max(-r.c_vhd_normalized).max(r.c_vhd_normalized - 1.0);
        worst = worst.max(-r.c_vhd);
    }
    Ok(CheckResult::from_worst(
        "cost_normalized_range",
        samples,
        worst,
        0.0,
    ))
}

pub fn check_cost_faithfulness(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(20);
    let mut rng = Rng::stream(cfg.seed, &[13]);
    let mut ok = true;
    let mut detail = String::from("both directions held");
    for trial in 0..samples {
        if trial % 5 == 0 {
            // Exact-zero instance: H = Z_0 + Z_1, W = 1, gamma = (1, 1).
            let h = PauliSum::new(
                2,
                vec![
                    (1.0, PauliString::new(2, 0, 0b01)?),
                    (1.0, PauliString::new(2, 0, 0b10)?),
                ],
            )?;
            let diag = DiagonalPauliSum::weight_one(2)?.with_gammas(&[1.0, 1.0])?;
            let a = build_layered_ansatz(2, 1)?;
            let theta = vec![0.0; a.num_params()];
            let c = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact())?.c_vhd;
            let dense_dist = math::sqrt(cost_vhd_dense(&h, &diag, &a, &theta)? * 4.0);
            if c > 1e-12 || dense_dist > 1e-6 {
                ok = false;
                detail = format!("zero case leaked: cost {c:.3e}, distance {dense_dist:.3e}");
            }
        } else {
            let n = 2 + rng.below(2) as usize;
            let (h, diag, a, theta) = random_cost_instance(n, &mut rng)?;
            let c = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact())?.c_vhd;
            let d = (1usize << n) as f64;
            let dense_dist = math::sqrt(cost_vhd_dense(&h, &diag, &a, &theta)? * d);
            let zero_cost = c <= 1e-12;
            let zero_dist = dense_dist < 1e-6;
            if zero_cost != zero_dist {
                ok = false;
                detail = format!("cost {c:.3e} vs distance {dense_dist:.3e} disagree on zero");
            }
        }
    }
    Ok(CheckResult {
        name: "cost_faithfulness",
        samples,
        passed: ok,
        detail,
    })
}

pub fn check_shot_calibration(cfg: &CheckConfig) -> Result<CheckResult> {
    let trials = cfg.samples(100);
    let shots = 1_000_000;
    // Exact c = 0: sigma = X_0, k = Z_0, W = 1.
    let a = build_layered_ansatz(2, 1)?;
    let zeros = vec![0.0; a.num_params()];
    let sigma = PauliString::new(2, 0b01, 0)?;
    let mut hits = 0usize;
    for t in 0..trials {
        let shot = ShotConfig::sampled(shots, cfg.seed.wrapping_add(t as u64));
        let est = c_term_sampled(&sigma, &a, &zeros, 0b01, &shot)?;
        if math::abs(est) < 5e-3 {
            hits += 1;
        }
    }
    let needed = (trials * 95).div_ceil(100);
    Ok(CheckResult {
        name: "shot_calibration",
        samples: trials,
        passed: hits >= needed,
        detail: format!("{hits}/{trials} within 5e-3 (need {needed})"),
    })
}

pub fn check_sampled_estimator_unbiased(cfg: &CheckConfig) -> Result<CheckResult> {
    let seeds = cfg.samples(200);
    let shots = 1_000_000u64;
    let mut rng = Rng::stream(cfg.seed, &[14]);
    // A term with a non-trivial exact value.
    let a = single_qubit_ansatz();
    let theta = [rng.uniform(0.0, math::TAU), rng.uniform(0.0, math::TAU)];
    let sigma = PauliString::new(1, 1, 1)?;
    let exact = crate::cost::c_term_exact(&sigma, &a, &theta, 1)?;
    let mut sum = 0.0;
    for s in 0..seeds {
        let shot = ShotConfig::sampled(shots, cfg.seed.wrapping_add(1000 + s as u64));
        sum += c_term_sampled(&sigma, &a, &theta, 1, &shot)?;
    }
    let mean = sum / seeds as f64;
    let dev = math::abs(mean - exact);
    let limit = 3.0 / math::sqrt(shots as f64);
    Ok(CheckResult {
        name: "sampled_estimator_unbiased",
        samples: seeds,
        passed: dev <= limit,
        detail: format!("|mean - exact| = {dev:.3e}, limit {limit:.3e}"),
    })
}

pub fn check_grad_theta_vs_fd(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(50);
    let mut rng = Rng::stream(cfg.seed, &[15]);
    let mut worst: f64 = 0.0;
    let step = 1e-5;
    for _ in 0..samples {
        let n = 2 + rng.below(2) as usize; // n in 2..=3
        let (h, diag, a, theta) = random_cost_instance(n, &mut rng)?;
        let grad = grad_theta(&h, &diag, &a, &theta, &ShotConfig::exact())?;
        // Finite differences on the dense-matrix cost: an independent route.
        for mu in 0..theta.len() {
            let mut up = theta.clone();
            up[mu] += step;
            let mut dn = theta.clone();
            dn[mu] -= step;
            let fd = (cost_vhd_dense(&h, &diag, &a, &up)? - cost_vhd_dense(&h, &diag, &a, &dn)?)
                / (2.0 * step);
            let scale = grad[mu].abs().max(fd.abs()).max(1.0);
            worst = worst.max((grad[mu] - fd).abs() / scale);
        }
    }
    Ok(CheckResult::from_worst(
        "grad_theta_vs_fd",
        samples,
        worst,
        1e-6,
    ))
}

pub fn check_grad_gamma_vs_fd(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(50);
    let mut rng = Rng::stream(cfg.seed, &[16]);
    let mut worst: f64 = 0.0;
    let step = 1e-5;
    for _ in 0..samples {
        let n = 2 + rng.below(2) as usize;
        let (h, diag, a, theta) = random_cost_instance(n, &mut rng)?;
        let grad = grad_gamma(&h, &diag, &a, &theta, &ShotConfig::exact())?;
        let gammas = diag.gammas();
        for nu in 0..gammas.len() {
            let mut up = gammas.clone();
            up[nu] += step;
            let mut dn = gammas.clone();
            dn[nu] -= step;
            let fd = (cost_vhd_dense(&h, &diag.with_gammas(&up)?, &a, &theta)?
                - cost_vhd_dense(&h, &diag.with_gammas(&dn)?, &a, &theta)?)
                / (2.0 * step);
            worst = worst.max((grad[nu] - fd).abs());
        }
    }
    Ok(CheckResult::from_worst(
        "grad_gamma_vs_fd",
        samples,
        worst,
        1e-8,
    ))
}

pub fn check_fidelity_bound_round_trip(cfg: &CheckConfig) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &d in &[2usize, 8, 32, 128] {
        for &f in &[0.5, 0.9, 0.99, 0.9999] {
            if f <= 1.0 / (d as f64 + 1.0) {
                continue;
            }
            for &t in &[0.1, 1.0, 10.0, 1000.0] {
                let c = termination_cost(f, t, d)?;
                worst = worst.max(math::abs(fidelity_lower_bound(c, t, d) - f));
                count += 1;
            }
        }
    }
    let _ = cfg;
    Ok(CheckResult::from_worst(
        "fidelity_bound_round_trip",
        count,
        worst,
        1e-12,
    ))
}

pub fn check_fidelity_cost_bound(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(100);
    let mut rng = Rng::stream(cfg.seed, &[17]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let n = 1 + rng.below(3) as usize;
        let d = 1usize << n;
        let h = random_pauli_sum(n, 2 * n + 1, &mut rng)?;
        let diag = DiagonalPauliSum::weight_one(n)?.with_gammas(&random_gammas(n, &mut rng))?;
        let a = ansatz_for(n)?;
        let theta = random_theta(&a, &mut rng);
        let t = rng.uniform(0.1, 10.0);
        let cost = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact())?.c_vhd;

        let u = expm_i(&h.matrix()?, t)?;
        let v = fast_forward_unitary(&a, &theta, &diag, t)?;
        let fbar = avg_gate_fidelity(&u, &v)?;
        let dd = d as f64;
        let radicand = (1.0 - (dd + 1.0) / dd * (1.0 - fbar)).max(0.0);
        let lhs = 2.0 / (t * t) * (1.0 - math::sqrt(radicand));
        worst = worst.max(lhs - cost);
    }
    Ok(CheckResult::from_worst(
        "fidelity_cost_bound",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_sweep_bound_envelope(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(5);
    let mut rng = Rng::stream(cfg.seed, &[18]);
    let grid = log_grid(0.1, 100.0, 20)?;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut points = 0;
    for _ in 0..samples {
        let n = 2 + rng.below(2) as usize;
        let d = (1usize << n) as f64;
        let (h, diag, a, theta) = random_cost_instance(n, &mut rng)?;
        let cost = cost_vhd(&h, &diag, &a, &theta, &ShotConfig::exact())?.c_vhd;
        let sweep = infidelity_sweep(&h, &a, &theta, &diag, &grid)?;
        for (t, inf) in sweep.times.iter().zip(sweep.infidelities.iter()) {
            let x = cost * t * t / 2.0;
            if x <= 1.0 {
                let envelope = d / (d + 1.0) * (1.0 - (1.0 - x) * (1.0 - x));
                worst = worst.max(inf - envelope);
                points += 1;
            }
        }
    }
    Ok(CheckResult::from_worst(
        "sweep_bound_envelope",
        points,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_trotter_order(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(20);
    let mut rng = Rng::stream(cfg.seed, &[19]);
    let mut checked = 0;
    let mut worst_low: f64 = f64::INFINITY;
    let mut worst_high: f64 = 0.0;
    for _ in 0..samples {
        let n = 2 + rng.below(2) as usize;
        // Random nearest-neighbour two-local Hamiltonian; the mixed X/Z
        // content keeps the terms non-commuting.
        let mut terms = Vec::new();
        for j in 0..n - 1 {
            terms.push((rng.uniform(0.5, 1.5), PauliString::new(n, 0b11 << j, 0)?));
        }
        for j in 0..n {
            terms.push((rng.uniform(0.5, 1.5), PauliString::new(n, 0, 1 << j)?));
        }
        let h = PauliSum::new(n, terms)?;
        let err = |dt: f64| -> Result<f64> {
            let step = trotter_first_order(&h, dt)?;
            Ok(step.unitary.sub(&expm_i(&h.matrix()?, dt)?)?.hs_norm())
        };
        let e1 = err(0.05)?;
        let e2 = err(0.025)?;
        if e1 < 1e-10 {
            continue; // effectively commuting draw
        }
        let ratio = e1 / e2;
        worst_low = worst_low.min(ratio);
        worst_high = worst_high.max(ratio);
        checked += 1;
    }
    let passed = checked > 0 && worst_low >= 3.5 && worst_high <= 4.5;
    Ok(CheckResult {
        name: "trotter_order",
        samples: checked,
        passed,
        detail: format!("halving ratios in [{worst_low:.3}, {worst_high:.3}]"),
    })
}

pub fn check_lhst_range(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(100);
    let mut rng = Rng::stream(cfg.seed, &[20]);
    let mut worst: f64 = f64::NEG_INFINITY;
    for trial in 0..samples {
        let n = 1 + rng.below(3) as usize;
        let u = random_unitary(n, &mut rng)?;
        if trial % 5 == 0 {
            let same = lhst_cost(&u, &u)?;
            worst = worst.max(same - 1e-9);
        } else {
            let v = random_unitary(n, &mut rng)?;
            let c = lhst_cost(&u, &v)?;
            worst = worst.max(-c).max(c - 1.0);
        }
    }
    Ok(CheckResult::from_worst(
        "lhst_range",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_transfer_lattice(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(10);
    let mut rng = Rng::stream(cfg.seed, &[21]);
    let dt = 0.25;
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let n = 2 + rng.below(2) as usize;
        let h = build_xy_hamiltonian(n)?;
        let a = ansatz_for(n)?;
        let diag = DiagonalPauliSum::weight_one(n)?;
        let theta = random_theta(&a, &mut rng);
        let gamma: Vec<f64> = (0..n).map(|_| rng.uniform(-15.0, 15.0)).collect();
        let beta = crate::vff::beta_coefficients(&h, &a, &theta, &diag)?;
        let (_, gamma_pt) = transfer_parameters(&gamma, &theta, &h, &a, dt, &diag)?;
        for nu in 0..n {
            let chosen = math::abs(gamma_pt[nu] - beta[nu]);
            for alpha in -2i64..=2 {
                let candidate = gamma[nu] + (math::PI / dt) * alpha as f64;
                worst = worst.max(chosen - math::abs(candidate - beta[nu]));
            }
        }
    }
    Ok(CheckResult::from_worst(
        "transfer_lattice",
        samples,
        worst,
        cfg.tolerances.inequality_slack,
    ))
}

pub fn check_vff_ansatz_unitary(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(20);
    let mut rng = Rng::stream(cfg.seed, &[22]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 2 + rng.below(2) as usize;
        let a = ansatz_for(n)?;
        let theta = random_theta(&a, &mut rng);
        let diag = DiagonalPauliSum::weight_one(n)?.with_gammas(&random_gammas(n, &mut rng))?;
        let v = vff_unitary(&a, &theta, &diag, 0.25)?;
        worst = worst.max(v.unitarity_error());
    }
    Ok(CheckResult::from_worst(
        "vff_ansatz_unitary",
        samples,
        worst,
        cfg.tolerances.unitarity,
    ))
}

pub fn check_eigh_reconstruction(cfg: &CheckConfig) -> Result<CheckResult> {
    let samples = cfg.samples(40);
    let mut rng = Rng::stream(cfg.seed, &[23]);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let n = 1 + rng.below(4) as usize;
        let m = random_hermitian(n, &mut rng)?;
        let eig = eigh(&m)?;
        let phases: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&l| Complex64::new(l, 0.0))
            .collect();
        let rebuilt = eig
            .eigenvectors
            .mul_diag_right(&phases)?
            .matmul_adjoint(&eig.eigenvectors)?;
        worst = worst.max(rebuilt.sub(&m)?.hs_norm() / m.hs_norm().max(1e-30));
        worst = worst.max(eig.eigenvectors.unitarity_error());
    }
    Ok(CheckResult::from_worst(
        "eigh_reconstruction",
        samples,
        worst,
        cfg.tolerances.reconstruction,
    ))
}

pub fn check_variance_zero_gamma(cfg: &CheckConfig) -> Result<CheckResult> {
    let report = scan_gradient_variance(
        build_xy_hamiltonian,
        2,
        3,
        cfg.samples(100).max(100),
        GammaRule::Zeros,
        cfg.seed,
    )?;
    let worst = report
        .rows
        .iter()
        .map(|r| math::abs(r.variance))
        .fold(0.0, f64::max);
    Ok(CheckResult::from_worst(
        "variance_zero_gamma",
        report.rows.len(),
        worst,
        0.0,
    ))
}

type CheckFn = fn(&CheckConfig) -> Result<CheckResult>;

/// All named checks in execution order.
pub const ALL_CHECKS: &[(&str, CheckFn)] = &[
    ("pauli_orthogonality", check_pauli_orthogonality),
    ("pauli_hs_norm", check_pauli_hs_norm),
    ("pauli_sum_linearity", check_pauli_sum_linearity),
    ("eigh_reconstruction", check_eigh_reconstruction),
    ("evolution_distance_bound", check_evolution_distance_bound),
    ("unitary_power_bound", check_unitary_power_bound),
    ("phase_min_distance_bound", check_phase_min_distance_bound),
    ("avg_fidelity_haar_mc", check_avg_fidelity_haar_mc),
    ("ansatz_unitarity", check_ansatz_unitarity),
    ("exp_diagonal_vs_dense", check_exp_diagonal_vs_dense),
    ("ansatz_composition", check_ansatz_composition),
    ("cost_expansion_vs_dense", check_cost_expansion_vs_dense),
    ("cost_normalized_range", check_cost_normalized_range),
    ("cost_faithfulness", check_cost_faithfulness),
    ("shot_calibration", check_shot_calibration),
    ("sampled_estimator_unbiased", check_sampled_estimator_unbiased),
    ("grad_theta_vs_fd", check_grad_theta_vs_fd),
    ("grad_gamma_vs_fd", check_grad_gamma_vs_fd),
    ("fidelity_bound_round_trip", check_fidelity_bound_round_trip),
    ("fidelity_cost_bound", check_fidelity_cost_bound),
    ("sweep_bound_envelope", check_sweep_bound_envelope),
    ("trotter_order", check_trotter_order),
    ("lhst_range", check_lhst_range),
    ("transfer_lattice", check_transfer_lattice),
    ("vff_ansatz_unitary", check_vff_ansatz_unitary),
    ("variance_zero_gamma", check_variance_zero_gamma),
];

/// Run every check.
pub fn run_all(cfg: &CheckConfig) -> Result<Vec<CheckResult>> {
    ALL_CHECKS.iter().map(|(_, f)| f(cfg)).collect()
}

/// Run a named subset; unknown names are an error.
pub fn run_named(cfg: &CheckConfig, names: &[&str]) -> Result<Vec<CheckResult>> {
    names
        .iter()
        .map(|name| {
            ALL_CHECKS
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| {
                    crate::Error::InvalidArgument(format!("unknown check \"{name}\""))
                })
                .and_then(|(_, f)| f(cfg))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_at_default_tolerances() {
        // Smaller sample counts keep this smoke test quick; the full-size
        // run lives in the acceptance suite.
        let cfg = CheckConfig {
            samples_scale: 0.2,
            ..CheckConfig::default()
        };
        for result in run_all(&cfg).unwrap() {
            assert!(result.passed, "{}: {}", result.name, result.detail);
        }
    }

    #[test]
    fn zero_tolerance_fails_some_check() {
        let cfg = CheckConfig {
            samples_scale: 0.1,
            tolerances: Tolerances::DEFAULT.scaled(0.0),
            ..CheckConfig::default()
        };
        let results = run_all(&cfg).unwrap();
        assert!(results.iter().any(|r| !r.passed));
    }

    #[test]
    fn named_subset_and_unknown_names() {
        let cfg = CheckConfig {
            samples_scale: 0.1,
            ..CheckConfig::default()
        };
        let picked = run_named(&cfg, &["pauli_orthogonality", "lhst_range"]).unwrap();
        assert_eq!(picked.len(), 2);
        assert_eq!(picked[0].name, "pauli_orthogonality");
        assert!(run_named(&cfg, &["no_such_check"]).is_err());
    }
}
