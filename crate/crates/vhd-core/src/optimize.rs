//! Gradient descent on the diagonalization cost, fidelity-based termination,
//! and the two-phase multi-restart pipeline.
//!
//! The termination threshold comes from the bound between the cost and the
//! Haar-average simulation fidelity at horizon `T`: driving the cost below
//!
//! ```text
//! C_term = (2/T²) (1 - sqrt(1 - (d+1)/d (1 - F_term)))
//! ```
//!
//! guarantees average fidelity at least `F_term` at time `T`. Inverting the
//! same bound turns any measured cost into a guaranteed fidelity.
//!
//! Each pipeline restart draws its own parameters (`θ` uniform on `[0, 2π)`,
//! `γ` uniform on `[-1, 1]` scaled by the largest Hamiltonian coefficient),
//! pre-trains with the local Hilbert-Schmidt test, transfers the optimum
//! through the branch-resolving map, then descends the diagonalization cost.
//! Restarts use disjoint seed streams, so any scheduling of them produces
//! identical results; the winner is the restart with the lowest best-seen
//! cost (ties break to the lowest index).

use alloc::vec::Vec;

use crate::ansatz::LayeredAnsatz;
use crate::cost::{ShotConfig, VhdObjective};
use crate::math;
use crate::pauli::{DiagonalPauliSum, PauliSum};
use crate::rng::Rng;
use crate::vff::{transfer_parameters, vff_optimize, VffOutcome};
use crate::{Error, Result};

const RESTART_SALT: u64 = 0x7265_7374_6172_7400;
const SHOT_SALT: u64 = 0x7368_6f74_0000_0000;
const VHD_TAG_BASE: u64 = 0x5644_0000_0000;

/// Which phase of the pipeline produced a trace record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Vff,
    Vhd,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::Vff => "vff",
            Phase::Vhd => "vhd",
        }
    }
}

/// Parameter update strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// `θ` and `γ` move together every iteration.
    Joint,
    /// Blocks of `theta_steps` θ-only updates followed by one γ-only update.
    Nested { theta_steps: usize },
}

/// Optimization settings shared by both phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptConfig {
    /// Step size of the diagonalization-phase descent.
    pub learning_rate: f64,
    /// Step size of the pre-training descent. The compilation cost carries a
    /// `Δt²` curvature factor, so it wants a much larger step than the
    /// diagonalization cost tolerates.
    pub vff_learning_rate: f64,
    /// Heavy-ball momentum coefficient in `[0, 1)` for both phases.
    /// `0` is plain gradient descent. The larger chains need it: their
    /// landscape's condition number exceeds what a fixed step can traverse
    /// in the iteration budget.
    pub momentum: f64,
    /// Iterations per phase.
    pub max_iterations: usize,
    pub restarts: usize,
    /// Target average fidelity behind the termination threshold; `1.0`
    /// disables early stopping.
    pub f_term: f64,
    /// Simulation horizon the fidelity target refers to.
    pub t_target: f64,
    pub shot: ShotConfig,
    /// Master seed for parameter initialization.
    pub seed: u64,
    pub update_mode: UpdateMode,
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || self.vff_learning_rate <= 0.0 {
            return Err(Error::InvalidArgument("learning rates must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidArgument("momentum must lie in [0, 1)".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("need at least one iteration".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("need at least one restart".into()));
        }
        if self.t_target <= 0.0 {
            return Err(Error::InvalidArgument("target horizon must be positive".into()));
        }
        self.shot.validate()
    }
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            learning_rate: 0.05,
            vff_learning_rate: 1.0,
            momentum: 0.0,
            max_iterations: 320,
            restarts: 20,
            f_term: 1.0,
            t_target: 1000.0,
            shot: ShotConfig::exact(),
            seed: 0,
            update_mode: UpdateMode::Joint,
        }
    }
}

/// Cost threshold guaranteeing average fidelity `f_term` at horizon `t`.
pub fn termination_cost(f_term: f64, t: f64, d: usize) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if f_term > 1.0 {
        return Err(Error::InvalidArgument("fidelity target exceeds 1".into()));
    }
    let dd = d as f64;
    let radicand = 1.0 - (dd + 1.0) / dd * (1.0 - f_term);
    if radicand < 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "fidelity target {f_term} below the bound's domain 1/(d+1) = {:.6}",
            1.0 / (dd + 1.0)
        )));
    }
    Ok(2.0 / (t * t) * (1.0 - math::sqrt(radicand)))
}

/// Guaranteed average fidelity at horizon `t` given a measured cost:
/// the inverse of [`termination_cost`]; returns `0` when the bound is vacuous.
pub fn fidelity_lower_bound(cost: f64, t: f64, d: usize) -> f64 {
    if cost <= 0.0 {
        return 1.0;
    }
    let x = cost * t * t / 2.0;
    if x >= 1.0 {
        return 0.0;
    }
    let dd = d as f64;
    let f = 1.0 - dd / (dd + 1.0) * (1.0 - (1.0 - x) * (1.0 - x));
    f.clamp(0.0, 1.0)
}

/// One per-iteration record; `iteration` is 1-based within the phase and the
/// state is the pre-update point of that iteration.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub phase: Phase,
    pub iteration: usize,
    /// The phase's own objective (compilation cost during pre-training,
    /// diagonalization cost afterwards).
    pub phase_cost: f64,
    /// Diagonalization cost at the same parameters.
    pub vhd_cost: f64,
    pub vhd_cost_normalized: f64,
    pub grad_theta_norm: f64,
    pub grad_gamma_norm: f64,
}

/// Outcome of one gradient-descent run on the diagonalization cost.
#[derive(Debug, Clone)]
pub struct OptOutcome {
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Best-seen cost and its normalized value.
    pub best_cost: f64,
    pub best_cost_normalized: f64,
    pub trace: Vec<TraceRecord>,
    /// True if the loop stopped at the termination threshold.
    pub terminated_early: bool,
}

fn norm2(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Gradient descent on the diagonalization cost from a given start.
///
/// Records the pre-update state each iteration and stops as soon as the cost
/// reaches the termination threshold, so a start at a global minimum returns
/// after one iteration with unchanged parameters. Returns the best-seen
/// parameters (shot noise can make the last iterate worse than the best).
pub fn vhd_optimize(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    start_theta: &[f64],
    start_gamma: &[f64],
    opt: &OptConfig,
) -> Result<OptOutcome> {
    opt.validate()?;
    let obj = VhdObjective::new(h, diag, ansatz)?;
    let d = 1usize << h.n_qubits();
    let c_term = termination_cost(opt.f_term, opt.t_target, d)?;

    let mut theta = start_theta.to_vec();
    let mut gamma = start_gamma.to_vec();
    let mut best = (f64::INFINITY, f64::INFINITY, theta.clone(), gamma.clone());
    let mut trace = Vec::with_capacity(opt.max_iterations);
    let mut terminated_early = false;
    let stride = 2 * theta.len() as u64 + 2;
    let mut vel_theta = alloc::vec![0.0; theta.len()];
    let mut vel_gamma = alloc::vec![0.0; gamma.len()];

    for iter in 1..=opt.max_iterations {
        let tag = VHD_TAG_BASE + iter as u64 * stride;
        let eval = obj.eval(&theta, &gamma, &opt.shot, tag)?;
        let grad_t = obj.grad_theta(&theta, &gamma, &opt.shot, tag)?;
        trace.push(TraceRecord {
            phase: Phase::Vhd,
            iteration: iter,
            phase_cost: eval.cost,
            vhd_cost: eval.cost,
            vhd_cost_normalized: eval.cost_normalized,
            grad_theta_norm: norm2(&grad_t),
            grad_gamma_norm: norm2(&eval.grad_gamma),
        });
        if eval.cost < best.0 {
            best = (eval.cost, eval.cost_normalized, theta.clone(), gamma.clone());
        }
        if eval.cost <= c_term {
            terminated_early = true;
            break;
        }
        let move_theta;
        let move_gamma;
        match opt.update_mode {
            UpdateMode::Joint => {
                move_theta = true;
                move_gamma = true;
            }
            UpdateMode::Nested { theta_steps } => {
                let block = theta_steps.max(1) + 1;
                move_gamma = iter % block == 0;
                move_theta = !move_gamma;
            }
        }
        if move_theta {
            for ((t, v), g) in theta.iter_mut().zip(vel_theta.iter_mut()).zip(grad_t.iter()) {
                *v = opt.momentum * *v - opt.learning_rate * g;
                *t += *v;
            }
        }
        if move_gamma {
            for ((t, v), g) in gamma
                .iter_mut()
                .zip(vel_gamma.iter_mut())
                .zip(eval.grad_gamma.iter())
            {
                *v = opt.momentum * *v - opt.learning_rate * g;
                *t += *v;
            }
        }
    }

    Ok(OptOutcome {
        theta: best.2,
        gamma: best.3,
        best_cost: best.0,
        best_cost_normalized: best.1,
        trace,
        terminated_early,
    })
}

/// Outcome of one full restart: pre-training, transfer, diagonalization.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub restart: usize,
    /// Pre-training result (its parameters feed the dashed-line comparison).
    pub vff: VffOutcome,
    /// Parameters handed to the diagonalization phase after transfer.
    pub theta_pretrained: Vec<f64>,
    pub gamma_pretrained: Vec<f64>,
    /// Best diagonalization parameters of this restart.
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub best_cost: f64,
    pub best_cost_normalized: f64,
    /// Both phases' records, pre-training first.
    pub trace: Vec<TraceRecord>,
}

/// Draw the random start for one restart from its seed stream.
pub fn random_start(
    h: &PauliSum,
    ansatz: &LayeredAnsatz,
    diag: &DiagonalPauliSum,
    seed: u64,
    restart: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut rng = Rng::stream(seed, &[RESTART_SALT, restart as u64]);
    let theta = (0..ansatz.num_params())
        .map(|_| rng.uniform(0.0, math::TAU))
        .collect();
    let scale = h.coeff_max_abs();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let gamma = (0..diag.num_terms())
        .map(|_| rng.uniform(-1.0, 1.0) * scale)
        .collect();
    (theta, gamma)
}

/// One restart of the two-phase pipeline: random init, pre-training for
/// `max_iterations` steps, parameter transfer, then `max_iterations` steps
/// of diagonalization descent. Deterministic given `(opt.seed, restart)`.
pub fn run_single_restart(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    dt: f64,
    opt: &OptConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    opt.validate()?;
    let (theta0, gamma0) = random_start(h, ansatz, diag, opt.seed, restart);

    // Per-restart shot streams stay disjoint.
    let mut restart_opt = *opt;
    restart_opt.shot.seed = opt
        .shot
        .seed
        .wrapping_add(SHOT_SALT)
        .wrapping_add(restart as u64);

    let vff = vff_optimize(
        h,
        dt,
        ansatz,
        diag,
        &theta0,
        &gamma0,
        opt.max_iterations,
        opt.vff_learning_rate,
        opt.momentum,
        &restart_opt.shot,
    )?;
    let (theta_pt, gamma_pt) = transfer_parameters(&vff.gamma, &vff.theta, h, ansatz, dt, diag)?;
    let vhd = vhd_optimize(h, diag, ansatz, &theta_pt, &gamma_pt, &restart_opt)?;

    let mut trace: Vec<TraceRecord> = vff
        .records
        .iter()
        .map(|r| TraceRecord {
            phase: Phase::Vff,
            iteration: r.iteration,
            phase_cost: r.cost_vff,
            vhd_cost: r.vhd_cost,
            vhd_cost_normalized: r.vhd_cost_normalized,
            grad_theta_norm: r.grad_theta_norm,
            grad_gamma_norm: r.grad_gamma_norm,
        })
        .collect();
    trace.extend(vhd.trace.iter().cloned());

    Ok(RestartOutcome {
        restart,
        vff,
        theta_pretrained: theta_pt,
        gamma_pretrained: gamma_pt,
        theta: vhd.theta,
        gamma: vhd.gamma,
        best_cost: vhd.best_cost,
        best_cost_normalized: vhd.best_cost_normalized,
        trace,
    })
}

/// Full pipeline result across restarts.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub restarts: Vec<RestartOutcome>,
    /// Index into `restarts` of the winner (lowest best cost, ties to the
    /// lowest restart index).
    pub best_index: usize,
}

impl PipelineResult {
    pub fn best(&self) -> &RestartOutcome {
        &self.restarts[self.best_index]
    }

    /// Guaranteed average fidelity at horizon `t` from the winner's cost.
    pub fn guaranteed_fidelity(&self, t: f64, n_qubits: usize) -> f64 {
        fidelity_lower_bound(self.best().best_cost, t, 1usize << n_qubits)
    }
}

/// Reduce restart outcomes to a pipeline result. Outcomes may arrive from
/// any scheduling; the reduction sorts by restart index first so the result
/// is order-independent.
pub fn reduce_restarts(mut outcomes: Vec<RestartOutcome>) -> Result<PipelineResult> {
    if outcomes.is_empty() {
        return Err(Error::InvalidArgument("no restart outcomes".into()));
    }
    outcomes.sort_by_key(|o| o.restart);
    let mut best_index = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.best_cost < outcomes[best_index].best_cost {
            best_index = i;
        }
    }
    Ok(PipelineResult {
        restarts: outcomes,
        best_index,
    })
}

/// Run every restart sequentially. Callers that parallelize use
/// [`run_single_restart`] per index and [`reduce_restarts`] at the end;
/// both routes produce identical results.
pub fn run_pipeline(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    dt: f64,
    opt: &OptConfig,
) -> Result<PipelineResult> {
    opt.validate()?;
    let outcomes = (0..opt.restarts)
        .map(|r| run_single_restart(h, diag, ansatz, dt, opt, r))
        .collect::<Result<Vec<_>>>()?;
    reduce_restarts(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_layered_ansatz, GateKind, GateSpec};
    use crate::pauli::{build_xy_hamiltonian, PauliString};

    fn rx_rz_qubit() -> LayeredAnsatz {
        LayeredAnsatz::from_gates(
            1,
            0,
            alloc::vec![
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
    fn termination_cost_values() {
        assert_eq!(termination_cost(1.0, 10.0, 8).unwrap(), 0.0);
        // Frozen from a 50-digit evaluation of the closed form.
        let c = termination_cost(0.999, 10.0, 8).unwrap();
        let frozen = 1.125_316_584_353_755_4e-5;
        assert!((c - frozen).abs() < 1e-9 * frozen, "{c}");
        // Doubling the horizon quarters the threshold exactly.
        let c2 = termination_cost(0.999, 20.0, 8).unwrap();
        assert!((c - 4.0 * c2).abs() < 1e-18);
        // Below the domain the radicand goes negative.
        assert!(termination_cost(0.3, 10.0, 2).is_err());
    }

    #[test]
    fn fidelity_bound_round_trip_and_edges() {
        assert_eq!(fidelity_lower_bound(0.0, 5.0, 8), 1.0);
        assert_eq!(fidelity_lower_bound(10.0, 100.0, 8), 0.0);
        for &f in &[0.9_f64, 0.99, 0.999, 0.5] {
            for &t in &[0.5_f64, 1.0, 10.0] {
                for &d in &[2usize, 8, 32] {
                    if f <= 1.0 / (d as f64 + 1.0) {
                        continue;
                    }
                    let c = termination_cost(f, t, d).unwrap();
                    let back = fidelity_lower_bound(c, t, d);
                    assert!((back - f).abs() < 1e-12, "f={f} t={t} d={d} back={back}");
                }
            }
        }
        // Monotone non-increasing in cost and horizon.
        assert!(fidelity_lower_bound(1e-4, 10.0, 8) >= fidelity_lower_bound(2e-4, 10.0, 8));
        assert!(fidelity_lower_bound(1e-4, 10.0, 8) >= fidelity_lower_bound(1e-4, 20.0, 8));
    }

    #[test]
    fn starting_at_minimum_stops_immediately() {
        // H = X, D = Z with the exact basis change; f_term < 1 makes the
        // threshold positive, so the loop exits on the first record.
        let h = PauliSum::new(1, alloc::vec![(1.0, PauliString::new(1, 1, 0).unwrap())]).unwrap();
        let diag = crate::pauli::DiagonalPauliSum::new(1, alloc::vec![(1.0, 1)]).unwrap();
        let a = rx_rz_qubit();
        let theta = alloc::vec![math::PI / 2.0, math::PI / 2.0];
        let opt = OptConfig {
            f_term: 0.999,
            t_target: 10.0,
            max_iterations: 50,
            learning_rate: 0.1,
            restarts: 1,
            ..OptConfig::default()
        };
        let out = vhd_optimize(&h, &diag, &a, &theta, &[1.0], &opt).unwrap();
        assert!(out.terminated_early);
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.theta, theta);
        assert!(out.best_cost < 1e-12);
    }

    #[test]
    fn single_qubit_descent_reaches_deep_minimum() {
        // H = X, budget {Z}: most random starts reach < 1e-10 in 500 steps.
        let h = PauliSum::new(1, alloc::vec![(1.0, PauliString::new(1, 1, 0).unwrap())]).unwrap();
        let diag = crate::pauli::DiagonalPauliSum::new(1, alloc::vec![(0.0, 1)]).unwrap();
        let a = rx_rz_qubit();
        let mut successes = 0;
        for seed in 0..20u64 {
            let opt = OptConfig {
                learning_rate: 0.2,
                max_iterations: 500,
                seed,
                ..OptConfig::default()
            };
            let (theta0, gamma0) = random_start(&h, &a, &diag, seed, 0);
            let out = vhd_optimize(&h, &diag, &a, &theta0, &gamma0, &opt).unwrap();
            assert!(out.trace.len() <= 500);
            if out.best_cost < 1e-10 {
                successes += 1;
            }
        }
        assert!(successes >= 18, "only {successes}/20 seeds converged");
    }

    #[test]
    fn nested_mode_decreases_cost() {
        let n = 2;
        let h = build_xy_hamiltonian(n).unwrap();
        let diag = crate::pauli::DiagonalPauliSum::weight_one(n).unwrap();
        let a = build_layered_ansatz(n, 1).unwrap();
        let opt = OptConfig {
            learning_rate: 0.05,
            max_iterations: 60,
            update_mode: UpdateMode::Nested { theta_steps: 4 },
            seed: 3,
            ..OptConfig::default()
        };
        let (theta0, gamma0) = random_start(&h, &a, &diag, 3, 0);
        let out = vhd_optimize(&h, &diag, &a, &theta0, &gamma0, &opt).unwrap();
        let first = out.trace.first().unwrap().vhd_cost;
        assert!(out.best_cost < first);
    }

    #[test]
    fn pipeline_is_deterministic_and_matches_manual_composition() {
        let n = 2;
        let h = build_xy_hamiltonian(n).unwrap();
        let diag = crate::pauli::DiagonalPauliSum::weight_one(n).unwrap();
        let a = build_layered_ansatz(n, 1).unwrap();
        let dt = 0.25;
        let opt = OptConfig {
            learning_rate: 0.08,
            max_iterations: 15,
            restarts: 2,
            seed: 11,
            ..OptConfig::default()
        };
        let p1 = run_pipeline(&h, &diag, &a, dt, &opt).unwrap();
        let p2 = run_pipeline(&h, &diag, &a, dt, &opt).unwrap();
        assert_eq!(p1.best_index, p2.best_index);
        assert_eq!(p1.best().theta, p2.best().theta);
        assert_eq!(p1.best().gamma, p2.best().gamma);

        // One restart reproduces the manual three-stage composition.
        let single = run_single_restart(&h, &diag, &a, dt, &opt, 0).unwrap();
        assert_eq!(p1.restarts[0].theta, single.theta);
        assert_eq!(p1.restarts[0].best_cost, single.best_cost);
        // Trace carries both phases in order.
        assert_eq!(
            single.trace.iter().filter(|r| r.phase == Phase::Vff).count(),
            15
        );
        assert!(single
            .trace
            .windows(2)
            .all(|w| w[0].phase != w[1].phase || w[1].iteration == w[0].iteration + 1));
    }
}
