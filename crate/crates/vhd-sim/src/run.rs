//! Subcommand implementations: diagonalize, fastforward, variance-scan,
//! verify.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use vhd_core::ansatz::{build_layered_ansatz, LayeredAnsatz};
use vhd_core::cost::EvalMode;
use vhd_core::fastforward::{infidelity_sweep, log_grid, vff_infidelity_sweep, SweepResult};
use vhd_core::optimize::{PipelineResult, TraceRecord};
use vhd_core::pauli::{build_xy_hamiltonian, DiagonalPauliSum, PauliSum};
use vhd_core::variance::scan_gradient_variance;
use vhd_core::verify::{run_all, run_named, CheckConfig};
use vhd_core::Tolerances;

use crate::config::{ExperimentConfig, ModelKind};
use crate::error::CliError;
use crate::output::{artifact_header, atomic_write, json_escape, VERSION};
use crate::params_io::ParamsFile;
use crate::parallel::{effective_threads, run_restarts_parallel};

/// Resolve the target Hamiltonian from the configuration.
pub fn build_hamiltonian(cfg: &ExperimentConfig) -> Result<PauliSum, CliError> {
    match cfg.model {
        ModelKind::Xy => Ok(build_xy_hamiltonian(cfg.n)?),
        ModelKind::File => {
            let text = std::fs::read_to_string(&cfg.hamiltonian)
                .map_err(|e| CliError::io("reading hamiltonian file", e))?;
            let h = PauliSum::from_text(&text)?;
            if h.n_qubits() != cfg.n {
                return Err(CliError::usage(format!(
                    "hamiltonian file is on {} qubits but config says n = {}",
                    h.n_qubits(),
                    cfg.n
                )));
            }
            Ok(h)
        }
    }
}

fn trace_columns() -> &'static str {
    "phase,iteration,c_vhd,c_vhd_normalized,grad_norm_theta,grad_norm_gamma,shots,seed,phase_cost"
}

fn trace_row(r: &TraceRecord, shots: u64, seed: u64) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        r.phase.label(),
        r.iteration,
        r.vhd_cost,
        r.vhd_cost_normalized,
        r.grad_theta_norm,
        r.grad_gamma_norm,
        shots,
        seed,
        r.phase_cost
    )
}

fn sweep_csv(header: &str, sweep: &SweepResult) -> String {
    let mut out = String::from(header);
    out.push_str("T,infidelity,source\n");
    for (t, inf) in sweep.times.iter().zip(sweep.infidelities.iter()) {
        let _ = writeln!(out, "{t},{inf},{}", sweep.source.label());
    }
    out
}

fn summary_json(
    cfg: &ExperimentConfig,
    result: &PipelineResult,
    n: usize,
    wall_time_s: f64,
) -> String {
    let best = result.best();
    let fidelity = result.guaranteed_fidelity(cfg.t_target, n);
    let mode = match cfg.mode {
        EvalMode::Exact => "exact",
        EvalMode::Sampled => "sampled",
    };
    let model = match cfg.model {
        ModelKind::Xy => "xy",
        ModelKind::File => "file",
    };
    format!(
        "{{\n  \"config_hash\": \"{hash}\",\n  \"seed\": {seed},\n  \"version\": \"{version}\",\n  \"model\": \"{model}\",\n  \"n\": {n},\n  \"m\": {m},\n  \"delta_t\": {dt},\n  \"mode\": \"{mode}\",\n  \"shots\": {shots},\n  \"restarts\": {restarts},\n  \"iterations_per_phase\": {iters},\n  \"best_restart\": {best_restart},\n  \"best_c_vhd\": {cost},\n  \"best_c_vhd_normalized\": {norm},\n  \"best_c_vff\": {cvff},\n  \"guaranteed_fidelity_at_t_target\": {fid},\n  \"t_target\": {tt},\n  \"wall_time_s\": {wall}\n}}\n",
        hash = json_escape(&cfg.hash()),
        seed = cfg.seed,
        version = json_escape(VERSION),
        model = model,
        n = n,
        m = cfg.layers(),
        dt = cfg.delta_t,
        mode = mode,
        shots = if cfg.mode == EvalMode::Sampled { cfg.shots } else { 0 },
        restarts = cfg.restarts,
        iters = cfg.iterations,
        best_restart = best.restart,
        cost = best.best_cost,
        norm = best.best_cost_normalized,
        cvff = best.vff.cost,
        fid = fidelity,
        tt = cfg.t_target,
        wall = wall_time_s,
    )
}

/// Run the full pipeline and write all training artifacts.
pub fn cmd_diagonalize(cfg: &ExperimentConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let h = build_hamiltonian(cfg)?;
    let ansatz = build_layered_ansatz(cfg.n, cfg.layers())?;
    let diag = DiagonalPauliSum::weight_one(cfg.n)?;
    let opt = cfg.opt_config();
    let threads = effective_threads(cfg.threads, cfg.restarts);

    let start = Instant::now();
    let result = run_restarts_parallel(&h, &diag, &ansatz, cfg.delta_t, &opt, threads)?;
    let wall = start.elapsed().as_secs_f64();

    let header = artifact_header(&cfg.hash(), cfg.seed);
    let shots = if cfg.mode == EvalMode::Sampled { cfg.shots } else { 0 };
    let out = Path::new(&cfg.out);

    let mut hamiltonian_text = header.clone();
    hamiltonian_text.push_str(&h.to_text());
    atomic_write(&out.join("hamiltonian.txt"), &hamiltonian_text)?;

    let mut ansatz_text = header.clone();
    ansatz_text.push_str(&ansatz.to_text());
    atomic_write(&out.join("ansatz.txt"), &ansatz_text)?;

    let best = result.best();
    let mut trace = header.clone();
    trace.push_str(trace_columns());
    trace.push('\n');
    for rec in &best.trace {
        trace.push_str(&trace_row(rec, shots, cfg.seed));
    }
    atomic_write(&out.join("trace.csv"), &trace)?;

    let mut all = header.clone();
    all.push_str("restart,");
    all.push_str(trace_columns());
    all.push('\n');
    for outcome in &result.restarts {
        for rec in &outcome.trace {
            let _ = write!(all, "{},", outcome.restart);
            all.push_str(&trace_row(rec, shots, cfg.seed));
        }
    }
    atomic_write(&out.join("trace_all.csv"), &all)?;

    let vhd_params = ParamsFile {
        n: cfg.n,
        m: cfg.layers(),
        delta_t: cfg.delta_t,
        phase: "vhd".into(),
        theta: best.theta.clone(),
        gamma: best.gamma.clone(),
    };
    atomic_write(&out.join("params_vhd.txt"), &vhd_params.to_text(&header))?;
    let vff_params = ParamsFile {
        n: cfg.n,
        m: cfg.layers(),
        delta_t: cfg.delta_t,
        phase: "vff".into(),
        theta: best.vff.theta.clone(),
        gamma: best.vff.gamma.clone(),
    };
    atomic_write(&out.join("params_vff.txt"), &vff_params.to_text(&header))?;

    atomic_write(
        &out.join("summary.json"),
        &summary_json(cfg, &result, cfg.n, wall),
    )?;

    println!(
        "diagonalize: best restart {} of {}, normalized cost {:.3e}, guaranteed fidelity {:.6} at T = {}",
        best.restart,
        cfg.restarts,
        best.best_cost_normalized,
        result.guaranteed_fidelity(cfg.t_target, cfg.n),
        cfg.t_target
    );
    Ok(())
}

fn read_params(path: &Path) -> Result<ParamsFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    ParamsFile::from_text(&text)
}

/// Sweep infidelity against time for both trained parameter sets.
pub fn cmd_fastforward(cfg: &ExperimentConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let out = Path::new(&cfg.out);
    let vhd = read_params(&out.join("params_vhd.txt"))?;
    let vff = read_params(&out.join("params_vff.txt"))?;
    if vhd.n != cfg.n {
        return Err(CliError::usage(format!(
            "trained parameters are for n = {}, config says n = {}",
            vhd.n, cfg.n
        )));
    }
    let h = build_hamiltonian(cfg)?;
    let ansatz = build_layered_ansatz(vhd.n, vhd.m)?;
    let diag = DiagonalPauliSum::weight_one(vhd.n)?;
    if vhd.gamma.len() != diag.num_terms() || vhd.theta.len() != ansatz.num_params() {
        return Err(CliError::usage(
            "trained parameter counts do not match the rebuilt circuit",
        ));
    }

    let grid = if cfg.t_points == 1 {
        vec![cfg.t_min]
    } else {
        log_grid(cfg.t_min, cfg.t_max, cfg.t_points)?
    };
    let header = artifact_header(&cfg.hash(), cfg.seed);

    let diag_vhd = diag.with_gammas(&vhd.gamma)?;
    let sweep = infidelity_sweep(&h, &ansatz, &vhd.theta, &diag_vhd, &grid)?;
    atomic_write(
        &out.join(format!("ff_n{}_vhd.csv", vhd.n)),
        &sweep_csv(&header, &sweep),
    )?;

    let diag_vff = diag.with_gammas(&vff.gamma)?;
    let vff_sweep = vff_infidelity_sweep(&h, &ansatz, &vff.theta, &diag_vff, vff.delta_t, &grid)?;
    atomic_write(
        &out.join(format!("ff_n{}_vff.csv", vhd.n)),
        &sweep_csv(&header, &vff_sweep),
    )?;

    let max_inf = sweep.infidelities.iter().cloned().fold(0.0f64, f64::max);
    println!(
        "fastforward: {} points, max infidelity {max_inf:.3e} (trained), first pre-training point {:.3e}",
        sweep.times.len(),
        vff_sweep.infidelities.first().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

/// Gradient-variance scan over system sizes.
pub fn cmd_variance_scan(cfg: &ExperimentConfig) -> Result<(), CliError> {
    cfg.validate()?;
    if cfg.model != ModelKind::Xy {
        return Err(CliError::usage(
            "variance scans need a Hamiltonian family; only model = xy provides one",
        ));
    }
    let report = scan_gradient_variance(
        build_xy_hamiltonian,
        cfg.variance_n_min,
        cfg.variance_n_max,
        cfg.variance_samples,
        cfg.variance_gamma_rule,
        cfg.seed,
    )?;
    let mut text = artifact_header(&cfg.hash(), cfg.seed);
    let _ = writeln!(
        text,
        "# gamma_rule={} probe=first-internal-layer-gate-on-middle-qubit",
        report.gamma_rule.label()
    );
    text.push_str("n,samples,mean,variance,stderr\n");
    for row in &report.rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            row.n, row.samples, row.mean, row.variance, row.stderr
        );
    }
    atomic_write(&Path::new(&cfg.out).join("variance.csv"), &text)?;
    println!("variance-scan: {} sizes written", report.rows.len());
    Ok(())
}

/// Run the property suites; nonzero exit on any violation.
pub fn cmd_verify(cfg: &ExperimentConfig, suites: &[String]) -> Result<(), CliError> {
    cfg.validate()?;
    let check_cfg = CheckConfig {
        seed: cfg.seed,
        tolerances: Tolerances::DEFAULT.scaled(cfg.verify_tolerance_scale),
        samples_scale: cfg.verify_samples_scale,
    };
    let results = if suites.is_empty() {
        run_all(&check_cfg)?
    } else {
        let names: Vec<&str> = suites.iter().map(String::as_str).collect();
        run_named(&check_cfg, &names)?
    };
    let mut failed: Vec<&str> = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {name} (samples={n}): {detail}", name = r.name, n = r.samples, detail = r.detail);
        if !r.passed {
            failed.push(r.name);
        }
    }
    println!(
        "verify: {}/{} suites passed",
        results.len() - failed.len(),
        results.len()
    );
    if let Some(first) = failed.first() {
        return Err(CliError::failure(format!(
            "{} suite(s) violated; first failure: {first}",
            failed.len()
        )));
    }
    Ok(())
}

/// Rebuild the circuit a params file refers to (used by tests).
pub fn ansatz_from_params(p: &ParamsFile) -> Result<LayeredAnsatz, CliError> {
    Ok(build_layered_ansatz(p.n, p.m)?)
}
