// scratch tuning harness (not part of the shipped surface)
use vhd_core::ansatz::build_layered_ansatz;
use vhd_core::fastforward::{infidelity_sweep, log_grid, vff_infidelity_sweep};
use vhd_core::optimize::{reduce_restarts, run_single_restart, OptConfig};
use vhd_core::pauli::{build_xy_hamiltonian, DiagonalPauliSum};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(3);
    let m: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0);
    let lr_vff: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let lr_vhd: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let restarts: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(20);
    let iters: usize = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(320);
    let seed: u64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(42);
    let momentum: f64 = args.get(8).map(|s| s.parse().unwrap()).unwrap_or(0.0);
    let m = if m == 0 { n } else { m };

    let h = build_xy_hamiltonian(n).unwrap();
    let diag = DiagonalPauliSum::weight_one(n).unwrap();
    let a = build_layered_ansatz(n, m).unwrap();
    println!("n={n} m={m} params={} lr=({lr_vff},{lr_vhd}) mom={momentum} restarts={restarts} iters={iters} seed={seed}", a.num_params());
    let dt = 0.25;
    let opt = OptConfig { learning_rate: lr_vhd, vff_learning_rate: lr_vff, momentum, max_iterations: iters, restarts, seed, ..OptConfig::default() };

    let t0 = std::time::Instant::now();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let outcomes = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..2 {
            s.spawn(|| loop {
                let r = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if r >= restarts { break; }
                let out = run_single_restart(&h, &diag, &a, dt, &opt, r).unwrap();
                outcomes.lock().unwrap().push(out);
            });
        }
    });
    let result = reduce_restarts(outcomes.into_inner().unwrap()).unwrap();
    let mut norms: Vec<f64> = result.restarts.iter().map(|o| o.best_cost_normalized).collect();
    norms.sort_by(f64::total_cmp);
    println!("sorted: {:?}", norms.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>());
    let best = result.best();
    let plateau = best.vff.records.iter().map(|r| r.vhd_cost_normalized).fold(f64::INFINITY, f64::min);
    println!("BEST r{} norm {:.3e} C_VFF {:.2e} plateau {:.2e}  elapsed {:?}", best.restart, best.best_cost_normalized, best.vff.cost, plateau, t0.elapsed());

    let grid = log_grid(0.1, 1000.0, 50).unwrap();
    let dg = diag.with_gammas(&best.gamma).unwrap();
    let sweep = infidelity_sweep(&h, &a, &best.theta, &dg, &grid).unwrap();
    println!("max infidelity T<=1e3: {:.3e}", sweep.infidelities.iter().cloned().fold(0.0f64, f64::max));
    let dgv = diag.with_gammas(&best.vff.gamma).unwrap();
    let vs = vff_infidelity_sweep(&h, &a, &best.vff.theta, &dgv, dt, &grid).unwrap();
    println!("vff first-step infidelity: {:.3e}", vs.infidelities[0]);
}
