// scratch: edge-dressed brick variant (rotation rows cover every qubit)
use vhd_core::ansatz::{GateKind, GateSpec, LayeredAnsatz};
use vhd_core::optimize::{reduce_restarts, run_single_restart, OptConfig};
use vhd_core::pauli::{build_xy_hamiltonian, DiagonalPauliSum};

fn dressed(n: usize, m: usize) -> LayeredAnsatz {
    let mut gates = Vec::new();
    let mut p = 0usize;
    let mut push = |g: &mut Vec<GateSpec>, kind, q, q2| {
        g.push(GateSpec { kind, qubit: q, qubit2: q2, param_index: p });
        p += 1;
    };
    for q in 0..n { push(&mut gates, GateKind::Rx, q, None); push(&mut gates, GateKind::Rz, q, None); }
    for _l in 0..m {
        for start in [0usize, 1] {
            let mut q = start;
            while q + 1 < n { push(&mut gates, GateKind::Zz, q, Some(q + 1)); q += 2; }
            for q in 0..n { push(&mut gates, GateKind::Rx, q, None); push(&mut gates, GateKind::Rz, q, None); }
        }
    }
    for q in 0..n { push(&mut gates, GateKind::Rz, q, None); push(&mut gates, GateKind::Rx, q, None); }
    LayeredAnsatz::from_gates(n, m, gates).unwrap()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args[1].parse().unwrap();
    let m: usize = args[2].parse().unwrap();
    let lr_vff: f64 = args[3].parse().unwrap();
    let lr_vhd: f64 = args[4].parse().unwrap();
    let restarts: usize = args[5].parse().unwrap();
    let iters: usize = args[6].parse().unwrap();
    let seed: u64 = args[7].parse().unwrap();

    let h = build_xy_hamiltonian(n).unwrap();
    let diag = DiagonalPauliSum::weight_one(n).unwrap();
    let a = dressed(n, m);
    println!("DRESSED n={n} m={m} params={} lr=({lr_vff},{lr_vhd}) restarts={restarts} seed={seed}", a.num_params());
    let opt = OptConfig { learning_rate: lr_vhd, vff_learning_rate: lr_vff, max_iterations: iters, restarts, seed, ..OptConfig::default() };
    let next = std::sync::atomic::AtomicUsize::new(0);
    let outcomes = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..2 { s.spawn(|| loop {
            let r = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            if r >= restarts { break; }
            let out = run_single_restart(&h, &diag, &a, 0.25, &opt, r).unwrap();
            outcomes.lock().unwrap().push(out);
        }); }
    });
    let result = reduce_restarts(outcomes.into_inner().unwrap()).unwrap();
    let mut norms: Vec<f64> = result.restarts.iter().map(|o| o.best_cost_normalized).collect();
    norms.sort_by(f64::total_cmp);
    println!("sorted: {:?}", norms.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>());
    println!("BEST r{} norm {:.3e} C_VFF {:.2e}", result.best().restart, result.best().best_cost_normalized, result.best().vff.cost);
}
