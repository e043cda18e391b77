// scratch: inspect one restart's phase trajectories
use vhd_core::ansatz::build_layered_ansatz;
use vhd_core::optimize::{run_single_restart, OptConfig, Phase};
use vhd_core::pauli::{build_xy_hamiltonian, DiagonalPauliSum};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args[1].parse().unwrap();
    let m: usize = args[2].parse().unwrap();
    let lr_vff: f64 = args[3].parse().unwrap();
    let lr_vhd: f64 = args[4].parse().unwrap();
    let restart: usize = args[5].parse().unwrap();
    let iters: usize = args[6].parse().unwrap();
    let seed: u64 = args[7].parse().unwrap();

    let h = build_xy_hamiltonian(n).unwrap();
    let diag = DiagonalPauliSum::weight_one(n).unwrap();
    let a = build_layered_ansatz(n, m).unwrap();
    let opt = OptConfig { learning_rate: lr_vhd, vff_learning_rate: lr_vff, max_iterations: iters, restarts: restart + 1, seed, ..OptConfig::default() };
    let out = run_single_restart(&h, &diag, &a, 0.25, &opt, restart).unwrap();
    println!("n={n} m={m} lr=({lr_vff},{lr_vhd}) restart={restart} seed={seed}");
    for phase in [Phase::Vff, Phase::Vhd] {
        let xs: Vec<(usize, f64, f64)> = out.trace.iter().filter(|r| r.phase == phase)
            .map(|r| (r.iteration, r.phase_cost, r.grad_theta_norm)).collect();
        print!("{:?}:", phase);
        for &(i, c, g) in xs.iter().filter(|(i, _, _)| *i == 1 || i % 40 == 0) {
            print!("  it{i} c={c:.3e} g={g:.2e}");
        }
        println!();
    }
    println!("final norm {:.3e}  C_VFF {:.3e}", out.best_cost_normalized, out.vff.cost);
}
