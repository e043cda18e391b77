//! Restart-level parallelism with scheduling-independent results.
//!
//! Restarts are pure functions of `(config, restart index)`, so workers pull
//! indices from a shared counter and the reduction sorts by index; the
//! output is byte-identical for any thread count. `VHD_SIM_THREADS` caps the
//! worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use vhd_core::ansatz::LayeredAnsatz;
use vhd_core::optimize::{
    reduce_restarts, run_single_restart, OptConfig, PipelineResult, RestartOutcome,
};
use vhd_core::pauli::{DiagonalPauliSum, PauliSum};

use crate::error::CliError;

pub const THREADS_ENV: &str = "VHD_SIM_THREADS";

/// Resolve the worker count: explicit config, else available parallelism,
/// capped by the environment variable and the job count.
pub fn effective_threads(configured: usize, jobs: usize) -> usize {
    let mut threads = if configured > 0 {
        configured
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    };
    if let Ok(cap) = std::env::var(THREADS_ENV) {
        if let Ok(cap) = cap.trim().parse::<usize>() {
            if cap > 0 {
                threads = threads.min(cap);
            }
        }
    }
    threads.clamp(1, jobs.max(1))
}

/// Run all restarts of the pipeline across `threads` workers.
pub fn run_restarts_parallel(
    h: &PauliSum,
    diag: &DiagonalPauliSum,
    ansatz: &LayeredAnsatz,
    dt: f64,
    opt: &OptConfig,
    threads: usize,
) -> Result<PipelineResult, CliError> {
    let threads = threads.clamp(1, opt.restarts);
    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<RestartOutcome>> = Mutex::new(Vec::with_capacity(opt.restarts));
    let first_error: Mutex<Option<vhd_core::Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let r = next.fetch_add(1, Ordering::SeqCst);
                if r >= opt.restarts || first_error.lock().unwrap().is_some() {
                    break;
                }
                match run_single_restart(h, diag, ansatz, dt, opt, r) {
                    Ok(outcome) => outcomes.lock().unwrap().push(outcome),
                    Err(err) => {
                        let mut slot = first_error.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(err);
                        }
                        break;
                    }
                }
            });
        }
    });

    if let Some(err) = first_error.into_inner().unwrap() {
        return Err(err.into());
    }
    let outcomes = outcomes.into_inner().unwrap();
    reduce_restarts(outcomes).map_err(CliError::from)
}
