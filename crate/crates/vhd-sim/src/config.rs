//! Flat `key = value` experiment configuration with override support.
//!
//! A config file is plain text: one `key = value` per line, `#` comments,
//! unknown keys rejected. Command-line `--set key=value` overrides win over
//! the file, and dedicated flags (`--seed`, `--out`, ...) win over both.
//! The canonical text of the resolved config is hashed into every output
//! artifact so results can be traced back to their inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use vhd_core::cost::{EvalMode, ShotConfig};
use vhd_core::optimize::{OptConfig, UpdateMode};
use vhd_core::variance::GammaRule;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Xy,
    File,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// Path to a Pauli-sum text file when `model = file`.
    pub hamiltonian: String,
    pub n: usize,
    /// Ansatz layers; 0 means "use n".
    pub m: usize,
    pub delta_t: f64,
    /// Iterations per optimization phase.
    pub iterations: usize,
    pub restarts: usize,
    pub mode: EvalMode,
    pub shots: u64,
    pub learning_rate: f64,
    pub vff_learning_rate: f64,
    /// Heavy-ball momentum for both phases; 0 is plain descent.
    pub momentum: f64,
    pub f_term: f64,
    pub t_target: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub out: String,
    pub seed: u64,
    /// Worker threads; 0 means "use the available parallelism".
    pub threads: usize,
    pub variance_n_min: usize,
    pub variance_n_max: usize,
    pub variance_samples: usize,
    pub variance_gamma_rule: GammaRule,
    pub verify_samples_scale: f64,
    pub verify_tolerance_scale: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelKind::Xy,
            hamiltonian: String::new(),
            n: 3,
            m: 0,
            delta_t: 0.25,
            iterations: 320,
            restarts: 20,
            mode: EvalMode::Exact,
            shots: 1_000_000,
            learning_rate: 0.05,
            vff_learning_rate: 1.0,
            momentum: 0.0,
            f_term: 1.0,
            t_target: 1000.0,
            t_min: 0.1,
            t_max: 1000.0,
            t_points: 50,
            out: "out".into(),
            seed: 42,
            threads: 0,
            variance_n_min: 2,
            variance_n_max: 7,
            variance_samples: 200,
            variance_gamma_rule: GammaRule::Ones,
            verify_samples_scale: 1.0,
            verify_tolerance_scale: 1.0,
        }
    }
}

impl ExperimentConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::usage(format!("config key {key}: {what} \"{value}\""));
        match key {
            "model" => {
                self.model = match value {
                    "xy" => ModelKind::Xy,
                    "file" => ModelKind::File,
                    _ => return Err(bad("expected xy or file, got")),
                }
            }
            "hamiltonian" => self.hamiltonian = value.to_string(),
            "n" => self.n = value.parse().map_err(|_| bad("bad integer"))?,
            "m" => self.m = value.parse().map_err(|_| bad("bad integer"))?,
            "delta_t" => self.delta_t = value.parse().map_err(|_| bad("bad number"))?,
            "iterations" => self.iterations = value.parse().map_err(|_| bad("bad integer"))?,
            "restarts" => self.restarts = value.parse().map_err(|_| bad("bad integer"))?,
            "mode" => {
                self.mode = match value {
                    "exact" => EvalMode::Exact,
                    "sampled" => EvalMode::Sampled,
                    _ => return Err(bad("expected exact or sampled, got")),
                }
            }
            "shots" => self.shots = value.parse().map_err(|_| bad("bad integer"))?,
            "learning_rate" => self.learning_rate = value.parse().map_err(|_| bad("bad number"))?,
            "vff_learning_rate" => {
                self.vff_learning_rate = value.parse().map_err(|_| bad("bad number"))?
            }
            "momentum" => self.momentum = value.parse().map_err(|_| bad("bad number"))?,
            "f_term" => self.f_term = value.parse().map_err(|_| bad("bad number"))?,
            "t_target" => self.t_target = value.parse().map_err(|_| bad("bad number"))?,
            "t_min" => self.t_min = value.parse().map_err(|_| bad("bad number"))?,
            "t_max" => self.t_max = value.parse().map_err(|_| bad("bad number"))?,
            "t_points" => self.t_points = value.parse().map_err(|_| bad("bad integer"))?,
            "out" => self.out = value.to_string(),
            "seed" => self.seed = value.parse().map_err(|_| bad("bad integer"))?,
            "threads" => self.threads = value.parse().map_err(|_| bad("bad integer"))?,
            "variance_n_min" => {
                self.variance_n_min = value.parse().map_err(|_| bad("bad integer"))?
            }
            "variance_n_max" => {
                self.variance_n_max = value.parse().map_err(|_| bad("bad integer"))?
            }
            "variance_samples" => {
                self.variance_samples = value.parse().map_err(|_| bad("bad integer"))?
            }
            "variance_gamma_rule" => {
                self.variance_gamma_rule = match value {
                    "ones" => GammaRule::Ones,
                    "zeros" => GammaRule::Zeros,
                    _ => return Err(bad("expected ones or zeros, got")),
                }
            }
            "verify_samples_scale" => {
                self.verify_samples_scale = value.parse().map_err(|_| bad("bad number"))?
            }
            "verify_tolerance_scale" => {
                self.verify_tolerance_scale = value.parse().map_err(|_| bad("bad number"))?
            }
            _ => return Err(CliError::usage(format!("unknown config key \"{key}\""))),
        }
        Ok(())
    }

    /// Parse a config document on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: &str| Err(CliError::usage(format!("invalid config: {msg}")));
        if self.model == ModelKind::File && self.hamiltonian.is_empty() {
            return fail("model = file needs a hamiltonian path");
        }
        if self.model == ModelKind::Xy && self.n < 2 {
            return fail("the XY model needs n >= 2");
        }
        if self.n == 0 || self.n > vhd_core::MAX_DENSE_QUBITS {
            return fail("n outside the dense range");
        }
        if self.delta_t <= 0.0 {
            return fail("delta_t must be positive");
        }
        if self.iterations == 0 || self.restarts == 0 {
            return fail("iterations and restarts must be at least 1");
        }
        if self.mode == EvalMode::Sampled && self.shots == 0 {
            return fail("sampled mode needs shots >= 1");
        }
        if self.learning_rate <= 0.0 || self.vff_learning_rate <= 0.0 {
            return fail("learning rates must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return fail("momentum must lie in [0, 1)");
        }
        if !(self.f_term > 0.0 && self.f_term <= 1.0) {
            return fail("f_term must lie in (0, 1]");
        }
        if self.t_target <= 0.0 {
            return fail("t_target must be positive");
        }
        if self.t_points == 0 {
            return fail("time grid needs at least one point");
        }
        if self.t_points == 1 {
            if self.t_min < 0.0 {
                return fail("a single-point grid needs t_min >= 0");
            }
        } else if !(self.t_min > 0.0 && self.t_max > self.t_min) {
            return fail("time grid needs 0 < t_min < t_max");
        }
        if self.variance_n_min < 2 || self.variance_n_max < self.variance_n_min {
            return fail("variance scan needs 2 <= n_min <= n_max");
        }
        if self.variance_samples < 100 {
            return fail("variance scans need at least 100 samples");
        }
        if self.verify_samples_scale <= 0.0 {
            return fail("verify_samples_scale must be positive");
        }
        if self.verify_tolerance_scale < 0.0 {
            return fail("verify_tolerance_scale must be non-negative");
        }
        Ok(())
    }

    /// Effective layer count (`m = n` heuristic when unset).
    pub fn layers(&self) -> usize {
        if self.m == 0 {
            self.n
        } else {
            self.m
        }
    }

    pub fn shot_config(&self) -> ShotConfig {
        ShotConfig {
            mode: self.mode,
            shots: self.shots,
            // Shot streams live in their own seed space, derived from the
            // master seed.
            seed: self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1),
        }
    }

    pub fn opt_config(&self) -> OptConfig {
        OptConfig {
            learning_rate: self.learning_rate,
            vff_learning_rate: self.vff_learning_rate,
            momentum: self.momentum,
            max_iterations: self.iterations,
            restarts: self.restarts,
            f_term: self.f_term,
            t_target: self.t_target,
            shot: self.shot_config(),
            seed: self.seed,
            update_mode: UpdateMode::Joint,
        }
    }

    /// Canonical text: every content-determining key in sorted order.
    /// `out` and `threads` are excluded — where artifacts land and how many
    /// workers compute them cannot change a single output byte.
    pub fn canonical_text(&self) -> String {
        let mut map: BTreeMap<&str, String> = BTreeMap::new();
        map.insert(
            "model",
            match self.model {
                ModelKind::Xy => "xy".into(),
                ModelKind::File => "file".into(),
            },
        );
        map.insert("hamiltonian", self.hamiltonian.clone());
        map.insert("n", self.n.to_string());
        map.insert("m", self.m.to_string());
        map.insert("delta_t", self.delta_t.to_string());
        map.insert("iterations", self.iterations.to_string());
        map.insert("restarts", self.restarts.to_string());
        map.insert(
            "mode",
            match self.mode {
                EvalMode::Exact => "exact".into(),
                EvalMode::Sampled => "sampled".into(),
            },
        );
        map.insert("shots", self.shots.to_string());
        map.insert("learning_rate", self.learning_rate.to_string());
        map.insert("vff_learning_rate", self.vff_learning_rate.to_string());
        map.insert("momentum", self.momentum.to_string());
        map.insert("f_term", self.f_term.to_string());
        map.insert("t_target", self.t_target.to_string());
        map.insert("t_min", self.t_min.to_string());
        map.insert("t_max", self.t_max.to_string());
        map.insert("t_points", self.t_points.to_string());
        map.insert("seed", self.seed.to_string());
        map.insert("variance_n_min", self.variance_n_min.to_string());
        map.insert("variance_n_max", self.variance_n_max.to_string());
        map.insert("variance_samples", self.variance_samples.to_string());
        map.insert(
            "variance_gamma_rule",
            self.variance_gamma_rule.label().to_string(),
        );
        map.insert(
            "verify_samples_scale",
            self.verify_samples_scale.to_string(),
        );
        map.insert(
            "verify_tolerance_scale",
            self.verify_tolerance_scale.to_string(),
        );
        let mut out = String::new();
        for (k, v) in map {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// FNV-1a hash of the canonical text, as fixed-width hex.
    pub fn hash(&self) -> String {
        format!("{:016x}", fnv1a64(self.canonical_text().as_bytes()))
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn text_and_overrides() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("# comment\nn = 4\nmode = sampled\nshots = 500\n")
            .unwrap();
        assert_eq!(cfg.n, 4);
        assert_eq!(cfg.mode, EvalMode::Sampled);
        assert_eq!(cfg.shots, 500);
        cfg.set("n", "5").unwrap();
        assert_eq!(cfg.n, 5);
        assert!(cfg.set("frobnicate", "1").is_err());
        assert!(cfg.set("n", "x").is_err());
        assert!(cfg.apply_text("n 5\n").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        assert_eq!(a.hash(), b.hash());
        b.set("seed", "43").unwrap();
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("t_points", "0").unwrap();
        assert!(cfg.validate().is_err());
        // A single-point grid is fine, even at T = 0.
        let mut cfg = ExperimentConfig::default();
        cfg.set("t_points", "1").unwrap();
        cfg.set("t_min", "0").unwrap();
        cfg.validate().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.set("model", "file").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.set("variance_samples", "99").unwrap();
        assert!(cfg.validate().is_err());
    }
}
