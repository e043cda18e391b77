//! Argument parsing and dispatch.
//!
//! ```text
//! vhd-sim <diagonalize|fastforward|variance-scan|verify> [flags]
//!   --config PATH      flat key = value file
//!   --seed INT         override the master seed
//!   --out DIR          override the output directory
//!   --mode exact|sampled
//!   --shots INT
//!   --set key=value    override any config key (repeatable)
//!   --suite a,b,c      verify only the named suites
//! ```
//!
//! Exit codes: 0 success, 1 invariant/acceptance failure, 2 usage/IO error.

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::run;

pub const USAGE: &str = "usage: vhd-sim <diagonalize|fastforward|variance-scan|verify> \
[--config PATH] [--seed INT] [--out DIR] [--mode exact|sampled] [--shots INT] \
[--set key=value]... [--suite name,name,...]";

#[cfg_attr(test, derive(Debug))]
struct ParsedArgs {
    command: String,
    config: ExperimentConfig,
    suites: Vec<String>,
}

fn parse_args(args: &[String]) -> Result<ParsedArgs, CliError> {
    let command = args
        .first()
        .ok_or_else(|| CliError::usage(USAGE))?
        .to_string();
    if !matches!(
        command.as_str(),
        "diagonalize" | "fastforward" | "variance-scan" | "verify"
    ) {
        return Err(CliError::usage(format!(
            "unknown subcommand \"{command}\"\n{USAGE}"
        )));
    }

    // The config file applies first, then --set overrides, then dedicated
    // flags; later occurrences win within each class.
    let mut config_path: Option<String> = None;
    let mut sets: Vec<(String, String)> = Vec::new();
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut suites: Vec<String> = Vec::new();

    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        let mut take = |name: &str| -> Result<String, CliError> {
            it.next()
                .cloned()
                .ok_or_else(|| CliError::usage(format!("{name} needs a value")))
        };
        match arg.as_str() {
            "--config" => config_path = Some(take("--config")?),
            "--seed" => flags.push(("seed".into(), take("--seed")?)),
            "--out" => flags.push(("out".into(), take("--out")?)),
            "--mode" => flags.push(("mode".into(), take("--mode")?)),
            "--shots" => flags.push(("shots".into(), take("--shots")?)),
            "--set" => {
                let kv = take("--set")?;
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::usage("--set expects key=value"))?;
                sets.push((k.trim().to_string(), v.trim().to_string()));
            }
            "--suite" => {
                suites.extend(take("--suite")?.split(',').map(|s| s.trim().to_string()));
            }
            other => {
                return Err(CliError::usage(format!(
                    "unknown flag \"{other}\"\n{USAGE}"
                )))
            }
        }
    }

    let mut config = ExperimentConfig::default();
    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::io(&format!("reading config {path}"), e))?;
        config.apply_text(&text)?;
    }
    for (k, v) in &sets {
        config.set(k, v)?;
    }
    for (k, v) in &flags {
        config.set(k, v)?;
    }

    Ok(ParsedArgs {
        command,
        config,
        suites,
    })
}

/// Entry point used by `main`; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let parsed = match parse_args(args) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code;
        }
    };
    let result = match parsed.command.as_str() {
        "diagonalize" => run::cmd_diagonalize(&parsed.config),
        "fastforward" => run::cmd_fastforward(&parsed.config),
        "variance-scan" => run::cmd_variance_scan(&parsed.config),
        "verify" => run::cmd_verify(&parsed.config, &parsed.suites),
        _ => unreachable!("validated above"),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rejects_missing_or_unknown_subcommand() {
        assert!(parse_args(&[]).is_err());
        assert!(parse_args(&args(&["frobnicate"])).is_err());
        assert!(parse_args(&args(&["diagonalize", "--bogus"])).is_err());
        assert!(parse_args(&args(&["diagonalize", "--seed"])).is_err());
    }

    #[test]
    fn flag_precedence() {
        let p = parse_args(&args(&[
            "diagonalize",
            "--set",
            "seed=7",
            "--seed",
            "9",
            "--set",
            "n=4",
        ]))
        .unwrap();
        assert_eq!(p.config.seed, 9); // dedicated flag wins over --set
        assert_eq!(p.config.n, 4);
    }

    #[test]
    fn suite_list_parses() {
        let p = parse_args(&args(&["verify", "--suite", "lhst_range, trotter_order"])).unwrap();
        assert_eq!(p.suites, vec!["lhst_range", "trotter_order"]);
    }

    #[test]
    fn missing_config_file_is_usage_error() {
        let e = parse_args(&args(&["verify", "--config", "/no/such/file"])).unwrap_err();
        assert_eq!(e.code, 2);
    }
}
