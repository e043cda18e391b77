//! Trained-parameter files: flat `key value` lines, exact float round-trip.

use std::fmt::Write as _;

use crate::error::CliError;

/// One trained parameter set with the context needed to rebuild its circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsFile {
    pub n: usize,
    pub m: usize,
    pub delta_t: f64,
    /// Which phase produced these parameters (`vff` or `vhd`).
    pub phase: String,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl ParamsFile {
    pub fn to_text(&self, header: &str) -> String {
        let mut out = String::from(header);
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "m {}", self.m);
        let _ = writeln!(out, "delta_t {}", self.delta_t);
        let _ = writeln!(out, "phase {}", self.phase);
        for (i, v) in self.theta.iter().enumerate() {
            let _ = writeln!(out, "theta {i} {v}");
        }
        for (i, v) in self.gamma.iter().enumerate() {
            let _ = writeln!(out, "gamma {i} {v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ParamsFile, CliError> {
        let mut n = None;
        let mut m = None;
        let mut delta_t = None;
        let mut phase = None;
        let mut theta: Vec<(usize, f64)> = Vec::new();
        let mut gamma: Vec<(usize, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err =
                |what: &str| CliError::usage(format!("params line {}: {what}", lineno + 1));
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("n") => {
                    n = Some(
                        parts
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err("bad qubit count"))?,
                    )
                }
                Some("m") => {
                    m = Some(
                        parts
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err("bad layer count"))?,
                    )
                }
                Some("delta_t") => {
                    delta_t = Some(
                        parts
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err("bad time step"))?,
                    )
                }
                Some("phase") => {
                    phase = Some(parts.next().ok_or_else(|| err("missing phase"))?.to_string())
                }
                Some(kind @ ("theta" | "gamma")) => {
                    let idx: usize = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad parameter index"))?;
                    let val: f64 = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad parameter value"))?;
                    if kind == "theta" {
                        theta.push((idx, val));
                    } else {
                        gamma.push((idx, val));
                    }
                }
                other => return Err(err(&format!("unknown directive {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| CliError::usage("params file: missing n"))?;
        let m = m.ok_or_else(|| CliError::usage("params file: missing m"))?;
        let delta_t = delta_t.ok_or_else(|| CliError::usage("params file: missing delta_t"))?;
        let phase = phase.unwrap_or_else(|| "vhd".into());
        let collect = |mut pairs: Vec<(usize, f64)>, what: &str| -> Result<Vec<f64>, CliError> {
            pairs.sort_by_key(|&(i, _)| i);
            for (pos, &(i, _)) in pairs.iter().enumerate() {
                if i != pos {
                    return Err(CliError::usage(format!(
                        "params file: {what} indices are not contiguous from 0"
                    )));
                }
            }
            Ok(pairs.into_iter().map(|(_, v)| v).collect())
        };
        let theta = collect(theta, "theta")?;
        let gamma = collect(gamma, "gamma")?;
        if theta.is_empty() || gamma.is_empty() {
            return Err(CliError::usage("params file: empty parameter vectors"));
        }
        Ok(ParamsFile {
            n,
            m,
            delta_t,
            phase,
            theta,
            gamma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let p = ParamsFile {
            n: 3,
            m: 3,
            delta_t: 0.25,
            phase: "vhd".into(),
            theta: vec![0.1 + 0.2, -1.0 / 3.0, std::f64::consts::PI],
            gamma: vec![std::f64::consts::SQRT_2, 0.0],
        };
        let text = p.to_text("# header\n");
        let back = ParamsFile::from_text(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn rejects_corrupt_files() {
        assert!(ParamsFile::from_text("").is_err());
        assert!(ParamsFile::from_text("n 3\nm 3\ndelta_t 0.25\ntheta 1 0.5\ngamma 0 1.0\n").is_err());
        assert!(ParamsFile::from_text("n 3\nm x\n").is_err());
        assert!(ParamsFile::from_text("bogus line\n").is_err());
    }
}
