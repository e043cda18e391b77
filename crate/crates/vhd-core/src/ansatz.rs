//! Layered hardware-efficient ansatz and diagonal exponentials.
//!
//! `W(θ)` is an ordered gate list: an initial layer of single-qubit
//! rotations, `m` internal brick layers of two-qubit `ZZ` entanglers each
//! followed by single-qubit rotations on the touched qubits, and a final
//! rotation layer. All generators use the half-angle convention
//! (`RX(θ) = exp(-iθX/2)`, `RZ(θ) = exp(-iθZ/2)`, `ZZ(θ) = exp(-iθ(Z⊗Z)/2)`),
//! so every generator squares to `1/4` and the two-point parameter-shift rule
//! with shifts `±π/2` and prefactor `1/2` is exact for conjugation costs.
//!
//! The brick pattern is fixed and deterministic: every internal layer places
//! `ZZ` gates on the even bonds `(0,1), (2,3), ...` and then on the odd
//! bonds `(1,2), (3,4), ...`, each `ZZ` followed by `RX`, `RZ` on both of
//! its qubits. (A sparser variant with one bond row per layer alternating
//! even/odd is not expressive enough at `m = n` depth to diagonalize the XY
//! chains this crate targets.) The initial layer applies `RX` then `RZ` per
//! qubit (operator `RZ·RX`), the final layer `RZ` then `RX` (operator
//! `RX·RZ`). Every parameter index is used by exactly one gate.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::DenseOperator;
use crate::math;
use crate::pauli::DiagonalPauliSum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Rx,
    Rz,
    Zz,
}

impl GateKind {
    fn label(&self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Rz => "RZ",
            GateKind::Zz => "ZZ",
        }
    }
}

/// One parameterized gate in the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    /// Target qubit (first of the pair for `ZZ`).
    pub qubit: usize,
    /// Second qubit for `ZZ`; must be `qubit + 1`.
    pub qubit2: Option<usize>,
    pub param_index: usize,
}

/// The layered circuit `W(θ)`: gate list in time order plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredAnsatz {
    n: usize,
    layers: usize,
    gates: Vec<GateSpec>,
    num_params: usize,
}

impl LayeredAnsatz {
    /// Assemble from an explicit gate list; validates qubit ranges, `ZZ`
    /// adjacency, and that the parameter indices are exactly `0..len`.
    pub fn from_gates(n: usize, layers: usize, gates: Vec<GateSpec>) -> Result<LayeredAnsatz> {
        if n == 0 {
            return Err(Error::DimensionOverflow { qubits: n });
        }
        let num_params = gates.len();
        let mut seen = alloc::vec![false; num_params];
        for g in &gates {
            if g.qubit >= n {
                return Err(Error::IndexOutOfRange {
                    index: g.qubit,
                    len: n,
                });
            }
            match (g.kind, g.qubit2) {
                (GateKind::Zz, Some(q2)) => {
                    if q2 != g.qubit + 1 || q2 >= n {
                        return Err(Error::InvalidArgument(format!(
                            "ZZ must act on an adjacent pair, got ({}, {q2})",
                            g.qubit
                        )));
                    }
                }
                (GateKind::Zz, None) => {
                    return Err(Error::InvalidArgument("ZZ needs two qubits".into()))
                }
                (_, Some(_)) => {
                    return Err(Error::InvalidArgument(
                        "single-qubit gate with two targets".into(),
                    ))
                }
                (_, None) => {}
            }
            if g.param_index >= num_params || seen[g.param_index] {
                return Err(Error::InvalidArgument(format!(
                    "parameter index {} reused or out of range",
                    g.param_index
                )));
            }
            seen[g.param_index] = true;
        }
        Ok(LayeredAnsatz {
            n,
            layers,
            gates,
            num_params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    /// Dense unitary `W(θ)`, built gate-by-gate on the columns of the
    /// identity (the statevector path applied to every basis state).
    pub fn unitary(&self, theta: &[f64]) -> Result<DenseOperator> {
        if theta.len() != self.num_params {
            return Err(Error::ParameterCount {
                expected: self.num_params,
                got: theta.len(),
            });
        }
        let mut w = DenseOperator::identity(self.n)?;
        for g in &self.gates {
            apply_gate_left(&mut w, g, theta[g.param_index]);
        }
        Ok(w)
    }

    /// Apply `W(θ)` to a single statevector in place.
    pub fn apply_to_state(&self, theta: &[f64], state: &mut [Complex64]) -> Result<()> {
        if theta.len() != self.num_params {
            return Err(Error::ParameterCount {
                expected: self.num_params,
                got: theta.len(),
            });
        }
        let dim = 1usize << self.n;
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: state.len(),
            });
        }
        for g in &self.gates {
            apply_gate_to_state(state, g, theta[g.param_index]);
        }
        Ok(())
    }

    /// Line-oriented description, one gate per line, for reproducibility of
    /// trained circuits.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\nm {}\nparams {}\n", self.n, self.layers, self.num_params);
        for g in &self.gates {
            match g.qubit2 {
                Some(q2) => {
                    out.push_str(&format!(
                        "gate {} {} {} {}\n",
                        g.kind.label(),
                        g.qubit,
                        q2,
                        g.param_index
                    ));
                }
                None => {
                    out.push_str(&format!(
                        "gate {} {} - {}\n",
                        g.kind.label(),
                        g.qubit,
                        g.param_index
                    ));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LayeredAnsatz> {
        let mut n = None;
        let mut m = None;
        let mut declared_params = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            match parts.next() {
                Some("n") => n = Some(parse_usize(parts.next(), lineno)?),
                Some("m") => m = Some(parse_usize(parts.next(), lineno)?),
                Some("params") => declared_params = Some(parse_usize(parts.next(), lineno)?),
                Some("gate") => {
                    let kind = match parts.next() {
                        Some("RX") => GateKind::Rx,
                        Some("RZ") => GateKind::Rz,
                        Some("ZZ") => GateKind::Zz,
                        other => {
                            return Err(err(&format!("unknown gate kind {other:?}")));
                        }
                    };
                    let q = parse_usize(parts.next(), lineno)?;
                    let q2_tok = parts
                        .next()
                        .ok_or_else(|| err("missing second qubit field"))?;
                    let q2 = if q2_tok == "-" {
                        None
                    } else {
                        Some(q2_tok.parse().map_err(|_| err("bad qubit index"))?)
                    };
                    let p = parse_usize(parts.next(), lineno)?;
                    gates.push(GateSpec {
                        kind,
                        qubit: q,
                        qubit2: q2,
                        param_index: p,
                    });
                }
                other => return Err(err(&format!("unknown directive {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
        let m = m.ok_or_else(|| Error::Parse("missing m".into()))?;
        if let Some(p) = declared_params {
            if p != gates.len() {
                return Err(Error::Parse(format!(
                    "declared {p} params but found {} gates",
                    gates.len()
                )));
            }
        }
        LayeredAnsatz::from_gates(n, m, gates)
    }
}

fn parse_usize(tok: Option<&str>, lineno: usize) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("line {}: expected an integer", lineno + 1)))
}

/// Build the layered ansatz for `n >= 2` qubits and `m >= 1` internal layers.
pub fn build_layered_ansatz(n: usize, m: usize) -> Result<LayeredAnsatz> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "ansatz needs at least 2 qubits, got {n}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidArgument("layer count must be at least 1".into()));
    }
    let mut gates = Vec::new();
    let mut next_param = 0usize;
    let mut push = |gates: &mut Vec<GateSpec>, kind, qubit, qubit2| {
        gates.push(GateSpec {
            kind,
            qubit,
            qubit2,
            param_index: next_param,
        });
        next_param += 1;
    };

    // Initial layer: RX then RZ on every qubit.
    for q in 0..n {
        push(&mut gates, GateKind::Rx, q, None);
        push(&mut gates, GateKind::Rz, q, None);
    }
    // Internal brick layers: even bonds, then odd bonds.
    for _layer in 1..=m {
        for start in [0usize, 1] {
            let mut q = start;
            while q + 1 < n {
                push(&mut gates, GateKind::Zz, q, Some(q + 1));
                push(&mut gates, GateKind::Rx, q, None);
                push(&mut gates, GateKind::Rz, q, None);
                push(&mut gates, GateKind::Rx, q + 1, None);
                push(&mut gates, GateKind::Rz, q + 1, None);
                q += 2;
            }
        }
    }
    // Final layer: RZ then RX on every qubit.
    for q in 0..n {
        push(&mut gates, GateKind::Rz, q, None);
        push(&mut gates, GateKind::Rx, q, None);
    }
    LayeredAnsatz::from_gates(n, m, gates)
}

fn rx_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new(math::cos(angle / 2.0), 0.0);
    let s = Complex64::new(0.0, -math::sin(angle / 2.0));
    [[c, s], [s, c]]
}

fn apply_gate_left(w: &mut DenseOperator, g: &GateSpec, angle: f64) {
    match g.kind {
        GateKind::Rx => w.apply_single_qubit_left(g.qubit, rx_matrix(angle)),
        GateKind::Rz => {
            let mask = 1usize << g.qubit;
            let lo = math::cis(-angle / 2.0);
            let hi = math::cis(angle / 2.0);
            w.scale_rows(|r| if r & mask == 0 { lo } else { hi });
        }
        GateKind::Zz => {
            let m1 = 1usize << g.qubit;
            let m2 = 1usize << g.qubit2.expect("validated ZZ pair");
            let even = math::cis(-angle / 2.0);
            let odd = math::cis(angle / 2.0);
            w.scale_rows(|r| {
                let parity = ((r & m1 != 0) as u8) ^ ((r & m2 != 0) as u8);
                if parity == 0 {
                    even
                } else {
                    odd
                }
            });
        }
    }
}

fn apply_gate_to_state(state: &mut [Complex64], g: &GateSpec, angle: f64) {
    match g.kind {
        GateKind::Rx => {
            let m = rx_matrix(angle);
            let mask = 1usize << g.qubit;
            for i0 in 0..state.len() {
                if i0 & mask != 0 {
                    continue;
                }
                let i1 = i0 | mask;
                let a = state[i0];
                let b = state[i1];
                state[i0] = m[0][0] * a + m[0][1] * b;
                state[i1] = m[1][0] * a + m[1][1] * b;
            }
        }
        GateKind::Rz => {
            let mask = 1usize << g.qubit;
            let lo = math::cis(-angle / 2.0);
            let hi = math::cis(angle / 2.0);
            for (i, x) in state.iter_mut().enumerate() {
                *x *= if i & mask == 0 { lo } else { hi };
            }
        }
        GateKind::Zz => {
            let m1 = 1usize << g.qubit;
            let m2 = 1usize << g.qubit2.expect("validated ZZ pair");
            let even = math::cis(-angle / 2.0);
            let odd = math::cis(angle / 2.0);
            for (i, x) in state.iter_mut().enumerate() {
                let parity = ((i & m1 != 0) as u8) ^ ((i & m2 != 0) as u8);
                *x *= if parity == 0 { even } else { odd };
            }
        }
    }
}

/// Dense matrix of one gate embedded on the full register — an independent
/// construction used as the oracle for the gate-by-gate path.
pub fn gate_matrix(g: &GateSpec, angle: f64, n: usize) -> Result<DenseOperator> {
    let mut out = DenseOperator::zeros(n)?;
    let dim = out.dim();
    match g.kind {
        GateKind::Rx => {
            let m = rx_matrix(angle);
            let mask = 1usize << g.qubit;
            for col in 0..dim {
                let cb = usize::from(col & mask != 0);
                for (rb, mrow) in m.iter().enumerate() {
                    let row = (col & !mask) | (rb * mask);
                    out.set(row, col, mrow[cb]);
                }
            }
        }
        GateKind::Rz | GateKind::Zz => {
            for col in 0..dim {
                let parity = match g.kind {
                    GateKind::Rz => usize::from(col & (1 << g.qubit) != 0),
                    GateKind::Zz => {
                        let q2 = g.qubit2.expect("validated ZZ pair");
                        usize::from(col & (1 << g.qubit) != 0)
                            ^ usize::from(col & (1 << q2) != 0)
                    }
                    GateKind::Rx => unreachable!(),
                };
                let phase = if parity == 0 {
                    math::cis(-angle / 2.0)
                } else {
                    math::cis(angle / 2.0)
                };
                out.set(col, col, phase);
            }
        }
    }
    Ok(out)
}

/// Diagonal phases of `exp(-i T D)` per basis state.
pub fn exp_diagonal_phases(d: &DiagonalPauliSum, t: f64) -> Vec<Complex64> {
    let dim = 1usize << d.n_qubits();
    (0..dim as u64)
        .map(|b| math::cis(-t * d.eigenvalue(b)))
        .collect()
}

/// `exp(-i T D)` as a dense diagonal unitary.
pub fn exp_diagonal(d: &DiagonalPauliSum, t: f64) -> Result<DenseOperator> {
    let mut out = DenseOperator::zeros(d.n_qubits())?;
    for (b, phase) in exp_diagonal_phases(d, t).into_iter().enumerate() {
        out.set(b, b, phase);
    }
    Ok(out)
}

/// Copy of `theta` with entry `mu` shifted by `shift`.
pub fn shifted_params(theta: &[f64], mu: usize, shift: f64) -> Result<Vec<f64>> {
    if mu >= theta.len() {
        return Err(Error::IndexOutOfRange {
            index: mu,
            len: theta.len(),
        });
    }
    let mut out = theta.to_vec();
    out[mu] += shift;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_i;
    use crate::rng::Rng;

    #[test]
    fn gate_count_n2_m1() {
        let a = build_layered_ansatz(2, 1).unwrap();
        // 4 initial + (1 ZZ + 4 rotations) + 4 final.
        assert_eq!(a.gates().len(), 13);
        assert_eq!(a.num_params(), 13);
    }

    #[test]
    fn brick_pattern_covers_both_bond_rows_per_layer() {
        let a = build_layered_ansatz(4, 4).unwrap();
        let zz_bonds: Vec<(usize, usize)> = a
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::Zz)
            .map(|g| (g.qubit, g.qubit2.unwrap()))
            .collect();
        // Each of the 4 internal layers: even bonds (0,1),(2,3) then odd (1,2).
        let per_layer = alloc::vec![(0, 1), (2, 3), (1, 2)];
        assert_eq!(zz_bonds.len(), 12);
        for layer in 0..4 {
            assert_eq!(&zz_bonds[3 * layer..3 * layer + 3], per_layer.as_slice());
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(build_layered_ansatz(1, 1).is_err());
        assert!(build_layered_ansatz(3, 0).is_err());
    }

    #[test]
    fn zero_angles_give_identity() {
        let a = build_layered_ansatz(3, 2).unwrap();
        let w = a.unitary(&alloc::vec![0.0; a.num_params()]).unwrap();
        let id = DenseOperator::identity(3).unwrap();
        assert!(w.sub(&id).unwrap().hs_norm() < 1e-12);
    }

    #[test]
    fn single_rx_pi_is_minus_i_x() {
        let a = LayeredAnsatz::from_gates(
            1,
            0,
            alloc::vec![GateSpec {
                kind: GateKind::Rx,
                qubit: 0,
                qubit2: None,
                param_index: 0,
            }],
        )
        .unwrap();
        let w = a.unitary(&[math::PI]).unwrap();
        assert!(w.get(0, 0).norm() < 1e-15);
        assert!((w.get(0, 1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((w.get(1, 0) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn four_pi_periodicity() {
        let a = build_layered_ansatz(2, 1).unwrap();
        let mut rng = Rng::from_seed(4);
        let theta: Vec<f64> = (0..a.num_params()).map(|_| rng.uniform(0.0, math::TAU)).collect();
        let mut shifted = theta.clone();
        shifted[5] += 4.0 * math::PI;
        let w1 = a.unitary(&theta).unwrap();
        let w2 = a.unitary(&shifted).unwrap();
        assert!(w1.sub(&w2).unwrap().hs_norm() < 1e-10);
    }

    #[test]
    fn unitary_for_random_angles() {
        let mut rng = Rng::from_seed(8);
        for n in 2..=4 {
            let a = build_layered_ansatz(n, n).unwrap();
            let theta: Vec<f64> = (0..a.num_params()).map(|_| rng.uniform(0.0, math::TAU)).collect();
            let w = a.unitary(&theta).unwrap();
            assert!(w.unitarity_error() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn gate_by_gate_matches_full_matrix_product() {
        let mut rng = Rng::from_seed(15);
        let a = build_layered_ansatz(3, 2).unwrap();
        let theta: Vec<f64> = (0..a.num_params()).map(|_| rng.uniform(0.0, math::TAU)).collect();
        let w = a.unitary(&theta).unwrap();

        // Oracle: multiply embedded gate matrices in time order.
        let mut oracle = DenseOperator::identity(3).unwrap();
        for g in a.gates() {
            let gm = gate_matrix(g, theta[g.param_index], 3).unwrap();
            oracle = gm.matmul(&oracle).unwrap();
        }
        assert!(w.sub(&oracle).unwrap().hs_norm() < 1e-10);

        // Statevector path agrees with matrix application.
        let mut state = crate::linalg::haar_state(3, &mut rng).unwrap();
        let expect = w.apply(&state).unwrap();
        a.apply_to_state(&theta, &mut state).unwrap();
        let err: f64 = state
            .iter()
            .zip(expect.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        assert!(math::sqrt(err) < 1e-10);
    }

    #[test]
    fn parameter_count_is_checked() {
        let a = build_layered_ansatz(2, 1).unwrap();
        assert!(matches!(
            a.unitary(&[0.0; 5]),
            Err(Error::ParameterCount { .. })
        ));
    }

    #[test]
    fn exp_diagonal_matches_dense_exponential() {
        let mut rng = Rng::from_seed(23);
        for _ in 0..10 {
            let n = 2 + rng.below(2) as usize;
            let d = DiagonalPauliSum::weight_one(n)
                .unwrap()
                .with_gammas(&(0..n).map(|_| rng.uniform(-2.0, 2.0)).collect::<Vec<_>>())
                .unwrap();
            let t = rng.uniform(0.0, 3.0);
            let fast = exp_diagonal(&d, t).unwrap();
            let dense = expm_i(&d.as_pauli_sum().unwrap().matrix().unwrap(), t).unwrap();
            assert!(fast.sub(&dense).unwrap().hs_norm() < 1e-10);
        }
    }

    #[test]
    fn exp_diagonal_specific_values() {
        // D = Z_0 + Z_1 at T = pi/2 has phases exp(-i pi/2 (±1 ±1)).
        let d = DiagonalPauliSum::new(2, alloc::vec![(1.0, 0b01), (1.0, 0b10)]).unwrap();
        let u = exp_diagonal(&d, math::PI / 2.0).unwrap();
        let expected = [-1.0, 1.0, 1.0, -1.0];
        for (b, &v) in expected.iter().enumerate() {
            assert!((u.get(b, b) - Complex64::new(v, 0.0)).norm() < 1e-12);
        }
        // T = 0 is the identity.
        let id = exp_diagonal(&d, 0.0).unwrap();
        assert!(id.sub(&DenseOperator::identity(2).unwrap()).unwrap().hs_norm() < 1e-15);
    }

    #[test]
    fn shifted_params_round_trip() {
        let theta = alloc::vec![0.0, 0.0];
        let up = shifted_params(&theta, 0, math::PI / 2.0).unwrap();
        assert_eq!(up, alloc::vec![math::PI / 2.0, 0.0]);
        let back = shifted_params(&up, 0, -math::PI / 2.0).unwrap();
        assert_eq!(back, theta);
        assert!(shifted_params(&theta, 2, 1.0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = build_layered_ansatz(3, 3).unwrap();
        let text = a.to_text();
        let parsed = LayeredAnsatz::from_text(&text).unwrap();
        assert_eq!(a, parsed);
        assert!(LayeredAnsatz::from_text("gate RX 0 - 0\n").is_err());
    }
}
