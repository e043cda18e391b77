//! Pauli strings and real-weighted Pauli sums over bit-mask encodings.
//!
//! A string is stored as two masks `(x, z)` with one bit per qubit (qubit 0
//! is the least significant bit) and carries the global phase convention
//! `i^(x·z) X^x Z^z`, which makes every string Hermitian, unitary, and
//! self-inverse. Traces against other strings then obey Pauli orthogonality:
//! `Tr(A B) = d` when the masks match and `0` otherwise.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::DenseOperator;
use crate::{Error, Result, Tolerances};

/// A signed Pauli string on `n` qubits: `i^(x·z) X^x Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
}

impl PauliString {
    /// Create from X/Z bit masks. Masks must fit in `n` qubits, `1 <= n <= 64`.
    pub fn new(n: usize, x_bits: u64, z_bits: u64) -> Result<PauliString> {
        if n == 0 || n > 64 {
            return Err(Error::DimensionOverflow { qubits: n });
        }
        let allowed = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if x_bits & !allowed != 0 || z_bits & !allowed != 0 {
            return Err(Error::InvalidArgument(format!(
                "masks x={x_bits:#b}, z={z_bits:#b} exceed {n} qubits"
            )));
        }
        Ok(PauliString { n, x_bits, z_bits })
    }

    pub fn identity(n: usize) -> Result<PauliString> {
        PauliString::new(n, 0, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    /// The phase exponent `x·z mod 4`, i.e. the power of `i` in front.
    fn phase_power(&self) -> u32 {
        (self.x_bits & self.z_bits).count_ones() % 4
    }

    fn phase(&self) -> Complex64 {
        match self.phase_power() {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Amplitude picked up on basis state `b`: the matrix maps
    /// `|b> -> i^(x·z) (-1)^(z·b) |b XOR x>`.
    #[inline]
    pub(crate) fn column_amplitude(&self, b: u64) -> Complex64 {
        let sign = if (self.z_bits & b).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        self.phase() * sign
    }

    /// Dense matrix of the string. One entry per column.
    pub fn matrix(&self) -> Result<DenseOperator> {
        let mut m = DenseOperator::zeros(self.n)?;
        let d = m.dim() as u64;
        for b in 0..d {
            let row = b ^ self.x_bits;
            m.set(row as usize, b as usize, self.column_amplitude(b));
        }
        Ok(m)
    }

    /// Parse a word over `{I, X, Y, Z}`; character `j` (from the left) is qubit `j`.
    pub fn parse_word(word: &str) -> Result<PauliString> {
        let n = word.chars().count();
        if n == 0 || n > 64 {
            return Err(Error::Parse(format!("pauli word length {n} unsupported")));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (j, ch) in word.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x |= 1 << j,
                'Y' => {
                    x |= 1 << j;
                    z |= 1 << j;
                }
                'Z' => z |= 1 << j,
                other => {
                    return Err(Error::Parse(format!(
                        "invalid pauli letter '{other}' in word \"{word}\""
                    )))
                }
            }
        }
        PauliString::new(n, x, z)
    }

    /// Word form of the string (`Y` where both masks are set).
    pub fn word(&self) -> String {
        (0..self.n)
            .map(|j| {
                let x = self.x_bits >> j & 1 != 0;
                let z = self.z_bits >> j & 1 != 0;
                match (x, z) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

/// A real-weighted sum of Pauli strings on a common qubit count.
///
/// Terms are merged on construction, coefficients below the prune threshold
/// are dropped, and the term list is kept in the canonical `(z, x)` mask
/// order. Immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(n: usize, terms: Vec<(f64, PauliString)>) -> Result<PauliSum> {
        Self::with_prune(n, terms, Tolerances::DEFAULT.coefficient_prune)
    }

    pub fn with_prune(n: usize, terms: Vec<(f64, PauliString)>, prune: f64) -> Result<PauliSum> {
        if n == 0 || n > 64 {
            return Err(Error::DimensionOverflow { qubits: n });
        }
        let mut merged: alloc::collections::BTreeMap<(u64, u64), f64> =
            alloc::collections::BTreeMap::new();
        for (coeff, string) in terms {
            if string.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: string.n_qubits(),
                });
            }
            *merged.entry((string.z_bits, string.x_bits)).or_insert(0.0) += coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| crate::math::abs(c) >= prune)
            .map(|((z, x), c)| {
                (
                    c,
                    PauliString {
                        n,
                        x_bits: x,
                        z_bits: z,
                    },
                )
            })
            .collect();
        Ok(PauliSum { n, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Squared Hilbert-Schmidt norm, `d * sum of squared coefficients`.
    pub fn hs_norm_sq(&self) -> f64 {
        let d = (1u64 << self.n) as f64;
        d * self.terms.iter().map(|(c, _)| c * c).sum::<f64>()
    }

    pub fn coeff_norm_sq(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c * c).sum()
    }

    /// Largest coefficient magnitude (`0` for the empty sum).
    pub fn coeff_max_abs(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, _)| crate::math::abs(*c))
            .fold(0.0, f64::max)
    }

    /// Dense Hermitian matrix of the sum, built by iterating basis states.
    pub fn matrix(&self) -> Result<DenseOperator> {
        let mut m = DenseOperator::zeros(self.n)?;
        let d = m.dim() as u64;
        for (coeff, s) in &self.terms {
            let w = Complex64::new(*coeff, 0.0);
            for b in 0..d {
                let row = (b ^ s.x_bits) as usize;
                let col = b as usize;
                let add = w * s.column_amplitude(b);
                m.set(row, col, m.get(row, col) + add);
            }
        }
        Ok(m)
    }

    /// One term per line: `<coeff> <word>`. Coefficients print in the
    /// shortest form that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (coeff, s) in &self.terms {
            out.push_str(&format!("{coeff} {}\n", s.word()));
        }
        out
    }

    /// Parse the [`to_text`](Self::to_text) format. Blank lines and lines
    /// starting with `#` are ignored; the qubit count is inferred from the
    /// first term.
    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut n: Option<usize> = None;
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coeff_str = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing coefficient", lineno + 1)))?;
            let word = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing pauli word", lineno + 1)))?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: trailing content after pauli word",
                    lineno + 1
                )));
            }
            let coeff: f64 = coeff_str.parse().map_err(|_| {
                Error::Parse(format!("line {}: bad coefficient \"{coeff_str}\"", lineno + 1))
            })?;
            let string = PauliString::parse_word(word)?;
            match n {
                None => n = Some(string.n_qubits()),
                Some(existing) if existing != string.n_qubits() => {
                    return Err(Error::Parse(format!(
                        "line {}: word length {} does not match previous length {}",
                        lineno + 1,
                        string.n_qubits(),
                        existing
                    )));
                }
                _ => {}
            }
            terms.push((coeff, string));
        }
        let n = n.ok_or_else(|| Error::Parse("no terms found".into()))?;
        PauliSum::new(n, terms)
    }
}

/// Open-boundary XY chain: `sum_j (X_j X_{j+1} + Y_j Y_{j+1})`, all
/// coefficients `+1`, `2(n-1)` terms.
pub fn build_xy_hamiltonian(n: usize) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "XY chain needs at least 2 qubits, got {n}"
        )));
    }
    if n > 64 {
        return Err(Error::DimensionOverflow { qubits: n });
    }
    let mut terms = Vec::with_capacity(2 * (n - 1));
    for j in 0..n - 1 {
        let bond = 0b11u64 << j;
        terms.push((1.0, PauliString::new(n, bond, 0)?));
        // With the global i^(x·z) phase the (x, z) = (bond, bond) string is
        // exactly +Y_j Y_{j+1}: i^2 * (X Z)⊗(X Z) = (-1)(-iY)⊗(-iY) = Y⊗Y.
        terms.push((1.0, PauliString::new(n, bond, bond)?));
    }
    PauliSum::new(n, terms)
}

/// A sum of commuting `Z`-strings: `D(γ) = sum_k γ_k Z^(k)`.
///
/// Masks are distinct, non-zero (the identity shifts every eigenvalue and is
/// excluded from the budget), and stored sorted. Coefficients may be zero;
/// they are optimization variables. Keep the term count polynomial in `n` —
/// the default budget is the `n` weight-one strings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPauliSum {
    n: usize,
    terms: Vec<(f64, u64)>,
}

impl DiagonalPauliSum {
    pub fn new(n: usize, mut terms: Vec<(f64, u64)>) -> Result<DiagonalPauliSum> {
        if n == 0 || n > 64 {
            return Err(Error::DimensionOverflow { qubits: n });
        }
        let allowed = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        terms.sort_by_key(|&(_, k)| k);
        for window in terms.windows(2) {
            if window[0].1 == window[1].1 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate Z-string mask {:#b}",
                    window[0].1
                )));
            }
        }
        for &(_, k) in &terms {
            if k == 0 {
                return Err(Error::InvalidArgument(
                    "identity (k = 0) is not part of the diagonal budget".into(),
                ));
            }
            if k & !allowed != 0 {
                return Err(Error::InvalidArgument(format!(
                    "mask {k:#b} exceeds {n} qubits"
                )));
            }
        }
        Ok(DiagonalPauliSum { n, terms })
    }

    /// The default budget: weight-one strings `Z_0 .. Z_{n-1}`, coefficients zero.
    pub fn weight_one(n: usize) -> Result<DiagonalPauliSum> {
        DiagonalPauliSum::new(n, (0..n).map(|j| (0.0, 1u64 << j)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, u64)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.terms.iter().map(|&(g, _)| g).collect()
    }

    pub fn masks(&self) -> Vec<u64> {
        self.terms.iter().map(|&(_, k)| k).collect()
    }

    /// Same budget with replaced coefficients.
    pub fn with_gammas(&self, gammas: &[f64]) -> Result<DiagonalPauliSum> {
        if gammas.len() != self.terms.len() {
            return Err(Error::ParameterCount {
                expected: self.terms.len(),
                got: gammas.len(),
            });
        }
        Ok(DiagonalPauliSum {
            n: self.n,
            terms: gammas
                .iter()
                .zip(self.terms.iter())
                .map(|(&g, &(_, k))| (g, k))
                .collect(),
        })
    }

    pub fn coeff_norm_sq(&self) -> f64 {
        self.terms.iter().map(|&(g, _)| g * g).sum()
    }

    /// Eigenvalue of `D` on basis state `b`: `sum_k γ_k (-1)^(k·b)`.
    pub fn eigenvalue(&self, b: u64) -> f64 {
        self.terms
            .iter()
            .map(|&(g, k)| {
                if (k & b).count_ones().is_multiple_of(2) {
                    g
                } else {
                    -g
                }
            })
            .sum()
    }

    /// View as a general [`PauliSum`] (for the dense oracle path).
    pub fn as_pauli_sum(&self) -> Result<PauliSum> {
        let terms = self
            .terms
            .iter()
            .map(|&(g, k)| Ok((g, PauliString::new(self.n, 0, k)?)))
            .collect::<Result<Vec<_>>>()?;
        PauliSum::new(self.n, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;

    const SQRT2X2: f64 = 2.828_427_124_746_190_3; // 2*sqrt(2)

    #[test]
    fn identity_string_matrix() {
        let s = PauliString::new(1, 0, 0).unwrap();
        let m = s.matrix().unwrap();
        assert_eq!(m.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(m.get(1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(m.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn xz_with_phase_is_pauli_y() {
        let s = PauliString::new(1, 1, 1).unwrap();
        let m = s.matrix().unwrap();
        assert!((m.get(0, 1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((m.get(1, 0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(m.get(0, 0).norm() < 1e-15);
        assert_eq!(s.word(), "Y");
    }

    #[test]
    fn disjoint_supports_have_no_phase() {
        // X on qubit 0, Z on qubit 1: |b1 b0> -> (-1)^b1 |b1, b0 xor 1>.
        let s = PauliString::new(2, 0b01, 0b10).unwrap();
        let m = s.matrix().unwrap();
        for b in 0..4u64 {
            let row = (b ^ 0b01) as usize;
            let sign = if b & 0b10 != 0 { -1.0 } else { 1.0 };
            assert!((m.get(row, b as usize) - Complex64::new(sign, 0.0)).norm() < 1e-15);
        }
        assert_eq!(s.word(), "XZ");
    }

    #[test]
    fn strings_are_hermitian_unitary_traceless() {
        let mut rng = crate::rng::Rng::from_seed(100);
        for _ in 0..50 {
            let n = 1 + (rng.below(4) as usize);
            let lim = 1u64 << n;
            let s = PauliString::new(n, rng.below(lim), rng.below(lim)).unwrap();
            let m = s.matrix().unwrap();
            assert!(m.hermiticity_residual() < 1e-14);
            assert!(m.unitarity_error() < 1e-14);
            if s.x_bits() != 0 || s.z_bits() != 0 {
                assert!(m.trace().norm() < 1e-14);
            }
        }
    }

    #[test]
    fn orthogonality_of_string_traces() {
        let mut rng = crate::rng::Rng::from_seed(200);
        for _ in 0..50 {
            let n = 1 + (rng.below(4) as usize);
            let lim = 1u64 << n;
            let a = PauliString::new(n, rng.below(lim), rng.below(lim)).unwrap();
            let b = PauliString::new(n, rng.below(lim), rng.below(lim)).unwrap();
            let tr = a.matrix().unwrap().matmul(&b.matrix().unwrap()).unwrap().trace();
            let d = (1usize << n) as f64;
            let normalized = tr.re / d;
            assert!(tr.im.abs() < 1e-12);
            if a == b {
                assert!((normalized - 1.0).abs() < 1e-12);
            } else {
                assert!(normalized.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sum_merges_and_prunes() {
        let n = 2;
        let s = PauliString::new(n, 0b01, 0).unwrap();
        let t = PauliString::new(n, 0, 0b10).unwrap();
        let sum = PauliSum::new(
            n,
            alloc::vec![(0.5, s), (0.25, s), (1e-15, t)],
        )
        .unwrap();
        assert_eq!(sum.num_terms(), 1);
        assert!((sum.terms()[0].0 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_z_matrix() {
        let sum = PauliSum::new(1, alloc::vec![(1.0, PauliString::new(1, 0, 1).unwrap())]).unwrap();
        let m = sum.matrix().unwrap();
        assert!((m.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((m.get(1, 1).re + 1.0).abs() < 1e-15);
        assert!((sum.hs_norm_sq() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn empty_sum_is_zero() {
        let sum = PauliSum::new(2, alloc::vec![]).unwrap();
        assert_eq!(sum.matrix().unwrap().hs_norm(), 0.0);
        assert_eq!(sum.hs_norm_sq(), 0.0);
    }

    #[test]
    fn xy_chain_n2_matches_expected_terms_and_spectrum() {
        let h = build_xy_hamiltonian(2).unwrap();
        assert_eq!(h.num_terms(), 2);
        for (c, s) in h.terms() {
            assert!((c - 1.0).abs() < 1e-15);
            assert!(s.word() == "XX" || s.word() == "YY");
        }
        let eig = eigh(&h.matrix().unwrap()).unwrap();
        let expected = [-2.0, 0.0, 0.0, 2.0];
        for (got, want) in eig.eigenvalues.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn xy_chain_n3_norm_and_spectrum() {
        let h = build_xy_hamiltonian(3).unwrap();
        assert_eq!(h.num_terms(), 4);
        assert!((h.hs_norm_sq() - 32.0).abs() < 1e-12);
        let m = h.matrix().unwrap();
        let dense_norm_sq = m.hs_inner(&m).unwrap().re;
        assert!((h.hs_norm_sq() - dense_norm_sq).abs() < 1e-10 * dense_norm_sq);

        // Spectrum is {-2√2 x2, 0 x4, +2√2 x2}, symmetric about zero.
        let eig = eigh(&m).unwrap();
        let expected = [
            -SQRT2X2, -SQRT2X2, 0.0, 0.0, 0.0, 0.0, SQRT2X2, SQRT2X2,
        ];
        for (got, want) in eig.eigenvalues.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn xy_chain_rejects_small_n() {
        assert!(build_xy_hamiltonian(1).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let n = 3;
        let terms = alloc::vec![
            (0.1 + 0.2, PauliString::parse_word("XXI").unwrap()),
            (-1.0 / 3.0, PauliString::parse_word("IZZ").unwrap()),
            (1.0, PauliString::parse_word("YIY").unwrap()),
            (1.2345678901234567e-11, PauliString::parse_word("ZZZ").unwrap()),
        ];
        let sum = PauliSum::new(n, terms).unwrap();
        let text = sum.to_text();
        let parsed = PauliSum::from_text(&text).unwrap();
        assert_eq!(sum, parsed);
    }

    #[test]
    fn text_parse_errors() {
        assert!(PauliSum::from_text("").is_err());
        assert!(PauliSum::from_text("1.0 XQ").is_err());
        assert!(PauliSum::from_text("1.0 XX\n2.0 XXX").is_err());
        assert!(PauliSum::from_text("abc XX").is_err());
    }

    #[test]
    fn diagonal_sum_budget_rules() {
        assert!(DiagonalPauliSum::new(2, alloc::vec![(1.0, 0)]).is_err());
        assert!(DiagonalPauliSum::new(2, alloc::vec![(1.0, 1), (2.0, 1)]).is_err());
        assert!(DiagonalPauliSum::new(2, alloc::vec![(1.0, 0b100)]).is_err());
        let d = DiagonalPauliSum::weight_one(3).unwrap();
        assert_eq!(d.num_terms(), 3);
        assert_eq!(d.masks(), alloc::vec![1, 2, 4]);
    }

    #[test]
    fn diagonal_eigenvalues() {
        let d = DiagonalPauliSum::new(2, alloc::vec![(0.5, 0b01), (2.0, 0b10)]).unwrap();
        assert!((d.eigenvalue(0b00) - 2.5).abs() < 1e-15);
        assert!((d.eigenvalue(0b01) - 1.5).abs() < 1e-15);
        assert!((d.eigenvalue(0b10) + 1.5).abs() < 1e-15);
        assert!((d.eigenvalue(0b11) + 2.5).abs() < 1e-15);
    }
}
