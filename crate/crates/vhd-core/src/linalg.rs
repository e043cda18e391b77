//! Dense complex matrix kernels on `2^n`-dimensional spaces.
//!
//! These routines are the exact-arithmetic backbone of the crate and the
//! brute-force oracle the cheaper algebraic paths are checked against.
//! Dimensions stay small by design (`n <= 12`), so everything is plain
//! row-major storage and `O(d^3)` kernels; the eigensolver is a cyclic
//! complex Jacobi iteration, which keeps unitarity of the eigenvector
//! matrix at machine precision.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;
use crate::rng::Rng;
use crate::{Error, Result, Tolerances, MAX_DENSE_QUBITS};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex operator on `n` qubits (`dim = 2^n`), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

fn check_qubits(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::DimensionOverflow { qubits: n_qubits });
    }
    Ok(1usize << n_qubits)
}

impl DenseOperator {
    pub fn zeros(n_qubits: usize) -> Result<DenseOperator> {
        let dim = check_qubits(n_qubits)?;
        Ok(DenseOperator {
            n_qubits,
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(n_qubits: usize) -> Result<DenseOperator> {
        let mut m = DenseOperator::zeros(n_qubits)?;
        for i in 0..m.dim {
            m.data[i * m.dim + i] = ONE;
        }
        Ok(m)
    }

    /// Build from a row-major entry vector of length `dim * dim`.
    pub fn from_rows(n_qubits: usize, data: Vec<Complex64>) -> Result<DenseOperator> {
        let dim = check_qubits(n_qubits)?;
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(alloc::format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(DenseOperator {
            n_qubits,
            dim,
            data,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    fn check_same_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(rhs)?;
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            let arow = &self.data[i * d..(i + 1) * d];
            let orow = &mut out[i * d..(i + 1) * d];
            for (k, &aik) in arow.iter().enumerate() {
                if aik == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * d..(k + 1) * d];
                for (o, &bkj) in orow.iter_mut().zip(brow.iter()) {
                    *o += aik * bkj;
                }
            }
        }
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            dim: d,
            data: out,
        })
    }

    /// `self * rhs†` without materializing the adjoint.
    pub fn matmul_adjoint(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_dim(rhs)?;
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            let arow = &self.data[i * d..(i + 1) * d];
            for j in 0..d {
                let brow = &rhs.data[j * d..(j + 1) * d];
                let mut acc = ZERO;
                for (&a, &b) in arow.iter().zip(brow.iter()) {
                    acc += a * b.conj();
                }
                out[i * d + j] = acc;
            }
        }
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            dim: d,
            data: out,
        })
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.data[i * d + j].conj();
            }
        }
        DenseOperator {
            n_qubits: self.n_qubits,
            dim: d,
            data: out,
        }
    }

    /// `self + z * rhs`.
    pub fn add_scaled(&self, rhs: &DenseOperator, z: Complex64) -> Result<DenseOperator> {
        self.check_same_dim(rhs)?;
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(&a, &b)| a + z * b)
            .collect();
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.add_scaled(rhs, Complex64::new(-1.0, 0.0))
    }

    pub fn scaled(&self, z: Complex64) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            dim: self.dim,
            data: self.data.iter().map(|&a| z * a).collect(),
        }
    }

    /// `self * diag(entries)` (scales columns).
    pub fn mul_diag_right(&self, diag: &[Complex64]) -> Result<DenseOperator> {
        if diag.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: diag.len(),
            });
        }
        let d = self.dim;
        let mut out = self.data.clone();
        for row in out.chunks_exact_mut(d) {
            for (x, &w) in row.iter_mut().zip(diag.iter()) {
                *x *= w;
            }
        }
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            dim: d,
            data: out,
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `Tr(self† * rhs)`.
    pub fn hs_inner(&self, rhs: &DenseOperator) -> Result<Complex64> {
        self.check_same_dim(rhs)?;
        let mut acc = ZERO;
        for (&a, &b) in self.data.iter().zip(rhs.data.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// `‖self† self - 1‖_HS`; zero for exact unitaries.
    pub fn unitarity_error(&self) -> f64 {
        let gram = match self.adjoint().matmul(self) {
            Ok(g) => g,
            Err(_) => unreachable!(),
        };
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expected = if i == j { ONE } else { ZERO };
                acc += (gram.get(i, j) - expected).norm_sqr();
            }
        }
        math::sqrt(acc)
    }

    /// Relative deviation from Hermiticity, `‖M - M†‖ / max(‖M‖, 1)`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.data[i * d + j] - self.data[j * d + i].conj()).norm_sqr();
            }
        }
        let norm = self.hs_norm();
        math::sqrt(acc) / if norm > 1.0 { norm } else { 1.0 }
    }

    /// Apply `self` to a state vector.
    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: state.len(),
            });
        }
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * d..(i + 1) * d];
            let mut acc = ZERO;
            for (&a, &x) in row.iter().zip(state.iter()) {
                acc += a * x;
            }
            *o = acc;
        }
        Ok(out)
    }

    /// Multiply row `r` by a phase factor, for all rows, given per-row factors.
    pub(crate) fn scale_rows(&mut self, factor: impl Fn(usize) -> Complex64) {
        let d = self.dim;
        for (r, row) in self.data.chunks_exact_mut(d).enumerate() {
            let f = factor(r);
            for x in row.iter_mut() {
                *x *= f;
            }
        }
    }

    /// Left-multiply by a single-qubit gate `g` on qubit `q`: `self <- (g ⊗ 1) self`.
    pub(crate) fn apply_single_qubit_left(&mut self, q: usize, g: [[Complex64; 2]; 2]) {
        let d = self.dim;
        let mask = 1usize << q;
        for r0 in 0..d {
            if r0 & mask != 0 {
                continue;
            }
            let r1 = r0 | mask;
            // Rows r0, r1 are contiguous slices; update them pairwise.
            let (lo, hi) = self.data.split_at_mut(r1 * d);
            let row0 = &mut lo[r0 * d..r0 * d + d];
            let row1 = &mut hi[..d];
            for (x0, x1) in row0.iter_mut().zip(row1.iter_mut()) {
                let a = *x0;
                let b = *x1;
                *x0 = g[0][0] * a + g[0][1] * b;
                *x1 = g[1][0] * a + g[1][1] * b;
            }
        }
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues ascend; eigenvectors are the columns of a unitary matrix, so
/// `M = V diag(λ) V†`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseOperator,
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Rejects inputs whose Hermiticity residual exceeds the configured
/// tolerance.
pub fn eigh(m: &DenseOperator) -> Result<HermitianEigen> {
    eigh_with(m, &Tolerances::DEFAULT)
}

pub fn eigh_with(m: &DenseOperator, tol: &Tolerances) -> Result<HermitianEigen> {
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity {
        return Err(Error::NotHermitian { residual });
    }
    let d = m.dim;
    let mut a = m.data.clone();
    let mut v = DenseOperator::identity(m.n_qubits)?;

    let frob = m.hs_norm();
    let stop = 1e-14 * if frob > 1.0 { frob } else { 1.0 };

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[p * d + q].norm_sqr();
            }
        }
        if math::sqrt(2.0 * off) <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let g = a[p * d + q];
                let absg = math::cabs(g);
                if absg < 1e-300 {
                    continue;
                }
                let alpha = a[p * d + p].re;
                let beta = a[q * d + q].re;
                let u = g / Complex64::new(absg, 0.0); // e^{i phi}
                let tau = (beta - alpha) / (2.0 * absg);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                let su = Complex64::new(s, 0.0) * u;
                let suc = su.conj();

                // Columns p and q of A and V: A <- A J, V <- V J with
                // J[p][p]=c, J[p][q]=s*u, J[q][p]=-s*conj(u), J[q][q]=c.
                for r in 0..d {
                    let ap = a[r * d + p];
                    let aq = a[r * d + q];
                    a[r * d + p] = ap * c - aq * suc;
                    a[r * d + q] = ap * su + aq * c;
                    let vp = v.data[r * d + p];
                    let vq = v.data[r * d + q];
                    v.data[r * d + p] = vp * c - vq * suc;
                    v.data[r * d + q] = vp * su + vq * c;
                }
                // Rows p and q of A: A <- J† A.
                for cidx in 0..d {
                    let rp = a[p * d + cidx];
                    let rq = a[q * d + cidx];
                    a[p * d + cidx] = rp * c - rq * su;
                    a[q * d + cidx] = rp * suc + rq * c;
                }
                a[p * d + q] = ZERO;
                a[q * d + p] = ZERO;
                a[p * d + p].im = 0.0;
                a[q * d + q].im = 0.0;
            }
        }
        // Re-Hermitize to stop floating-point drift from accumulating.
        for p in 0..d {
            for q in (p + 1)..d {
                let avg = (a[p * d + q] + a[q * d + p].conj()) * 0.5;
                a[p * d + q] = avg;
                a[q * d + p] = avg.conj();
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a[i * d + i]
            .re
            .partial_cmp(&a[j * d + j].re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * d + i].re).collect();
    let mut vectors = DenseOperator::zeros(m.n_qubits)?;
    for (newcol, &oldcol) in order.iter().enumerate() {
        for r in 0..d {
            vectors.data[r * d + newcol] = v.data[r * d + oldcol];
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// `exp(-i t M)` for Hermitian `M`, via the spectral decomposition.
pub fn expm_i(m: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let eig = eigh(m)?;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| math::cis(-lam * t))
        .collect();
    let scaled = eig.eigenvectors.mul_diag_right(&phases)?;
    scaled.matmul_adjoint(&eig.eigenvectors)
}

/// Average gate fidelity between two equal-dimension unitaries:
/// `(d + |Tr(U†V)|²) / (d² + d)`, the closed form of the Haar average of
/// `|<ψ|U†V|ψ>|²`. Invariant under a global phase on either argument.
pub fn avg_gate_fidelity(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    let tr = u.hs_inner(v)?;
    let d = u.dim() as f64;
    Ok((d + tr.norm_sqr()) / (d * d + d))
}

/// Hilbert-Schmidt distance minimized over a global phase:
/// `min_phi ‖A - e^{i phi} B‖_HS = sqrt(2d - 2|Tr(A B†)|)`.
pub fn min_phase_hs_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    let tr = b.hs_inner(a)?; // Tr(B†A) = Tr(A B†)
    let d = a.dim() as f64;
    let val = 2.0 * d - 2.0 * math::cabs(tr);
    Ok(math::sqrt(if val > 0.0 { val } else { 0.0 }))
}

/// Partial trace keeping the qubits listed in `keep` (0-based, distinct).
///
/// The reduced operator lives on the kept qubits in their sorted order and
/// preserves the trace.
pub fn partial_trace(rho: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    let n = rho.n_qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "duplicate qubit index in keep list {keep:?}"
        )));
    }
    if kept.is_empty() || kept.len() > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "keep list must name between 1 and {n} qubits"
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();

    let scatter = |bits: usize, positions: &[usize]| -> usize {
        let mut out = 0usize;
        for (i, &pos) in positions.iter().enumerate() {
            if bits & (1 << i) != 0 {
                out |= 1 << pos;
            }
        }
        out
    };

    let mut out = DenseOperator::zeros(kept.len())?;
    for a in 0..dk {
        let abase = scatter(a, &kept);
        for b in 0..dk {
            let bbase = scatter(b, &kept);
            let mut acc = ZERO;
            for r in 0..dt {
                let rbits = scatter(r, &traced);
                acc += rho.get(abase | rbits, bbase | rbits);
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Haar-random pure state: normalized complex-Gaussian vector.
pub fn haar_state(n_qubits: usize, rng: &mut Rng) -> Result<Vec<Complex64>> {
    let dim = check_qubits(n_qubits)?;
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gaussian(), rng.gaussian()))
        .collect();
    let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    for z in v.iter_mut() {
        *z /= norm;
    }
    Ok(v)
}

/// Haar-random unitary: QR of a complex Ginibre matrix by modified
/// Gram-Schmidt with positive-real diagonal normalization.
pub fn random_unitary(n_qubits: usize, rng: &mut Rng) -> Result<DenseOperator> {
    let dim = check_qubits(n_qubits)?;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.gaussian(), rng.gaussian()))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for i in 0..j {
            let proj: Complex64 = cols[i]
                .iter()
                .zip(cols[j].iter())
                .map(|(&qi, &vj)| qi.conj() * vj)
                .sum();
            let (head, tail) = cols.split_at_mut(j);
            for (vj, &qi) in tail[0].iter_mut().zip(head[i].iter()) {
                *vj -= proj * qi;
            }
        }
        let norm = math::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum());
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = DenseOperator::zeros(n_qubits)?;
    for (j, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            u.set(r, j, z);
        }
    }
    Ok(u)
}

/// Random Hermitian matrix `(G + G†)/2` with Ginibre `G`.
pub fn random_hermitian(n_qubits: usize, rng: &mut Rng) -> Result<DenseOperator> {
    let dim = check_qubits(n_qubits)?;
    let mut m = DenseOperator::zeros(n_qubits)?;
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                m.set(i, j, Complex64::new(rng.gaussian(), 0.0));
            } else {
                let z = Complex64::new(rng.gaussian(), rng.gaussian()) * 0.5;
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
    }
    Ok(m)
}
