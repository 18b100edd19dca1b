//! Dense complex linear algebra for tiny Hermitian problems.
//!
//! Storage is a flat row-major `Vec<Complex64>` and every kernel is written
//! out naively: the matrices in this engine never exceed dimension 8, so
//! cache behavior and blocking are irrelevant, while *portability of the
//! exact floating-point result* is not — the same bits must come out on
//! every platform and under every thread count. No BLAS/LAPACK backend.
//!
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration: each
//! sweep annihilates every off-diagonal pair (p, q) with a unitary 2×2
//! rotation. Jacobi is slower than tridiagonalization but has excellent
//! relative accuracy on the tiny, well-conditioned matrices seen here, and
//! its convergence is easy to make deterministic.

use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenvalues closer than this (relative to ‖A‖) form a degenerate cluster;
/// inside a cluster the eigenbasis returned by [`herm_eig`] is an arbitrary
/// orthonormal one.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Off-diagonal Frobenius mass below this multiple of ‖A‖_F stops the Jacobi
/// sweep.
const JACOBI_TOL: f64 = 1e-14;

/// Hard cap on Jacobi sweeps; dimension ≤ 8 converges in a handful.
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C_ZERO; rows * cols] }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C_ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix { rows: r, cols: c, data: rows.concat() }
    }

    /// Build from explicit columns; all columns must have equal length.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        CMatrix::from_fn(r, c, |i, j| cols[j][i])
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[must_use]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[must_use]
    pub fn adjoint(&self) -> Self {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    #[must_use]
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    #[must_use]
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    #[must_use]
    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    #[must_use]
    pub fn scale(&self, z: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * z).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    #[must_use]
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    #[must_use]
    pub fn frob(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[must_use]
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖A − A†‖_F; zero iff Hermitian.
    #[must_use]
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        self.sub(&self.adjoint()).frob()
    }

    /// ‖A + A†‖_F; zero iff anti-Hermitian.
    #[must_use]
    pub fn anti_hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        self.add(&self.adjoint()).frob()
    }

    /// Copy of the `nr × nc` block anchored at (r0, c0).
    #[must_use]
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols);
        CMatrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    #[must_use]
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// [A, B] = AB − BA.
    #[must_use]
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Kronecker product, row-major convention: (A⊗B)[ir·p+jr][ic·q+jc].
    #[must_use]
    pub fn kron(&self, rhs: &Self) -> Self {
        CMatrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    #[must_use]
    pub fn det(&self) -> Complex64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C_ONE;
        for k in 0..n {
            let pivot = (k..n).max_by(|&i, &j| {
                a[(i, k)].norm().partial_cmp(&a[(j, k)].norm()).expect("NaN in det pivot")
            });
            let p = pivot.unwrap();
            if a[(p, k)] == C_ZERO {
                return C_ZERO;
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let sub = factor * a[(k, j)];
                    a[(i, j)] -= sub;
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// ‖A − B‖_F.
#[must_use]
pub fn frob_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).frob()
}

/// Eigenpairs of a Hermitian matrix; `values` ascending, `vectors` holds the
/// matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Full eigensystem of a Hermitian matrix by cyclic complex Jacobi.
///
/// The input must be square and Hermitian within `1e-12` relative to its
/// norm. Sweeps stop once the off-diagonal Frobenius mass drops below
/// `1e-14·‖A‖_F` (at most 100 sweeps — far more than dimension ≤ 8 needs).
/// Within a degenerate cluster (eigenvalues closer than
/// [`DEGENERACY_THRESHOLD`]·‖A‖) the returned basis is orthonormal but
/// otherwise arbitrary.
pub fn herm_eig(a: &CMatrix) -> Result<EigenSystem> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch);
    }
    let n = a.rows();
    let norm = a.frob();
    if a.hermitian_deviation() > 1e-12 * norm.max(1.0) {
        return Err(Error::NotHermitian);
    }
    // Work on the Hermitian average so roundoff in the input cannot feed an
    // asymmetric component into the rotations.
    let mut b = a.add(&a.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut v = CMatrix::identity(n);
    if norm == 0.0 {
        return Ok(EigenSystem { values: vec![0.0; n], vectors: v });
    }

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    s += 2.0 * b[(p, q)].norm_sqr();
                }
            }
            s.sqrt()
        };
        if off <= JACOBI_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = b[(p, q)];
                let ag = g.norm();
                if ag == 0.0 {
                    continue;
                }
                // Unitary 2×2 rotation G annihilating b_pq: strip the phase
                // of b_pq, then a real Jacobi rotation with the stable small
                // root of t² − 2τt − 1 = 0.
                let phase = g / Complex64::new(ag, 0.0);
                let tau = (b[(q, q)].re - b[(p, p)].re) / (2.0 * ag);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let g00 = Complex64::new(c, 0.0);
                let g01 = Complex64::new(-s, 0.0);
                let g10 = phase.conj() * s;
                let g11 = phase.conj() * c;
                // B ← G† B G, applied as column then row updates.
                for k in 0..n {
                    let bkp = b[(k, p)];
                    let bkq = b[(k, q)];
                    b[(k, p)] = bkp * g00 + bkq * g10;
                    b[(k, q)] = bkp * g01 + bkq * g11;
                }
                for k in 0..n {
                    let bpk = b[(p, k)];
                    let bqk = b[(q, k)];
                    b[(p, k)] = g00.conj() * bpk + g10.conj() * bqk;
                    b[(q, k)] = g01.conj() * bpk + g11.conj() * bqk;
                }
                b[(p, q)] = C_ZERO;
                b[(q, p)] = C_ZERO;
                // V ← V G accumulates the eigenbasis.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g00 + vkq * g10;
                    v[(k, q)] = vkp * g01 + vkq * g11;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    // Ascending eigenvalue order; ties broken by original position so the
    // permutation is deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        b[(i, i)].re.partial_cmp(&b[(j, j)].re).expect("NaN eigenvalue").then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| b[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

/// exp(A) for anti-Hermitian A, via the spectral decomposition of iA.
///
/// The result is unitary to machine precision by construction: iA is
/// Hermitian, so exp(A) = V·diag(e^{−iλ})·V† with V unitary.
pub fn unitary_exp(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch);
    }
    if a.anti_hermitian_deviation() > 1e-12 * a.frob().max(1.0) {
        return Err(Error::NotAntiHermitian);
    }
    let k = a.scale(C_I); // Hermitian
    let eig = herm_eig(&k)?;
    let n = a.rows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let phase = Complex64::from_polar(1.0, -eig.values[j]);
        let col = eig.vectors.column(j);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += phase * col[r] * col[c].conj();
            }
        }
    }
    Ok(out)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues are required to be ≥ −1e-12 (tiny negatives are clamped to
/// zero); anything lower is a genuine violation and errors.
pub fn psd_sqrt(rho: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(rho)?;
    if eig.values.iter().any(|&l| l < -1e-12) {
        return Err(Error::NotPsd);
    }
    let n = rho.rows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let root = eig.values[j].max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let col = eig.vectors.column(j);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += root * col[r] * col[c].conj();
            }
        }
    }
    // Symmetrize away the last bits of roundoff.
    Ok(out.add(&out.adjoint()).scale(Complex64::new(0.5, 0.0)))
}

/// Unitary polar factor U of an invertible square matrix M = U·(M†M)^{1/2}.
///
/// Errors with [`Error::RankDeficient`] when the smallest singular value is
/// at or below 1e-12.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch);
    }
    let gram = m.adjoint().mul(m);
    let eig = herm_eig(&gram)?;
    let smin = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if smin <= 1e-12 {
        return Err(Error::RankDeficient);
    }
    let n = m.rows();
    let mut inv_root = CMatrix::zeros(n, n);
    for j in 0..n {
        let w = 1.0 / eig.values[j].sqrt();
        let col = eig.vectors.column(j);
        for r in 0..n {
            for c in 0..n {
                inv_root[(r, c)] += w * col[r] * col[c].conj();
            }
        }
    }
    Ok(m.mul(&inv_root))
}

/// Group ascending `values` into clusters of numerically degenerate entries:
/// a new cluster starts whenever the gap to the previous value exceeds
/// `threshold·scale`. Returns half-open index ranges.
#[must_use]
pub fn degenerate_clusters(values: &[f64], scale: f64, threshold: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > threshold * scale {
            out.push(start..i);
            start = i;
        }
    }
    if !values.is_empty() {
        out.push(start..values.len());
    }
    out
}
