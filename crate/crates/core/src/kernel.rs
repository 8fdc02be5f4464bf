//! Dense complex linear algebra shared by every other module.
//!
//! Index convention: a composite index over factors of dimensions
//! `(n_1, n_2, …)` is `i_1 + n_1·(i_2 + n_2·(i_3 + …))`, so the FIRST factor
//! varies fastest. For two `D`-level systems this is `μ = i + D·j`. Every
//! module flattens and tensors through the functions here, so the convention
//! lives in exactly one place.
//!
//! A `D×D` amplitude grid stored column-major by nalgebra therefore flattens
//! to the `μ` ordering with no copying (`as_slice`).

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::config::NumericConfig;
use crate::error::{LoccError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tensor product `a ⊗ b` with `a` as the fast factor.
///
/// `kron(a, b)[(i + p·k), (j + q·l)] = a[(i, j)] · b[(k, l)]` for `a` of shape `p×q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let (p, q) = a.shape();
    let (r, s) = b.shape();
    let rows = p.checked_mul(r).ok_or(LoccError::Sizing { requested: usize::MAX, max: max_dim })?;
    let cols = q.checked_mul(s).ok_or(LoccError::Sizing { requested: usize::MAX, max: max_dim })?;
    if rows.max(cols) > max_dim {
        return Err(LoccError::Sizing { requested: rows.max(cols), max: max_dim });
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |row, col| a[(row % p, col % q)] * b[(row / p, col / q)]))
}

/// Tensor product of two vectors, first factor fastest.
pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let n = a.len();
    ComplexVector::from_fn(n * b.len(), |idx, _| a[idx % n] * b[idx / n])
}

/// Partial trace over the second factor of an operator on `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    let n = d1 * d2;
    if m.shape() != (n, n) {
        return Err(LoccError::Shape(format!(
            "partial trace expects a {n}x{n} operator for dims ({d1}, {d2}), got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(ComplexMatrix::from_fn(d1, d1, |i, ip| (0..d2).map(|k| m[(i + d1 * k, ip + d1 * k)]).sum()))
}

/// Reorders the tensor factors of `v`.
///
/// Output factor `k` is input factor `perm[k]`; the output therefore has
/// factor dimensions `dims[perm[0]], dims[perm[1]], …`.
pub fn permute_factors(v: &ComplexVector, dims: &[usize], perm: &[usize]) -> Result<ComplexVector> {
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(LoccError::Shape(format!("vector of length {} does not match factor dims {dims:?}", v.len())));
    }
    if perm.len() != dims.len() {
        return Err(LoccError::Domain(format!(
            "permutation {perm:?} has {} entries for {} factors",
            perm.len(),
            dims.len()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(LoccError::Domain(format!("{perm:?} is not a permutation")));
        }
    }

    // Strides of the input factors, first factor fastest.
    let mut in_strides = vec![1usize; dims.len()];
    for k in 1..dims.len() {
        in_strides[k] = in_strides[k - 1] * dims[k - 1];
    }
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();

    let mut out = ComplexVector::zeros(total);
    let mut digits = vec![0usize; dims.len()];
    for (out_idx, slot) in out.iter_mut().enumerate() {
        let mut rem = out_idx;
        for (k, &n) in out_dims.iter().enumerate() {
            digits[k] = rem % n;
            rem /= n;
        }
        let in_idx: usize = perm.iter().zip(&digits).map(|(&p, &i)| i * in_strides[p]).sum();
        *slot = v[in_idx];
    }
    Ok(out)
}

/// Inverse of a factor permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// `‖M†M − I‖_F`.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m.adjoint() * m - ComplexMatrix::identity(m.nrows(), m.ncols())).norm()
}

pub fn all_finite(entries: &[Complex64]) -> bool {
    entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigendecomposition of a normal matrix.
#[derive(Debug, Clone)]
pub struct NormalEigen {
    /// Unsorted eigenvalues; `values[k]` belongs to column `k` of `vectors`.
    pub values: Vec<Complex64>,
    /// Unitary matrix of eigenvectors.
    pub vectors: ComplexMatrix,
}

impl NormalEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(&self.values) {
            col *= lambda;
        }
        scaled * self.vectors.adjoint()
    }
}

/// Diagonalizes a normal matrix through its complex Schur form, which is
/// diagonal (up to rounding) when the input is normal.
pub fn eig_normal(m: &ComplexMatrix, config: &NumericConfig) -> Result<NormalEigen> {
    if !m.is_square() {
        return Err(LoccError::Shape(format!("eig_normal needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if !all_finite(m.as_slice()) {
        return Err(LoccError::Precondition("matrix has non-finite entries".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(NormalEigen { values: Vec::new(), vectors: ComplexMatrix::zeros(0, 0) });
    }
    let scale = (m.norm() / (n as f64).sqrt()).max(1.0);
    let commutator = (m * m.adjoint() - m.adjoint() * m).norm();
    if commutator > config.unitarity_tol * scale * scale {
        return Err(LoccError::Precondition(format!("matrix is not normal: ‖MM† − M†M‖_F = {commutator:.3e}")));
    }

    // A bare machine-epsilon deflation test can stall on clustered
    // unit-modulus spectra; the reconstruction check below bounds the result.
    let schur = [8.0, 64.0]
        .into_iter()
        .find_map(|k| Schur::try_new(m.clone(), k * f64::EPSILON, 1000 * n))
        .ok_or_else(|| LoccError::Internal("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let eig = NormalEigen { values: t.diagonal().iter().copied().collect(), vectors: q };

    let residual = (eig.reconstruct() - m).norm();
    if residual > config.eig_reconstruction_tol * scale {
        return Err(LoccError::Internal(format!(
            "eigendecomposition reconstruction error {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(eig)
}
