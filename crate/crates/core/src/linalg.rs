//! Dense complex matrices and the small set of linear-algebra primitives the
//! tomography stack needs: tensor products, Hermitian eigendecompositions,
//! and positive-semidefiniteness probes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, TomoError};

pub type C64 = Complex64;

/// Square complex matrix with finite entries, row-major semantics.
///
/// Carrier for Pauli words, projectors, and density matrices. Values are
/// immutable once built; all operations return new matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub(crate) m: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(TomoError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TomoError::NonFinite);
        }
        Ok(Self { m })
    }

    /// Build from a row-major slice of entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(TomoError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: &self.m + &other.m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            m: &self.m - &other.m,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            m: &self.m * &other.m,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            m: self.m.map(|z| z * factor),
        }
    }

    /// Largest entrywise deviation from Hermiticity, max |m - m†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let d = (self.m[(i, j)] - self.m[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Eigendecomposition of a Hermitian matrix. Returns (eigenvalues,
    /// eigenvector columns); eigenvalues are real and unordered.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        // Symmetrize first so accumulated float error cannot leak into the
        // tridiagonalization.
        let h = (&self.m + self.m.adjoint()).map(|z| z * C64::new(0.5, 0.0));
        let eig = h.symmetric_eigen();
        (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = self.hermitian_eigen();
        vals.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Cheap PSD probe: does min eigenvalue exceed -tol? Runs a Cholesky
    /// pivot test on m + tol*I, which fails exactly when a pivot goes
    /// non-positive.
    pub fn is_psd_within(&self, tol: f64) -> bool {
        let mut shifted = self.m.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += C64::new(tol, 0.0);
        }
        positive_definite_in_place(&mut shifted)
    }

    /// Reassemble U diag(vals) U† from a Hermitian eigendecomposition.
    pub fn from_eigen(vals: &[f64], vecs: &DMatrix<C64>) -> Self {
        let d = vecs.nrows();
        let diag = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(vals[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self {
            m: vecs * diag * vecs.adjoint(),
        }
    }

    /// Max entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// In-place Hermitian Cholesky pivot test; destroys the lower triangle of
/// `m`. Fails when any pivot is non-positive, i.e. the matrix is not
/// positive definite. (nalgebra's generic Cholesky takes complex square
/// roots and so never detects indefiniteness over Complex64.)
pub fn positive_definite_in_place(m: &mut DMatrix<C64>) -> bool {
    let d = m.nrows();
    for j in 0..d {
        let mut pivot = m[(j, j)].re;
        for k in 0..j {
            pivot -= m[(j, k)].norm_sqr();
        }
        if pivot <= 0.0 {
            return false;
        }
        let root = pivot.sqrt();
        m[(j, j)] = C64::new(root, 0.0);
        for i in (j + 1)..d {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= m[(i, k)] * m[(j, k)].conj();
            }
            m[(i, j)] = s / C64::new(root, 0.0);
        }
    }
    true
}

/// Kronecker product with `a`'s indices most significant:
/// (a ⊗ b)[(i*bd + k), (j*bd + l)] = a[i,j] * b[k,l].
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        m: a.m.kronecker(&b.m),
    }
}

/// Column vector helper used for pure states and projector eigenvectors.
pub fn kron_vec(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            out[i * b.len() + k] = a[i] * b[k];
        }
    }
    out
}
