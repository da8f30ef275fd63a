//! Dense numerical kernels: numerical rank, orthonormal kernels and ranges,
//! and sorted symmetric eigendecompositions.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values below `rank_rel * max(σ_max, 1)` count as zero.
    pub rank_rel: f64,
    /// Eigenvalues below `zero_eig_rel * max(λ_max, 1)` count as zero.
    pub zero_eig_rel: f64,
    /// Relative residual allowed when testing subspace membership.
    pub membership: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rank_rel: 1e-9, zero_eig_rel: 1e-9, membership: 1e-9 }
    }
}

fn rank_threshold(singular: &DVector<f64>, tol: &Tolerances) -> f64 {
    tol.rank_rel * singular.iter().copied().fold(1.0, f64::max)
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `m = U Σ Vᵀ` with `U`, `V` square and `σ` descending.
// nalgebra's SVD returns inaccurate singular vectors on some rank-deficient inputs.
fn full_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = to_faer(m).svd().expect("SVD did not converge");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    (
        DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        DVector::from_fn(s.nrows(), |i, _| s[i]),
        DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    )
}

fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_vec(to_faer(m).singular_values().expect("SVD did not converge"))
}

/// Numerical rank via singular values.
pub fn rank(m: &DMatrix<f64>, tol: &Tolerances) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = singular_values(m);
    let thr = rank_threshold(&sv, tol);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis (as columns) of the right kernel of `m`.
///
/// A matrix of numerical rank zero has the identity as its kernel frame;
/// callers rely on this to keep coordinate subspaces in coordinate form.
pub fn nullspace(m: &DMatrix<f64>, tol: &Tolerances) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 || m.iter().all(|&x| x == 0.0) {
        return DMatrix::identity(cols, cols);
    }
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let (_, sv, v) = full_svd(m);
    let thr = rank_threshold(&sv, tol);
    let r = sv.iter().filter(|&&s| s > thr).count();
    if r == 0 {
        return DMatrix::identity(cols, cols);
    }
    v.columns(r, cols - r).into_owned()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>, tol: &Tolerances) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (u, sv, _) = full_svd(m);
    let thr = rank_threshold(&sv, tol);
    let r = sv.iter().filter(|&&s| s > thr).count();
    u.columns(0, r).into_owned()
}

/// `Q Qᵀ x` for a matrix `Q` with orthonormal columns.
pub fn project(q: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return DVector::zeros(x.len());
    }
    q * (q.transpose() * x)
}

/// `(m + mᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Symmetric eigendecomposition with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: DVector<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

pub fn sym_eigen(m: &DMatrix<f64>) -> SortedEigen {
    let n = m.nrows();
    if n == 0 {
        return SortedEigen { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) };
    }
    let eig = to_faer(&symmetrize(m)).self_adjoint_eigen(Side::Lower).expect("eigensolver did not converge");
    let (s, u) = (eig.S().column_vector(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| s[i]));
    let vectors = DMatrix::from_fn(n, n, |r, j| u[(r, order[j])]);
    SortedEigen { values, vectors }
}

/// Largest absolute entry; `0` for empty matrices.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Spectral norm; `0` for empty matrices.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).iter().copied().fold(0.0, f64::max)
}
