//! Dense helpers shared by the fitting and diagnostic modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Smallest-to-largest singular value ratio below which a column set is
/// treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

pub fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

pub fn select_square(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Orthonormal basis of the column span, or `None` when the columns are not
/// linearly independent at [`RANK_TOL`].
pub fn full_rank_basis(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.ncols() == 0 {
        return Some(DMatrix::zeros(m.nrows(), 0));
    }
    if m.ncols() > m.nrows() {
        return None;
    }
    let svd = m.clone().svd(true, false);
    let sv = &svd.singular_values;
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min / max < RANK_TOL {
        return None;
    }
    svd.u
}

/// Orthonormal basis of the numerical column span; directions with singular
/// value below [`RANK_TOL`] times the largest are dropped.
pub fn span_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let max = svd.singular_values.max();
    if !(max > 0.0) {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= RANK_TOL * max)
        .collect();
    select_columns(&u, &keep)
}

/// `‖v − U Uᵀ v‖²` for an orthonormal `U`.
pub fn residual_sq(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    residual(basis, v).norm_squared()
}

pub fn residual(basis: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    if basis.ncols() == 0 {
        return v.clone();
    }
    let coef = basis.tr_mul(v);
    v - basis * coef
}

/// Smallest eigenvalue of a symmetric matrix with a unit eigenvector.
pub fn min_eigen(sym: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(sym.clone());
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (
        eig.eigenvalues[best],
        eig.eigenvectors.column(best).into_owned(),
    )
}

pub fn min_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    if sym.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(sym.clone()).eigenvalues.min()
}
