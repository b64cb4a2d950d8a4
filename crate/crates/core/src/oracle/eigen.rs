//! Dense Hermitian eigensolves, ascending order.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) struct Eigen<T> {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: Mat<T>,
}

pub(crate) fn real_eigen(h: &Mat<f64>) -> Result<Eigen<f64>> {
    let e = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let values = e.S().column_vector().iter().copied().collect();
    Ok(Eigen { values, vectors: e.U().to_owned() })
}

pub(crate) fn complex_eigen(h: &Mat<Complex64>) -> Result<Eigen<Complex64>> {
    let e = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let values = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok(Eigen { values, vectors: e.U().to_owned() })
}

pub(crate) fn real_eigenvalues(h: &Mat<f64>) -> Result<Vec<f64>> {
    h.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)
}

pub(crate) fn complex_eigenvalues(h: &Mat<Complex64>) -> Result<Vec<f64>> {
    h.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)
}
