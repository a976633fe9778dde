//! Dense complex eigen/singular helpers. Decompositions run in faer, the
//! rest of the crate stores matrices as nalgebra `DMatrix`.

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn to_faer(m: &DMatrix<Complex64>) -> Mat<faer::c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn column(m: faer::MatRef<'_, faer::c64>, j: usize) -> DVector<Complex64> {
    DVector::from_iterator(
        m.nrows(),
        (0..m.nrows()).map(|i| {
            let z = m[(i, j)];
            Complex64::new(z.re, z.im)
        }),
    )
}

/// Eigenvalues and unit eigenvectors of a general complex matrix.
pub fn eig(m: &DMatrix<Complex64>) -> Result<(Vec<Complex64>, Vec<DVector<Complex64>>)> {
    let e = to_faer(m).eigen().map_err(|_| Error::EigenNoConvergence)?;
    let s = e.S().column_vector();
    let u = e.U();
    let mut values = Vec::with_capacity(m.nrows());
    let mut vectors = Vec::with_capacity(m.nrows());
    for j in 0..m.nrows() {
        let z = s[j];
        values.push(Complex64::new(z.re, z.im));
        let v = column(u, j);
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::EigenNoConvergence);
        }
        vectors.push(v / Complex64::new(n, 0.0));
    }
    Ok((values, vectors))
}

/// Smallest singular value and its right singular vector.
pub fn smallest_singular(m: &DMatrix<Complex64>) -> Result<(f64, DVector<Complex64>)> {
    let svd = to_faer(m).svd().map_err(|_| Error::EigenNoConvergence)?;
    let s = svd.S().column_vector();
    let (idx, smin) = (0..s.nrows())
        .map(|i| (i, s[i].re))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EigenNoConvergence)?;
    Ok((smin, column(svd.V(), idx)))
}

/// Solves `m x = b` by LU, `None` when `m` is numerically singular.
pub fn solve(m: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    m.clone().lu().solve(b)
}

/// Largest absolute entry, a cheap norm for scale estimates.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |s, x| s.max(x.norm()))
}
