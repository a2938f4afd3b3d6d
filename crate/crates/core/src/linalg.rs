//! Small dense linear-algebra helpers shared by the exact Gaussian engine and
//! the Fisher z test. Every inverse goes through a Cholesky factorization.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn select_vec(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

pub fn cholesky(m: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite("non-finite entry".into()));
    }
    m.clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite(format!("{}x{} block", m.nrows(), m.ncols())))
}

pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(cholesky(m)?.inverse())
}

/// Conditional covariance of `a` given `z`: the Schur complement
/// `S_aa - S_az S_zz^-1 S_za`.
pub fn schur_complement(cov: &DMatrix<f64>, a: &[usize], z: &[usize]) -> Result<DMatrix<f64>> {
    let saa = select(cov, a, a);
    if z.is_empty() {
        return Ok(saa);
    }
    let szz = select(cov, z, z);
    let sza = select(cov, z, a);
    let chol = cholesky(&szz)?;
    let solved = chol.solve(&sza);
    Ok(saa - sza.transpose() * solved)
}

/// Partial correlation of `i` and `j` given `cond`, read off the precision of
/// the `{i, j} ∪ cond` block.
pub fn partial_correlation(cov: &DMatrix<f64>, i: usize, j: usize, cond: &[usize]) -> Result<f64> {
    let mut idx = Vec::with_capacity(cond.len() + 2);
    idx.push(i);
    idx.push(j);
    idx.extend_from_slice(cond);
    let prec = spd_inverse(&select(cov, &idx, &idx))?;
    let denom = (prec[(0, 0)] * prec[(1, 1)]).sqrt();
    Ok((-prec[(0, 1)] / denom).clamp(-1.0, 1.0))
}

/// Largest absolute partial correlation between any `x` and any `y` given `z`.
/// Zero exactly when the Gaussian block independence `x ⊥ y | z` holds.
pub fn max_block_partial_correlation(cov: &DMatrix<f64>, x: &[usize], y: &[usize], z: &[usize]) -> Result<f64> {
    let mut a = Vec::with_capacity(x.len() + y.len());
    a.extend_from_slice(x);
    a.extend_from_slice(y);
    let cond = schur_complement(cov, &a, z)?;
    let mut best = 0.0f64;
    for i in 0..x.len() {
        for j in 0..y.len() {
            let jj = x.len() + j;
            let denom = (cond[(i, i)] * cond[(jj, jj)]).sqrt();
            if denom <= 0.0 || !denom.is_finite() {
                return Err(Error::NotPositiveDefinite("degenerate conditional variance".into()));
            }
            best = best.max((cond[(i, jj)] / denom).abs());
        }
    }
    Ok(best.min(1.0))
}
