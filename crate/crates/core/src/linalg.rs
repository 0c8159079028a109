//! Dense kernels shared by the solver and the bound recovery.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::sdp::{symmetrize_in_place, SymMat};
use crate::{Error, Result};

/// Eigendecomposition of a symmetric matrix.
pub fn eigh(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigFailed);
    }
    let max_iter = 1000 * m.nrows().max(1);
    SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_iter).ok_or(Error::EigFailed)
}

pub fn min_eigenvalue(m: &SymMat) -> Result<f64> {
    if m.n() == 0 {
        return Ok(0.0);
    }
    Ok(eigh(m.as_matrix())?.eigenvalues.min())
}

/// `sum_k scale_k q_k q_k^T` over the eigenpairs selected by `keep`.
fn rank_update(
    eig: &SymmetricEigen<f64, nalgebra::Dyn>,
    keep: impl Fn(f64) -> bool,
    sign: f64,
) -> DMatrix<f64> {
    let n = eig.eigenvalues.len();
    let cols: Vec<usize> = (0..n).filter(|&k| keep(eig.eigenvalues[k])).collect();
    let mut b = DMatrix::zeros(n, cols.len());
    for (c, &k) in cols.iter().enumerate() {
        let s = (sign * eig.eigenvalues[k]).sqrt();
        b.column_mut(c).copy_from(&(eig.eigenvectors.column(k) * s));
    }
    let mut out = &b * b.transpose();
    symmetrize_in_place(&mut out);
    out
}

/// Splits `w` into its projections on the psd and nsd cones, `w = pos + neg`.
///
/// Only the side with the smaller Frobenius norm is assembled from
/// eigenvectors; the other side is the remainder. Rounding in the remainder
/// is then small relative to both sides, and the sum reproduces `w`.
pub(crate) fn psd_split_matrix(w: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = w.nrows();
    if n == 0 {
        return Ok((DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)));
    }
    let eig = eigh(w)?;
    let (mut pos_sq, mut neg_sq, mut positives) = (0.0, 0.0, 0);
    for &l in eig.eigenvalues.iter() {
        if l > 0.0 {
            pos_sq += l * l;
            positives += 1;
        } else {
            neg_sq += l * l;
        }
    }
    if positives == 0 {
        return Ok((DMatrix::zeros(n, n), w.clone()));
    }
    if positives == n {
        return Ok((w.clone(), DMatrix::zeros(n, n)));
    }
    if pos_sq <= neg_sq {
        let pos = rank_update(&eig, |l| l > 0.0, 1.0);
        let neg = w - &pos;
        Ok((pos, neg))
    } else {
        let neg = -rank_update(&eig, |l| l < 0.0, -1.0);
        let pos = w - &neg;
        Ok((pos, neg))
    }
}

/// Projections of `w` onto the positive and negative semidefinite cones.
pub fn psd_split(w: &SymMat) -> Result<(SymMat, SymMat)> {
    let (pos, neg) = psd_split_matrix(w.as_matrix())?;
    Ok((SymMat::symmetrized(pos), SymMat::symmetrized(neg)))
}

/// Lower-triangular Cholesky factor of a small dense symmetric positive
/// definite matrix.
#[derive(Clone, Debug)]
pub(crate) struct DenseCholesky {
    l: DMatrix<f64>,
}

impl DenseCholesky {
    /// Fails with the offending row when a pivot drops below
    /// `rel_tol` times the original diagonal entry.
    pub fn factor(a: &DMatrix<f64>, rel_tol: f64) -> std::result::Result<Self, usize> {
        let n = a.nrows();
        let mut l = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > rel_tol * a[(j, j)].abs().max(f64::MIN_POSITIVE)) {
                return Err(j);
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.l.nrows();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    #[cfg(test)]
    pub fn lower(&self) -> &DMatrix<f64> {
        &self.l
    }
}
