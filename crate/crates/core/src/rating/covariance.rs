use nalgebra::DMatrix;

use super::fit::information;
use super::{RatingError, StrengthFit, WinMatrix};
use crate::player::PlayerId;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport {
    pub ids: Vec<PlayerId>,
    /// Covariance of the strengths on the sum-zero subspace.
    pub sigma: DMatrix<f64>,
    /// Standard error of each strength, `sqrt(sigma_ii)`.
    pub se: Vec<f64>,
}

/// Orthonormal basis of `{x : sum(x) = 0}` as the columns of an
/// `n x (n-1)` matrix (Helmert contrasts).
pub fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = 1.0 / norm;
        }
        q[(k, k - 1)] = -(k as f64) / norm;
    }
    q
}

/// Inverts the information matrix restricted to the sum-zero subspace:
/// `sigma = Q (Q^T I Q)^-1 Q^T` with `Q` an orthonormal basis of it.
///
/// `w` must be the matrix the fit was computed from; a pseudo-count
/// recorded in the fit is applied again here.
pub fn covariance(fit: &StrengthFit, w: &WinMatrix) -> Result<CovarianceReport, RatingError> {
    if !fit.converged {
        return Err(RatingError::NotConverged);
    }
    if w.ids() != fit.ids.as_slice() {
        return Err(RatingError::Data("fit and win matrix have different players".into()));
    }
    let data = if fit.pseudo_count > 0.0 {
        w.with_pseudo_count(fit.pseudo_count)
    } else {
        w.clone()
    };
    let n = w.n();
    let info = information(&data, &fit.s);
    let q = sum_zero_basis(n);
    let reduced = q.transpose() * &info * &q;
    let inv = reduced.clone().cholesky().map(|c| c.inverse()).ok_or_else(|| {
        let eig = reduced.symmetric_eigenvalues();
        RatingError::Singular {
            detail: format!(
                "projected information matrix is not positive definite (smallest eigenvalue {:.3e})",
                eig.min()
            ),
        }
    })?;
    let sigma = &q * inv * q.transpose();
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    let se = (0..n).map(|i| sigma[(i, i)].max(0.0).sqrt()).collect();
    Ok(CovarianceReport {
        ids: fit.ids.clone(),
        sigma,
        se,
    })
}
