//! Simultaneous diagonalization of commuting Hermitian families.

use nalgebra::SymmetricEigen;

use crate::operator::{hermitian_part, max_abs, CMatrix, HermitianOperator, C64, DEFAULT_TOL_CLUSTER};
use crate::{Error, Result};

/// A common orthonormal eigenbasis and the eigenvalue of every member on each
/// basis vector.
#[derive(Debug, Clone)]
pub struct JointEigenbasis {
    basis: CMatrix,
    /// `values[k][i]` is the eigenvalue of member `k` on basis vector `i`.
    values: Vec<Vec<f64>>,
}

/// Largest normalized commutator `||[x_i, x_j]|| / max(1, ||x_i|| ||x_j||)`.
pub fn max_pairwise_commutator(xs: &[HermitianOperator]) -> Result<f64> {
    let scale: Vec<f64> = xs.iter().map(|x| max_abs(x.matrix()).max(1.0)).collect();
    let mut worst = 0.0_f64;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            worst = worst.max(xs[i].commutator_norm(&xs[j])? / (scale[i] * scale[j]));
        }
    }
    Ok(worst)
}

/// Refines the eigenspaces of `x_1` by `x_2`, then by `x_3`, and so on.
/// Fails with `HypothesisFailed` when the members do not commute within
/// `tol_comm`.
pub fn joint_eigenbasis(xs: &[HermitianOperator], tol_comm: f64, tol_cluster: f64) -> Result<JointEigenbasis> {
    let first = xs.first().ok_or(Error::EmptyFamily)?;
    let d = first.dim();
    if let Some(bad) = xs.iter().find(|x| x.dim() != d) {
        return Err(Error::DimMismatch { expected: d, found: bad.dim() });
    }
    let deviation = max_pairwise_commutator(xs)?;
    if deviation >= tol_comm {
        return Err(Error::HypothesisFailed { hypothesis: "commuting family".into(), deviation });
    }
    if xs.iter().all(HermitianOperator::is_diagonal) {
        let values = xs.iter().map(|x| (0..d).map(|i| x.matrix()[(i, i)].re).collect()).collect();
        return Ok(JointEigenbasis { basis: CMatrix::identity(d, d), values });
    }

    let mut blocks = vec![CMatrix::identity(d, d)];
    for x in xs {
        let gap = tol_cluster * max_abs(x.matrix()).max(1.0);
        let mut refined = Vec::with_capacity(blocks.len());
        for v in blocks {
            if v.ncols() == 1 {
                refined.push(v);
                continue;
            }
            let restricted = hermitian_part(&(v.adjoint() * x.matrix() * &v));
            let m = restricted.nrows();
            let eig = SymmetricEigen::try_new(restricted, f64::EPSILON, 1000 * m.max(8))
                .ok_or(Error::EigenFailure { dim: m })?;
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut start = 0;
            while start < m {
                let mut end = start + 1;
                while end < m && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= gap {
                    end += 1;
                }
                refined.push(&v * eig.eigenvectors.select_columns(order[start..end].iter()));
                start = end;
            }
        }
        blocks = refined;
    }
    let columns: Vec<_> = blocks.iter().flat_map(|b| b.column_iter().map(|c| c.into_owned())).collect();
    let basis = CMatrix::from_columns(&columns);
    let values = xs
        .iter()
        .map(|x| {
            let rotated = basis.adjoint() * x.matrix() * &basis;
            (0..d).map(|i| rotated[(i, i)].re).collect()
        })
        .collect();
    Ok(JointEigenbasis { basis, values })
}

/// Commutator and residual threshold, relative to `max(1, ||x||)`, for
/// [`diagonal_frame`].
pub const FRAME_TOL: f64 = 1e-11;

/// The members as diagonal operators in a common eigenbasis, when they commute
/// to within [`FRAME_TOL`]. Normalized traces of words in the members are
/// unchanged by the rotation.
pub fn diagonal_frame(xs: &[HermitianOperator]) -> Option<(JointEigenbasis, Vec<HermitianOperator>)> {
    let jb = joint_eigenbasis(xs, FRAME_TOL, DEFAULT_TOL_CLUSTER).ok()?;
    let scale = xs.iter().map(|x| max_abs(x.matrix())).fold(1.0, f64::max);
    if jb.residual(xs) > FRAME_TOL * scale {
        return None;
    }
    let diag = jb.values.iter().map(|v| HermitianOperator::diagonal(v)).collect();
    Some((jb, diag))
}

impl JointEigenbasis {
    /// `U m U*`: maps a matrix written in the joint eigenbasis back to the
    /// standard basis.
    pub fn lift(&self, m: &CMatrix) -> CMatrix {
        &self.basis * m * self.basis.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Max entry of `U* x_k U - diag(values_k)` over all members.
    pub fn residual(&self, xs: &[HermitianOperator]) -> f64 {
        xs.iter()
            .zip(&self.values)
            .map(|(x, vals)| {
                let mut rotated = self.basis.adjoint() * x.matrix() * &self.basis;
                for (i, &v) in vals.iter().enumerate() {
                    rotated[(i, i)] -= C64::new(v, 0.0);
                }
                max_abs(&rotated)
            })
            .fold(0.0, f64::max)
    }

    /// `U diag(mask) U*`.
    pub fn coordinate_projection(&self, mask: &[bool]) -> CMatrix {
        let cols: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        if cols.is_empty() {
            return CMatrix::zeros(self.dim(), self.dim());
        }
        let block = self.basis.select_columns(cols.iter());
        &block * block.adjoint()
    }
}
