//! The projection lattice: meets, joins and order.
//!
//! `p ∧ q` projects onto `range(p) ∩ range(q)`. A vector is fixed by both
//! projections exactly when it lies in the null space of the positive
//! semidefinite operator `(1 - p) + (1 - q)`, so the general meet is one
//! Hermitian eigendecomposition. Commuting pairs take the `p ∧ q = pq`
//! shortcut.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::operator::{matmul, max_abs, CMatrix, Projection};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Commutator max-entry threshold for the `pq` fast path.
    pub tol_comm: f64,
    /// Eigenvalues of `(1-p) + (1-q)` below this span the intersection.
    pub tol_null: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        Self { tol_comm: t.tol_comm, tol_null: t.tol_null }
    }
}

impl From<&Tolerances> for LatticeConfig {
    fn from(t: &Tolerances) -> Self {
        Self { tol_comm: t.tol_comm, tol_null: t.tol_null }
    }
}

/// A meet together with conditioning diagnostics.
#[derive(Debug, Clone)]
pub struct MeetOutcome {
    pub projection: Projection,
    /// Set when `(1-p) + (1-q)` has an eigenvalue in `[tol_null, 10 tol_null)`,
    /// i.e. the two ranges meet at a nearly vanishing angle.
    pub degenerate_gap: Option<f64>,
    pub commuting: bool,
}

fn check_dims(p: &Projection, q: &Projection) -> Result<()> {
    if p.dim() == q.dim() {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected: p.dim(), found: q.dim() })
    }
}

fn commutator(p: &CMatrix, q: &CMatrix) -> f64 {
    max_abs(&(matmul(p, q) - matmul(q, p)))
}

pub fn commutes(p: &Projection, q: &Projection, cfg: &LatticeConfig) -> Result<bool> {
    check_dims(p, q)?;
    Ok(commutator(p.matrix(), q.matrix()) < cfg.tol_comm)
}

pub fn meet(p: &Projection, q: &Projection, cfg: &LatticeConfig) -> Result<Projection> {
    Ok(meet_with_diagnostics(p, q, cfg)?.projection)
}

pub fn meet_with_diagnostics(p: &Projection, q: &Projection, cfg: &LatticeConfig) -> Result<MeetOutcome> {
    check_dims(p, q)?;
    let pq = matmul(p.matrix(), q.matrix());
    let qp = matmul(q.matrix(), p.matrix());
    if max_abs(&(&pq - &qp)) < cfg.tol_comm {
        return Ok(MeetOutcome {
            projection: Projection::from_matrix_unchecked(pq),
            degenerate_gap: None,
            commuting: true,
        });
    }
    let (projection, degenerate_gap) = null_space_meet(p, q, cfg.tol_null)?;
    Ok(MeetOutcome { projection, degenerate_gap, commuting: false })
}

/// General-path meet; never takes the commuting shortcut.
pub fn meet_general(p: &Projection, q: &Projection, cfg: &LatticeConfig) -> Result<Projection> {
    check_dims(p, q)?;
    Ok(null_space_meet(p, q, cfg.tol_null)?.0)
}

fn null_space_meet(p: &Projection, q: &Projection, tol_null: f64) -> Result<(Projection, Option<f64>)> {
    let d = p.dim();
    let two = CMatrix::identity(d, d).map(|z| z * 2.0);
    let sum = two - p.matrix() - q.matrix();
    let sum = (&sum + sum.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::try_new(sum, f64::EPSILON, 1000 * d.max(8)).ok_or(Error::EigenFailure { dim: d })?;
    let mut kernel = Vec::new();
    let mut degenerate: Option<f64> = None;
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < tol_null {
            kernel.push(i);
        } else if v < 10.0 * tol_null {
            degenerate = Some(degenerate.map_or(v, |g: f64| g.min(v)));
        }
    }
    let mat = if kernel.is_empty() {
        CMatrix::zeros(d, d)
    } else {
        let block = eig.eigenvectors.select_columns(kernel.iter());
        &block * block.adjoint()
    };
    Ok((Projection::from_matrix_unchecked(mat), degenerate))
}

/// `p ∨ q = 1 - ((1-p) ∧ (1-q))`.
pub fn join(p: &Projection, q: &Projection, cfg: &LatticeConfig) -> Result<Projection> {
    Ok(join_with_diagnostics(p, q, cfg)?.projection)
}

pub fn join_with_diagnostics(p: &Projection, q: &Projection, cfg: &LatticeConfig) -> Result<MeetOutcome> {
    let inner = meet_with_diagnostics(&p.complement(), &q.complement(), cfg)?;
    Ok(MeetOutcome { projection: inner.projection.complement(), ..inner })
}

/// Left fold of pairwise meets.
pub fn meet_all(ps: &[Projection], cfg: &LatticeConfig) -> Result<Projection> {
    let (first, rest) = ps.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, p| meet(&acc, p, cfg))
}

/// Left fold of pairwise joins.
pub fn join_all(ps: &[Projection], cfg: &LatticeConfig) -> Result<Projection> {
    let (first, rest) = ps.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, p| join(&acc, p, cfg))
}

/// `p ≤ q`, tested as `||qp - p|| < tol` (max entry).
pub fn is_subprojection(p: &Projection, q: &Projection, tol: f64) -> Result<bool> {
    Ok(subprojection_defect(p, q)? < tol)
}

/// Max entry of `qp - p`.
pub fn subprojection_defect(p: &Projection, q: &Projection) -> Result<f64> {
    check_dims(p, q)?;
    Ok(max_abs(&(matmul(q.matrix(), p.matrix()) - p.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn line(v: &[f64]) -> Projection {
        Projection::onto_vector(&v.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    fn close(a: &Projection, b: &Projection) -> bool {
        max_abs(&(a.matrix() - b.matrix())) < 1e-12
    }

    #[test]
    fn commutes_examples() {
        let cfg = LatticeConfig::default();
        let a = Projection::coordinate(&[true, true, false]);
        let b = Projection::coordinate(&[false, true, true]);
        assert!(commutes(&a, &b, &cfg).unwrap());
        let e1 = line(&[1.0, 0.0]);
        let diag = line(&[1.0, 1.0]);
        assert!(!commutes(&e1, &diag, &cfg).unwrap());
        assert!(commutes(&diag, &diag, &cfg).unwrap());
        assert!(commutes(&a, &Projection::identity(2), &cfg).is_err());
    }

    #[test]
    fn meet_examples() {
        let cfg = LatticeConfig::default();
        let a = Projection::coordinate(&[true, true, false]);
        let b = Projection::coordinate(&[false, true, true]);
        assert_eq!(meet(&a, &b, &cfg).unwrap(), Projection::coordinate(&[false, true, false]));

        let out = meet_with_diagnostics(&line(&[1.0, 0.0]), &line(&[1.0, 1.0]), &cfg).unwrap();
        assert!(!out.commuting);
        assert!(out.projection.is_zero(1e-12));

        let p = line(&[1.0, 2.0, -1.0]);
        assert!(close(&meet(&p, &Projection::identity(3), &cfg).unwrap(), &p));
    }

    #[test]
    fn general_meet_of_planes_is_their_common_line() {
        let cfg = LatticeConfig::default();
        // span{e1, e2} and span{e1, e2 + e3} meet along e1
        let plane_a = Projection::coordinate(&[true, true, false]);
        let u = [c(1.0), c(0.0), c(0.0)];
        let w = [c(0.0), c(1.0 / 2f64.sqrt()), c(1.0 / 2f64.sqrt())];
        let plane_b = Projection::from_matrix_unchecked(
            Projection::onto_vector(&u).matrix() + Projection::onto_vector(&w).matrix(),
        );
        let m = meet(&plane_a, &plane_b, &cfg).unwrap();
        assert!(close(&m, &Projection::coordinate(&[true, false, false])));
    }

    #[test]
    fn join_examples() {
        let cfg = LatticeConfig::default();
        let j = join(&Projection::coordinate(&[true, false]), &Projection::coordinate(&[false, true]), &cfg).unwrap();
        assert_eq!(j, Projection::identity(2));
        let j = join(&line(&[1.0, 0.0]), &line(&[1.0, 1.0]), &cfg).unwrap();
        assert!(close(&j, &Projection::identity(2)));
        let p = line(&[0.3, -1.0, 2.0]);
        assert!(close(&join(&p, &Projection::zero(3), &cfg).unwrap(), &p));
    }

    #[test]
    fn subprojection_examples() {
        let a = Projection::coordinate(&[false, true, false]);
        let b = Projection::coordinate(&[false, true, true]);
        assert!(is_subprojection(&a, &b, 1e-12).unwrap());
        assert!(!is_subprojection(&Projection::coordinate(&[true, false]), &Projection::coordinate(&[false, true]), 1e-12).unwrap());
        assert!(is_subprojection(&line(&[1.0, -2.0]), &Projection::identity(2), 1e-12).unwrap());
    }

    #[test]
    fn nary_folds() {
        let cfg = LatticeConfig::default();
        assert!(matches!(meet_all(&[], &cfg), Err(Error::EmptyFamily)));
        let ps = [
            Projection::coordinate(&[true, true, true, false]),
            Projection::coordinate(&[false, true, true, true]),
            Projection::coordinate(&[true, false, true, true]),
        ];
        assert_eq!(meet_all(&ps, &cfg).unwrap(), Projection::coordinate(&[false, false, true, false]));
        assert_eq!(join_all(&ps, &cfg).unwrap(), Projection::identity(4));
    }

    #[test]
    fn nearly_parallel_lines_flag_a_degenerate_angle() {
        let cfg = LatticeConfig::default();
        let eps = 2e-4;
        let out = meet_with_diagnostics(&line(&[1.0, 0.0]), &line(&[1.0, eps]), &cfg).unwrap();
        assert!(!out.commuting);
        assert!(out.degenerate_gap.is_some());
    }
}
