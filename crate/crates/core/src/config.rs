use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max `|A - A*|` entry accepted when validating Hermitian input.
    pub tol_herm: f64,
    /// Idempotency and orthogonality defect accepted for projections.
    pub tol_proj: f64,
    /// Reconstruction and completeness defect of spectral resolutions.
    pub tol_spec: f64,
    /// Relative eigenvalue clustering gap, scaled by `max(1, ||x||)`.
    pub tol_cluster: f64,
    /// Commutator max-entry threshold.
    pub tol_comm: f64,
    /// Null-space eigenvalue threshold for the general meet.
    pub tol_null: f64,
    /// Normalized factorization defect accepted by the independence test.
    pub tol_indep: f64,
    /// Slack accepted on every inequality check.
    pub tol_check: f64,
    /// Eigenvalues this close to a finite interval endpoint snap onto it.
    pub eps_bnd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_herm: 1e-9,
            tol_proj: 1e-9,
            tol_spec: 1e-9,
            tol_cluster: 1e-9,
            tol_comm: 1e-9,
            tol_null: 1e-8,
            tol_indep: 1e-8,
            tol_check: 1e-9,
            eps_bnd: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn all_positive(&self) -> bool {
        [
            self.tol_herm,
            self.tol_proj,
            self.tol_spec,
            self.tol_cluster,
            self.tol_comm,
            self.tol_null,
            self.tol_indep,
            self.tol_check,
            self.eps_bnd,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0)
    }
}

/// Size limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest matrix dimension any construction may materialize.
    pub dim_cap: usize,
    /// Largest sample space the classical oracle enumerates.
    pub enumeration_cap: u64,
    /// Longest word sampled by the independence test.
    pub max_word_len: usize,
    /// Words sampled per split by the independence test.
    pub n_words: usize,
    /// Highest moment compared by the moment-based checks.
    pub moment_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            dim_cap: 256,
            enumeration_cap: 1_000_000,
            max_word_len: 4,
            n_words: 64,
            moment_cap: 16,
        }
    }
}
