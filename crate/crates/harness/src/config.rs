use std::path::Path;

use qprob_core::{Caps, Tolerances};
use serde::{Deserialize, Serialize};

use crate::suite::PlanItem;
use crate::HarnessError;

pub const SEED_ENV: &str = "QPROB_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub tolerances: Tolerances,
    pub caps: Caps,
    pub seed: u64,
    /// Tensor-symmetric families per theorem verifier.
    pub family_instances: usize,
    /// Diagonal classical instances per corollary.
    pub classical_instances: usize,
    /// Random Hermitian instances for the Chebyshev and median checks.
    pub hermitian_instances: usize,
    /// Largest number of increments in a generated family.
    pub max_vars: usize,
    /// Largest tensor slot dimension in a generated family.
    pub max_factor_dim: usize,
    /// Largest dimension of a generated Hermitian instance.
    pub max_hermitian_dim: usize,
    /// Explicit plan; the default plan is derived from the counts above when
    /// absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<Vec<PlanItem>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            caps: Caps::default(),
            seed: 0,
            family_instances: 200,
            classical_instances: 50,
            hermitian_instances: 500,
            max_vars: 4,
            max_factor_dim: 3,
            max_hermitian_dim: 16,
            plan: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !self.tolerances.all_positive() {
            return Err(HarnessError::Config("every tolerance must be positive and finite".into()));
        }
        let c = &self.caps;
        if c.dim_cap == 0 || c.enumeration_cap == 0 || c.max_word_len == 0 || c.n_words == 0 || c.moment_cap == 0 {
            return Err(HarnessError::Config("every cap must be positive".into()));
        }
        if self.max_vars == 0 || self.max_factor_dim < 2 || self.max_hermitian_dim == 0 {
            return Err(HarnessError::Config("max_vars and max_hermitian_dim must be positive, max_factor_dim at least 2".into()));
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces the seed with `QPROB_SEED` when that variable is set.
    pub fn apply_env(&mut self) -> Result<(), HarnessError> {
        match std::env::var(SEED_ENV) {
            Ok(v) => {
                self.seed = v.trim().parse().map_err(|_| HarnessError::Config(format!("{SEED_ENV}={v} is not a u64")))?;
                Ok(())
            }
            Err(_) => Ok(()),
        }
    }
}
