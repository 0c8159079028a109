use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Penalty parameter strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaRule {
    /// `sigma = ||(X, s)|| / ||(Z, p)||` after every iteration.
    LorenzTranDinh,
    Fixed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once `max(r_P, r_D) <= eps`.
    pub eps: f64,
    pub max_iter: usize,
    /// Wall-clock budget in seconds, bound recovery included.
    pub time_limit_sec: f64,
    pub sigma0: f64,
    pub sigma_rule: SigmaRule,
    /// Iterations between calls of the bound-recovery hook.
    pub postprocess_every: usize,
    /// Reserved for randomized tie-breaking; the solver is deterministic today.
    pub seed: u64,
    /// Iterations over which `delta` must improve before the run is declared stalled.
    pub stall_window: usize,
    /// Required relative improvement of the best `delta` over `stall_window`.
    pub stall_improvement: f64,
    /// Optional CSV file receiving one row per iteration.
    pub log_path: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: 1e-5,
            max_iter: 100_000,
            time_limit_sec: 1800.0,
            sigma0: 1.0,
            sigma_rule: SigmaRule::LorenzTranDinh,
            postprocess_every: 200,
            seed: 0,
            stall_window: 500,
            stall_improvement: 1e-3,
            log_path: None,
        }
    }
}

impl SolverConfig {
    /// Settings used for the graph relaxations (`eps = 1e-6`).
    pub fn for_graphs() -> Self {
        Self {
            eps: 1e-6,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if !(self.sigma0 > 0.0) || !self.sigma0.is_finite() {
            return Err(Error::InvalidConfig("sigma0 must be positive".into()));
        }
        if self.postprocess_every == 0 {
            return Err(Error::InvalidConfig(
                "postprocess_every must be >= 1".into(),
            ));
        }
        if !(self.time_limit_sec > 0.0) {
            return Err(Error::InvalidConfig("time limit must be positive".into()));
        }
        if self.stall_window == 0 {
            return Err(Error::InvalidConfig("stall_window must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SolverConfig::default().validate().unwrap();
        assert_eq!(SolverConfig::for_graphs().eps, 1e-6);
    }

    #[test]
    fn rejects_bad_values() {
        for cfg in [
            SolverConfig {
                eps: 0.0,
                ..Default::default()
            },
            SolverConfig {
                sigma0: -1.0,
                ..Default::default()
            },
            SolverConfig {
                postprocess_every: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        }
    }
}
