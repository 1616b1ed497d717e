//! Finite-sample learning curves of norm-capped empirical risk minimization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{sample, Distribution};
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::numeric::mix_seed;
use crate::risk::zero_one_risk;
use crate::solver::{solve, SolveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub mean_zero_one: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

/// For each sample size, draws `trials` samples from `source`, minimizes the
/// loss on each with `||(w, w0)|| <= norm_cap`, and averages the 0-1 risk of
/// the minimizer on `source`.
pub fn estimation_experiment(
    loss: &LossSpec,
    source: &Distribution,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
    norm_cap: f64,
) -> Result<LearningCurve> {
    loss.require_convex("estimation_experiment")?;
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange(
            "sample sizes must be positive and strictly increasing".into(),
        ));
    }
    let cfg = SolveConfig {
        scale_cap: norm_cap,
        adversarial: false,
        restarts: 1,
        ..SolveConfig::default()
    };
    cfg.validate()?;
    let mut points = Vec::with_capacity(n_grid.len());
    for (k, &n) in n_grid.iter().enumerate() {
        let risks: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let s = mix_seed(mix_seed(seed, k as u64), t as u64);
                let emp = sample(source, n, s)?;
                let res = solve(&emp, loss, &SolveConfig { seed: s, ..cfg })?;
                zero_one_risk(source, &res.best)
            })
            .collect::<Result<_>>()?;
        let mean = risks.iter().sum::<f64>() / trials as f64;
        let stderr = if trials > 1 {
            let var = risks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
            (var / trials as f64).sqrt()
        } else {
            0.0
        };
        points.push(CurvePoint {
            n,
            mean_zero_one: mean,
            stderr,
        });
    }
    Ok(LearningCurve { points })
}
