//! Empirical EG estimates over the three-group gadget family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    convex_eg_lower, gamma_hinge_eg_lower, hinge_eg_upper, named_loss_eg_lower, BoundValue,
};
use crate::dist::thm3_gadget;
use crate::error::{Error, Result};
use crate::loss::{LossId, LossSpec};
use crate::numeric::mix_seed;
use crate::risk::{margin_risk, LinearPredictor};
use crate::solver::{enumerate_eps_optimal, solve, SolveConfig};

pub const FLAG_HIT_SCALE_CAP: &str = "hit_scale_cap";
pub const FLAG_NOT_CONVERGED: &str = "not_converged";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EgConfig {
    pub beta_grid_points: usize,
    pub solve: SolveConfig,
}

impl Default for EgConfig {
    fn default() -> Self {
        EgConfig {
            beta_grid_points: 64,
            solve: SolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GadgetParams {
    pub nu: f64,
    pub beta: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub beta: f64,
    pub gadget: GadgetParams,
    pub worst_zero_one: f64,
    pub best_phi_risk: f64,
    pub witness_margin_risk: f64,
    pub witness_norm: f64,
    pub flags: Vec<String>,
}

impl BetaRow {
    pub fn hit_scale_cap(&self) -> bool {
        self.flags.iter().any(|f| f == FLAG_HIT_SCALE_CAP)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgBounds {
    pub thm3_lower: BoundValue,
    pub thm4_lower: BoundValue,
    pub prop2_upper: BoundValue,
    /// Closed form for the loss when one exists.
    pub named_lower: Option<BoundValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgEstimate {
    pub loss: LossSpec,
    pub nu: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub per_beta: Vec<BetaRow>,
    /// Max of `worst_zero_one` over all rows.
    pub estimate: f64,
    /// Same maximum over rows that did not hit the scale cap.
    pub estimate_uncapped: f64,
    /// Spacing of the beta grid.
    pub delta_grid: f64,
    pub bounds: EgBounds,
}

impl EgEstimate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("estimate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// The gadget margin for norm bound `B`: the smallest float `M >= 1/B` with
/// `B * M >= 1` exactly, so the witness `w = (B, 0)` keeps its unit margins.
pub fn gadget_margin(b: f64) -> f64 {
    let mut m = 1.0 / b;
    while b * m < 1.0 {
        m = m.next_up();
    }
    m
}

/// The witness `w = (B, 0), w0 = 0`, which errs only on the `nu` group.
pub fn witness(b: f64) -> LinearPredictor {
    LinearPredictor::new(vec![b, 0.0], 0.0)
}

/// `w = (w1, 0), w0 = 0` with `w1` the smallest float `>= 1/M` giving
/// `w1 * M >= 1`, the witness for a gadget built with an arbitrary `M`.
pub fn thm3_witness(m: f64) -> LinearPredictor {
    let mut w = 1.0 / m;
    while w * m < 1.0 {
        w = w.next_up();
    }
    LinearPredictor::new(vec![w, 0.0], 0.0)
}

/// Open beta interval `(nu, min{nu(B+1)/2, 1 - 2nu, 1/2})` and its interior
/// grid of `points - 2` values with spacing `(hi - lo)/(points - 1)`.
pub fn beta_grid(nu: f64, b: f64, points: usize) -> Result<(Vec<f64>, f64)> {
    if points < 3 {
        return Err(Error::OutOfRange(
            "beta grid needs at least 3 points".into(),
        ));
    }
    let lo = nu;
    let hi = (nu * (b + 1.0) / 2.0).min(1.0 - 2.0 * nu).min(0.5);
    if !(hi > lo) {
        return Err(Error::OutOfRange(format!(
            "empty admissible beta interval ({lo}, {hi})"
        )));
    }
    let delta = (hi - lo) / (points - 1) as f64;
    // counted down from hi so the top point is exactly hi - delta
    let grid = (1..points - 1)
        .map(|i| hi - (points - 1 - i) as f64 * delta)
        .collect();
    Ok((grid, delta))
}

fn check_params(nu: f64, b: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::OutOfRange(format!("nu = {nu} must lie in (0, 1)")));
    }
    if !(b > 1.0 && b.is_finite()) {
        return Err(Error::OutOfRange(format!("B = {b} must exceed 1")));
    }
    let t = nu * (b + 1.0);
    if t >= 1.0 {
        return Err(Error::OutOfRange(format!(
            "nu(B+1) >= 1 (ν(B+1) = {t} ≥ 1)"
        )));
    }
    Ok(())
}

fn run_row(loss: &LossSpec, nu: f64, b: f64, beta: f64, cfg: &SolveConfig) -> Result<BetaRow> {
    let m = gadget_margin(b);
    let dist = thm3_gadget(nu, beta, m)?;
    let wit = witness(b);
    let cfg = SolveConfig {
        adversarial: false,
        ..*cfg
    };
    let base = solve(&dist, loss, &cfg)?;
    let cands = enumerate_eps_optimal(&dist, loss, &base, &cfg)?;
    let worst = cands
        .iter()
        .map(|c| c.report.zero_one_risk)
        .fold(0.0, f64::max);
    let mut flags = Vec::new();
    if base.hit_scale_cap {
        flags.push(FLAG_HIT_SCALE_CAP.to_string());
    }
    if !base.converged {
        flags.push(FLAG_NOT_CONVERGED.to_string());
    }
    Ok(BetaRow {
        beta,
        gadget: GadgetParams { nu, beta, m },
        worst_zero_one: worst,
        best_phi_risk: base.best_phi_risk,
        witness_margin_risk: margin_risk(&dist, &wit)?,
        witness_norm: wit.weight_norm(),
        flags,
    })
}

/// Sweeps the gadget over the beta grid and records the worst 0-1 risk of
/// the ε-optimal φ-risk minimizers for each beta.
pub fn empirical_eg(loss: &LossSpec, nu: f64, b: f64, cfg: &EgConfig) -> Result<EgEstimate> {
    loss.require_convex("empirical_eg")?;
    check_params(nu, b)?;
    cfg.solve.validate()?;
    let (grid, delta_grid) = beta_grid(nu, b, cfg.beta_grid_points)?;
    let per_beta: Vec<BetaRow> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &beta)| {
            let row_cfg = SolveConfig {
                seed: mix_seed(cfg.solve.seed, i as u64),
                ..cfg.solve
            };
            run_row(loss, nu, b, beta, &row_cfg)
        })
        .collect::<Result<_>>()?;
    let estimate = per_beta
        .iter()
        .map(|r| r.worst_zero_one)
        .fold(0.0, f64::max);
    let estimate_uncapped = per_beta
        .iter()
        .filter(|r| !r.hit_scale_cap())
        .map(|r| r.worst_zero_one)
        .fold(0.0, f64::max);
    let named_lower = match loss.id() {
        LossId::Hinge | LossId::SquaredHinge | LossId::Exponential | LossId::Logistic => {
            Some(named_loss_eg_lower(loss.id(), nu, b)?)
        }
        _ => None,
    };
    Ok(EgEstimate {
        loss: *loss,
        nu,
        b,
        per_beta,
        estimate,
        estimate_uncapped,
        delta_grid,
        bounds: EgBounds {
            thm3_lower: gamma_hinge_eg_lower(nu, b)?,
            thm4_lower: convex_eg_lower(nu, b)?,
            prop2_upper: hinge_eg_upper(nu, b)?,
            named_lower,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `thm3_lower - delta_grid <= estimate <= prop2_upper + tol` over the rows
/// that did not hit the scale cap. Only defined for the hinge family.
pub fn sandwich_check(est: &EgEstimate, tol: f64) -> Result<SandwichCheck> {
    if !matches!(est.loss.id(), LossId::Hinge | LossId::GammaHinge) {
        return Err(Error::UnsupportedLoss {
            op: "sandwich_check",
            loss: est.loss.id().as_str(),
        });
    }
    let lower = est.bounds.thm3_lower.value - est.delta_grid;
    let upper = est.bounds.prop2_upper.value + tol;
    let estimate = est.estimate_uncapped;
    Ok(SandwichCheck {
        lower,
        estimate,
        upper,
        holds: lower <= estimate && estimate <= upper,
    })
}

/// Case-1 classifier of the gadget analysis: boundary through `(-c, 0)`
/// tilted so the `+` group at `M` sits exactly on the scaled-hinge kink.
/// Returns the predictor and its closed-form φ-risk
/// `(nu(1+M) + 2c beta)/(M+c)`.
pub fn case1_classifier(nu: f64, beta: f64, m: f64, c: f64) -> (LinearPredictor, f64) {
    let s = m / (m + c);
    let cos = (1.0 - s * s).sqrt();
    let p = LinearPredictor::new(vec![s, -cos], s * c);
    (p, (nu * (1.0 + m) + 2.0 * c * beta) / (m + c))
}

/// Case-2 classifier: boundary through `(-(c' + M), 0)` with the opposite
/// orientation, the `nu` group sitting on the kink. Returns the predictor and
/// `((1-nu)(1+M) - 2 beta (c'+M))/(1 - c' - M)`, valid for
/// `0 < c' <= (1-M)/2`.
pub fn case2_classifier(nu: f64, beta: f64, m: f64, c_prime: f64) -> (LinearPredictor, f64) {
    let c = c_prime + m;
    let s = m / (1.0 - c);
    let cos = (1.0 - s * s).max(0.0).sqrt();
    let p = LinearPredictor::new(vec![-s, cos], -s * c);
    (p, ((1.0 - nu) * (1.0 + m) - 2.0 * beta * c) / (1.0 - c))
}
