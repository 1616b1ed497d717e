//! The one-dimensional collapse family and the calibration boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{prop1_gadget, Distribution, Label, LabeledAtom};
use crate::error::{Error, Result};
use crate::loss::{LossId, LossSpec};
use crate::numeric::{mix_seed, norm};
use crate::risk::{zero_one_risk, LinearPredictor};
use crate::solver::{solve, SolveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop1Row {
    pub m: f64,
    pub worst_zero_one: f64,
    pub best_zero_one: f64,
    pub best_phi_risk: f64,
    pub witness_zero_one: f64,
    pub hit_scale_cap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub loss: LossSpec,
    pub nu: f64,
    pub rows: Vec<Prop1Row>,
    /// `(1 - nu) - worst_zero_one` at the smallest `M`.
    pub final_gap: f64,
}

/// Threshold at zero with slope `1/M`, nudged so the bulk sits at margin 1.
pub fn prop1_witness(m: f64) -> LinearPredictor {
    let mut w = 1.0 / m;
    while w * m < 1.0 {
        w = w.next_up();
    }
    LinearPredictor::new(vec![w], 0.0)
}

/// Solves on `prop1_gadget(nu, M)` for each `M` of a decreasing sequence.
pub fn prop1_check(loss: &LossSpec, nu: f64, ms: &[f64], cfg: &SolveConfig) -> Result<Prop1Report> {
    if !loss.is_calibrated() {
        return Err(Error::UnsupportedLoss {
            op: "prop1_check",
            loss: loss.id().as_str(),
        });
    }
    if ms.is_empty() || ms.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::OutOfRange(
            "M sequence must be non-empty and strictly decreasing".into(),
        ));
    }
    let cfg = SolveConfig {
        adversarial: true,
        ..*cfg
    };
    let rows: Vec<Prop1Row> = ms
        .par_iter()
        .enumerate()
        .map(|(i, &m)| {
            let d = prop1_gadget(nu, m)?;
            let row_cfg = SolveConfig {
                seed: mix_seed(cfg.seed, i as u64),
                ..cfg
            };
            let res = solve(&d, loss, &row_cfg)?;
            Ok(Prop1Row {
                m,
                worst_zero_one: res.worst_zero_one_among_candidates,
                best_zero_one: zero_one_risk(&d, &res.best)?,
                best_phi_risk: res.best_phi_risk,
                witness_zero_one: zero_one_risk(&d, &prop1_witness(m))?,
                hit_scale_cap: res.hit_scale_cap,
            })
        })
        .collect::<Result<_>>()?;
    let last = rows.last().expect("non-empty").worst_zero_one;
    Ok(Prop1Report {
        loss: *loss,
        nu,
        rows,
        final_gap: (1.0 - nu) - last,
    })
}

/// A random distribution in the unit ball separated by a hyperplane with
/// geometric margin at least `margin`, together with a separating predictor
/// scaled to unit functional margin.
pub fn random_separable(
    dim: usize,
    atoms: usize,
    margin: f64,
    seed: u64,
) -> Result<(Distribution, LinearPredictor)> {
    if dim == 0 || atoms == 0 || !(margin > 0.0 && margin < 0.5) {
        return Err(Error::OutOfRange(
            "need dim >= 1, atoms >= 1 and margin in (0, 1/2)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = norm(&w).max(1e-3);
    w.iter_mut().for_each(|v| *v /= n);
    let b: f64 = rng.gen_range(-0.3..0.3);
    let mut out = Vec::with_capacity(atoms);
    while out.len() < atoms {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if norm(&x) > 1.0 {
            continue;
        }
        let s = crate::numeric::dot(&w, &x) + b;
        if s.abs() < margin {
            continue;
        }
        let y = if s > 0.0 { Label::Pos } else { Label::Neg };
        out.push((x, y, rng.gen_range(0.1..1.0)));
    }
    let total: f64 = out.iter().map(|t| t.2).sum();
    let atoms = out
        .into_iter()
        .map(|(x, y, p)| LabeledAtom::new(x, y, p / total))
        .collect();
    let scale = 1.0 / margin;
    let sep = LinearPredictor::new(w.iter().map(|v| v * scale).collect(), b * scale);
    Ok((Distribution::new(dim, atoms)?, sep))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationOutcome {
    /// Every ε-optimal minimizer found was error-free on every instance.
    Pass,
    /// Some separable instance admits an ε-optimal minimizer with error.
    FailExhibited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub loss: LossSpec,
    pub trials: usize,
    /// Worst ε-optimal 0-1 risk per random instance.
    pub worst_zero_one: Vec<f64>,
    /// Worst ε-optimal 0-1 risk on the constructed instance, when one is
    /// used for the loss.
    pub constructed_worst_zero_one: Option<f64>,
    pub outcome: CalibrationOutcome,
    /// Whether the outcome agrees with `loss.is_calibrated()`.
    pub matches_calibration: bool,
}

/// Two symmetric atoms at `+-1/2`. A loss vanishing at `z = 0` is minimized
/// by the zero predictor here, which misclassifies everything.
pub fn one_sided_instance() -> Distribution {
    Distribution::new(
        1,
        vec![
            LabeledAtom::new(vec![-0.5], Label::Neg, 0.5),
            LabeledAtom::new(vec![0.5], Label::Pos, 0.5),
        ],
    )
    .expect("valid instance")
}

/// Solves on `trials` random separable instances (alternating between one
/// and two dimensions) and records the worst ε-optimal 0-1 risk on each.
pub fn calibration_boundary_check(
    loss: &LossSpec,
    trials: usize,
    seed: u64,
    cfg: &SolveConfig,
) -> Result<CalibrationReport> {
    loss.require_convex("calibration_boundary_check")?;
    let cfg = SolveConfig {
        adversarial: true,
        ..*cfg
    };
    let worst: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = mix_seed(seed, t as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let dim = 1 + t % 2;
            let atoms = rng.gen_range(2..=12);
            let margin = rng.gen_range(0.05..0.3);
            let (d, _) = random_separable(dim, atoms, margin, mix_seed(s, 1))?;
            let res = solve(&d, loss, &SolveConfig { seed: s, ..cfg })?;
            Ok(res.worst_zero_one_among_candidates)
        })
        .collect::<Result<_>>()?;
    let constructed = if loss.id() == LossId::OneSidedTest {
        let res = solve(&one_sided_instance(), loss, &cfg)?;
        Some(res.worst_zero_one_among_candidates)
    } else {
        None
    };
    let failed = worst.iter().chain(constructed.iter()).any(|&v| v > 0.0);
    let outcome = if failed {
        CalibrationOutcome::FailExhibited
    } else {
        CalibrationOutcome::Pass
    };
    Ok(CalibrationReport {
        loss: *loss,
        trials,
        worst_zero_one: worst,
        constructed_worst_zero_one: constructed,
        outcome,
        matches_calibration: loss.is_calibrated() == (outcome == CalibrationOutcome::Pass),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::margin_risk;

    #[test]
    fn separable_generator_is_separated() {
        for seed in 0..20 {
            let (d, w) = random_separable(2, 10, 0.1, seed).unwrap();
            assert_eq!(margin_risk(&d, &w).unwrap(), 0.0);
        }
        assert!(random_separable(2, 3, 0.7, 0).is_err());
    }

    #[test]
    fn prop1_witness_has_error_nu() {
        for m in [0.1, 0.01, 0.001, 0.3] {
            let d = prop1_gadget(0.1, m).unwrap();
            let w = prop1_witness(m);
            assert!((zero_one_risk(&d, &w).unwrap() - 0.1).abs() < 1e-15);
            assert!((margin_risk(&d, &w).unwrap() - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn hinge_collapses() {
        let r = prop1_check(
            &LossSpec::HINGE,
            0.1,
            &[0.1, 0.01, 0.001],
            &SolveConfig::default(),
        )
        .unwrap();
        assert!(r.rows.last().unwrap().worst_zero_one >= 0.9 - 1e-3);
        assert!(r.final_gap <= 1e-3);
    }

    #[test]
    fn prop1_rejects_uncalibrated_and_bad_sequences() {
        let cfg = SolveConfig::default();
        assert!(prop1_check(&LossSpec::ONE_SIDED_TEST, 0.1, &[0.1], &cfg).is_err());
        assert!(prop1_check(&LossSpec::HINGE, 0.1, &[0.01, 0.1], &cfg).is_err());
        assert!(prop1_check(&LossSpec::HINGE, 0.1, &[], &cfg).is_err());
    }

    #[test]
    fn one_sided_loss_fails_on_constructed_instance() {
        let r =
            calibration_boundary_check(&LossSpec::ONE_SIDED_TEST, 4, 1, &SolveConfig::default())
                .unwrap();
        assert_eq!(r.outcome, CalibrationOutcome::FailExhibited);
        assert_eq!(r.constructed_worst_zero_one, Some(1.0));
        assert!(r.matches_calibration);
    }

    /// Least squares penalizes confidently correct points, so its minimizer
    /// can misclassify separable data despite the loss being differentiable
    /// with negative slope at zero.
    #[test]
    fn squared_loss_misclassifies_some_separable_instances() {
        let r = calibration_boundary_check(&LossSpec::SQUARED, 200, 1, &SolveConfig::default())
            .unwrap();
        assert_eq!(r.outcome, CalibrationOutcome::FailExhibited);
        assert!(!r.matches_calibration);
    }

    #[test]
    fn hinge_passes() {
        let r =
            calibration_boundary_check(&LossSpec::HINGE, 10, 3, &SolveConfig::default()).unwrap();
        assert_eq!(
            r.outcome,
            CalibrationOutcome::Pass,
            "{:?}",
            r.worst_zero_one
        );
    }
}
