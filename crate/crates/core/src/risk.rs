//! Exact risk evaluation of linear predictors on finite distributions.
//!
//! Threshold comparisons are exact: a score of exactly `0` is a 0-1 error and
//! a score of exactly `1` is not a margin error.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::numeric::{dot, norm, NeumaierSum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPredictor {
    pub w: Vec<f64>,
    pub w0: f64,
}

impl LinearPredictor {
    pub fn new(w: Vec<f64>, w0: f64) -> Self {
        LinearPredictor { w, w0 }
    }

    pub fn zero(d: usize) -> Self {
        LinearPredictor::new(vec![0.0; d], 0.0)
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    #[inline]
    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.w0
    }

    /// Euclidean norm of `w` (the bias is not included).
    pub fn weight_norm(&self) -> f64 {
        norm(&self.w)
    }

    pub fn scaled(&self, c: f64) -> Self {
        LinearPredictor::new(self.w.iter().map(|v| v * c).collect(), self.w0 * c)
    }

    fn check_dim(&self, dist: &Distribution) -> Result<()> {
        if self.dim() == dist.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                predictor: self.dim(),
                distribution: dist.dim(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub phi_risk: f64,
    pub zero_one_risk: f64,
    pub margin_risk: f64,
}

fn expected(dist: &Distribution, pred: &LinearPredictor, f: impl Fn(f64) -> f64) -> Result<f64> {
    pred.check_dim(dist)?;
    let sum: NeumaierSum = dist
        .atoms()
        .iter()
        .map(|a| a.p * f(a.y.sign() * pred.score(&a.x)))
        .collect();
    Ok(sum.total())
}

/// `E[phi(y(<w, x> + w0))]`.
pub fn phi_risk(dist: &Distribution, pred: &LinearPredictor, loss: &LossSpec) -> Result<f64> {
    expected(dist, pred, |z| loss.eval(z))
}

/// Mass of atoms with `y(<w, x> + w0) <= 0`.
pub fn zero_one_risk(dist: &Distribution, pred: &LinearPredictor) -> Result<f64> {
    expected(dist, pred, |z| LossSpec::ZERO_ONE.eval(z))
}

/// Mass of atoms with `y(<w, x> + w0) < 1`.
pub fn margin_risk(dist: &Distribution, pred: &LinearPredictor) -> Result<f64> {
    expected(dist, pred, |z| LossSpec::MARGIN.eval(z))
}

pub fn risk_report(
    dist: &Distribution,
    pred: &LinearPredictor,
    loss: &LossSpec,
) -> Result<RiskReport> {
    Ok(RiskReport {
        phi_risk: phi_risk(dist, pred, loss)?,
        zero_one_risk: zero_one_risk(dist, pred)?,
        margin_risk: margin_risk(dist, pred)?,
    })
}

/// Largest `|<w, x> + w0|` over the atoms.
pub fn max_abs_score(dist: &Distribution, pred: &LinearPredictor) -> Result<f64> {
    pred.check_dim(dist)?;
    Ok(dist
        .atoms()
        .iter()
        .map(|a| pred.score(&a.x).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{thm3_gadget, Label, LabeledAtom};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const M: f64 = 1.0 / 9.0;

    fn gadget() -> Distribution {
        thm3_gadget(0.05, 0.2, M).unwrap()
    }

    #[test]
    fn horizontal_line_on_thm3_gadget() {
        let d = gadget();
        let p = LinearPredictor::new(vec![0.0, -1.0], M);
        let g = LossSpec::gamma_hinge(M).unwrap();
        assert!((phi_risk(&d, &p, &g).unwrap() - 0.4).abs() < 1e-12);
        assert!((zero_one_risk(&d, &p).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(margin_risk(&d, &p).unwrap(), 1.0);
    }

    #[test]
    fn witness_on_thm3_gadget() {
        let d = gadget();
        let p = LinearPredictor::new(vec![9.0, 0.0], 0.0);
        assert!((zero_one_risk(&d, &p).unwrap() - 0.05).abs() < 1e-15);
        assert!((margin_risk(&d, &p).unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn zero_predictor() {
        let d = gadget();
        let z = LinearPredictor::zero(2);
        assert!((zero_one_risk(&d, &z).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi_risk(&d, &z, &LossSpec::HINGE).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let d = gadget();
        let p = LinearPredictor::zero(1);
        assert!(matches!(
            phi_risk(&d, &p, &LossSpec::HINGE),
            Err(Error::DimensionMismatch {
                predictor: 1,
                distribution: 2
            })
        ));
        assert!(zero_one_risk(&d, &p).is_err());
        assert!(margin_risk(&d, &p).is_err());
    }

    fn arb_dist() -> impl Strategy<Value = Distribution> {
        proptest::collection::vec(
            (-0.7f64..0.7, -0.7f64..0.7, any::<bool>(), 0.01f64..1.0),
            1..12,
        )
        .prop_map(|xs| {
            let total: f64 = xs.iter().map(|t| t.3).sum();
            let atoms = xs
                .iter()
                .map(|&(a, b, pos, w)| {
                    LabeledAtom::new(
                        vec![a, b],
                        if pos { Label::Pos } else { Label::Neg },
                        w / total,
                    )
                })
                .collect();
            Distribution::new(2, atoms).unwrap()
        })
    }

    fn arb_pred() -> impl Strategy<Value = LinearPredictor> {
        (-5.0f64..5.0, -5.0f64..5.0, -3.0f64..3.0)
            .prop_map(|(a, b, c)| LinearPredictor::new(vec![a, b], c))
    }

    proptest! {
        #[test]
        fn report_invariants(d in arb_dist(), p in arb_pred()) {
            let r = risk_report(&d, &p, &LossSpec::HINGE).unwrap();
            prop_assert!(r.zero_one_risk <= r.margin_risk + 1e-15);
            prop_assert!(r.zero_one_risk <= r.phi_risk + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&r.zero_one_risk));
        }

        #[test]
        fn zero_one_is_positive_scale_invariant(d in arb_dist(), p in arb_pred(), k in -20i32..20) {
            let c = 2f64.powi(k);
            prop_assert_eq!(zero_one_risk(&d, &p).unwrap(), zero_one_risk(&d, &p.scaled(c)).unwrap());
        }

        #[test]
        fn loss_rescaling(d in arb_dist(), p in arb_pred(), m in 0.05f64..5.0) {
            let g = LossSpec::gamma_hinge(m).unwrap();
            let a = phi_risk(&d, &p, &g).unwrap();
            let b = phi_risk(&d, &p.scaled(1.0 / m), &LossSpec::HINGE).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn mixture_linearity(d1 in arb_dist(), d2 in arb_dist(), p in arb_pred()) {
            let mix = d1.mix(&d2, 0.5).unwrap();
            for loss in [LossSpec::HINGE, LossSpec::LOGISTIC, LossSpec::SQUARED] {
                let m = phi_risk(&mix, &p, &loss).unwrap();
                let avg = 0.5 * (phi_risk(&d1, &p, &loss).unwrap() + phi_risk(&d2, &p, &loss).unwrap());
                prop_assert!((m - avg).abs() <= 1e-12 * (1.0 + avg));
            }
        }

        #[test]
        fn split_and_reorder(d in arb_dist(), p in arb_pred(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut atoms = Vec::new();
            for (i, a) in d.atoms().iter().enumerate() {
                if i == 0 {
                    atoms.push(LabeledAtom::new(a.x.clone(), a.y, a.p / 2.0));
                    atoms.push(LabeledAtom::new(a.x.clone(), a.y, a.p / 2.0));
                } else {
                    atoms.push(a.clone());
                }
            }
            atoms.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let d2 = Distribution::new(2, atoms).unwrap();
            let r1 = risk_report(&d, &p, &LossSpec::EXPONENTIAL).unwrap();
            let r2 = risk_report(&d2, &p, &LossSpec::EXPONENTIAL).unwrap();
            prop_assert!((r1.phi_risk - r2.phi_risk).abs() <= 1e-13 * (1.0 + r1.phi_risk));
            prop_assert!((r1.zero_one_risk - r2.zero_one_risk).abs() <= 1e-15);
            prop_assert!((r1.margin_risk - r2.margin_risk).abs() <= 1e-15);
        }

        /// Scaling a separating predictor so the smallest correct score is 1
        /// makes margin errors and 0-1 errors coincide.
        #[test]
        fn margin_equals_zero_one_at_unit_min_score(
            u in -PI..PI, b in -0.3f64..0.3,
            pts in proptest::collection::vec((-0.7f64..0.7, -0.7f64..0.7), 2..15)
        ) {
            let w = vec![u.cos(), u.sin()];
            let raw = LinearPredictor::new(w, b);
            let atoms: Vec<_> = pts.iter().filter_map(|&(x1, x2)| {
                let s = raw.score(&[x1, x2]);
                (s.abs() > 1e-3).then(|| LabeledAtom::new(vec![x1, x2], if s > 0.0 { Label::Pos } else { Label::Neg }, 1.0))
            }).collect();
            prop_assume!(!atoms.is_empty());
            let n = atoms.len() as f64;
            let atoms = atoms.into_iter().map(|a| LabeledAtom::new(a.x, a.y, 1.0 / n)).collect();
            let d = Distribution::new(2, atoms).unwrap();
            let min_score = d.atoms().iter().map(|a| a.y.sign() * raw.score(&a.x)).fold(f64::INFINITY, f64::min);
            let mut c = 1.0 / min_score;
            let min_scaled = |c: f64| {
                let p = raw.scaled(c);
                d.atoms().iter().map(|a| a.y.sign() * p.score(&a.x)).fold(f64::INFINITY, f64::min)
            };
            // step past rounding until the smallest correct score is at least 1
            while min_scaled(c) < 1.0 {
                c = c.next_up();
            }
            let p = raw.scaled(c);
            prop_assert_eq!(margin_risk(&d, &p).unwrap(), zero_one_risk(&d, &p).unwrap());
        }
    }
}
