//! Catalog of surrogate losses of the margin score `z = y(<w, x> + w0)`.
//!
//! Every loss is evaluated pointwise. The convex members also expose a
//! subgradient and closed-form Lipschitz / strong-convexity constants on an
//! interval, which the bound formulas consume.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable identifiers, used verbatim by the CLI and in output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossId {
    ZeroOne,
    Margin,
    Hinge,
    GammaHinge,
    SquaredHinge,
    Squared,
    Logistic,
    Exponential,
    OneSidedTest,
}

impl LossId {
    pub const ALL: [LossId; 9] = [
        LossId::ZeroOne,
        LossId::Margin,
        LossId::Hinge,
        LossId::GammaHinge,
        LossId::SquaredHinge,
        LossId::Squared,
        LossId::Logistic,
        LossId::Exponential,
        LossId::OneSidedTest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossId::ZeroOne => "zero_one",
            LossId::Margin => "margin",
            LossId::Hinge => "hinge",
            LossId::GammaHinge => "gamma_hinge",
            LossId::SquaredHinge => "squared_hinge",
            LossId::Squared => "squared",
            LossId::Logistic => "logistic",
            LossId::Exponential => "exponential",
            LossId::OneSidedTest => "one_sided_test",
        }
    }

    pub fn is_convex(self) -> bool {
        !matches!(self, LossId::ZeroOne | LossId::Margin)
    }
}

impl fmt::Display for LossId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownLoss(s.to_string()))
    }
}

/// A validated loss. `gamma` is only carried by `gamma_hinge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LossRepr", into = "LossRepr")]
pub struct LossSpec {
    id: LossId,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
struct LossRepr {
    id: LossId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

impl TryFrom<LossRepr> for LossSpec {
    type Error = Error;

    fn try_from(r: LossRepr) -> Result<Self> {
        LossSpec::new(r.id, r.gamma)
    }
}

impl From<LossSpec> for LossRepr {
    fn from(l: LossSpec) -> Self {
        LossRepr {
            id: l.id,
            gamma: l.gamma(),
        }
    }
}

/// Closed-form slope and curvature bounds of a loss on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossMetadata {
    pub interval: [f64; 2],
    pub lipschitz_l: f64,
    pub strong_convexity_lambda: f64,
}

impl LossSpec {
    pub const ZERO_ONE: LossSpec = LossSpec::fixed(LossId::ZeroOne);
    pub const MARGIN: LossSpec = LossSpec::fixed(LossId::Margin);
    pub const HINGE: LossSpec = LossSpec::fixed(LossId::Hinge);
    pub const SQUARED_HINGE: LossSpec = LossSpec::fixed(LossId::SquaredHinge);
    pub const SQUARED: LossSpec = LossSpec::fixed(LossId::Squared);
    pub const LOGISTIC: LossSpec = LossSpec::fixed(LossId::Logistic);
    pub const EXPONENTIAL: LossSpec = LossSpec::fixed(LossId::Exponential);
    pub const ONE_SIDED_TEST: LossSpec = LossSpec::fixed(LossId::OneSidedTest);

    const fn fixed(id: LossId) -> Self {
        LossSpec { id, gamma: 1.0 }
    }

    /// Builds a loss from its id. `gamma` is required for `gamma_hinge` and
    /// ignored otherwise.
    pub fn new(id: LossId, gamma: Option<f64>) -> Result<Self> {
        match id {
            LossId::GammaHinge => match gamma {
                Some(g) => LossSpec::gamma_hinge(g),
                None => Err(Error::Parse(
                    "gamma_hinge requires a gamma parameter (`gamma_hinge:<gamma>`)".into(),
                )),
            },
            _ => Ok(LossSpec::fixed(id)),
        }
    }

    /// `max(0, 1 - z / gamma)`.
    pub fn gamma_hinge(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 {
            Ok(LossSpec {
                id: LossId::GammaHinge,
                gamma,
            })
        } else {
            Err(Error::InvalidGamma(gamma))
        }
    }

    /// Parses `id` or `gamma_hinge:<gamma>`. A bare `gamma_hinge` takes
    /// `default_gamma` when one is supplied.
    pub fn parse(s: &str, default_gamma: Option<f64>) -> Result<Self> {
        let s = s.trim();
        match s.split_once(':') {
            Some((id, g)) => {
                let id: LossId = id.parse()?;
                if id != LossId::GammaHinge {
                    return Err(Error::Parse(format!("loss `{id}` takes no parameter")));
                }
                let g: f64 = g
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid gamma `{g}`")))?;
                LossSpec::gamma_hinge(g)
            }
            None => LossSpec::new(s.parse()?, default_gamma),
        }
    }

    pub fn id(&self) -> LossId {
        self.id
    }

    pub fn gamma(&self) -> Option<f64> {
        (self.id == LossId::GammaHinge).then_some(self.gamma)
    }

    pub fn is_convex(&self) -> bool {
        self.id.is_convex()
    }

    /// Differentiable at zero with a negative derivative there.
    pub fn is_calibrated(&self) -> bool {
        self.is_convex() && self.id != LossId::OneSidedTest
    }

    pub(crate) fn require_convex(&self, op: &'static str) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(Error::NonConvexLoss {
                op,
                loss: self.id.as_str(),
            })
        }
    }

    /// Pointwise loss value.
    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match self.id {
            LossId::ZeroOne => indicator(z <= 0.0),
            LossId::Margin => indicator(z < 1.0),
            LossId::Hinge => (1.0 - z).max(0.0),
            LossId::GammaHinge => (1.0 - z / self.gamma).max(0.0),
            LossId::SquaredHinge => {
                let h = (1.0 - z).max(0.0);
                h * h
            }
            LossId::Squared => (1.0 - z) * (1.0 - z),
            LossId::Logistic => softplus(-z),
            LossId::Exponential => (-z).exp(),
            LossId::OneSidedTest => (-z).max(0.0),
        }
    }

    /// A subgradient at `z`. At kinks the flatter one-sided derivative is
    /// returned.
    pub fn subgradient(&self, z: f64) -> Result<f64> {
        self.require_convex("subgradient")?;
        Ok(self.slope(z))
    }

    /// Subgradient without the convexity check; zero for the indicator losses.
    #[inline]
    pub(crate) fn slope(&self, z: f64) -> f64 {
        match self.id {
            LossId::ZeroOne | LossId::Margin => 0.0,
            LossId::Hinge => {
                if z < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            LossId::GammaHinge => {
                if z < self.gamma {
                    -1.0 / self.gamma
                } else {
                    0.0
                }
            }
            LossId::SquaredHinge => -2.0 * (1.0 - z).max(0.0),
            LossId::Squared => -2.0 * (1.0 - z),
            LossId::Logistic => -sigmoid(-z),
            LossId::Exponential => -(-z).exp(),
            LossId::OneSidedTest => {
                if z < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Analytic Lipschitz constant and strong-convexity modulus on `[lo, hi]`.
    pub fn metadata(&self, lo: f64, hi: f64) -> Result<LossMetadata> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval { lo, hi });
        }
        let (l, lambda) = match self.id {
            LossId::ZeroOne | LossId::Margin => {
                return Err(Error::UnsupportedLoss {
                    op: "loss_metadata",
                    loss: self.id.as_str(),
                })
            }
            LossId::Hinge => (if lo < 1.0 { 1.0 } else { 0.0 }, 0.0),
            LossId::GammaHinge => (
                if lo < self.gamma {
                    1.0 / self.gamma
                } else {
                    0.0
                },
                0.0,
            ),
            LossId::OneSidedTest => (if lo < 0.0 { 1.0 } else { 0.0 }, 0.0),
            LossId::SquaredHinge => (2.0 * (1.0 - lo).max(0.0), if hi <= 1.0 { 2.0 } else { 0.0 }),
            LossId::Squared => (2.0 * (1.0 - lo).abs().max((1.0 - hi).abs()), 2.0),
            // |phi'| = sigmoid(-z) decreases in z; phi'' = s(1-s) peaks at 0.
            LossId::Logistic => {
                let curv = |z: f64| sigmoid(z) * sigmoid(-z);
                (sigmoid(-lo), curv(lo).min(curv(hi)))
            }
            LossId::Exponential => ((-lo).exp(), (-hi).exp()),
        };
        Ok(LossMetadata {
            interval: [lo, hi],
            lipschitz_l: l,
            strong_convexity_lambda: lambda,
        })
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gamma() {
            Some(g) => write!(f, "gamma_hinge:{g}"),
            None => f.write_str(self.id.as_str()),
        }
    }
}

/// Free-function form of [`LossSpec::eval`].
pub fn eval_loss(loss: &LossSpec, z: f64) -> f64 {
    loss.eval(z)
}

/// Free-function form of [`LossSpec::metadata`].
pub fn loss_metadata(loss: &LossSpec, lo: f64, hi: f64) -> Result<LossMetadata> {
    loss.metadata(lo, hi)
}

#[inline]
fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `ln(1 + e^t)` without overflow.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}
