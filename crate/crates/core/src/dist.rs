//! Finite weighted labeled distributions over the unit ball, and the
//! adversarial gadget families used by the lower-bound constructions.

use std::cmp::Ordering;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::numeric::NeumaierSum;

/// Slack allowed on `||x|| <= 1`.
const BALL_TOL: f64 = 1e-12;
/// Slack allowed on `sum p = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }
}

impl TryFrom<i64> for Label {
    type Error = String;

    fn try_from(v: i64) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Label::Pos),
            -1 => Ok(Label::Neg),
            other => Err(format!("label must be +1 or -1, got {other}")),
        }
    }
}

impl From<Label> for i64 {
    fn from(l: Label) -> i64 {
        match l {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledAtom {
    pub x: Vec<f64>,
    pub y: Label,
    pub p: f64,
}

impl LabeledAtom {
    pub fn new(x: Vec<f64>, y: Label, p: f64) -> Self {
        LabeledAtom { x, y, p }
    }
}

/// Unvalidated file form: `{"d": int, "atoms": [{"x": [...], "y": ±1, "p": float}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDistribution {
    pub d: usize,
    pub atoms: Vec<LabeledAtom>,
}

/// A validated distribution: weights sum to one, every atom is in the unit
/// ball, zero-weight atoms are dropped and atoms are in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct Distribution {
    d: usize,
    atoms: Vec<LabeledAtom>,
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = Violation;

    fn try_from(raw: RawDistribution) -> std::result::Result<Self, Violation> {
        Distribution::new(raw.d, raw.atoms)
    }
}

impl From<Distribution> for RawDistribution {
    fn from(d: Distribution) -> Self {
        RawDistribution {
            d: d.d,
            atoms: d.atoms,
        }
    }
}

/// Checks every distribution invariant and names the first one violated.
pub fn validate_distribution(raw: &RawDistribution) -> std::result::Result<(), Violation> {
    if raw.d == 0 {
        return Err(Violation::ZeroDimension);
    }
    let mut sum = NeumaierSum::default();
    let mut positive = 0usize;
    for (index, atom) in raw.atoms.iter().enumerate() {
        if atom.x.len() != raw.d {
            return Err(Violation::DimensionMismatch {
                index,
                found: atom.x.len(),
                expected: raw.d,
            });
        }
        if !atom.p.is_finite() || atom.x.iter().any(|v| !v.is_finite()) {
            return Err(Violation::NonFinite { index });
        }
        if atom.p < 0.0 {
            return Err(Violation::NegativeWeight {
                index,
                weight: atom.p,
            });
        }
        let norm = atom.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1.0 + BALL_TOL {
            return Err(Violation::OutsideUnitBall { index, norm });
        }
        if atom.p > 0.0 {
            positive += 1;
        }
        sum.add(atom.p);
    }
    if positive == 0 {
        return Err(Violation::NoAtoms);
    }
    let total = sum.total();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Violation::WeightSum(total));
    }
    Ok(())
}

fn canonical_order(a: &LabeledAtom, b: &LabeledAtom) -> Ordering {
    a.x[0].total_cmp(&b.x[0]).then(a.y.cmp(&b.y)).then_with(|| {
        a.x[1..]
            .iter()
            .zip(&b.x[1..])
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

impl Distribution {
    pub fn new(d: usize, atoms: Vec<LabeledAtom>) -> std::result::Result<Self, Violation> {
        let raw = RawDistribution { d, atoms };
        validate_distribution(&raw)?;
        let mut atoms: Vec<_> = raw.atoms.into_iter().filter(|a| a.p > 0.0).collect();
        atoms.sort_by(canonical_order);
        Ok(Distribution { d, atoms })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[LabeledAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawDistribution =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Distribution::try_from(raw)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("distribution serializes");
        s.push('\n');
        s
    }

    /// Mixture `t * self + (1 - t) * other`.
    pub fn mix(&self, other: &Distribution, t: f64) -> Result<Distribution> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                predictor: other.d,
                distribution: self.d,
            });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange(format!(
                "mixture weight {t} not in [0, 1]"
            )));
        }
        let scaled = |atoms: &[LabeledAtom], s: f64| {
            atoms
                .iter()
                .map(move |a| LabeledAtom::new(a.x.clone(), a.y, a.p * s))
                .collect::<Vec<_>>()
        };
        let mut atoms = scaled(&self.atoms, t);
        atoms.extend(scaled(&other.atoms, 1.0 - t));
        Ok(Distribution::new(self.d, atoms)?)
    }
}

/// The one-dimensional construction on which every convex loss minimizer can
/// be pushed to error `1 - nu` while a threshold at zero errs only on `nu`.
pub fn prop1_gadget(nu: f64, m: f64) -> Result<Distribution> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::OutOfRange(format!("nu = {nu} must lie in (0, 1)")));
    }
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::OutOfRange(format!("M = {m} must lie in (0, 1)")));
    }
    let half_nu = nu / 2.0;
    let rest = (1.0 - nu) / 2.0;
    let last = 1.0 - half_nu - half_nu - rest;
    let atoms = vec![
        LabeledAtom::new(vec![-1.0], Label::Pos, half_nu),
        LabeledAtom::new(vec![1.0], Label::Neg, half_nu),
        LabeledAtom::new(vec![m], Label::Pos, rest),
        LabeledAtom::new(vec![-m], Label::Neg, last),
    ];
    Ok(Distribution::new(1, atoms)?)
}

/// Three collinear groups in R^2 whose scaled-hinge minimizer is the
/// horizontal line misclassifying all `beta` negatives.
///
/// Requires `nu < beta < nu(1+M)/(2M)`, `beta < 1/2`, `1 - beta - nu > nu`
/// and `nu < M/(1+M)`.
pub fn thm3_gadget(nu: f64, beta: f64, m: f64) -> Result<Distribution> {
    let fail = |msg: String| Err(Error::OutOfRange(msg));
    if !(m > 0.0 && m < 1.0) {
        return fail(format!("M = {m} must lie in (0, 1)"));
    }
    if !(nu > 0.0) {
        return fail(format!("nu = {nu} must be positive"));
    }
    if !(beta > nu) {
        return fail(format!("beta must exceed nu (beta ≤ nu: {beta} ≤ {nu})"));
    }
    let beta_cap = nu * (1.0 + m) / (2.0 * m);
    if !(beta < beta_cap) {
        return fail(format!("beta < nu(1+M)/(2M) violated: {beta} ≥ {beta_cap}"));
    }
    if !(beta < 0.5) {
        return fail(format!("beta < 1/2 violated: beta = {beta}"));
    }
    if !(1.0 - beta - nu > nu) {
        return fail(format!(
            "1 - beta - nu > nu violated: {} ≤ {nu}",
            1.0 - beta - nu
        ));
    }
    let nu_cap = m / (1.0 + m);
    if !(nu < nu_cap) {
        return fail(format!("nu < M/(1+M) violated: {nu} ≥ {nu_cap}"));
    }
    let atoms = vec![
        LabeledAtom::new(vec![-1.0, 0.0], Label::Pos, nu),
        LabeledAtom::new(vec![-m, 0.0], Label::Neg, beta),
        LabeledAtom::new(vec![m, 0.0], Label::Pos, 1.0 - beta - nu),
    ];
    Ok(Distribution::new(2, atoms)?)
}

/// Empirical distribution of `n` i.i.d. draws, uniform weight `1/n` each.
pub fn sample(dist: &Distribution, n: usize, seed: u64) -> Result<Distribution> {
    if n == 0 {
        return Err(Error::OutOfRange("sample size must be at least 1".into()));
    }
    let index = WeightedIndex::new(dist.atoms.iter().map(|a| a.p))
        .map_err(|e| Error::OutOfRange(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = 1.0 / n as f64;
    let atoms = (0..n)
        .map(|_| {
            let a = &dist.atoms[index.sample(&mut rng)];
            LabeledAtom::new(a.x.clone(), a.y, p)
        })
        .collect();
    Ok(Distribution::new(dist.d, atoms)?)
}
