//! Closed-form and grid-evaluated bounds on the misclassification error
//! guarantee `EG(phi, nu, B)`.
//!
//! Every lower bound has the shape `min{first, cap}`; [`BoundValue`] records
//! which side of the min is active. Lower bounds are clamped at 0, the
//! trivial bound, when the first expression goes negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{LossId, LossSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "first_of_min")]
    FirstOfMin,
    #[serde(rename = "second_of_min")]
    SecondOfMin,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::FirstOfMin => "first_of_min",
            Branch::SecondOfMin => "second_of_min",
            Branch::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub active_branch: Branch,
    pub valid: bool,
    pub validity_reason: String,
}

impl BoundValue {
    fn plain(value: f64) -> Self {
        BoundValue {
            value,
            active_branch: Branch::NotApplicable,
            valid: true,
            validity_reason: String::new(),
        }
    }

    /// `max(0, min(first, cap))` with the active side recorded.
    fn min_of(first: f64, cap: f64) -> Self {
        let (value, active_branch) = if first <= cap {
            (first, Branch::FirstOfMin)
        } else {
            (cap, Branch::SecondOfMin)
        };
        let mut b = BoundValue {
            value,
            active_branch,
            valid: true,
            validity_reason: String::new(),
        };
        if b.value < 0.0 {
            b.validity_reason = format!("first branch {value} is negative; clamped to 0");
        }
        if b.value <= 0.0 {
            b.value = 0.0;
        }
        b
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if (0.0..=1.0).contains(&nu) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "nu must lie in [0, 1], got {nu}"
        )))
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "B must be positive and finite, got {b}"
        )))
    }
}

/// `(B + 1) nu`.
pub fn hinge_eg_upper(nu: f64, b: f64) -> Result<BoundValue> {
    check_nu(nu)?;
    check_b(b)?;
    Ok(BoundValue::plain((b + 1.0) * nu))
}

/// `min{nu(B+1)/2, 1 - 2 nu}`, valid only while `nu(B+1) < 1`. Outside that
/// region the formula value is still reported, flagged invalid.
pub fn gamma_hinge_eg_lower(nu: f64, b: f64) -> Result<BoundValue> {
    check_nu(nu)?;
    check_b(b)?;
    let t = nu * (b + 1.0);
    let mut out = BoundValue::min_of(t / 2.0, 1.0 - 2.0 * nu);
    if t >= 1.0 {
        out.valid = false;
        out.validity_reason = format!("ν(B+1) = {t} ≥ 1");
    }
    Ok(out)
}

/// `min{nu(B+1)/2, 1/2}`, for any convex loss.
pub fn convex_eg_lower(nu: f64, b: f64) -> Result<BoundValue> {
    check_nu(nu)?;
    check_b(b)?;
    Ok(BoundValue::min_of(nu * (b + 1.0) / 2.0, 0.5))
}

/// `min{lambda nu (B-1)^2 / (64 L), 1/16}`.
pub fn strongly_convex_eg_lower(lambda: f64, l: f64, nu: f64, b: f64) -> Result<BoundValue> {
    if !(lambda > 0.0 && lambda.is_finite()) || !(l > 0.0 && l.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "lambda and L must be positive, got lambda = {lambda}, L = {l}"
        )));
    }
    check_nu(nu)?;
    check_b(b)?;
    Ok(BoundValue::min_of(
        lambda * nu * (b - 1.0).powi(2) / (64.0 * l),
        1.0 / 16.0,
    ))
}

/// [`strongly_convex_eg_lower`] with `lambda` and `L` taken from the loss's
/// metadata on `[-1, 1]`.
pub fn strongly_convex_eg_lower_for(loss: &LossSpec, nu: f64, b: f64) -> Result<BoundValue> {
    let meta = loss.metadata(-1.0, 1.0)?;
    strongly_convex_eg_lower(meta.strong_convexity_lambda, meta.lipschitz_l, nu, b)
}

/// Closed-form lower bounds for the hinge, squared hinge, exponential and
/// logistic losses.
pub fn named_loss_eg_lower(loss: LossId, nu: f64, b: f64) -> Result<BoundValue> {
    check_nu(nu)?;
    check_b(b)?;
    match loss {
        LossId::Hinge => convex_eg_lower(nu, b),
        LossId::SquaredHinge => Ok(BoundValue::min_of(nu * (b - 1.0).powi(2) / 128.0, 0.125)),
        LossId::Exponential => Ok(BoundValue::min_of(
            nu * b.exp_m1() / (2.0 * 2f64.exp_m1()),
            0.125,
        )),
        LossId::Logistic => Ok(BoundValue::min_of(
            nu * (((b - 5.0) / 4.0).exp().ln_1p() - 0.32) / 2.0,
            0.125,
        )),
        other => Err(Error::UnsupportedLoss {
            op: "named_loss_eg_lower",
            loss: other.as_str(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRange {
    /// `[0, factor * beta]`.
    Proportional(f64),
    /// `[0, hi]` for every beta.
    Fixed(f64),
}

impl Default for AlphaRange {
    fn default() -> Self {
        AlphaRange::Proportional(4.0)
    }
}

impl AlphaRange {
    fn upper(self, beta: f64) -> f64 {
        match self {
            AlphaRange::Proportional(k) => k * beta,
            AlphaRange::Fixed(hi) => hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecipeGrid {
    pub beta_points: usize,
    pub alpha_points: usize,
    pub alpha_range: AlphaRange,
}

impl Default for RecipeGrid {
    fn default() -> Self {
        RecipeGrid {
            beta_points: 65,
            alpha_points: 65,
            alpha_range: AlphaRange::default(),
        }
    }
}

/// Refinement passes around the incumbent grid point.
const REFINE_PASSES: usize = 2;

fn check_recipe(loss: &LossSpec, nu: f64, b: f64, points: &[usize]) -> Result<()> {
    loss.require_convex("recipe")?;
    check_nu(nu)?;
    check_b(b)?;
    if points.iter().any(|&p| p < 2) {
        return Err(Error::OutOfRange(
            "grid resolutions must be at least 2".into(),
        ));
    }
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

/// Optimizes `f` over `[lo, hi]` on a uniform grid, then re-grids twice
/// around the incumbent. `better(a, b)` says `a` beats `b`; NaN values are
/// skipped. Returns `None` when no grid point produced a value.
fn grid_search(
    lo: f64,
    hi: f64,
    n: usize,
    mut f: impl FnMut(f64) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |x: f64, best: &mut Option<(f64, f64)>| {
        let v = f(x);
        if !v.is_nan() && best.is_none_or(|(_, bv)| better(v, bv)) {
            *best = Some((x, v));
        }
    };
    for x in linspace(lo, hi, n) {
        consider(x, &mut best);
    }
    let mut h = (hi - lo) / (n - 1) as f64;
    for _ in 0..REFINE_PASSES {
        let (x0, _) = best?;
        let (a, c) = ((x0 - h).max(lo), (x0 + h).min(hi));
        for x in linspace(a, c, n) {
            consider(x, &mut best);
        }
        h = (c - a) / (n - 1) as f64;
    }
    best
}

/// The single-beta ratio maximized by [`recipe_eq4`]; `None` when its
/// denominator is not positive.
pub fn eq4_term(loss: &LossSpec, nu: f64, b: f64, beta: f64) -> Option<f64> {
    let den = 2.0 * (loss.eval(-2.0 * beta) - loss.eval(2.0 * beta));
    if !(den > 0.0) {
        return None;
    }
    let num = nu * (loss.eval(-(b - 5.0) * beta / 2.0) - loss.eval(2.0 * beta));
    let r = num / den;
    r.is_finite().then_some(r)
}

/// The inner infimum over alpha of [`recipe_eq3`] at one beta; `None` when
/// the denominator is not positive.
pub fn eq3_inner(loss: &LossSpec, nu: f64, b: f64, beta: f64, grid: &RecipeGrid) -> Option<f64> {
    let den = 2.0 * (loss.eval(-2.0 * beta) - loss.eval(2.0 * beta));
    if !(den > 0.0) {
        return None;
    }
    let base = loss.eval(2.0 * beta);
    let hi = grid.alpha_range.upper(beta).max(0.0);
    let ratio =
        |a: f64| ((1.0 - nu) * loss.eval(a) + nu * loss.eval(-(b - 5.0) * a / 2.0) - base) / den;
    if hi == 0.0 {
        return Some(ratio(0.0));
    }
    grid_search(0.0, hi, grid.alpha_points, ratio, |a, b| a < b).map(|(_, v)| v)
}

fn sup_over_beta(beta_points: usize, cap: f64, term: impl FnMut(f64) -> Option<f64>) -> BoundValue {
    let mut term = term;
    match grid_search(
        0.0,
        1.0,
        beta_points,
        |beta| term(beta).unwrap_or(f64::NAN),
        |a, b| a > b,
    ) {
        Some((_, sup)) => BoundValue::min_of(sup, cap),
        None => BoundValue {
            value: 0.0,
            active_branch: Branch::NotApplicable,
            valid: false,
            validity_reason: "denominator non-positive for every beta on the grid".into(),
        },
    }
}

/// `min{sup_beta nu(phi(-(B-5)beta/2) - phi(2 beta)) / (2(phi(-2 beta) - phi(2 beta))), 1/8}`
/// with beta on a uniform grid over `[0, 1]`.
pub fn recipe_eq4(loss: &LossSpec, nu: f64, b: f64, beta_points: usize) -> Result<BoundValue> {
    check_recipe(loss, nu, b, &[beta_points])?;
    Ok(sup_over_beta(beta_points, 0.125, |beta| {
        eq4_term(loss, nu, b, beta)
    }))
}

/// `min{sup_beta inf_alpha ((1-nu)phi(alpha) + nu phi(-(B-5)alpha/2) - phi(2 beta))
/// / (2(phi(-2 beta) - phi(2 beta))), 1/4}` on uniform grids.
pub fn recipe_eq3(loss: &LossSpec, nu: f64, b: f64, grid: &RecipeGrid) -> Result<BoundValue> {
    check_recipe(loss, nu, b, &[grid.beta_points, grid.alpha_points])?;
    let (AlphaRange::Proportional(k) | AlphaRange::Fixed(k)) = grid.alpha_range;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "alpha range parameter must be non-negative, got {k}"
        )));
    }
    Ok(sup_over_beta(grid.beta_points, 0.25, |beta| {
        eq3_inner(loss, nu, b, beta, grid)
    }))
}

/// Every bound that applies to one `(loss, nu, B)` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub loss: LossSpec,
    pub nu: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Hinge family only.
    pub thm3_lower: Option<BoundValue>,
    pub thm4_lower: BoundValue,
    pub named_lower: Option<BoundValue>,
    /// Losses strongly convex on `[-1, 1]` only.
    pub cor5_lower: Option<BoundValue>,
    pub eq4_recipe: BoundValue,
    pub eq3_recipe: BoundValue,
    /// Hinge family only.
    pub prop2_upper: Option<BoundValue>,
}

pub fn bound_row(loss: &LossSpec, nu: f64, b: f64, grid: &RecipeGrid) -> Result<BoundRow> {
    loss.require_convex("bound_row")?;
    let hinge_family = matches!(loss.id(), LossId::Hinge | LossId::GammaHinge);
    let named = matches!(
        loss.id(),
        LossId::Hinge | LossId::SquaredHinge | LossId::Exponential | LossId::Logistic
    );
    let meta = loss.metadata(-1.0, 1.0)?;
    Ok(BoundRow {
        loss: *loss,
        nu,
        b,
        thm3_lower: if hinge_family {
            Some(gamma_hinge_eg_lower(nu, b)?)
        } else {
            None
        },
        thm4_lower: convex_eg_lower(nu, b)?,
        named_lower: if named {
            Some(named_loss_eg_lower(loss.id(), nu, b)?)
        } else {
            None
        },
        cor5_lower: if meta.strong_convexity_lambda > 0.0 {
            Some(strongly_convex_eg_lower(
                meta.strong_convexity_lambda,
                meta.lipschitz_l,
                nu,
                b,
            )?)
        } else {
            None
        },
        eq4_recipe: recipe_eq4(loss, nu, b, grid.beta_points)?,
        eq3_recipe: recipe_eq3(loss, nu, b, grid)?,
        prop2_upper: if hinge_family {
            Some(hinge_eg_upper(nu, b)?)
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hinge_upper_values() {
        assert!(close(hinge_eg_upper(0.05, 9.0).unwrap().value, 0.5, 1e-15));
        assert_eq!(hinge_eg_upper(0.0, 3.0).unwrap().value, 0.0);
        assert!(close(hinge_eg_upper(0.1, 3.0).unwrap().value, 0.4, 1e-15));
        assert!(hinge_eg_upper(-0.1, 3.0).is_err());
        assert_eq!(
            hinge_eg_upper(0.1, 3.0).unwrap().active_branch,
            Branch::NotApplicable
        );
    }

    #[test]
    fn gamma_hinge_lower_values() {
        let a = gamma_hinge_eg_lower(0.05, 9.0).unwrap();
        assert!(close(a.value, 0.25, 1e-15) && a.valid);
        assert_eq!(a.active_branch, Branch::FirstOfMin);
        let b = gamma_hinge_eg_lower(0.4, 1.2).unwrap();
        assert!(close(b.value, 0.2, 1e-15));
        assert_eq!(b.active_branch, Branch::SecondOfMin);
        let c = gamma_hinge_eg_lower(0.2, 4.0).unwrap();
        assert!(!c.valid);
        assert_eq!(c.validity_reason, "ν(B+1) = 1 ≥ 1");
    }

    #[test]
    fn convex_lower_values() {
        assert!(close(
            convex_eg_lower(0.05, 9.0).unwrap().value,
            0.25,
            1e-15
        ));
        let b = convex_eg_lower(0.5, 9.0).unwrap();
        assert_eq!((b.value, b.active_branch), (0.5, Branch::SecondOfMin));
        assert_eq!(convex_eg_lower(0.0, 7.0).unwrap().value, 0.0);
    }

    #[test]
    fn strongly_convex_values() {
        let a = strongly_convex_eg_lower(2.0, 4.0, 0.05, 9.0).unwrap();
        assert!(close(a.value, 0.025, 1e-15));
        assert_eq!(a.active_branch, Branch::FirstOfMin);
        assert_eq!(
            strongly_convex_eg_lower(3.0, 1.0, 0.0, 9.0).unwrap().value,
            0.0
        );
        let c = strongly_convex_eg_lower(2.0, 4.0, 0.5, 9.0).unwrap();
        assert_eq!((c.value, c.active_branch), (0.0625, Branch::SecondOfMin));
        assert!(strongly_convex_eg_lower(0.0, 4.0, 0.05, 9.0).is_err());
        assert!(strongly_convex_eg_lower(2.0, -1.0, 0.05, 9.0).is_err());
    }

    #[test]
    fn strongly_convex_via_metadata() {
        let a = strongly_convex_eg_lower_for(&LossSpec::SQUARED_HINGE, 0.05, 9.0).unwrap();
        assert!(close(a.value, 0.025, 1e-15));
        assert!(strongly_convex_eg_lower_for(&LossSpec::HINGE, 0.05, 9.0).is_err());
    }

    #[test]
    fn named_values() {
        let sh = named_loss_eg_lower(LossId::SquaredHinge, 0.05, 9.0).unwrap();
        assert!(close(sh.value, 0.025, 1e-15));
        let ex = named_loss_eg_lower(LossId::Exponential, 0.05, 9.0).unwrap();
        assert_eq!((ex.value, ex.active_branch), (0.125, Branch::SecondOfMin));
        let lg = named_loss_eg_lower(LossId::Logistic, 0.05, 9.0).unwrap();
        let direct = 0.05 * ((1.0 + 1f64.exp()).ln() - 0.32) / 2.0;
        assert!(close(lg.value, direct, 1e-15));
        assert!(close(lg.value, 0.02483, 1e-5));
        assert!(matches!(
            named_loss_eg_lower(LossId::Squared, 0.05, 9.0),
            Err(Error::UnsupportedLoss { .. })
        ));
    }

    #[test]
    fn hinge_named_is_theorem_four() {
        for &(nu, b) in &[(0.05, 9.0), (0.3, 2.0), (0.0, 5.0), (0.01, 100.0)] {
            assert_eq!(
                named_loss_eg_lower(LossId::Hinge, nu, b).unwrap(),
                convex_eg_lower(nu, b).unwrap()
            );
        }
    }

    #[test]
    fn logistic_clamps_at_zero() {
        let b = named_loss_eg_lower(LossId::Logistic, 0.1, 1.01).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(!b.validity_reason.is_empty());
    }

    #[test]
    fn eq4_at_nine_is_half_nu() {
        // phi(-(B-5)beta/2) = phi(-2 beta) when B = 9.
        for loss in [LossSpec::SQUARED_HINGE, LossSpec::LOGISTIC, LossSpec::HINGE] {
            let v = recipe_eq4(&loss, 0.05, 9.0, 65).unwrap();
            assert!(close(v.value, 0.025, 1e-15), "{loss}: {}", v.value);
        }
    }

    #[test]
    fn eq4_term_at_half_matches_closed_forms() {
        let t = eq4_term(&LossSpec::SQUARED_HINGE, 0.05, 13.0, 0.5).unwrap();
        assert!(close(t, 0.05 * 144.0 / 128.0, 1e-15));
        // with the exact constant log(1 + 1/e) in place of its rounding
        let b: f64 = 13.0;
        let t = eq4_term(&LossSpec::LOGISTIC, 0.05, b, 0.5).unwrap();
        let exact = 0.05 * (((b - 5.0) / 4.0).exp().ln_1p() - (-1f64).exp().ln_1p()) / 2.0;
        assert!(close(t, exact, 1e-14));
        assert!(eq4_term(&LossSpec::HINGE, 0.05, b, 0.0).is_none());
    }

    #[test]
    fn eq3_examples() {
        let g = RecipeGrid::default();
        let sh = recipe_eq3(&LossSpec::SQUARED_HINGE, 0.05, 9.0, &g).unwrap();
        assert!(sh.value >= 0.025 - 1e-3, "{}", sh.value);
        for loss in [LossSpec::HINGE, LossSpec::LOGISTIC, LossSpec::EXPONENTIAL] {
            for nu in [0.0, 0.05, 0.4] {
                let v = recipe_eq3(&loss, nu, 9.0, &g).unwrap();
                assert!(v.value <= 0.25);
            }
        }
    }

    #[test]
    fn eq3_refinement_is_stable() {
        let coarse = RecipeGrid {
            beta_points: 33,
            alpha_points: 33,
            ..RecipeGrid::default()
        };
        let fine = RecipeGrid {
            beta_points: 65,
            alpha_points: 65,
            ..RecipeGrid::default()
        };
        let a = recipe_eq3(&LossSpec::HINGE, 0.05, 9.0, &coarse)
            .unwrap()
            .value;
        let b = recipe_eq3(&LossSpec::HINGE, 0.05, 9.0, &fine)
            .unwrap()
            .value;
        // Lipschitz slack of one coarse cell on the inner ratio
        assert!(b >= a - 2.0 / 32.0, "{a} {b}");
    }

    #[test]
    fn recipe_rejections() {
        assert!(recipe_eq4(&LossSpec::ZERO_ONE, 0.05, 9.0, 9).is_err());
        assert!(recipe_eq4(&LossSpec::HINGE, 0.05, 9.0, 1).is_err());
        let g = RecipeGrid {
            alpha_points: 1,
            ..RecipeGrid::default()
        };
        assert!(recipe_eq3(&LossSpec::HINGE, 0.05, 9.0, &g).is_err());
    }

    #[test]
    fn fixed_alpha_range_is_configurable() {
        let g = RecipeGrid {
            alpha_range: AlphaRange::Fixed(4.0 / 8f64.sqrt()),
            ..RecipeGrid::default()
        };
        let v = recipe_eq3(&LossSpec::SQUARED_HINGE, 0.05, 9.0, &g).unwrap();
        assert!(v.value.is_finite() && v.value <= 0.25);
    }

    #[test]
    fn zero_nu_row_is_all_zero() {
        for loss in [
            LossSpec::HINGE,
            LossSpec::SQUARED_HINGE,
            LossSpec::EXPONENTIAL,
            LossSpec::LOGISTIC,
        ] {
            let r = bound_row(&loss, 0.0, 9.0, &RecipeGrid::default()).unwrap();
            let lowers = [
                Some(&r.thm4_lower),
                r.thm3_lower.as_ref(),
                r.named_lower.as_ref(),
                r.cor5_lower.as_ref(),
                Some(&r.eq4_recipe),
                Some(&r.eq3_recipe),
            ];
            for v in lowers.into_iter().flatten() {
                assert_eq!(v.value.to_bits(), 0f64.to_bits(), "{loss}: {v:?}");
            }
        }
    }

    #[test]
    fn row_applicability() {
        let g = RecipeGrid::default();
        let h = bound_row(&LossSpec::HINGE, 0.05, 9.0, &g).unwrap();
        assert!(h.thm3_lower.is_some() && h.prop2_upper.is_some() && h.cor5_lower.is_none());
        let s = bound_row(&LossSpec::SQUARED, 0.05, 9.0, &g).unwrap();
        assert!(s.named_lower.is_none() && s.cor5_lower.is_some() && s.thm3_lower.is_none());
        assert!(bound_row(&LossSpec::MARGIN, 0.05, 9.0, &g).is_err());
    }

    #[test]
    fn bound_value_json() {
        let v = gamma_hinge_eg_lower(0.05, 9.0).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"value":0.25,"active_branch":"first_of_min","valid":true,"validity_reason":""}"#
        );
        let n: BoundValue = serde_json::from_str(&s).unwrap();
        assert_eq!(n, v);
        let na = serde_json::to_string(&hinge_eg_upper(0.1, 2.0).unwrap()).unwrap();
        assert!(na.contains(r#""active_branch":"n/a""#));
    }

    proptest! {
        #[test]
        fn sandwich_factor_two(frac in 1e-3f64..0.999, b in 1.01f64..50.0) {
            let nu = frac / (b + 1.0);
            let lo = gamma_hinge_eg_lower(nu, b).unwrap();
            let hi = hinge_eg_upper(nu, b).unwrap();
            prop_assert!(lo.valid);
            prop_assert!(lo.value <= hi.value);
            if lo.active_branch == Branch::FirstOfMin {
                prop_assert!((hi.value / lo.value - 2.0).abs() < 1e-12);
            }
        }

        #[test]
        fn caps_respected(nu in 0.0f64..1.0, b in 1.01f64..60.0) {
            prop_assert!(convex_eg_lower(nu, b).unwrap().value <= 0.5);
            prop_assert!(strongly_convex_eg_lower(2.0, 4.0, nu, b).unwrap().value <= 1.0 / 16.0);
            for id in [LossId::SquaredHinge, LossId::Exponential, LossId::Logistic] {
                let v = named_loss_eg_lower(id, nu, b).unwrap().value;
                prop_assert!((0.0..=0.125).contains(&v));
            }
            prop_assert!(recipe_eq4(&LossSpec::LOGISTIC, nu, b, 17).unwrap().value <= 0.125);
        }

        #[test]
        fn monotone_in_nu_and_b(nu in 0.0f64..0.2, dnu in 0.0f64..0.05, b in 1.01f64..30.0, db in 0.0f64..10.0) {
            let pairs = [(nu, b), (nu + dnu, b), (nu, b + db)];
            let fs: [fn(f64, f64) -> BoundValue; 6] = [
                |n, b| hinge_eg_upper(n, b).unwrap(),
                |n, b| convex_eg_lower(n, b).unwrap(),
                |n, b| strongly_convex_eg_lower(2.0, 4.0, n, b).unwrap(),
                |n, b| named_loss_eg_lower(LossId::SquaredHinge, n, b).unwrap(),
                |n, b| named_loss_eg_lower(LossId::Exponential, n, b).unwrap(),
                |n, b| named_loss_eg_lower(LossId::Logistic, n, b).unwrap(),
            ];
            for f in fs {
                let base = f(pairs[0].0, pairs[0].1);
                for &(n, bb) in &pairs[1..] {
                    let moved = f(n, bb);
                    prop_assert!(moved.value >= base.value - 1e-15);
                }
            }
            // first branch of the gamma-hinge bound
            let a = gamma_hinge_eg_lower(nu, b).unwrap();
            let c = gamma_hinge_eg_lower(nu, b + db).unwrap();
            if a.active_branch == Branch::FirstOfMin && c.active_branch == Branch::FirstOfMin {
                prop_assert!(c.value >= a.value);
            }
        }
    }
}
