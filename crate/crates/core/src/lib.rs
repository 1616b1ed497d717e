//! Losses, finite labeled distributions, risk evaluation, empirical risk
//! minimization and bounds on the gap between surrogate and 0-1 optimality.

pub mod bounds;
pub mod dist;
pub mod error;
pub mod lab;
pub mod loss;
pub mod numeric;
pub mod risk;
pub mod solver;
pub mod table;

pub use bounds::{
    bound_row, convex_eg_lower, gamma_hinge_eg_lower, hinge_eg_upper, named_loss_eg_lower,
    recipe_eq3, recipe_eq4, strongly_convex_eg_lower, strongly_convex_eg_lower_for, AlphaRange,
    BoundRow, BoundValue, Branch, RecipeGrid,
};
pub use dist::{
    prop1_gadget, sample, thm3_gadget, validate_distribution, Distribution, Label, LabeledAtom,
    RawDistribution,
};
pub use error::{Error, Result, Violation};
pub use loss::{eval_loss, loss_metadata, LossId, LossMetadata, LossSpec};
pub use risk::{margin_risk, phi_risk, risk_report, zero_one_risk, LinearPredictor, RiskReport};
pub use solver::{
    brute_force, enumerate_eps_optimal, solve, Candidate, GridSpec, MinimizationResult, SolveConfig,
};
