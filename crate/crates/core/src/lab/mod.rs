//! Experiments built on the solver: gadget sweeps estimating EG, the
//! collapse family, the calibration boundary and finite-sample curves.

mod checks;
mod eg;
mod estimation;

pub use checks::{
    calibration_boundary_check, one_sided_instance, prop1_check, prop1_witness, random_separable,
    CalibrationOutcome, CalibrationReport, Prop1Report, Prop1Row,
};
pub use eg::{
    beta_grid, case1_classifier, case2_classifier, empirical_eg, gadget_margin, sandwich_check,
    thm3_witness, witness, BetaRow, EgBounds, EgConfig, EgEstimate, GadgetParams, SandwichCheck,
    FLAG_HIT_SCALE_CAP, FLAG_NOT_CONVERGED,
};
pub use estimation::{estimation_experiment, CurvePoint, LearningCurve};
