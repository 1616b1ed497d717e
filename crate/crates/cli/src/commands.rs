use std::path::PathBuf;

use eg_core::lab::{
    empirical_eg, estimation_experiment, gadget_margin, prop1_witness, sandwich_check,
    thm3_witness, EgConfig,
};
use eg_core::table::{eg_rows, write_bounds_csv, write_curve_csv, write_eg_csv, BoundCsvRow};
use eg_core::{
    bound_row, prop1_gadget, risk_report, solve, thm3_gadget, Distribution, LinearPredictor,
    LossSpec, MinimizationResult, RecipeGrid, RiskReport,
};
use serde::Serialize;
use serde_json::json;

use crate::output::{emit, resolve, sibling, to_json, write_file, Run};
use crate::settings::{Format, Settings};
use crate::CliError;

fn out_path(s: &Settings) -> Result<Option<PathBuf>, CliError> {
    Ok(s.out()?.map(|p| resolve(&p)))
}

fn single_loss(
    s: &Settings,
    default: &str,
    default_gamma: Option<f64>,
) -> Result<LossSpec, CliError> {
    let text = s.text("loss")?.unwrap_or_else(|| default.to_string());
    Ok(LossSpec::parse(&text, default_gamma)?)
}

pub fn bounds(s: &Settings) -> Result<(), CliError> {
    let run = Run::start("bounds");
    let losses = s
        .list("loss")?
        .ok_or_else(|| CliError::Validation("missing required --loss".into()))?;
    let nus = s
        .nums("nu")?
        .ok_or_else(|| CliError::Validation("missing required --nu".into()))?;
    let bs = s
        .nums("B")?
        .ok_or_else(|| CliError::Validation("missing required --B".into()))?;
    if losses.is_empty() || nus.is_empty() || bs.is_empty() {
        return Err(CliError::Validation(
            "--loss, --nu and --B need at least one entry".into(),
        ));
    }
    if let Some(nu) = nus.iter().find(|v| !(**v >= 0.0)) {
        return Err(CliError::Validation(format!(
            "nu = {nu} must be non-negative"
        )));
    }
    if let Some(b) = bs.iter().find(|v| !(**v > 1.0)) {
        return Err(CliError::Validation(format!("B = {b} must exceed 1")));
    }
    let defaults = RecipeGrid::default();
    let grid = RecipeGrid {
        beta_points: s.count("grid-beta")?.unwrap_or(defaults.beta_points),
        alpha_points: s.count("grid-alpha")?.unwrap_or(defaults.alpha_points),
        ..defaults
    };
    let format = s.format(Format::Csv)?;
    let out = out_path(s)?;

    let mut rows = Vec::with_capacity(losses.len() * nus.len() * bs.len());
    for name in &losses {
        for &nu in &nus {
            for &b in &bs {
                let loss = LossSpec::parse(name, Some(1.0 / b))?;
                rows.push(bound_row(&loss, nu, b, &grid)?);
            }
        }
    }
    let contents = match format {
        Format::Csv => write_bounds_csv(&rows.iter().map(BoundCsvRow::from).collect::<Vec<_>>()),
        Format::Json => to_json(&rows),
    };
    let config = json!({
        "loss": losses,
        "nu": nus,
        "B": bs,
        "grid": grid,
        "format": format,
        "out": out,
    });
    emit(out.as_deref(), &contents, &run.manifest(config, 0))
}

#[derive(Serialize)]
struct Evaluated {
    predictor: LinearPredictor,
    risk: RiskReport,
}

#[derive(Serialize)]
struct GadgetOutput {
    kind: String,
    loss: LossSpec,
    nu: f64,
    beta: Option<f64>,
    #[serde(rename = "M")]
    m: f64,
    distribution: Distribution,
    result: MinimizationResult,
    witness: Evaluated,
    minimizer: Evaluated,
    worst_candidate: Evaluated,
}

pub fn gadget(s: &Settings) -> Result<(), CliError> {
    let run = Run::start("gadget");
    let kind = s.text("kind")?.ok_or_else(|| {
        CliError::Validation("missing gadget kind: expected prop1 or thm3".into())
    })?;
    let nu = s.require_num("nu")?;
    let m = match (s.num("M")?, s.num("B")?) {
        (Some(m), _) => m,
        (None, Some(b)) if b > 0.0 => {
            if kind == "thm3" {
                gadget_margin(b)
            } else {
                1.0 / b
            }
        }
        (None, Some(b)) => return Err(CliError::Validation(format!("B = {b} must be positive"))),
        (None, None) => return Err(CliError::Validation("missing required --M (or --B)".into())),
    };
    let (dist, beta, wit, default_loss) = match kind.as_str() {
        "prop1" => (prop1_gadget(nu, m)?, None, prop1_witness(m), "hinge"),
        "thm3" => {
            let beta = s.require_num("beta")?;
            (
                thm3_gadget(nu, beta, m)?,
                Some(beta),
                thm3_witness(m),
                "gamma_hinge",
            )
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown gadget kind `{other}`: expected prop1 or thm3"
            )))
        }
    };
    let loss = single_loss(s, default_loss, Some(m))?;
    if !loss.is_convex() {
        return Err(CliError::Validation(format!(
            "loss `{}` is not convex",
            loss.id()
        )));
    }
    let format = s.format(Format::Json)?;
    if format != Format::Json {
        return Err(CliError::Validation("gadget output is JSON only".into()));
    }
    let seed = s.seed()?;
    let cfg = s.solver(seed)?;
    let out = out_path(s)?;

    let result = solve(&dist, &loss, &cfg)?;
    let eval = |p: &LinearPredictor| -> Result<Evaluated, CliError> {
        Ok(Evaluated {
            predictor: p.clone(),
            risk: risk_report(&dist, p, &loss)?,
        })
    };
    let doc = GadgetOutput {
        kind: kind.clone(),
        loss,
        nu,
        beta,
        m,
        witness: eval(&wit)?,
        minimizer: eval(&result.best)?,
        worst_candidate: eval(&result.worst_candidate().predictor)?,
        distribution: dist.clone(),
        result,
    };
    if let Some(path) = &out {
        write_file(&sibling(path, "distribution.json"), &dist.to_json())?;
    }
    let config = json!({
        "kind": kind,
        "loss": loss,
        "nu": nu,
        "beta": beta,
        "M": m,
        "solver": cfg,
        "out": out,
    });
    emit(out.as_deref(), &to_json(&doc), &run.manifest(config, seed))
}

pub fn eg_sweep(s: &Settings) -> Result<(), CliError> {
    let run = Run::start("eg-sweep");
    let nu = s.require_num("nu")?;
    let b = s.require_num("B")?;
    if !(b > 0.0) {
        return Err(CliError::Validation(format!("B = {b} must be positive")));
    }
    let loss = single_loss(s, "hinge", Some(1.0 / b))?;
    let seed = s.seed()?;
    let cfg = EgConfig {
        beta_grid_points: s
            .count("grid-beta")?
            .unwrap_or(EgConfig::default().beta_grid_points),
        solve: s.solver(seed)?,
    };
    let assert_sandwich = s.assert_sandwich()?;
    let tol = s.num("tol")?.unwrap_or(cfg.solve.eps_optimal);
    if !(tol >= 0.0) {
        return Err(CliError::Validation(format!(
            "tol = {tol} must be non-negative"
        )));
    }
    let format = s.format(Format::Json)?;
    let out = out_path(s)?;

    let est = empirical_eg(&loss, nu, b, &cfg)?;
    let sandwich = if assert_sandwich {
        Some(sandwich_check(&est, tol)?)
    } else {
        None
    };
    let contents = match format {
        Format::Csv => write_eg_csv(&eg_rows(&est)),
        Format::Json => est.to_json(),
    };
    let config = json!({
        "loss": loss,
        "nu": nu,
        "B": b,
        "eg": cfg,
        "assert_sandwich": assert_sandwich,
        "tol": tol,
        "format": format,
        "out": out,
    });
    emit(out.as_deref(), &contents, &run.manifest(config, seed))?;
    match sandwich {
        Some(c) if !c.holds => Err(CliError::Assertion(format!(
            "sandwich violated: lower {} <= estimate {} <= upper {} fails",
            c.lower, c.estimate, c.upper
        ))),
        _ => Ok(()),
    }
}

pub fn estimate(s: &Settings) -> Result<(), CliError> {
    let run = Run::start("estimate");
    let loss = single_loss(s, "hinge", None)?;
    let source = s
        .path("source")?
        .ok_or_else(|| CliError::Validation("missing required --source".into()))?;
    let text = std::fs::read_to_string(&source)
        .map_err(|e| CliError::Io(format!("cannot read source {}: {e}", source.display())))?;
    let dist = Distribution::from_json(&text).map_err(|e| {
        CliError::Validation(format!("malformed source file {}: {e}", source.display()))
    })?;
    let n_grid = s.counts("n")?.unwrap_or_else(|| vec![10, 100, 1000]);
    let trials = s.count("trials")?.unwrap_or(20);
    let cap = s
        .num("B")?
        .unwrap_or(eg_core::SolveConfig::default().scale_cap);
    let seed = s.seed()?;
    let format = s.format(Format::Csv)?;
    let out = out_path(s)?;

    let curve = estimation_experiment(&loss, &dist, &n_grid, trials, seed, cap)?;
    let contents = match format {
        Format::Csv => write_curve_csv(&curve),
        Format::Json => to_json(&curve),
    };
    let config = json!({
        "loss": loss,
        "source": source,
        "n": n_grid,
        "trials": trials,
        "B": cap,
        "format": format,
        "out": out,
    });
    emit(out.as_deref(), &contents, &run.manifest(config, seed))
}
