//! Global φ-risk minimization over linear predictors.
//!
//! [`solve`] runs restarted subgradient descent and polishes each restart
//! with a cutting-plane method that certifies its optimality gap.
//! [`brute_force`] is an independent low-dimensional oracle over the same
//! feasible set `||(w, w0)|| <= scale_cap`. [`enumerate_eps_optimal`] walks
//! the ε-optimal set and ranks what it finds by 0-1 risk, so callers can take
//! the worst minimizer rather than an arbitrary one.

mod brute;
mod cutting_plane;
mod problem;
mod subgradient;

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use brute::GridSpec;
use problem::Problem;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::numeric::{mix_seed, norm};
use crate::risk::{risk_report, LinearPredictor, RiskReport};

/// Relative slack under which a solution counts as sitting on the cap.
const CAP_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// Subgradient iterations per restart.
    pub max_iters: usize,
    pub step_scale: f64,
    pub restarts: usize,
    /// Target certified optimality gap (relative to `max(1, risk)`).
    pub risk_tol: f64,
    pub eps_optimal: f64,
    /// Bound on `||(w, w0)||`.
    pub scale_cap: f64,
    pub seed: u64,
    /// Cutting-plane iteration budget per restart.
    pub polish_iters: usize,
    /// Random probe directions used by the ε-optimal enumeration.
    pub probes: usize,
    pub max_candidates: usize,
    /// Run the ε-optimal enumeration inside `solve`.
    pub adversarial: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iters: 500,
            step_scale: 1.0,
            restarts: 2,
            risk_tol: 1e-8,
            eps_optimal: 1e-6,
            scale_cap: 1e3,
            seed: 0,
            polish_iters: 20_000,
            probes: 16,
            max_candidates: 64,
            adversarial: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.risk_tol > 0.0 && self.risk_tol < self.eps_optimal && self.eps_optimal < 1.0) {
            return Err(Error::OutOfRange(format!(
                "need 0 < risk_tol < eps_optimal < 1 (got {} and {})",
                self.risk_tol, self.eps_optimal
            )));
        }
        if !(self.step_scale > 0.0) || !(self.scale_cap > 0.0) || !self.scale_cap.is_finite() {
            return Err(Error::OutOfRange(
                "step_scale and scale_cap must be positive and finite".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::OutOfRange("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub predictor: LinearPredictor,
    pub report: RiskReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizationResult {
    pub best: LinearPredictor,
    pub best_phi_risk: f64,
    pub candidates: Vec<Candidate>,
    pub worst_zero_one_among_candidates: f64,
    pub hit_scale_cap: bool,
    pub converged: bool,
    /// Certified upper bound on `best_phi_risk - min` (NaN-free; infinite if
    /// no certificate was obtained).
    pub optimality_gap: f64,
    pub iterations: usize,
}

impl MinimizationResult {
    /// The candidate with the largest 0-1 risk.
    pub fn worst_candidate(&self) -> &Candidate {
        self.candidates
            .iter()
            .max_by(|a, b| a.report.zero_one_risk.total_cmp(&b.report.zero_one_risk))
            .expect("candidate list always holds the best predictor")
    }
}

fn lexicographic(a: &LinearPredictor, b: &LinearPredictor) -> Ordering {
    a.w.iter()
        .chain(std::iter::once(&a.w0))
        .zip(b.w.iter().chain(std::iter::once(&b.w0)))
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

struct RestartOutcome {
    point: Vec<f64>,
    value: f64,
    gap: f64,
    iterations: usize,
}

fn run_restart(prob: &Problem, cfg: &SolveConfig, index: usize) -> RestartOutcome {
    let r = prob.rank();
    let start: Vec<f64> = if index == 0 {
        vec![0.0; r]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, index as u64));
        let scale = cfg.scale_cap.min(10.0);
        (0..r).map(|_| rng.gen_range(-scale..=scale)).collect()
    };
    let (warm, sg_iters) =
        subgradient::descend(prob, &start, cfg.step_scale, cfg.scale_cap, cfg.max_iters);
    let cut = cutting_plane::minimize(prob, &warm, cfg.scale_cap, cfg.risk_tol, cfg.polish_iters);
    RestartOutcome {
        gap: cut.gap(),
        point: cut.point,
        value: cut.value,
        iterations: sg_iters + cut.iterations,
    }
}

/// Minimizes `R_phi(w, w0)` over `||(w, w0)|| <= scale_cap`.
pub fn solve(
    dist: &Distribution,
    loss: &LossSpec,
    cfg: &SolveConfig,
) -> Result<MinimizationResult> {
    loss.require_convex("solve")?;
    cfg.validate()?;
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let prob = Problem::new(dist, *loss);
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(&prob, cfg, i))
        .collect();

    let mut ranked: Vec<(f64, LinearPredictor, &RestartOutcome)> = outcomes
        .iter()
        .map(|o| {
            let p = prob.to_predictor(&o.point);
            (
                crate::risk::phi_risk(dist, &p, loss).expect("dimensions match"),
                p,
                o,
            )
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lexicographic(&a.1, &b.1)));
    let (best_phi_risk, best, outcome) = ranked.swap_remove(0);
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    let converged = outcome.gap <= cfg.risk_tol * outcome.value.abs().max(1.0);
    let theta_norm = norm(&prob.to_theta(&outcome.point));

    let mut result = MinimizationResult {
        candidates: vec![Candidate {
            report: risk_report(dist, &best, loss)?,
            predictor: best.clone(),
        }],
        worst_zero_one_among_candidates: 0.0,
        best,
        best_phi_risk,
        hit_scale_cap: theta_norm >= cfg.scale_cap * (1.0 - CAP_SLACK),
        converged,
        optimality_gap: if outcome.gap.is_finite() {
            outcome.gap
        } else {
            f64::INFINITY
        },
        iterations,
    };
    if cfg.adversarial && converged {
        result.candidates = explore(&prob, dist, loss, &result, cfg)?;
    }
    result.worst_zero_one_among_candidates = result
        .candidates
        .iter()
        .map(|c| c.report.zero_one_risk)
        .fold(0.0, f64::max);
    Ok(result)
}

/// Independent grid-refinement oracle for `d <= 2`.
pub fn brute_force(
    dist: &Distribution,
    loss: &LossSpec,
    grid: &GridSpec,
) -> Result<MinimizationResult> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let out = brute::search(dist, loss, *grid)?;
    let d = dist.dim();
    let best = LinearPredictor::new(out.theta[..d].to_vec(), out.theta[d]);
    let report = risk_report(dist, &best, loss)?;
    Ok(MinimizationResult {
        best_phi_risk: report.phi_risk,
        worst_zero_one_among_candidates: report.zero_one_risk,
        candidates: vec![Candidate {
            predictor: best.clone(),
            report,
        }],
        hit_scale_cap: norm(&out.theta) >= grid.scale * (1.0 - CAP_SLACK),
        best,
        converged: true,
        optimality_gap: f64::INFINITY,
        iterations: out.evaluations,
    })
}

/// Points of the ε-optimal set reachable from `base.best`, worst 0-1 risk
/// first. Requires a converged `base`; otherwise only the base point is
/// returned.
pub fn enumerate_eps_optimal(
    dist: &Distribution,
    loss: &LossSpec,
    base: &MinimizationResult,
    cfg: &SolveConfig,
) -> Result<Vec<Candidate>> {
    loss.require_convex("enumerate_eps_optimal")?;
    if !base.converged {
        return Ok(vec![Candidate {
            report: risk_report(dist, &base.best, loss)?,
            predictor: base.best.clone(),
        }]);
    }
    let prob = Problem::new(dist, *loss);
    explore(&prob, dist, loss, base, cfg)
}

fn explore(
    prob: &Problem,
    dist: &Distribution,
    loss: &LossSpec,
    base: &MinimizationResult,
    cfg: &SolveConfig,
) -> Result<Vec<Candidate>> {
    let r = prob.rank();
    let c0 = prob.reduce_predictor(&base.best);
    let f0 = prob.value(&c0);
    let threshold = f0 + cfg.eps_optimal;
    let radius = cfg.scale_cap;

    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..r {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; r];
            e[j] = s;
            dirs.push(e);
        }
    }
    let n0 = norm(&c0);
    if n0 > 0.0 {
        dirs.push(c0.iter().map(|v| -v / n0).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 0xE95));
    for _ in 0..cfg.probes {
        let v: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 {
            dirs.push(v.into_iter().map(|x| x / n).collect());
        }
    }

    let mut points: Vec<Vec<f64>> = vec![c0.clone()];
    if prob.value(&vec![0.0; r]) <= threshold {
        points.push(vec![0.0; r]);
    }
    let at = |t: f64, u: &[f64]| -> Vec<f64> { c0.iter().zip(u).map(|(a, b)| a + t * b).collect() };
    for u in &dirs {
        let t_max = ball_exit(&c0, u, radius);
        let reach = if prob.value(&at(t_max, u)) <= threshold {
            t_max
        } else {
            let (mut lo, mut hi) = (0.0, t_max);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if prob.value(&at(mid, u)) <= threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if reach <= 0.0 {
            continue;
        }
        // Sign pattern changes where some margin crosses zero; one point per
        // crossing and one per open piece covers every attainable pattern.
        let mut ts: Vec<f64> = (0..prob.n())
            .filter_map(|i| {
                let s0 = prob.margin(i, &c0);
                let su = prob.margin(i, u);
                let t = -s0 / su;
                (su != 0.0 && t > 0.0 && t < reach).then_some(t)
            })
            .collect();
        ts.push(0.0);
        ts.push(reach);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        for w in ts.windows(2) {
            points.push(at(0.5 * (w[0] + w[1]), u));
        }
        for &t in &ts[1..] {
            points.push(at(t, u));
        }
    }

    let limit = base.best_phi_risk + cfg.eps_optimal;
    let mut cands: Vec<Candidate> = points
        .iter()
        .filter_map(|c| {
            let predictor = prob.to_predictor(c);
            let report = risk_report(dist, &predictor, loss).ok()?;
            (report.phi_risk <= limit).then_some(Candidate { predictor, report })
        })
        .collect();
    cands.sort_by(|a, b| {
        b.report
            .zero_one_risk
            .total_cmp(&a.report.zero_one_risk)
            .then(a.report.phi_risk.total_cmp(&b.report.phi_risk))
            .then_with(|| lexicographic(&a.predictor, &b.predictor))
    });
    cands.dedup_by(|a, b| a.predictor == b.predictor);
    cands.truncate(cfg.max_candidates.max(1));
    if cands.is_empty() {
        cands.push(Candidate {
            report: risk_report(dist, &base.best, loss)?,
            predictor: base.best.clone(),
        });
    }
    Ok(cands)
}

/// Largest `t >= 0` with `||c + t u|| <= radius` for unit `u`.
fn ball_exit(c: &[f64], u: &[f64], radius: f64) -> f64 {
    let b = crate::numeric::dot(c, u);
    let cc = crate::numeric::dot(c, c) - radius * radius;
    let disc = (b * b - cc).max(0.0);
    (-b + disc.sqrt()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{prop1_gadget, thm3_gadget, Label, LabeledAtom};

    fn one_d(atoms: &[(f64, i64, f64)]) -> Distribution {
        Distribution::new(
            1,
            atoms
                .iter()
                .map(|&(x, y, p)| LabeledAtom::new(vec![x], Label::try_from(y).unwrap(), p))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn thm3_gadget_optimum_is_two_beta() {
        let m = 1.0 / 9.0;
        let d = thm3_gadget(0.05, 0.2, m).unwrap();
        let loss = LossSpec::gamma_hinge(m).unwrap();
        let res = solve(&d, &loss, &SolveConfig::default()).unwrap();
        assert!(res.converged);
        assert!(
            (res.best_phi_risk - 0.4).abs() < 1e-4,
            "{}",
            res.best_phi_risk
        );
        assert!(res.worst_zero_one_among_candidates >= 0.2);
    }

    #[test]
    fn separable_pair_has_perfect_candidate() {
        let d = one_d(&[(0.5, 1, 0.5), (-0.5, -1, 0.5)]);
        let res = solve(&d, &LossSpec::HINGE, &SolveConfig::default()).unwrap();
        assert!(res.best_phi_risk < 1e-8);
        assert!(res.candidates.iter().any(|c| c.report.zero_one_risk == 0.0));
    }

    #[test]
    fn prop1_hinge_minimizer_flips_the_bulk() {
        let d = prop1_gadget(0.1, 0.01).unwrap();
        let res = solve(&d, &LossSpec::HINGE, &SolveConfig::default()).unwrap();
        assert!(res.worst_zero_one_among_candidates >= 0.9 - 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = prop1_gadget(0.1, 0.01).unwrap();
        assert!(solve(&d, &LossSpec::ZERO_ONE, &SolveConfig::default()).is_err());
        assert!(brute_force(&d, &LossSpec::MARGIN, &GridSpec::default()).is_err());
        let bad = SolveConfig {
            risk_tol: 1e-3,
            eps_optimal: 1e-4,
            ..SolveConfig::default()
        };
        assert!(solve(&d, &LossSpec::HINGE, &bad).is_err());
        let d3 = Distribution::new(
            3,
            vec![LabeledAtom::new(vec![0.1, 0.2, 0.3], Label::Pos, 1.0)],
        )
        .unwrap();
        assert!(brute_force(&d3, &LossSpec::HINGE, &GridSpec::default()).is_err());
        // solve itself accepts d = 3
        assert!(solve(&d3, &LossSpec::HINGE, &SolveConfig::default()).is_ok());
    }

    #[test]
    fn single_atom_vanishes() {
        let d = one_d(&[(0.5, 1, 1.0)]);
        let b = brute_force(&d, &LossSpec::HINGE, &GridSpec::default()).unwrap();
        assert!(b.best_phi_risk < 1e-9);
        let s = solve(&d, &LossSpec::HINGE, &SolveConfig::default()).unwrap();
        assert!(s.best_phi_risk < 1e-9);
    }

    #[test]
    fn brute_force_agrees_on_thm3_sweep() {
        let m = 1.0 / 9.0;
        let loss = LossSpec::gamma_hinge(m).unwrap();
        let grid = GridSpec {
            scale: 100.0,
            ..GridSpec::default()
        };
        let cfg = SolveConfig {
            scale_cap: 100.0,
            adversarial: false,
            ..SolveConfig::default()
        };
        for &(nu, beta) in &[
            (0.05, 0.1),
            (0.05, 0.2),
            (0.05, 0.24),
            (0.02, 0.07),
            (0.08, 0.3),
        ] {
            let d = thm3_gadget(nu, beta, m).unwrap();
            let s = solve(&d, &loss, &cfg).unwrap();
            let b = brute_force(&d, &loss, &grid).unwrap();
            assert!(
                (s.best_phi_risk - b.best_phi_risk).abs() <= 1e-5,
                "{nu} {beta}: {} vs {}",
                s.best_phi_risk,
                b.best_phi_risk
            );
            assert!((s.best_phi_risk - 2.0 * beta).abs() <= 1e-6);
        }
    }

    #[test]
    fn strictly_convex_loss_has_a_tight_candidate_set() {
        let d = one_d(&[
            (-0.8, -1, 0.3),
            (-0.1, 1, 0.2),
            (0.4, 1, 0.3),
            (0.9, -1, 0.2),
        ]);
        let res = solve(&d, &LossSpec::SQUARED, &SolveConfig::default()).unwrap();
        for c in &res.candidates {
            let dw =
                (c.predictor.w[0] - res.best.w[0]).abs() + (c.predictor.w0 - res.best.w0).abs();
            assert!(dw < 1e-2, "{dw}");
            assert!(c.report.phi_risk <= res.best_phi_risk + 1e-6);
        }
    }

    /// Two atoms at the same point with opposite labels: hinge risk is flat at
    /// 1 for scores in [-1, 1]. The zero score errs on both (0-1 risk 1), any
    /// other score in the face errs on one (0-1 risk 1/2).
    #[test]
    fn flat_face_exposes_differing_zero_one() {
        let d = one_d(&[(0.5, 1, 0.5), (0.5, -1, 0.5)]);
        let b = brute_force(&d, &LossSpec::HINGE, &GridSpec::default()).unwrap();
        assert!((b.best_phi_risk - 1.0).abs() < 1e-9);
        let res = solve(&d, &LossSpec::HINGE, &SolveConfig::default()).unwrap();
        assert!(res.candidates.len() >= 2);
        let zo: Vec<f64> = res
            .candidates
            .iter()
            .map(|c| c.report.zero_one_risk)
            .collect();
        assert!(zo.contains(&1.0) && zo.contains(&0.5), "{zo:?}");
        for c in &res.candidates {
            assert!((c.report.phi_risk - 1.0).abs() <= 1e-6);
        }
        assert_eq!(res.worst_zero_one_among_candidates, 1.0);
    }

    #[test]
    fn restarts_are_monotone_and_deterministic() {
        let d = prop1_gadget(0.3, 0.2).unwrap();
        let mut last = f64::INFINITY;
        for restarts in 1..5 {
            let cfg = SolveConfig {
                restarts,
                seed: 42,
                ..SolveConfig::default()
            };
            let a = solve(&d, &LossSpec::LOGISTIC, &cfg).unwrap();
            let b = solve(&d, &LossSpec::LOGISTIC, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.best_phi_risk <= last);
            last = a.best_phi_risk;
        }
    }

    #[test]
    fn gamma_hinge_matches_hinge_at_the_argmin() {
        let m = 0.2;
        let d = prop1_gadget(0.1, 0.3).unwrap();
        let cfg = SolveConfig::default();
        let g = solve(&d, &LossSpec::gamma_hinge(m).unwrap(), &cfg).unwrap();
        let h = solve(&d, &LossSpec::HINGE, &cfg).unwrap();
        assert!((g.best_phi_risk - h.best_phi_risk).abs() <= 1e-6);
        assert!(
            (g.worst_zero_one_among_candidates - h.worst_zero_one_among_candidates).abs() <= 1e-12
        );
    }
}
