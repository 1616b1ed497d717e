//! Low-dimensional oracle: nested one-dimensional searches over the
//! original `(w, w0)` coordinates inside the cap ball.
//!
//! Each level scans a uniform grid, then refines around the best grid point
//! with Brent's method. Partial minimization of a jointly convex function
//! over a convex set stays convex, so each level is unimodal and the scan
//! plus refinement cannot miss the minimum.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::loss::LossSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Searches `||(w, w0)|| <= scale`.
    pub scale: f64,
    pub grid_points: usize,
    /// Iteration budget of each Brent refinement.
    pub refine_rounds: usize,
    /// Relative argument tolerance of the refinement.
    pub xtol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            scale: 1e3,
            grid_points: 9,
            refine_rounds: 200,
            xtol: 1e-10,
        }
    }
}

pub(crate) struct BruteOutcome {
    pub theta: Vec<f64>,
    pub evaluations: usize,
}

struct Oracle<'a> {
    loss: LossSpec,
    rows: Vec<(&'a [f64], f64, f64)>,
    spec: GridSpec,
    k: usize,
    evaluations: std::cell::Cell<usize>,
}

impl Oracle<'_> {
    fn f(&self, theta: &[f64]) -> f64 {
        self.evaluations.set(self.evaluations.get() + 1);
        let (w, w0) = theta.split_at(self.k - 1);
        self.rows
            .iter()
            .map(|&(x, y, p)| {
                let s: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + w0[0];
                p * self.loss.eval(y * s)
            })
            .sum()
    }

    /// Minimizes over coordinates `level..k` with the earlier ones fixed.
    fn nested(&self, level: usize, prefix: &mut Vec<f64>) -> (f64, Vec<f64>) {
        let used: f64 = prefix.iter().map(|v| v * v).sum();
        let half = (self.spec.scale * self.spec.scale - used).max(0.0).sqrt();
        let mut best: (f64, Vec<f64>) = (f64::INFINITY, Vec::new());
        let mut probe = |v: f64, best: &mut (f64, Vec<f64>)| -> f64 {
            prefix.push(v);
            let (val, arg) = if level + 1 == self.k {
                (self.f(prefix), prefix.clone())
            } else {
                self.nested(level + 1, prefix)
            };
            prefix.pop();
            if val < best.0 || best.1.is_empty() {
                *best = (val, arg);
            }
            val
        };

        let g = self.spec.grid_points.max(3);
        let step = 2.0 * half / (g - 1) as f64;
        let grid: Vec<f64> = (0..g).map(|i| -half + step * i as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&v| probe(v, &mut best)).collect();
        let i = (0..g).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(g - 1)];
        brent(lo, hi, grid[i], vals[i], self.spec, |v| probe(v, &mut best));
        best
    }
}

/// Brent's parabolic-interpolation minimizer on `[a, b]`, started from a
/// known interior point.
fn brent(mut a: f64, mut b: f64, x0: f64, f0: f64, spec: GridSpec, mut f: impl FnMut(f64) -> f64) {
    const CGOLD: f64 = 0.381_966_011_250_105;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let abs_tol = spec.xtol * spec.scale.max(1.0) * 1e-2;
    for _ in 0..spec.refine_rounds {
        let xm = 0.5 * (a + b);
        let tol1 = spec.xtol * x.abs() + abs_tol;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
}

pub(crate) fn search(dist: &Distribution, loss: &LossSpec, spec: GridSpec) -> Result<BruteOutcome> {
    if dist.dim() > 2 {
        return Err(Error::OutOfRange(format!(
            "brute force supports d <= 2, got d = {}",
            dist.dim()
        )));
    }
    loss.require_convex("brute_force")?;
    if !(spec.scale > 0.0) || spec.grid_points < 3 {
        return Err(Error::OutOfRange(
            "grid needs scale > 0 and at least 3 points".into(),
        ));
    }
    let oracle = Oracle {
        loss: *loss,
        rows: dist
            .atoms()
            .iter()
            .map(|a| (a.x.as_slice(), a.y.sign(), a.p))
            .collect(),
        spec,
        k: dist.dim() + 1,
        evaluations: std::cell::Cell::new(0),
    };
    let (_, theta) = oracle.nested(0, &mut Vec::with_capacity(oracle.k));
    Ok(BruteOutcome {
        theta,
        evaluations: oracle.evaluations.get(),
    })
}
