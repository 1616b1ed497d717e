//! Central-cut ellipsoid method on the ball `||c|| <= radius`.
//!
//! Every objective cut yields the lower bound `f(x) - sqrt(g' P g)` on the
//! minimum over the current ellipsoid, so the returned gap is certified.

use super::problem::Problem;
use crate::numeric::{dot, norm};

pub(crate) struct CutResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub lower_bound: f64,
    pub iterations: usize,
}

impl CutResult {
    pub fn gap(&self) -> f64 {
        self.value - self.lower_bound
    }
}

pub(crate) fn minimize(
    prob: &Problem,
    center: &[f64],
    radius: f64,
    tol: f64,
    max_iters: usize,
) -> CutResult {
    let r = prob.rank();
    let mut x = center.to_vec();
    // Ellipsoid {y : (y-x)' P^-1 (y-x) <= 1} containing the feasible ball.
    let rho = radius + norm(center);
    let mut p = vec![0.0; r * r];
    for i in 0..r {
        p[i * r + i] = rho * rho;
    }

    let mut g = vec![0.0; r];
    let mut pg = vec![0.0; r];
    let mut best_x = x.clone();
    let mut best_f = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        let xn = norm(&x);
        let objective_cut = xn <= radius;
        if objective_cut {
            let e = prob.eval(&x, &mut g);
            if e.value < best_f {
                best_f = e.value;
                best_x.clone_from(&x);
            }
            if g.iter().all(|&v| v == 0.0) {
                // stationary point of a convex function
                lower = lower.max(e.value);
                break;
            }
            let q = quad(&p, &g, r);
            if !(q > 0.0) || !q.is_finite() {
                break;
            }
            let spread = q.sqrt() * e.log_scale.exp();
            if e.value.is_finite() && spread.is_finite() {
                lower = lower.max(e.value - spread);
            }
            if best_f - lower <= tol * best_f.abs() {
                break;
            }
        } else {
            g.iter_mut().zip(&x).for_each(|(gi, xi)| *gi = xi / xn);
        }

        // normalize for conditioning; the cut is scale-free
        let gn = norm(&g);
        g.iter_mut().for_each(|v| *v /= gn);
        let q = quad(&p, &g, r);
        if !(q > 0.0) || !q.is_finite() {
            break;
        }
        let sq = q.sqrt();
        for i in 0..r {
            pg[i] = dot(&p[i * r..(i + 1) * r], &g) / sq;
        }
        if r == 1 {
            // interval bisection
            x[0] -= pg[0] / 2.0;
            p[0] /= 4.0;
            continue;
        }
        let rf = r as f64;
        for i in 0..r {
            x[i] -= pg[i] / (rf + 1.0);
        }
        let a = rf * rf / (rf * rf - 1.0);
        let b = 2.0 / (rf + 1.0);
        for i in 0..r {
            for j in i..r {
                let v = a * (p[i * r + j] - b * pg[i] * pg[j]);
                p[i * r + j] = v;
                p[j * r + i] = v;
            }
        }
    }

    CutResult {
        point: best_x,
        value: best_f,
        lower_bound: lower,
        iterations,
    }
}

fn quad(p: &[f64], g: &[f64], r: usize) -> f64 {
    (0..r).map(|i| g[i] * dot(&p[i * r..(i + 1) * r], g)).sum()
}
