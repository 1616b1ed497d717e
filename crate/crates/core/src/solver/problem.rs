//! The φ-risk as a function of reduced parameters.
//!
//! Parameters `theta = (w, w0)` only act on the data through the rows
//! `a_i = (x_i, 1)`. Directions orthogonal to their span never change any
//! score, so the objective is restricted to an orthonormal basis of that span.
//! Orthogonal projection onto the span does not increase `||theta||`, which
//! makes the restriction exact for the norm-capped problem too.

use crate::dist::Distribution;
use crate::loss::{LossId, LossSpec};
use crate::numeric::{dot, NeumaierSum};
use crate::risk::LinearPredictor;

const RANK_TOL: f64 = 1e-10;

pub(crate) struct Problem {
    pub loss: LossSpec,
    pub d: usize,
    /// Orthonormal rows spanning `{(x_i, 1)}`, each of length `d + 1`.
    pub basis: Vec<Vec<f64>>,
    /// `y_i * (basis · a_i)`, row-major `n x r`.
    feats: Vec<f64>,
    weights: Vec<f64>,
}

pub(crate) struct Eval {
    pub value: f64,
    /// True gradient is `grad * exp(log_scale)`.
    pub log_scale: f64,
}

impl Problem {
    pub fn new(dist: &Distribution, loss: LossSpec) -> Self {
        let d = dist.dim();
        let rows: Vec<Vec<f64>> = dist
            .atoms()
            .iter()
            .map(|a| {
                let mut r = a.x.clone();
                r.push(1.0);
                r
            })
            .collect();
        let basis = row_space_basis(&rows);
        let r = basis.len();
        let mut feats = Vec::with_capacity(rows.len() * r);
        for (row, atom) in rows.iter().zip(dist.atoms()) {
            let s = atom.y.sign();
            feats.extend(basis.iter().map(|b| s * dot(b, row)));
        }
        Problem {
            loss,
            d,
            basis,
            feats,
            weights: dist.atoms().iter().map(|a| a.p).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Margin `y_i (<w, x_i> + w0)` at reduced parameters `c`.
    #[inline]
    pub fn margin(&self, i: usize, c: &[f64]) -> f64 {
        let r = self.rank();
        dot(&self.feats[i * r..(i + 1) * r], c)
    }

    pub fn value(&self, c: &[f64]) -> f64 {
        let s: NeumaierSum = (0..self.n())
            .map(|i| self.weights[i] * self.loss.eval(self.margin(i, c)))
            .collect();
        s.total()
    }

    /// Value and a (possibly rescaled) subgradient written into `grad`.
    pub fn eval(&self, c: &[f64], grad: &mut [f64]) -> Eval {
        let r = self.rank();
        grad.iter_mut().for_each(|g| *g = 0.0);
        if self.loss.id() == LossId::Exponential {
            // p e^{-z} = e^{-zmin} p e^{-(z - zmin)}; keeps the direction finite.
            let zmin = (0..self.n())
                .map(|i| self.margin(i, c))
                .fold(f64::INFINITY, f64::min);
            let mut sum = NeumaierSum::default();
            for i in 0..self.n() {
                let t = self.weights[i] * (zmin - self.margin(i, c)).exp();
                sum.add(t);
                let f = &self.feats[i * r..(i + 1) * r];
                grad.iter_mut().zip(f).for_each(|(g, a)| *g -= t * a);
            }
            let s = sum.total();
            return Eval {
                value: (s.ln() - zmin).exp(),
                log_scale: -zmin,
            };
        }
        let mut sum = NeumaierSum::default();
        for i in 0..self.n() {
            let z = self.margin(i, c);
            let p = self.weights[i];
            sum.add(p * self.loss.eval(z));
            let s = p * self.loss.slope(z);
            if s != 0.0 {
                let f = &self.feats[i * r..(i + 1) * r];
                grad.iter_mut().zip(f).for_each(|(g, a)| *g += s * a);
            }
        }
        Eval {
            value: sum.total(),
            log_scale: 0.0,
        }
    }

    pub fn to_theta(&self, c: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.d + 1];
        for (cj, b) in c.iter().zip(&self.basis) {
            theta.iter_mut().zip(b).for_each(|(t, v)| *t += cj * v);
        }
        theta
    }

    pub fn reduce_theta(&self, theta: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, theta)).collect()
    }

    pub fn to_predictor(&self, c: &[f64]) -> LinearPredictor {
        let theta = self.to_theta(c);
        LinearPredictor::new(theta[..self.d].to_vec(), theta[self.d])
    }

    pub fn reduce_predictor(&self, p: &LinearPredictor) -> Vec<f64> {
        let mut theta = p.w.clone();
        theta.push(p.w0);
        self.reduce_theta(&theta)
    }
}

/// Modified Gram-Schmidt with re-orthogonalization over the given rows.
fn row_space_basis(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    // Process rows by decreasing norm so the first pivots are well scaled.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| dot(&rows[b], &rows[b]).total_cmp(&dot(&rows[a], &rows[a])));
    for &i in &order {
        if basis.len() == dim {
            break;
        }
        let mut v = rows[i].clone();
        let scale = dot(&v, &v).sqrt();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > RANK_TOL * scale.max(1.0) {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}
