use super::problem::Problem;
use crate::numeric::norm;

/// Normalized subgradient descent with steps `step_scale / sqrt(t)`, projected
/// onto the cap ball, returning the average of the second half of iterates.
pub(crate) fn descend(
    prob: &Problem,
    start: &[f64],
    step_scale: f64,
    radius: f64,
    iters: usize,
) -> (Vec<f64>, usize) {
    let r = prob.rank();
    let mut x = start.to_vec();
    project(&mut x, radius);
    let mut g = vec![0.0; r];
    let mut avg = vec![0.0; r];
    let mut averaged = 0usize;
    let tail = iters / 2;
    let mut t = 0;
    while t < iters {
        t += 1;
        prob.eval(&x, &mut g);
        let gn = norm(&g);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let eta = step_scale / (t as f64).sqrt();
        x.iter_mut()
            .zip(&g)
            .for_each(|(xi, gi)| *xi -= eta * gi / gn);
        project(&mut x, radius);
        if t > tail {
            averaged += 1;
            let k = averaged as f64;
            avg.iter_mut()
                .zip(&x)
                .for_each(|(a, xi)| *a += (xi - *a) / k);
        }
    }
    if averaged == 0 {
        (x, t)
    } else {
        (avg, t)
    }
}

pub(crate) fn project(x: &mut [f64], radius: f64) {
    let n = norm(x);
    if n > radius {
        let s = radius / n;
        x.iter_mut().for_each(|v| *v *= s);
    }
}
