use std::f64::consts::PI;

use super::function::{hermite, SampledFunction};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Quad};

const MAX_EVALS: usize = 200_000;

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Plateau cutoff: 1 on `[-k-1, k+1]`, 0 outside `(-k-2, k+2)`, smooth `e^{-1/x}` ramps between.
pub fn plateau_cutoff(k: f64, x: f64) -> f64 {
    let a = x.abs() - (k + 1.0);
    if a <= 0.0 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let (u, v) = (psi(1.0 - a), psi(a));
        u / (u + v)
    }
}

/// `E_j^{(p)}(t)` for `p = 0..=order`, with `E_j(t) = √(j/π) e^{-j t²}`.
pub fn kernel_derivatives(j: f64, t: f64, order: usize) -> Vec<f64> {
    let s = j.sqrt();
    let base = (j / PI).sqrt() * (-j * t * t).exp();
    hermite(order, s * t)
        .into_iter()
        .enumerate()
        .map(|(p, h)| if p % 2 == 0 { 1.0 } else { -1.0 } * s.powi(p as i32) * h * base)
        .collect()
}

/// `∫ E_j` over the real line.
pub fn kernel_mass(j: f64, tol: f64) -> Quad {
    let w = 12.0 / j.sqrt();
    integrate(|t| kernel_derivatives(j, t, 0)[0], -w, w, tol, MAX_EVALS)
}

/// `f_j = E_j ∗ χf` and its derivatives `0..=depth` on the grid `xs`, where `χ` is the
/// plateau cutoff of radius `k`. The kernel is differentiated, so no differences are taken.
pub fn mollify(f: &SampledFunction, k: f64, j: u32, xs: Vec<f64>, depth: usize, tol: f64) -> Result<SampledFunction> {
    if j == 0 || !(k >= 0.0) {
        return Err(Error::InvalidDescriptor("mollify needs j >= 1 and k >= 0".into()));
    }
    let jf = j as f64;
    let edge = k + 2.0;
    let width = 12.0 / jf.sqrt();
    let mut derivs = vec![Vec::with_capacity(xs.len()); depth + 1];
    for &x in &xs {
        let lo = (x - width).max(-edge);
        let hi = (x + width).min(edge);
        let mut cuts = vec![lo, hi, x, -k - 1.0, k + 1.0];
        cuts.retain(|c| *c >= lo && *c <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for p in 0..=depth {
            let mut q = Quad::default();
            for w in cuts.windows(2) {
                q = q
                    + integrate(
                        |y| {
                            let c = plateau_cutoff(k, y);
                            if c == 0.0 {
                                return 0.0;
                            }
                            kernel_derivatives(jf, x - y, p)[p] * c * f.eval_real(y)
                        },
                        w[0],
                        w[1],
                        tol,
                        MAX_EVALS,
                    );
            }
            if !q.value.is_finite() || q.error > 10.0 * tol.max(1e-12 * q.value.abs()) {
                return Err(Error::QuadratureFailure(format!("convolution at x = {x}, order {p}: error {}", q.error)));
            }
            derivs[p].push(q.value);
        }
    }
    SampledFunction::real_grid(xs, derivs)
}
