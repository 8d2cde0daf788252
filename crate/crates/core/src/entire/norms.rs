use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::function::SampledFunction;
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::report::{bounded_trend, ConditionReport, Scale, Verdict};

/// Polar grid on the disc `|z| ≤ radius`: the origin plus `n_r` circles of `n_theta` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscGrid {
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl DiscGrid {
    pub fn new(radius: f64, n_r: usize, n_theta: usize) -> Self {
        DiscGrid { radius, n_r, n_theta }
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        if self.radius <= 0.0 {
            return out;
        }
        for i in 1..=self.n_r {
            let r = self.radius * i as f64 / self.n_r as f64;
            for k in 0..self.n_theta {
                out.push(Complex64::from_polar(r, 2.0 * PI * k as f64 / self.n_theta as f64));
            }
        }
        out
    }

    fn degenerate(&self) -> bool {
        self.radius <= 0.0 || self.n_r == 0 || self.n_theta < 3
    }
}

/// `max_{z ∈ grid} |f(z)| e^{-g(z)}`: a lower bound for `‖f‖_{A_g}`.
pub fn ag_norm(f: &SampledFunction, g: &dyn Fn(Complex64) -> f64, grid: &[Complex64]) -> f64 {
    grid.iter().map(|&z| (f.eval(z).norm().ln() - g(z)).exp()).filter(|v| !v.is_nan()).fold(0.0, f64::max)
}

/// Grid sup norms on discs of growing radius; `FAILS_TREND` flags a norm that keeps growing.
pub fn ag_norm_profile(f: &SampledFunction, g: &dyn Fn(Complex64) -> f64, radii: &[f64], n_r: usize, n_theta: usize) -> ConditionReport {
    let values: Vec<f64> = radii.iter().map(|&r| ag_norm(f, g, &DiscGrid::new(r, n_r, n_theta).points())).collect();
    let verdict = bounded_trend(&values, &values, Scale::Relative);
    ConditionReport::new("ag_norm_bounded", verdict, radii.len())
        .witness("last", *values.last().unwrap_or(&0.0))
        .with_profile(radii.iter().copied().zip(values))
        .note("grid suprema are lower bounds of the norm")
}

/// `(∫_{|z|≤R} |f|² e^{-w} dλ)^{1/2}`: trapezoid rule in the angle, adaptive in the radius.
pub fn l2_norm(f: &SampledFunction, w: &dyn Fn(Complex64) -> f64, grid: &DiscGrid, tol: f64) -> Result<f64> {
    let n = grid.n_theta.max(8);
    let ring = |r: f64| -> f64 {
        let s: f64 = (0..n)
            .map(|k| {
                let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
                (2.0 * f.eval(z).norm().ln() - w(z)).exp()
            })
            .sum();
        s * 2.0 * PI / n as f64 * r
    };
    let q = integrate(ring, 0.0, grid.radius, tol, 200_000);
    if !q.value.is_finite() || q.error > 10.0 * tol.max(1e-12 * q.value.abs()) {
        return Err(Error::QuadratureFailure(format!("L2 norm on |z| <= {}: error {}", grid.radius, q.error)));
    }
    Ok(q.value.max(0.0).sqrt())
}

/// Both embeddings `‖f‖_{A²_{2g+log(1+|z|⁴)}} ≤ 3π ‖f‖_{A_g}` and
/// `‖f‖_{A_{h/2}} ≤ e^K ‖f‖_{A²_g}` on the disc grid. The hypothesis `g(z+u) ≤ h(z) + K`,
/// `|u| ≤ 1`, is checked at every grid point against 17 points of the closed unit disc.
pub fn l2_embedding_check(
    f: &SampledFunction,
    g: &dyn Fn(Complex64) -> f64,
    h: &dyn Fn(Complex64) -> f64,
    k_const: f64,
    grid: &DiscGrid,
    tol: f64,
) -> Result<ConditionReport> {
    if grid.degenerate() {
        return Ok(ConditionReport::new("l2_embedding", Verdict::Inconclusive, 0).note("degenerate grid: quadrature undefined"));
    }
    let points = grid.points();
    let mut offsets = vec![Complex64::new(0.0, 0.0)];
    for r in [0.5, 1.0] {
        for k in 0..8 {
            offsets.push(Complex64::from_polar(r, PI * k as f64 / 4.0));
        }
    }
    for &z in &points {
        for &u in &offsets {
            if g(z + u) > h(z) + k_const + 1e-9 * h(z).abs().max(1.0) {
                return Err(Error::HypothesisNotMet(format!("g(z+u) <= h(z) + K fails at z = {z}, u = {u}")));
            }
        }
    }
    let sup_g = ag_norm(f, g, &points);
    let l2_first = l2_norm(f, &|z| 2.0 * g(z) + (1.0 + z.norm_sqr() * z.norm_sqr()).ln(), grid, tol)?;
    let first = l2_first <= 3.0 * PI * sup_g * (1.0 + 1e-12);
    let sup_h = ag_norm(f, &|z| 0.5 * h(z), &points);
    let l2_g = l2_norm(f, g, grid, tol)?;
    let second = sup_h <= k_const.exp() * l2_g * (1.0 + 1e-12);
    let sub = |name: &str, ok: bool, lhs: f64, rhs: f64| {
        ConditionReport::new(name, if ok { Verdict::HoldsTrend } else { Verdict::FailsTrend }, points.len())
            .witness("lhs", lhs)
            .witness("rhs", rhs)
    };
    let mut rep = ConditionReport::new("l2_embedding", if first && second { Verdict::HoldsTrend } else { Verdict::FailsTrend }, points.len())
        .witness("sup_A_g", sup_g)
        .witness("L2_A2_2g_log", l2_first)
        .witness("sup_A_h_half", sup_h)
        .witness("L2_A2_g", l2_g)
        .witness("K", k_const)
        .note(format!("disc |z| <= {}; grid sups and truncated integrals are lower bounds", grid.radius));
    rep.children.push(sub("sup_to_l2", first, l2_first, 3.0 * PI * sup_g));
    rep.children.push(sub("l2_to_sup", second, sup_h, k_const.exp() * l2_g));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega_fact2(z: Complex64) -> f64 {
        // ω of k!², approximated from below by 2·ω_{k!}(t) with ω_{k!}(t) = Σ_{k≤t} log(t/k)
        let t = z.norm();
        2.0 * (1..=(t.floor() as usize)).map(|k| (t / k as f64).ln()).sum::<f64>()
    }

    #[test]
    fn constant_sup_is_one() {
        let one = SampledFunction::polynomial(vec![1.0]).unwrap();
        let grid = DiscGrid::new(10.0, 20, 16).points();
        assert_eq!(ag_norm(&one, &|z| z.norm(), &grid), 1.0);
    }

    #[test]
    fn exp_outgrows_sublinear_weight() {
        let f = SampledFunction::Exp { rate: 1.0, scale: 1.0 };
        let rep = ag_norm_profile(&f, &|z| z.norm().sqrt(), &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0], 8, 16);
        assert_eq!(rep.verdict, Verdict::FailsTrend);
    }

    #[test]
    fn embedding_constants() {
        let grid = DiscGrid::new(50.0, 100, 64);
        let h = |z: Complex64| omega_fact2(Complex64::new(z.norm() + 1.0, 0.0));
        for f in [SampledFunction::polynomial(vec![1.0]).unwrap(), SampledFunction::polynomial(vec![0.0, 1.0]).unwrap()] {
            let rep = l2_embedding_check(&f, &omega_fact2, &h, 0.0, &grid, 1e-8).unwrap();
            assert_eq!(rep.verdict, Verdict::HoldsTrend, "{}", rep.to_json());
        }
        let one = DiscGrid::new(0.0, 1, 1);
        let rep = l2_embedding_check(&SampledFunction::zero(), &omega_fact2, &h, 0.0, &one, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn hypothesis_rejected() {
        let grid = DiscGrid::new(5.0, 5, 8);
        let err = l2_embedding_check(&SampledFunction::zero(), &|z| z.norm(), &|z| z.norm(), 0.0, &grid, 1e-8);
        assert!(matches!(err, Err(Error::HypothesisNotMet(_))));
    }
}
