use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::WeightSequence;

/// Highest derivative order obtainable from grid samples.
pub const J_MAX: usize = 12;

/// Highest derivative order used for closed-form rules.
pub const CLOSED_FORM_ORDER_CAP: usize = 150;

/// A function on ℂ (closed forms) or on a real grid (samples plus optional derivative tables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampledFunction {
    /// `Σ c_i z^i`.
    Polynomial { coeffs: Vec<f64> },
    /// `scale · e^{rate z}`.
    Exp { rate: f64, scale: f64 },
    /// `scale · e^{-a z²}`, `a > 0`.
    Gaussian { a: f64, scale: f64 },
    /// Samples on a uniform, increasing real grid. `derivs[p]` holds the `p`-th derivative.
    RealGrid { xs: Vec<f64>, derivs: Vec<Vec<f64>> },
}

/// `H_0..=H_n` (physicists' Hermite polynomials) at `t`.
pub(crate) fn hermite(n: usize, t: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(2.0 * t);
    }
    for k in 2..=n {
        let v = 2.0 * t * h[k - 1] - 2.0 * (k - 1) as f64 * h[k - 2];
        h.push(v);
    }
    h
}

impl SampledFunction {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDescriptor("polynomial coefficients must be finite".into()));
        }
        Ok(SampledFunction::Polynomial { coeffs })
    }

    pub fn zero() -> Self {
        SampledFunction::Polynomial { coeffs: vec![] }
    }

    pub fn real_grid(xs: Vec<f64>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::InvalidDescriptor("a real grid needs at least one point".into()));
        }
        let h = if xs.len() == 1 { 1.0 } else { xs[1] - xs[0] };
        if !(h > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
            return Err(Error::InvalidDescriptor("real grid must be uniform and increasing".into()));
        }
        if derivs.is_empty() || derivs.iter().any(|d| d.len() != xs.len() || d.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidDescriptor("grid samples must match the grid and be finite".into()));
        }
        Ok(SampledFunction::RealGrid { xs, derivs })
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, SampledFunction::RealGrid { .. })
    }

    /// Value at a complex point. Grid functions are only defined at real grid nodes
    /// (linear interpolation in between) and return NaN elsewhere.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SampledFunction::Polynomial { coeffs } => coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
            SampledFunction::Exp { rate, scale } => (z * rate).exp() * scale,
            SampledFunction::Gaussian { a, scale } => (-(z * z) * a).exp() * scale,
            SampledFunction::RealGrid { .. } => {
                if z.im != 0.0 {
                    return Complex64::new(f64::NAN, 0.0);
                }
                Complex64::new(self.grid_value(0, z.re), 0.0)
            }
        }
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex64::new(x, 0.0)).re
    }

    fn grid_value(&self, p: usize, x: f64) -> f64 {
        let SampledFunction::RealGrid { xs, derivs } = self else { unreachable!() };
        if xs.len() == 1 {
            return if x == xs[0] { derivs[p][0] } else { f64::NAN };
        }
        let h = xs[1] - xs[0];
        let u = (x - xs[0]) / h;
        if u < -1e-9 || u > (xs.len() - 1) as f64 + 1e-9 {
            return f64::NAN;
        }
        let i = (u.floor() as usize).min(xs.len() - 2);
        let w = (u - i as f64).clamp(0.0, 1.0);
        let d = &derivs[p];
        d[i] * (1.0 - w) + d[i + 1] * w
    }

    /// Largest derivative order this function can deliver.
    pub fn max_order(&self) -> usize {
        match self {
            SampledFunction::RealGrid { derivs, .. } => J_MAX.max(derivs.len() - 1),
            _ => usize::MAX,
        }
    }

    /// `|f^{(p)}(x)|` for `p = 0..=order` at every point of `xs`. For grid functions `xs` is
    /// ignored and the grid itself is used; orders beyond the stored tables come from
    /// centered differences, and points whose stencil leaves the grid yield NaN.
    pub fn derivatives(&self, xs: &[f64], order: usize) -> Result<Vec<Vec<f64>>> {
        if order > self.max_order() {
            return Err(Error::DerivativeOrderExceeded { order, cap: self.max_order() });
        }
        Ok(match self {
            SampledFunction::Polynomial { coeffs } => {
                let mut c = coeffs.clone();
                let mut out = Vec::with_capacity(order + 1);
                for _ in 0..=order {
                    out.push(xs.iter().map(|&x| c.iter().rev().fold(0.0, |a, v| a * x + v)).collect());
                    c = c.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect();
                }
                out
            }
            SampledFunction::Exp { rate, scale } => (0..=order)
                .map(|p| xs.iter().map(|&x| scale * rate.powi(p as i32) * (rate * x).exp()).collect())
                .collect(),
            SampledFunction::Gaussian { a, scale } => {
                let s = a.sqrt();
                let mut out = vec![Vec::with_capacity(xs.len()); order + 1];
                for &x in xs {
                    let h = hermite(order, s * x);
                    let g = scale * (-a * x * x).exp();
                    for p in 0..=order {
                        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                        out[p].push(sign * s.powi(p as i32) * h[p] * g);
                    }
                }
                out
            }
            SampledFunction::RealGrid { xs: grid, derivs } => {
                let h = if grid.len() == 1 { 1.0 } else { grid[1] - grid[0] };
                let top = derivs.len() - 1;
                let mut out: Vec<Vec<f64>> = derivs.iter().take(order + 1).cloned().collect();
                for p in top + 1..=order {
                    out.push(central_difference(&derivs[top], h, p - top));
                }
                out
            }
        })
    }

    /// Tabulates derivatives `0..=depth` on `xs` as a grid function.
    pub fn tabulate(&self, xs: Vec<f64>, depth: usize) -> Result<Self> {
        let d = self.derivatives(&xs, depth)?;
        SampledFunction::real_grid(xs, d)
    }

    /// Pointwise difference of two grid functions on the same grid.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (SampledFunction::RealGrid { xs: a, derivs: da }, SampledFunction::RealGrid { xs: b, derivs: db }) if a == b => {
                let derivs = da.iter().zip(db).map(|(u, v)| u.iter().zip(v).map(|(x, y)| x - y).collect()).collect();
                SampledFunction::real_grid(a.clone(), derivs)
            }
            _ => Err(Error::InvalidDescriptor("difference needs two grid functions on one grid".into())),
        }
    }
}

/// `q`-th centered difference quotient, with step `h` for even `q` and `2h` for odd `q`.
fn central_difference(v: &[f64], h: f64, q: usize) -> Vec<f64> {
    let n = v.len() as isize;
    let (stride, half) = if q.is_multiple_of(2) { (1isize, q as isize / 2) } else { (2isize, q as isize) };
    let step = h * stride as f64;
    let mut binom = vec![1.0f64; q + 1];
    for i in 1..=q {
        binom[i] = binom[i - 1] * (q + 1 - i) as f64 / i as f64;
    }
    (0..n)
        .map(|c| {
            if c - half < 0 || c + half >= n {
                return f64::NAN;
            }
            let mut s = 0.0;
            for (i, b) in binom.iter().enumerate() {
                let idx = c + half - stride * i as isize;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * b * v[idx as usize];
            }
            s / step.powi(q as i32)
        })
        .collect()
}

/// `‖f‖^M_{K,m,r} = sup_{j, 0≤k≤m, x∈K} |f^{(j+k)}(x)| / (r^j M_j)` over the grid `xs ⊂ K`.
///
/// The sup over `j` is truncated at the polynomial degree, at `min(K_M, 150) - m` for other
/// closed forms and at `J_MAX - m` for grid functions. Grid points whose finite-difference
/// stencil leaves the grid are skipped.
pub fn frak_seminorm(f: &SampledFunction, m: &WeightSequence, xs: &[f64], m_order: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidDescriptor("r must be positive".into()));
    }
    let j_top = match f {
        SampledFunction::Polynomial { coeffs } => coeffs.len().saturating_sub(1),
        SampledFunction::RealGrid { .. } => {
            if m_order > J_MAX {
                return Err(Error::DerivativeOrderExceeded { order: m_order, cap: J_MAX });
            }
            J_MAX - m_order
        }
        _ => m.len().min(CLOSED_FORM_ORDER_CAP).saturating_sub(m_order),
    }
    .min(m.len());
    let d = f.derivatives(xs, j_top + m_order)?;
    let mut sup: f64 = 0.0;
    for j in 0..=j_top {
        let log_den = j as f64 * r.ln() + m.log_values()[j];
        for k in 0..=m_order {
            for v in &d[j + k] {
                if v.is_finite() {
                    sup = sup.max((v.abs().ln() - log_den).exp());
                }
            }
        }
    }
    Ok(sup)
}

/// `n` equispaced points covering `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorials() -> WeightSequence {
        WeightSequence::gevrey(1.0, 64).unwrap()
    }

    #[test]
    fn seminorm_of_square() {
        let f = SampledFunction::polynomial(vec![0.0, 0.0, 1.0]).unwrap();
        let v = frak_seminorm(&f, &factorials(), &linspace(-1.0, 1.0, 201), 0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        assert_eq!(frak_seminorm(&SampledFunction::zero(), &factorials(), &[0.0], 3, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_derivatives_match_differences() {
        let g = SampledFunction::Gaussian { a: 1.0, scale: 1.0 };
        let xs = linspace(-3.0, 3.0, 601);
        let grid = g.tabulate(xs.clone(), 0).unwrap();
        let exact = g.derivatives(&xs, 4).unwrap();
        let fd = grid.derivatives(&xs, 4).unwrap();
        for p in 1..=4 {
            let err = exact[p].iter().zip(&fd[p]).filter(|(_, b)| b.is_finite()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-2, "order {p}: {err}");
        }
    }

    #[test]
    fn grid_order_cap() {
        let f = SampledFunction::real_grid(linspace(0.0, 1.0, 11), vec![vec![0.0; 11]]).unwrap();
        assert!(matches!(
            frak_seminorm(&f, &factorials(), &[], 13, 1.0),
            Err(Error::DerivativeOrderExceeded { order: 13, .. })
        ));
    }

    #[test]
    fn seminorm_monotone_in_interval_and_r() {
        let f = SampledFunction::Exp { rate: 1.5, scale: 1.0 };
        let m = factorials();
        let small = frak_seminorm(&f, &m, &linspace(-0.5, 0.5, 51), 1, 1.0).unwrap();
        let big = frak_seminorm(&f, &m, &linspace(-1.0, 1.0, 101), 1, 1.0).unwrap();
        let loose = frak_seminorm(&f, &m, &linspace(-1.0, 1.0, 101), 1, 2.0).unwrap();
        assert!(small <= big && loose <= big);
    }
}
