use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::report::Interval;
use crate::sequences::WeightSequence;
use crate::weights::{counting_mu, omega_assoc, PreWeightFunction, Repr};

/// Far-field cut: beyond `|t| = T_FAR` the integral is replaced by envelope bounds.
pub const T_FAR: f64 = 1e20;
const MAX_EVALS: usize = 20_000;

/// `P_ω(z)` with its quadrature error and the far-field contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicSample {
    #[serde(skip)]
    pub z: Complex64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub quad_error: f64,
    pub tail: Interval,
}

fn far_cut(w: &PreWeightFunction, modulus: f64) -> Result<(f64, Option<crate::weights::Envelope>)> {
    let limit = w.trusted_limit();
    let t = T_FAR.min(limit);
    let env = w.envelope(t);
    match env {
        Some(e) if e.e >= 1.0 => Err(Error::QuasianalyticWeight),
        Some(_) => Ok((t, env)),
        None if modulus > t / 10.0 => Err(Error::TailUnbounded { modulus, limit: t }),
        None => Ok((t, None)),
    }
}

/// Harmonic extension `P_ω(x+iy) = (1/π) ∫ ω(x + y tan θ) dθ` of `ω(|t|)`.
///
/// Each half-line `t = x ± y cot φ`, `φ ∈ (0, π/2]`, is integrated separately, split at
/// the angles where `|t|` meets a kink of `ω`; the far field `|t| > T` is bounded using the
/// growth envelope. Only `(|x|, |y|)` enters, so the result is exactly symmetric.
pub fn poisson(w: &PreWeightFunction, z: Complex64, tol: f64) -> Result<HarmonicSample> {
    let x = z.re.abs();
    let y = z.im.abs();
    if y == 0.0 {
        let v = w.eval(x)?;
        return Ok(HarmonicSample { z, value: v, lower: v, upper: v, quad_error: 0.0, tail: Interval::point(0.0) });
    }
    let (t_cut, env) = far_cut(w, x.hypot(y))?;
    let phi_r = (y / (t_cut - x)).atan();
    let phi_l = (y / (t_cut + x)).atan();
    let kinks = w.breakpoints(t_cut);

    let mut right = vec![phi_r, FRAC_PI_2];
    let mut left = vec![phi_l, FRAC_PI_2];
    for &b in &kinks {
        if b > x {
            right.push((y / (b - x)).atan());
        } else if b < x {
            left.push((y / (x - b)).atan());
        }
        left.push((y / (x + b)).atan());
    }
    if x > 0.0 {
        left.push((y / x).atan());
    }
    let total_width = (FRAC_PI_2 - phi_r) + (FRAC_PI_2 - phi_l);
    let failure = RefCell::new(None);
    let eval = |t: f64| match w.eval(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let mut value = 0.0;
    let mut error = 0.0;
    for (cuts, sign, lo) in [(&mut right, 1.0, phi_r), (&mut left, -1.0, phi_l)] {
        cuts.retain(|c| *c >= lo && *c <= FRAC_PI_2);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if b <= a {
                continue;
            }
            let share = PI * tol * (b - a) / total_width;
            let q = integrate(|phi| eval(x + sign * y / phi.tan()), a, b, share, MAX_EVALS);
            value += q.value;
            error += q.error;
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let tail_lo = w.eval(t_cut)? * (phi_r + phi_l);
    let tail_hi = match env {
        Some(v) => {
            let ye = y.powf(v.e);
            let sing = |phi: f64| v.a * ye * phi.powf(1.0 - v.e) / (1.0 - v.e);
            v.a * x.powf(v.e) * phi_r + sing(phi_r) + sing(phi_l) + v.b * (phi_r + phi_l)
        }
        None => f64::INFINITY,
    };
    let tail = Interval::new(tail_lo / PI, (tail_hi / PI).max(tail_lo / PI));
    let quad = value / PI;
    let quad_error = error / PI;
    let mid = if tail.upper.is_finite() { tail.mid() } else { tail.lower };
    Ok(HarmonicSample {
        z,
        value: quad + mid,
        lower: quad - quad_error + tail.lower,
        upper: quad + quad_error + tail.upper,
        quad_error,
        tail,
    })
}

/// A value with rigorous-by-construction lower and upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Estimate {
    fn exact(v: f64) -> Self {
        Estimate { value: v, lower: v, upper: v }
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Estimate { value: f(self.value), lower: f(self.lower), upper: f(self.upper) }
    }

    fn add(self, o: Estimate) -> Self {
        Estimate { value: self.value + o.value, lower: self.lower + o.lower, upper: self.upper + o.upper }
    }
}

fn kappa_sequence(m: &WeightSequence, r: f64) -> Result<Estimate> {
    if let Some(t) = m.tail() {
        if t.exponent <= 1.0 {
            return Err(Error::QuasianalyticWeight);
        }
    }
    let n = counting_mu(m, r)?;
    let base = omega_assoc(m, r)? + n as f64;
    let s = m.inverse_tail_sum(n + 1);
    let value = if s.upper.is_finite() { s.mid() } else { s.lower };
    Ok(Estimate { value: base + r * value, lower: base + r * s.lower, upper: base + r * s.upper })
}

fn kappa_generic(w: &PreWeightFunction, r: f64, tol: f64) -> Result<Estimate> {
    // κ(r) = ∫_0^∞ ω(r e^v) e^{-v} dv, cut at r e^v = T
    let (t_cut, env) = far_cut(w, r)?;
    let v_max = (t_cut / r).ln();
    let mut cuts: Vec<f64> = w.breakpoints(t_cut).into_iter().filter(|b| *b > r).map(|b| (b / r).ln()).collect();
    cuts.push(0.0);
    cuts.push(v_max);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let failure = RefCell::new(None);
    let f = |v: f64| match w.eval(r * v.exp()) {
        Ok(x) => x * (-v).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let mut q = crate::quadrature::Quad::default();
    for seg in cuts.windows(2) {
        q = q + integrate(&f, seg[0], seg[1], tol * (seg[1] - seg[0]) / v_max.max(1.0), MAX_EVALS);
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let u0 = r / t_cut;
    let lo = w.eval(t_cut)? * u0;
    let hi = match env {
        Some(v) => v.a * r.powf(v.e) * u0.powf(1.0 - v.e) / (1.0 - v.e) + v.b * u0,
        None => f64::INFINITY,
    };
    let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo };
    Ok(Estimate { value: q.value + mid, lower: q.value - q.error + lo, upper: q.value + q.error + hi.max(lo) })
}

fn kappa_raw(w: &PreWeightFunction, r: f64, tol: f64) -> Result<Estimate> {
    match w.repr() {
        Repr::Power(a) if *a >= 1.0 => Err(Error::QuasianalyticWeight),
        Repr::Power(a) => Ok(Estimate::exact(r.powf(*a) / (1.0 - a))),
        Repr::FromSequence(m) => kappa_sequence(m, r),
        Repr::Sum(parts) => {
            let mut acc = Estimate::exact(0.0);
            for p in parts {
                acc = acc.add(kappa(p, r, tol)?);
            }
            Ok(acc)
        }
        Repr::Dilated(inner, l) => kappa(inner, l * r, tol),
        Repr::Scaled(inner, c) => Ok(kappa(inner, r, tol)?.map(|v| c * v)),
        _ => kappa_generic(w, r, tol),
    }
}

/// `κ_ω(r) = r ∫_r^∞ ω(t)/t² dt`.
pub fn kappa(w: &PreWeightFunction, r: f64, tol: f64) -> Result<Estimate> {
    if !(r > 0.0) {
        return Ok(Estimate::exact(0.0));
    }
    if w.trusted_limit() < f64::INFINITY && r > w.trusted_limit() {
        return Err(Error::OutOfTrustedRange { t: r, limit: w.trusted_limit() });
    }
    if !w.is_normalized() || matches!(w.repr(), Repr::Piecewise { .. } | Repr::LogPower(_)) {
        if w.is_normalized() {
            return kappa_generic(w, r, tol);
        }
        return kappa_raw(w, r, tol);
    }
    // ω̃ = max(0, ω − ω(1)): κ̃(r) = κ(r) − ω(1) for r ≥ 1 and r κ̃(1) below
    let raw = w.clone().denormalized();
    let w1 = raw.eval(1.0)?;
    let at = r.max(1.0);
    let k = kappa_raw(&raw, at, tol)?.map(|v| v - w1);
    Ok(if r >= 1.0 { k } else { k.map(|v| r * v) })
}
