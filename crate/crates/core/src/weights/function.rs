use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{make_sequence, SequenceSpec, WeightSequence};

use super::assoc::omega_assoc;

/// Shape of a pre-weight function.
#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    /// `t^α`; `α = 1/2` is the square root, `α = 1` the (quasianalytic) linear weight.
    Power(f64),
    /// `max(0, log t)^β`.
    LogPower(f64),
    /// Affine in `log t` between breakpoints `(t_i, w_i)`, zero below `t_0`, continued
    /// beyond the last breakpoint with slope `final_slope` in `log t`.
    Piecewise { points: Vec<(f64, f64)>, final_slope: f64 },
    /// `ω_M`.
    FromSequence(Arc<WeightSequence>),
    Sum(Vec<PreWeightFunction>),
    /// `t ↦ ω(λ t)`.
    Dilated(Box<PreWeightFunction>, f64),
    /// `t ↦ c ω(t)`.
    Scaled(Box<PreWeightFunction>, f64),
}

/// Increasing function on `[0, ∞)` with `ω(0) = 0` and `φ(y) = ω(e^y)` convex.
#[derive(Debug, Clone, PartialEq)]
pub struct PreWeightFunction {
    repr: Repr,
    normalized: bool,
    t_max: f64,
    label: String,
}

/// `ω(t) ≤ a t^e + b` for `t ≥ t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub t0: f64,
    pub a: f64,
    pub e: f64,
    pub b: f64,
}

impl PreWeightFunction {
    fn make(repr: Repr, label: String) -> Self {
        PreWeightFunction { repr, normalized: false, t_max: f64::INFINITY, label }
    }

    pub fn sqrt() -> Self {
        Self::make(Repr::Power(0.5), "sqrt".into())
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidDescriptor(format!("power exponent must be positive, got {alpha}")));
        }
        Ok(Self::make(Repr::Power(alpha), format!("t^{alpha}")))
    }

    pub fn linear() -> Self {
        Self::make(Repr::Power(1.0), "t".into())
    }

    pub fn log_power(beta: f64) -> Result<Self> {
        if !(beta > 1.0) {
            return Err(Error::InvalidDescriptor(format!("log-power needs beta > 1, got {beta}")));
        }
        Ok(Self::make(Repr::LogPower(beta), format!("log^{beta}")))
    }

    pub fn piecewise(points: Vec<(f64, f64)>, final_slope: Option<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidDescriptor("piecewise needs at least two breakpoints".into()));
        }
        if points[0].1 != 0.0 || !(points[0].0 > 0.0) {
            return Err(Error::InvalidDescriptor("piecewise must start at (t_0 > 0, 0)".into()));
        }
        let mut prev_slope = 0.0;
        for w in points.windows(2) {
            let (t0, w0) = w[0];
            let (t1, w1) = w[1];
            if !(t1 > t0) || w1 < w0 {
                return Err(Error::InvalidDescriptor("piecewise breakpoints must increase".into()));
            }
            let s = (w1 - w0) / (t1 / t0).ln();
            if s < prev_slope - 1e-12 {
                return Err(Error::InvalidDescriptor("piecewise slopes in log t must be nondecreasing".into()));
            }
            prev_slope = s;
        }
        let final_slope = final_slope.unwrap_or(prev_slope);
        if final_slope < prev_slope - 1e-12 {
            return Err(Error::InvalidDescriptor("final slope below last segment slope".into()));
        }
        Ok(Self::make(Repr::Piecewise { points, final_slope }, "piecewise".into()))
    }

    /// `ω_M`; trusted up to `μ_K` unless the sequence carries a tail model.
    pub fn from_sequence(m: WeightSequence) -> Self {
        let t_max = if m.tail().is_some() { f64::INFINITY } else { m.mu_max() };
        let label = format!("omega[{}]", m.label());
        PreWeightFunction { repr: Repr::FromSequence(Arc::new(m)), normalized: false, t_max, label }
    }

    pub fn sum(parts: Vec<PreWeightFunction>) -> Self {
        let t_max = parts.iter().map(|p| p.t_max).fold(f64::INFINITY, f64::min);
        let label = parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join("+");
        PreWeightFunction { repr: Repr::Sum(parts), normalized: false, t_max, label }
    }

    pub fn dilated(self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let t_max = self.t_max / lambda;
        let label = format!("{}({lambda}t)", self.label);
        PreWeightFunction { repr: Repr::Dilated(Box::new(self), lambda), normalized: false, t_max, label }
    }

    pub fn scaled(self, c: f64) -> Self {
        assert!(c > 0.0);
        let t_max = self.t_max;
        let label = format!("{c}*{}", self.label);
        PreWeightFunction { repr: Repr::Scaled(Box::new(self), c), normalized: false, t_max, label }
    }

    /// `max(0, ω − ω(1))`, which vanishes on `[0, 1]`.
    pub fn normalized(mut self) -> Self {
        if !self.normalized {
            self.normalized = true;
            self.label = format!("norm[{}]", self.label);
        }
        self
    }

    /// The same representation without the `max(0, ω − ω(1))` normalization.
    pub fn denormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Largest argument at which every component of `ω` can be evaluated.
    pub fn trusted_limit(&self) -> f64 {
        let inner = match &self.repr {
            Repr::Sum(parts) => parts.iter().map(|p| p.trusted_limit()).fold(f64::INFINITY, f64::min),
            Repr::Dilated(inner, l) => inner.trusted_limit() / l,
            Repr::Scaled(inner, _) => inner.trusted_limit(),
            _ => f64::INFINITY,
        };
        self.t_max.min(inner)
    }

    pub fn sequence(&self) -> Option<&WeightSequence> {
        match &self.repr {
            Repr::FromSequence(m) if !self.normalized => Some(m),
            _ => None,
        }
    }

    fn raw(&self, t: f64) -> Result<f64> {
        Ok(match &self.repr {
            Repr::Power(a) => t.powf(*a),
            Repr::LogPower(b) => {
                if t <= 1.0 { 0.0 } else { t.ln().powf(*b) }
            }
            Repr::Piecewise { points, final_slope } => piecewise_eval(points, *final_slope, t),
            Repr::FromSequence(m) => omega_assoc(m, t)?,
            Repr::Sum(parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.eval(t)?;
                }
                s
            }
            Repr::Dilated(inner, l) => inner.eval(l * t)?,
            Repr::Scaled(inner, c) => c * inner.eval(t)?,
        })
    }

    /// `ω(t)` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t > self.t_max {
            return Err(Error::OutOfTrustedRange { t, limit: self.t_max });
        }
        if self.normalized {
            if t <= 1.0 {
                return Ok(0.0);
            }
            Ok((self.raw(t)? - self.raw(1.0)?).max(0.0))
        } else {
            self.raw(t)
        }
    }

    /// Kinks of `ω` on `(0, limit]`, ascending.
    pub fn breakpoints(&self, limit: f64) -> Vec<f64> {
        let mut out = match &self.repr {
            Repr::Power(_) | Repr::LogPower(_) => Vec::new(),
            Repr::Piecewise { points, .. } => points.iter().map(|p| p.0).collect(),
            Repr::FromSequence(m) => {
                let mut v: Vec<f64> = m.log_quotients().iter().map(|l| l.exp()).collect();
                v.dedup();
                v
            }
            Repr::Sum(parts) => parts.iter().flat_map(|p| p.breakpoints(limit)).collect(),
            Repr::Dilated(inner, l) => inner.breakpoints(limit * l).into_iter().map(|b| b / l).collect(),
            Repr::Scaled(inner, _) => inner.breakpoints(limit),
        };
        if self.normalized {
            out.push(1.0);
        }
        if matches!(self.repr, Repr::LogPower(_)) {
            out.push(1.0);
        }
        out.retain(|b| *b > 0.0 && *b <= limit);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Growth envelope beyond `t0`, `None` when no bound is available (sequence without tail).
    pub fn envelope(&self, t0: f64) -> Option<Envelope> {
        let env = match &self.repr {
            Repr::Power(a) => Envelope { t0, a: 1.0, e: *a, b: 0.0 },
            Repr::LogPower(beta) => {
                let s = t0.max((2.0 * beta).exp());
                let l = s.ln().powf(*beta);
                Envelope { t0, a: l / s.sqrt(), e: 0.5, b: l }
            }
            Repr::Piecewise { points, final_slope } => {
                let last = points.last().unwrap().0;
                let s = t0.max(last);
                Envelope { t0, a: 2.0 * final_slope / s.sqrt(), e: 0.5, b: piecewise_eval(points, *final_slope, s) }
            }
            Repr::FromSequence(m) => {
                let tail = m.tail()?;
                let p = tail.exponent;
                let s = t0.max(m.mu_max());
                let e = 1.0 / p;
                let a = p * (-tail.log_c_lo / p).exp();
                let at = omega_assoc(m, s).ok()?;
                Envelope { t0: s, a, e, b: at - a * s.powf(e) }
            }
            Repr::Sum(parts) => {
                let envs: Option<Vec<Envelope>> = parts.iter().map(|p| p.envelope(t0)).collect();
                let envs = envs?;
                let e = envs.iter().map(|v| v.e).fold(0.0, f64::max);
                let a = envs.iter().map(|v| v.a * t0.powf(v.e - e)).sum();
                let b = envs.iter().map(|v| v.b.max(0.0)).sum();
                Envelope { t0, a, e, b }
            }
            Repr::Dilated(inner, l) => {
                let v = inner.envelope(t0 * l)?;
                Envelope { t0, a: v.a * l.powf(v.e), e: v.e, b: v.b }
            }
            Repr::Scaled(inner, c) => {
                let v = inner.envelope(t0)?;
                Envelope { t0, a: v.a * c, e: v.e, b: v.b * c }
            }
        };
        let mut env = env;
        if self.normalized {
            env.b -= self.raw(1.0).ok()?;
        }
        env.b = env.b.max(0.0);
        Some(env)
    }

    /// Non-quasianalytic when a sublinear-power envelope exists; `None` if undecidable.
    pub fn nonquasianalytic(&self) -> Option<bool> {
        self.envelope(1e6).map(|e| e.e < 1.0)
    }
}

fn piecewise_eval(points: &[(f64, f64)], final_slope: f64, t: f64) -> f64 {
    if t <= points[0].0 {
        return 0.0;
    }
    let i = points.partition_point(|p| p.0 <= t);
    if i == points.len() {
        let (tl, wl) = points[points.len() - 1];
        return wl + final_slope * (t / tl).ln();
    }
    let (t0, w0) = points[i - 1];
    let (t1, w1) = points[i];
    w0 + (w1 - w0) * (t / t0).ln() / (t1 / t0).ln()
}

/// Serialized pre-weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFnSpec {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(rename = "T_max", default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub normalized: bool,
    #[serde(default)]
    pub label: Option<String>,
}

pub fn make_weight_function(
    spec: &WeightFnSpec,
    resolve: &dyn Fn(&str) -> Result<SequenceSpec>,
) -> Result<PreWeightFunction> {
    let num = |name: &str| {
        spec.params
            .get(name)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::InvalidDescriptor(format!("missing parameter '{name}'")))
    };
    let mut w = match spec.kind.as_str() {
        "sqrt" => PreWeightFunction::sqrt(),
        "linear" => PreWeightFunction::linear(),
        "power" => PreWeightFunction::power(num("alpha")?)?,
        "log_power" => PreWeightFunction::log_power(num("beta")?)?,
        "piecewise" => {
            let pts = spec
                .params
                .get("points")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::InvalidDescriptor("piecewise needs 'points'".into()))?
                .iter()
                .map(|p| {
                    let a = p.as_array().filter(|a| a.len() == 2);
                    a.and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
                        .ok_or_else(|| Error::InvalidDescriptor("points are [t, w] pairs".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            PreWeightFunction::piecewise(pts, spec.params.get("final_slope").and_then(|v| v.as_f64()))?
        }
        "from_sequence" => {
            let seq = spec
                .params
                .get("seq")
                .ok_or_else(|| Error::InvalidDescriptor("from_sequence needs 'seq'".into()))?;
            let seq_spec = match seq.get("ref").and_then(|r| r.as_str()) {
                Some(path) => resolve(path)?,
                None => serde_json::from_value(seq.clone()).map_err(|e| Error::InvalidDescriptor(e.to_string()))?,
            };
            PreWeightFunction::from_sequence(make_sequence(&seq_spec)?)
        }
        other => return Err(Error::InvalidDescriptor(format!("unknown weight function kind '{other}'"))),
    };
    if let Some(t) = spec.t_max {
        w = w.with_t_max(t);
    }
    if spec.normalized {
        w = w.normalized();
    }
    if let Some(l) = &spec.label {
        w = w.with_label(l.clone());
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(PreWeightFunction::sqrt().eval(16.0).unwrap(), 4.0);
        assert_eq!(PreWeightFunction::sqrt().normalized().eval(0.5).unwrap(), 0.0);
        assert_eq!(PreWeightFunction::sqrt().normalized().eval(4.0).unwrap(), 1.0);
        let p = PreWeightFunction::piecewise(vec![(1.0, 0.0), (std::f64::consts::E, 1.0)], Some(2.0)).unwrap();
        assert!((p.eval(std::f64::consts::E.powi(2)).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_must_be_convex_in_log() {
        let e = std::f64::consts::E;
        assert!(PreWeightFunction::piecewise(vec![(1.0, 0.0), (e, 2.0), (e * e, 3.0)], None).is_err());
    }

    #[test]
    fn sequence_envelope_dominates() {
        let m = WeightSequence::gevrey(2.0, 200).unwrap();
        let w = PreWeightFunction::from_sequence(m);
        let env = w.envelope(1e5).unwrap();
        for t in [1e5, 1e6, 1e8, 1e10] {
            assert!(w.eval(t).unwrap() <= env.a * t.powf(env.e) + env.b + 1e-9);
        }
    }

    #[test]
    fn untailed_sequence_has_limit() {
        let m = WeightSequence::gevrey(1.0, 32).unwrap().with_tail(crate::sequences::Tail::None);
        let w = PreWeightFunction::from_sequence(m);
        assert!(matches!(w.eval(100.0), Err(Error::OutOfTrustedRange { .. })));
    }
}
