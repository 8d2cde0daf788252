use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Interval;

/// Power-law continuation `μ_k = c·k^p` of the quotients beyond the truncation.
///
/// `log_c` is anchored so that the continuation meets `μ_K` exactly; `log_c_lo` and
/// `log_c_hi` bracket the fitted constant over the last decade and drive the
/// interval bounds of tail series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub exponent: f64,
    pub log_c: f64,
    pub log_c_lo: f64,
    pub log_c_hi: f64,
}

impl TailModel {
    fn fit(log_mu: &[f64], exponent: f64) -> TailModel {
        let k = log_mu.len();
        let start = (k / 10).max(1);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in start..=k {
            let c = log_mu[i - 1] - exponent * (i as f64).ln();
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let log_c = log_mu[k - 1] - exponent * (k as f64).ln();
        TailModel { exponent, log_c, log_c_lo: lo.min(log_c), log_c_hi: hi.max(log_c) }
    }

    /// Least-squares slope of `log μ_k` against `log k` over the last decade.
    pub fn fitted_exponent(log_mu: &[f64]) -> f64 {
        let k = log_mu.len();
        let start = (k / 10).max(1);
        let n = (k - start + 1) as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for i in start..=k {
            let x = (i as f64).ln();
            let y = log_mu[i - 1];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let den = n * sxx - sx * sx;
        if den <= 0.0 {
            0.0
        } else {
            ((n * sxy - sx * sy) / den).max(0.0)
        }
    }

    pub fn shifted(self, delta_log_c: f64) -> TailModel {
        TailModel {
            log_c: self.log_c + delta_log_c,
            log_c_lo: self.log_c_lo + delta_log_c,
            log_c_hi: self.log_c_hi + delta_log_c,
            ..self
        }
    }

    /// Interval for `Σ_{k>n} 1/(c k^p)` by integral comparison, `c` ranging over the fit band.
    pub fn inverse_sum_after(&self, n: usize) -> Interval {
        let p = self.exponent;
        if p <= 1.0 {
            return Interval::new(f64::INFINITY, f64::INFINITY);
        }
        let n = n as f64;
        let lo = ((1.0 - p) * (n + 1.0).ln() - self.log_c_hi).exp() / (p - 1.0);
        let hi = ((1.0 - p) * n.max(1.0).ln() - self.log_c_lo).exp() / (p - 1.0);
        Interval::new(lo, hi)
    }
}

/// A truncated weight sequence stored through its log-quotients.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    label: String,
    log_mu: Vec<f64>,
    log_m: Vec<f64>,
    tail: Option<TailModel>,
}

/// How a tail model is attached when building from raw quotients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    None,
    PowerLaw(f64),
    /// Exponent fitted from the last decade of quotients.
    Fitted,
}

const MONOTONE_SLACK: f64 = 1e-12;

impl WeightSequence {
    /// Build from `log μ_1 .. log μ_K`.
    pub fn from_log_quotients(label: impl Into<String>, log_mu: Vec<f64>, tail: Tail) -> Result<Self> {
        if log_mu.len() < 8 {
            return Err(Error::TruncationTooShort { got: log_mu.len(), need: 8 });
        }
        for (i, &l) in log_mu.iter().enumerate() {
            if !l.is_finite() {
                return Err(Error::NonPositive { index: i + 1 });
            }
        }
        for i in 1..log_mu.len() {
            if log_mu[i] < log_mu[i - 1] - MONOTONE_SLACK * log_mu[i - 1].abs().max(1.0) {
                return Err(Error::NonMonotoneQuotients { index: i + 1 });
            }
        }
        let mut log_m = Vec::with_capacity(log_mu.len() + 1);
        log_m.push(0.0);
        let mut acc = 0.0;
        for &l in &log_mu {
            acc += l;
            log_m.push(acc);
        }
        let tail = match tail {
            Tail::None => None,
            Tail::PowerLaw(p) => Some(TailModel::fit(&log_mu, p)),
            Tail::Fitted => Some(TailModel::fit(&log_mu, TailModel::fitted_exponent(&log_mu))),
        };
        Ok(WeightSequence { label: label.into(), log_mu, log_m, tail })
    }

    pub fn from_quotients(label: impl Into<String>, mu: &[f64], tail: Tail) -> Result<Self> {
        if let Some(i) = mu.iter().position(|&m| !(m > 0.0)) {
            return Err(Error::NonPositive { index: i + 1 });
        }
        Self::from_log_quotients(label, mu.iter().map(|m| m.ln()).collect(), tail)
    }

    /// Build from `M_0, M_1, .., M_K` with `M_0 = 1`.
    pub fn from_values(label: impl Into<String>, values: &[f64], tail: Tail) -> Result<Self> {
        if let Some(i) = values.iter().position(|&m| !(m > 0.0)) {
            return Err(Error::NonPositive { index: i });
        }
        if values.first() != Some(&1.0) {
            return Err(Error::InvalidDescriptor("values must start with M_0 = 1".into()));
        }
        let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        Self::from_log_values(label, &logs, tail)
    }

    pub fn from_log_values(label: impl Into<String>, log_values: &[f64], tail: Tail) -> Result<Self> {
        if log_values.first() != Some(&0.0) {
            return Err(Error::InvalidDescriptor("log M_0 must be 0".into()));
        }
        let log_mu: Vec<f64> = log_values.windows(2).map(|w| w[1] - w[0]).collect();
        let seq = Self::from_log_quotients(label, log_mu, tail)?;
        seq.check_log_convex()?;
        Ok(seq)
    }

    /// Gevrey sequence `M_k = (k!)^s`, `μ_k = k^s`, with tail exponent `s`.
    pub fn gevrey(s: f64, k: usize) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidDescriptor(format!("gevrey order must be positive, got {s}")));
        }
        let log_mu = (1..=k).map(|i| s * (i as f64).ln()).collect();
        Self::from_log_quotients(format!("gevrey({s})"), log_mu, Tail::PowerLaw(s))
    }

    /// q-Gevrey sequence `μ_k = q^k`; the tail exponent is the fitted log-log slope.
    pub fn q_gevrey(q: f64, k: usize) -> Result<Self> {
        if !(q > 1.0) {
            return Err(Error::InvalidDescriptor(format!("q-gevrey needs q > 1, got {q}")));
        }
        let log_mu = (1..=k).map(|i| i as f64 * q.ln()).collect();
        Self::from_log_quotients(format!("qgevrey({q})"), log_mu, Tail::Fitted)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = match tail {
            Tail::None => None,
            Tail::PowerLaw(p) => Some(TailModel::fit(&self.log_mu, p)),
            Tail::Fitted => Some(TailModel::fit(&self.log_mu, TailModel::fitted_exponent(&self.log_mu))),
        };
        self
    }

    pub fn with_tail_model(mut self, tail: Option<TailModel>) -> Self {
        self.tail = tail;
        self
    }

    /// Same sequence restricted to the first `k` quotients; the tail model is refitted.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        let k = k.min(self.len());
        let tail = match self.tail {
            Some(t) => Tail::PowerLaw(t.exponent),
            None => Tail::None,
        };
        Self::from_log_quotients(self.label.clone(), self.log_mu[..k].to_vec(), tail)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Truncation `K`: number of stored quotients.
    pub fn len(&self) -> usize {
        self.log_mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_mu.is_empty()
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn is_normalized(&self) -> bool {
        self.log_mu[0] >= 0.0
    }

    pub fn log_quotients(&self) -> &[f64] {
        &self.log_mu
    }

    /// `log M_0 .. log M_K`.
    pub fn log_values(&self) -> &[f64] {
        &self.log_m
    }

    /// `log μ_k` for `k ≥ 1`, continued by the tail model beyond `K`.
    pub fn log_mu(&self, k: usize) -> Option<f64> {
        assert!(k >= 1, "quotients start at index 1");
        if k <= self.len() {
            Some(self.log_mu[k - 1])
        } else {
            self.tail.map(|t| t.log_c + t.exponent * (k as f64).ln())
        }
    }

    pub fn mu(&self, k: usize) -> Option<f64> {
        self.log_mu(k).map(f64::exp)
    }

    /// `log M_k`, continued by the tail model beyond `K`.
    pub fn log_value(&self, k: usize) -> Option<f64> {
        let big_k = self.len();
        if k <= big_k {
            return Some(self.log_m[k]);
        }
        self.tail.map(|t| {
            let extra = (k - big_k) as f64;
            self.log_m[big_k]
                + extra * t.log_c
                + t.exponent * (libm::lgamma(k as f64 + 1.0) - libm::lgamma(big_k as f64 + 1.0))
        })
    }

    /// Largest stored quotient `μ_K`.
    pub fn mu_max(&self) -> f64 {
        self.log_mu[self.len() - 1].exp()
    }

    /// `Σ_{k ≥ j} 1/μ_k` as an interval (partial sum to `K` plus tail bound).
    pub fn inverse_tail_sum(&self, j: usize) -> Interval {
        let k = self.len();
        let partial: f64 = if j <= k { self.log_mu[j.max(1) - 1..].iter().map(|l| (-l).exp()).sum() } else { 0.0 };
        let tail = self.tail_beyond(j.max(k + 1) - 1);
        Interval::new(partial, partial) + tail
    }

    /// All suffix sums `Σ_{k ≥ j} 1/μ_k` for `j = 1..=K+1` (index `j-1`), each as an interval.
    pub fn inverse_tail_sums(&self) -> Vec<Interval> {
        let k = self.len();
        let tail = self.tail_beyond(k);
        let mut out = vec![tail; k + 1];
        let mut acc = 0.0;
        for j in (1..=k).rev() {
            acc += (-self.log_mu[j - 1]).exp();
            out[j - 1] = Interval::new(acc + tail.lower, acc + tail.upper);
        }
        out
    }

    /// `Σ_{k > n} 1/μ_k` for `n ≥ K`, from the tail model.
    fn tail_beyond(&self, n: usize) -> Interval {
        match self.tail {
            Some(t) => t.inverse_sum_after(n),
            None => Interval::new(0.0, f64::INFINITY),
        }
    }

    fn check_log_convex(&self) -> Result<()> {
        for k in 1..self.len() {
            let lhs = self.log_m[k - 1] + self.log_m[k + 1];
            if lhs < 2.0 * self.log_m[k] - 1e-9 * self.log_m[k].abs().max(1.0) {
                return Err(Error::NonLogConvex { index: k });
            }
        }
        Ok(())
    }

    /// Exact checks of the structural invariants on stored values, with a
    /// relative rounding slack of `1e-9`.
    pub fn check_invariants(&self) -> Result<()> {
        let slack = |x: f64| 1e-9 * x.abs().max(1.0);
        if self.log_m[0] != 0.0 {
            return Err(Error::InvalidDescriptor("log M_0 != 0".into()));
        }
        for i in 1..self.len() {
            if self.log_mu[i] < self.log_mu[i - 1] - slack(self.log_mu[i]) {
                return Err(Error::NonMonotoneQuotients { index: i + 1 });
            }
        }
        self.check_log_convex()?;
        for k in 1..=self.len() {
            if self.log_m[k] / k as f64 > self.log_mu[k - 1] + slack(self.log_mu[k - 1]) {
                return Err(Error::NonLogConvex { index: k });
            }
        }
        Ok(())
    }
}

/// Serialized sequence descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub kind: SequenceKind,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(rename = "K", default)]
    pub k: Option<usize>,
    /// Missing means the kind's default tail, `null` means no tail.
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "present")]
    pub tail: Option<serde_json::Value>,
}

fn present<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<serde_json::Value>, D::Error> {
    <serde_json::Value as serde::Deserialize>::deserialize(d).map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Gevrey,
    Qgevrey,
    Quotients,
    Values,
}

impl SequenceSpec {
    pub fn gevrey(s: f64, k: usize) -> Self {
        SequenceSpec {
            label: None,
            kind: SequenceKind::Gevrey,
            params: serde_json::json!({ "s": s }),
            k: Some(k),
            tail: None,
        }
    }

    pub fn q_gevrey(q: f64, k: usize) -> Self {
        SequenceSpec {
            label: None,
            kind: SequenceKind::Qgevrey,
            params: serde_json::json!({ "q": q }),
            k: Some(k),
            tail: None,
        }
    }

    pub fn no_tail(mut self) -> Self {
        self.tail = Some(serde_json::Value::Null);
        self
    }
}

fn param(spec: &SequenceSpec, name: &str) -> Result<f64> {
    spec.params
        .get(name)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::InvalidDescriptor(format!("missing numeric parameter '{name}'")))
}

fn param_list(spec: &SequenceSpec, name: &str) -> Result<Vec<f64>> {
    spec.params
        .get(name)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::InvalidDescriptor(format!("missing array parameter '{name}'")))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| Error::InvalidDescriptor(format!("non-numeric entry in '{name}'"))))
        .collect()
}

/// Validate a descriptor and build the sequence.
pub fn make_sequence(spec: &SequenceSpec) -> Result<WeightSequence> {
    let need_k = || spec.k.ok_or_else(|| Error::InvalidDescriptor("missing K".into()));
    let mut seq = match spec.kind {
        SequenceKind::Gevrey => WeightSequence::gevrey(param(spec, "s")?, need_k()?)?,
        SequenceKind::Qgevrey => WeightSequence::q_gevrey(param(spec, "q")?, need_k()?)?,
        SequenceKind::Quotients => {
            let mut mu = param_list(spec, "mu")?;
            if let Some(k) = spec.k {
                mu.truncate(k);
            }
            WeightSequence::from_quotients("quotients", &mu, Tail::None)?
        }
        SequenceKind::Values => {
            let mut m = param_list(spec, "M")?;
            if let Some(k) = spec.k {
                m.truncate(k + 1);
            }
            WeightSequence::from_values("values", &m, Tail::None)?
        }
    };
    match &spec.tail {
        None => {}
        Some(serde_json::Value::Null) => seq = seq.with_tail(Tail::None),
        Some(t) => {
            let model = t.get("model").and_then(|m| m.as_str()).unwrap_or("powerlaw");
            if model != "powerlaw" {
                return Err(Error::InvalidDescriptor(format!("unknown tail model '{model}'")));
            }
            seq = match t.get("exponent").and_then(|e| e.as_f64()) {
                Some(p) => seq.with_tail(Tail::PowerLaw(p)),
                None => seq.with_tail(Tail::Fitted),
            };
        }
    }
    if let Some(label) = &spec.label {
        seq = seq.with_label(label.clone());
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_values() {
        let m = WeightSequence::gevrey(1.0, 10).unwrap();
        assert!((m.mu(3).unwrap() - 3.0).abs() < 1e-12);
        assert!((m.log_value(5).unwrap().exp() - 120.0).abs() < 1e-9);
        assert!(m.is_normalized());
    }

    #[test]
    fn gevrey_two_log_value() {
        let m = WeightSequence::gevrey(2.0, 2000).unwrap();
        let oracle: f64 = (1..=10).map(|k| 2.0 * (k as f64).ln()).sum();
        assert!((m.log_value(10).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 30.20883).abs() < 1e-4);
    }

    #[test]
    fn decreasing_values_rejected() {
        let mut v = vec![1.0, 1.0, 0.9];
        v.extend((3..12).map(|k| k as f64));
        let err = WeightSequence::from_values("bad", &v, Tail::None).unwrap_err();
        assert_eq!(err, Error::NonMonotoneQuotients { index: 2 });
    }

    #[test]
    fn non_positive_rejected() {
        let mu = [1.0, 0.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        assert_eq!(WeightSequence::from_quotients("z", &mu, Tail::None).unwrap_err(), Error::NonPositive { index: 2 });
    }

    #[test]
    fn tail_extension_continues_quotients() {
        let m = WeightSequence::gevrey(2.0, 100).unwrap();
        let direct = (1..=150).map(|k| 2.0 * (k as f64).ln()).sum::<f64>();
        assert!((m.log_value(150).unwrap() - direct).abs() < 1e-8);
        assert!((m.mu(101).unwrap() - 101.0f64.powi(2)).abs() < 1e-6);
    }

    #[test]
    fn basel_tail_interval() {
        let m = WeightSequence::gevrey(2.0, 2000).unwrap();
        let s = m.inverse_tail_sum(1);
        let pi2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(s.lower <= pi2 && pi2 <= s.upper, "{s:?}");
        assert!(s.width() < 1e-6);
    }

    #[test]
    fn descriptor_round_trip() {
        let spec: SequenceSpec =
            serde_json::from_str(r#"{"label":"g","kind":"gevrey","params":{"s":1.5},"K":64,"tail":null}"#).unwrap();
        let m = make_sequence(&spec).unwrap();
        assert!(m.tail().is_none());
        assert_eq!(m.label(), "g");
        let spec = SequenceSpec::gevrey(1.5, 64);
        assert_eq!(make_sequence(&spec).unwrap().tail().unwrap().exponent, 1.5);
    }
}
