//! Verdicts, condition reports and the finite-horizon trend classifier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Version tag carried by every serialized artifact.
pub const SCHEMA: &str = "ultragrowth/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    HoldsTrend,
    FailsTrend,
    Inconclusive,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::HoldsTrend
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HoldsTrend => "HOLDS_TREND",
            Verdict::FailsTrend => "FAILS_TREND",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Conjunction over a quantified family.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::FailsTrend, _) | (_, Verdict::FailsTrend) => Verdict::FailsTrend,
            (Verdict::HoldsTrend, Verdict::HoldsTrend) => Verdict::HoldsTrend,
            _ => Verdict::Inconclusive,
        }
    }

    /// Disjunction over candidate witnesses.
    pub fn or(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::HoldsTrend, _) | (_, Verdict::HoldsTrend) => Verdict::HoldsTrend,
            (Verdict::FailsTrend, Verdict::FailsTrend) => Verdict::FailsTrend,
            _ => Verdict::Inconclusive,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    #[serde(with = "ext_f64")]
    pub at: f64,
    #[serde(with = "ext_f64")]
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_f64")]
    pub lower: f64,
    #[serde(with = "ext_f64")]
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Interval { lower, upper }
    }

    pub fn point(x: f64) -> Self {
        Interval { lower: x, upper: x }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn mid(&self) -> f64 {
        if self.upper.is_finite() {
            0.5 * (self.lower + self.upper)
        } else {
            self.lower
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(self.lower + o.lower, self.upper + o.upper)
    }
}

/// Outcome of checking one condition on a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub schema: String,
    pub condition: String,
    pub verdict: Verdict,
    #[serde(with = "ext_map")]
    pub witnesses: BTreeMap<String, f64>,
    pub profile: Vec<ProfilePoint>,
    pub truncation: usize,
    pub tail_bound: Option<Interval>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub children: Vec<ConditionReport>,
}

impl ConditionReport {
    pub fn new(condition: impl Into<String>, verdict: Verdict, truncation: usize) -> Self {
        ConditionReport {
            schema: SCHEMA.to_string(),
            condition: condition.into(),
            verdict,
            witnesses: BTreeMap::new(),
            profile: Vec::new(),
            truncation,
            tail_bound: None,
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn witness(mut self, name: impl Into<String>, value: f64) -> Self {
        self.witnesses.insert(name.into(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn with_profile(mut self, points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        self.profile = points.into_iter().map(|(at, value)| ProfilePoint { at, value }).collect();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Profile as `at,value` CSV with a header row.
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("at,value\n");
        for p in &self.profile {
            out.push_str(&format!("{},{}\n", p.at, p.value));
        }
        out
    }
}

/// How growth between the two halves of the trend window is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Positive profile, relative growth.
    Relative,
    /// Logarithm of a positive quantity: thresholds become `ln 1.05` and `ln 1.25`.
    Log,
}

pub const HOLD_GROWTH: f64 = 0.05;
pub const FAIL_GROWTH: f64 = 0.25;
pub const VANISH_RATIO: f64 = 0.95;
pub const STALL_RATIO: f64 = 0.99;

/// Suprema of the profile before and after the midpoint of `[n/4, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSups {
    pub first: f64,
    pub second: f64,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || b > a { b } else { a })
}

fn window_mid(n: usize) -> (usize, usize) {
    let start = n / 4;
    (start, start + (n - start) / 2)
}

/// Running supremum at the window midpoint and at the end.
pub fn running_sups(values: &[f64]) -> HalfSups {
    let (_, mid) = window_mid(values.len());
    let mid = mid.max(1).min(values.len());
    HalfSups { first: max_of(&values[..mid]), second: max_of(values) }
}

fn growth(h: HalfSups, scale: Scale) -> f64 {
    if h.second.is_nan() || h.second == f64::INFINITY {
        return f64::INFINITY;
    }
    if h.second <= h.first {
        return 0.0;
    }
    match scale {
        Scale::Relative => {
            if h.first <= 0.0 {
                if h.second <= 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                h.second / h.first - 1.0
            }
        }
        Scale::Log => (h.second - h.first).exp() - 1.0,
    }
}

/// Boundedness claim. `upper` is the profile evaluated with the upper end of every
/// tail interval, `lower` with the lower end.
pub fn bounded_trend(lower: &[f64], upper: &[f64], scale: Scale) -> Verdict {
    if upper.len() < 4 {
        return Verdict::Inconclusive;
    }
    if growth(running_sups(upper), scale) < HOLD_GROWTH {
        return Verdict::HoldsTrend;
    }
    if growth(running_sups(lower), scale) > FAIL_GROWTH {
        return Verdict::FailsTrend;
    }
    Verdict::Inconclusive
}

/// Convergence-to-zero claim for a nonnegative profile.
pub fn vanishing_trend(lower: &[f64], upper: &[f64]) -> Verdict {
    if upper.len() < 4 {
        return Verdict::Inconclusive;
    }
    let halves = |v: &[f64]| {
        let (start, mid) = window_mid(v.len());
        (max_of(&v[start..mid]), max_of(&v[mid..]))
    };
    let (a, b) = halves(upper);
    if a.is_finite() && (b == 0.0 || (a > 0.0 && b < VANISH_RATIO * a)) {
        return Verdict::HoldsTrend;
    }
    let (a, b) = halves(lower);
    if b.is_nan() || b == f64::INFINITY || (a.is_finite() && b >= STALL_RATIO * a && b > 0.0) {
        return Verdict::FailsTrend;
    }
    Verdict::Inconclusive
}

/// Divergence claim: the profile is unbounded. Mirror image of [`bounded_trend`].
pub fn divergent_trend(lower: &[f64], upper: &[f64], scale: Scale) -> Verdict {
    match bounded_trend(lower, upper, scale) {
        Verdict::HoldsTrend => Verdict::FailsTrend,
        Verdict::FailsTrend => Verdict::HoldsTrend,
        Verdict::Inconclusive => Verdict::Inconclusive,
    }
}

/// Serialize non-finite floats as strings so that JSON stays lossless.
pub mod ext_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn encode(x: f64) -> serde_json::Value {
        if x.is_finite() {
            serde_json::json!(x)
        } else if x.is_nan() {
            serde_json::json!("nan")
        } else if x > 0.0 {
            serde_json::json!("inf")
        } else {
            serde_json::json!("-inf")
        }
    }

    pub fn decode(v: &serde_json::Value) -> Option<f64> {
        match v {
            serde_json::Value::Number(n) => n.as_f64(),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => Some(f64::INFINITY),
                "-inf" => Some(f64::NEG_INFINITY),
                "nan" => Some(f64::NAN),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        decode(&v).ok_or_else(|| de::Error::custom("expected number or inf/-inf/nan"))
    }
}

pub mod ext_map {
    use std::collections::BTreeMap;

    use serde::ser::SerializeMap;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &super::ext_f64::encode(*v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                super::ext_f64::decode(&v)
                    .map(|x| (k, x))
                    .ok_or_else(|| de::Error::custom("bad witness value"))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile_is_bounded() {
        let v = vec![1.0; 100];
        assert_eq!(bounded_trend(&v, &v, Scale::Relative), Verdict::HoldsTrend);
    }

    #[test]
    fn linear_profile_is_unbounded() {
        let v: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        assert_eq!(bounded_trend(&v, &v, Scale::Relative), Verdict::FailsTrend);
    }

    #[test]
    fn log_scale_matches_relative_scale() {
        let v: Vec<f64> = (1..=100).map(|k| 1.0 + 0.1 * (k as f64 / 100.0)).collect();
        let logs: Vec<f64> = v.iter().map(|x| x.ln()).collect();
        assert_eq!(
            bounded_trend(&v, &v, Scale::Relative),
            bounded_trend(&logs, &logs, Scale::Log)
        );
    }

    #[test]
    fn harmonic_decay_vanishes() {
        let v: Vec<f64> = (1..=100).map(|k| 1.0 / k as f64).collect();
        assert_eq!(vanishing_trend(&v, &v), Verdict::HoldsTrend);
        let c = vec![2.0; 100];
        assert_eq!(vanishing_trend(&c, &c), Verdict::FailsTrend);
    }

    #[test]
    fn report_round_trips_infinities() {
        let r = ConditionReport::new("x", Verdict::Inconclusive, 10)
            .witness("C", f64::INFINITY)
            .with_profile([(1.0, f64::NEG_INFINITY)]);
        let mut r = r;
        r.tail_bound = Some(Interval::new(1.0, f64::INFINITY));
        let back: ConditionReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.witnesses["C"], f64::INFINITY);
        assert_eq!(back.tail_bound.unwrap().upper, f64::INFINITY);
        assert_eq!(back.profile[0].value, f64::NEG_INFINITY);
    }
}
