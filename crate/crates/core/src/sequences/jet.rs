use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{bounded_trend, Scale, Verdict};
use crate::weights::PreWeightFunction;

use super::WeightSequence;

/// Truncated complex sequence `λ_0 .. λ_K`, stored as `log|λ_k|` and `arg λ_k`
/// so that factorial-type growth does not overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    label: String,
    log_abs: Vec<f64>,
    arg: Vec<f64>,
}

impl Jet {
    pub fn from_complex(label: impl Into<String>, values: &[Complex64]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidDescriptor(format!("non-finite jet entry at {i}")));
        }
        Ok(Jet {
            label: label.into(),
            log_abs: values.iter().map(|v| v.norm().ln()).collect(),
            arg: values.iter().map(|v| v.arg()).collect(),
        })
    }

    /// Nonnegative real jet given by `log λ_k` (`-inf` for zeros).
    pub fn from_log_abs(label: impl Into<String>, log_abs: Vec<f64>) -> Result<Self> {
        if log_abs.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidDescriptor("jet log-moduli must be finite or -inf".into()));
        }
        let arg = vec![0.0; log_abs.len()];
        Ok(Jet { label: label.into(), log_abs, arg })
    }

    /// Unit vector `e_n` of length `K + 1`.
    pub fn unit(n: usize, k: usize) -> Self {
        let log_abs = (0..=k).map(|i| if i == n { 0.0 } else { f64::NEG_INFINITY }).collect();
        Jet { label: format!("e_{n}"), log_abs, arg: vec![0.0; k + 1] }
    }

    /// `λ_k = (k!)^a`.
    pub fn factorial_power(a: f64, k: usize) -> Self {
        let log_abs = (0..=k).map(|i| a * libm::lgamma(i as f64 + 1.0)).collect();
        Jet { label: format!("k!^{a}"), log_abs, arg: vec![0.0; k + 1] }
    }

    /// `λ_k = M_k`.
    pub fn from_sequence(m: &WeightSequence) -> Self {
        Jet { label: format!("jet[{}]", m.label()), log_abs: m.log_values().to_vec(), arg: vec![0.0; m.len() + 1] }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Truncation `K` (entries `0..=K`).
    pub fn len(&self) -> usize {
        self.log_abs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.log_abs.len() <= 1
    }

    pub fn log_abs(&self) -> &[f64] {
        &self.log_abs
    }

    pub fn value(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.log_abs[k].exp(), self.arg[k])
    }
}

/// Serialized jet descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(rename = "K")]
    pub k: usize,
}

pub fn make_jet(spec: &JetSpec) -> Result<Jet> {
    let num = |name: &str| {
        spec.params
            .get(name)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::InvalidDescriptor(format!("jet parameter '{name}' missing")))
    };
    let list = |name: &str| -> Result<Vec<f64>> {
        spec.params
            .get(name)
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::InvalidDescriptor(format!("jet parameter '{name}' missing")))?
            .iter()
            .map(|v| {
                crate::report::ext_f64::decode(v)
                    .ok_or_else(|| Error::InvalidDescriptor(format!("bad entry in '{name}'")))
            })
            .collect()
    };
    let mut jet = match spec.kind.as_str() {
        "factorial_power" => Jet::factorial_power(num("a")?, spec.k),
        "unit" => Jet::unit(num("index")? as usize, spec.k),
        "log_abs" => {
            let mut v = list("log_abs")?;
            v.resize(spec.k + 1, f64::NEG_INFINITY);
            Jet::from_log_abs("log_abs", v)?
        }
        "values" => {
            let re = list("re")?;
            let im = list("im").unwrap_or_else(|_| vec![0.0; re.len()]);
            let mut vals: Vec<Complex64> = re.iter().zip(im.iter().chain(std::iter::repeat(&0.0))).map(|(a, b)| Complex64::new(*a, *b)).collect();
            vals.resize(spec.k + 1, Complex64::new(0.0, 0.0));
            Jet::from_complex("values", &vals)?
        }
        other => return Err(Error::InvalidDescriptor(format!("unknown jet kind '{other}'"))),
    };
    if let Some(l) = &spec.label {
        jet.label = l.clone();
    }
    Ok(jet)
}

/// Weight against which a jet is normed.
#[derive(Debug, Clone, Copy)]
pub enum JetWeight<'a> {
    /// `|λ_k| / (r^k M_k)`.
    Sequence(&'a WeightSequence),
    /// `|λ_k| / exp(φ*_ω(r k)/r)`.
    Function(&'a PreWeightFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JetNorm {
    /// Truncated supremum, `+inf` when the profile grows without stabilizing.
    pub value: f64,
    pub trend: Verdict,
    /// `log` of the normed terms, `k = 0..=K`.
    pub log_profile: Vec<f64>,
}

/// Weighted sup-norm of a jet on the common horizon.
pub fn jet_norm(lambda: &Jet, weight: JetWeight<'_>, r: f64) -> Result<JetNorm> {
    if !(r > 0.0) {
        return Err(Error::InvalidDescriptor(format!("radius must be positive, got {r}")));
    }
    let profile: Vec<f64> = match weight {
        JetWeight::Sequence(m) => {
            let k = lambda.len().min(m.len());
            (0..=k).map(|i| lambda.log_abs[i] - i as f64 * r.ln() - m.log_values()[i]).collect()
        }
        JetWeight::Function(w) => {
            let mut out = Vec::with_capacity(lambda.len() + 1);
            for i in 0..=lambda.len() {
                out.push(lambda.log_abs[i] - crate::weights::young_conjugate(w, r * i as f64)? / r);
            }
            out
        }
    };
    let trend = bounded_trend(&profile, &profile, Scale::Log);
    let sup = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let value = if trend == Verdict::FailsTrend { f64::INFINITY } else { sup.exp() };
    Ok(JetNorm { value, trend, log_profile: profile })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_jet_norm() {
        let m = WeightSequence::gevrey(1.0, 64).unwrap();
        let n = jet_norm(&Jet::unit(3, 64), JetWeight::Sequence(&m), 1.0).unwrap();
        assert!((n.value - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn slower_jet_is_finite() {
        let m = WeightSequence::gevrey(2.0, 1000).unwrap();
        for r in [0.01, 0.5, 1.0] {
            let n = jet_norm(&Jet::factorial_power(1.0, 1000), JetWeight::Sequence(&m), r).unwrap();
            assert!(n.value.is_finite(), "r = {r}");
        }
    }

    #[test]
    fn faster_jet_is_infinite() {
        let m = WeightSequence::gevrey(1.0, 500).unwrap();
        let n = jet_norm(&Jet::factorial_power(2.0, 500), JetWeight::Sequence(&m), 2.0).unwrap();
        assert_eq!(n.value, f64::INFINITY);
    }
}
