use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent `q` in the cap `r_j = β'_j^{-q}`; any `q ∈ (0, 1)` gives `θ_j β_j → 0`.
pub const THETA_CAP_EXPONENT: f64 = 0.75;
/// Tail constant the lemma promises.
pub const TAIL_CONSTANT: f64 = 8.0;
/// Required growth `θ_K/θ_1` standing in for `θ → ∞`.
pub const DIVERGENCE_PROXY: f64 = 100.0;

/// Measured quantities behind the invariants of a θ-sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaDiagnostics {
    /// `max_j Σ_{k≥j} θ_k α_k / (θ_j Σ_{k≥j} α_k)` over `j` with a nonzero tail.
    pub tail_ratio: f64,
    pub theta_beta_first_quarter: f64,
    pub theta_beta_last_quarter: f64,
    pub divergence: f64,
    pub nondecreasing: bool,
    pub theta_gamma_nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaResult {
    /// `θ_1..θ_K`.
    pub theta: Vec<f64>,
    pub diagnostics: ThetaDiagnostics,
}

impl ThetaResult {
    /// `θ_j` with the convention `θ_0 = 1`.
    pub fn at(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else {
            self.theta[j - 1]
        }
    }
}

fn quarter_sup(v: &[f64], first: bool) -> f64 {
    let q = (v.len() / 4).max(1);
    let part = if first { &v[..q] } else { &v[v.len() - q..] };
    part.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Measure the invariants of a given `θ` against `(α, β, γ)`, all indexed from 1.
pub fn theta_diagnostics(theta: &[f64], alpha: &[f64], beta: &[f64], gamma: &[f64]) -> ThetaDiagnostics {
    let k = theta.len();
    let mut tail_ratio: f64 = 0.0;
    let (mut s, mut st) = (0.0, 0.0);
    for j in (0..k).rev() {
        s += alpha[j];
        st += theta[j] * alpha[j];
        if s > 0.0 {
            tail_ratio = tail_ratio.max(st / (theta[j] * s));
        }
    }
    let tb: Vec<f64> = theta.iter().zip(beta).map(|(t, b)| t * b).collect();
    let rel = |a: f64, b: f64| a <= b * (1.0 + 1e-12);
    ThetaDiagnostics {
        tail_ratio,
        theta_beta_first_quarter: quarter_sup(&tb, true),
        theta_beta_last_quarter: quarter_sup(&tb, false),
        divergence: theta[k - 1] / theta[0],
        nondecreasing: theta.windows(2).all(|w| rel(w[0], w[1])),
        theta_gamma_nonincreasing: (1..k).all(|j| rel(theta[j] * gamma[j], theta[j - 1] * gamma[j - 1])),
    }
}

/// First invariant of the θ-lemma that the diagnostics violate, if any.
pub fn theta_violation(d: &ThetaDiagnostics) -> Option<&'static str> {
    if !d.nondecreasing {
        Some("theta nondecreasing")
    } else if !d.theta_gamma_nonincreasing {
        Some("theta*gamma nonincreasing")
    } else if !(d.theta_beta_last_quarter < 0.5 * d.theta_beta_first_quarter) {
        Some("theta*beta -> 0")
    } else if d.tail_ratio > TAIL_CONSTANT * (1.0 + 1e-12) {
        Some("tail constant 8")
    } else if !(d.divergence >= DIVERGENCE_PROXY) {
        Some("divergence")
    } else {
        None
    }
}

/// Ratio-capped greedy for the θ-lemma, without the final invariant check.
///
/// `θ_j = min(r_j, θ_{j-1} · min(γ_{j-1}/γ_j, √(S_{j-1}/S_j)))` with `S_j = Σ_{k≥j} α_k`,
/// `r_j = min(β'_j^{-q}, g_j)`, `β'_j = sup_{k≥j} β_k` and `g` following the ratios of `γ`.
/// The `√S` cap telescopes to a tail constant of at most 2.
pub fn theta_greedy(alpha: &[f64], beta: &[f64], gamma: &[f64]) -> Result<ThetaResult> {
    let k = alpha.len();
    if k < 8 || beta.len() != k || gamma.len() != k {
        return Err(Error::InvalidDescriptor("theta inputs need equal lengths >= 8".into()));
    }
    if alpha.iter().any(|a| !(*a >= 0.0)) || beta.iter().chain(gamma).any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidDescriptor("alpha must be nonnegative, beta and gamma positive".into()));
    }
    let mut s = vec![0.0; k + 1];
    for j in (0..k).rev() {
        s[j] = s[j + 1] + alpha[j];
    }
    let mut beta_sup = beta.to_vec();
    for j in (0..k - 1).rev() {
        beta_sup[j] = beta_sup[j].max(beta_sup[j + 1]);
    }
    let q = THETA_CAP_EXPONENT;
    let mut theta = Vec::with_capacity(k);
    let mut g = beta_sup[0].powf(-q);
    theta.push(g.min(1.0));
    for j in 1..k {
        let gr = (gamma[j - 1] / gamma[j]).max(1.0);
        g *= gr;
        let r = beta_sup[j].powf(-q).min(g);
        let rho = if s[j] > 0.0 { (s[j - 1] / s[j]).sqrt() } else { f64::INFINITY };
        let prev = theta[j - 1];
        theta.push(r.min(prev * gr.min(rho)).max(prev));
    }
    let diagnostics = theta_diagnostics(&theta, alpha, beta, gamma);
    Ok(ThetaResult { theta, diagnostics })
}

/// [`theta_greedy`] followed by the invariant check; a violation carries the diagnostics.
pub fn theta_builder(alpha: &[f64], beta: &[f64], gamma: &[f64]) -> Result<ThetaResult> {
    let r = theta_greedy(alpha, beta, gamma)?;
    match theta_violation(&r.diagnostics) {
        Some(what) => Err(Error::PropertyViolation { invariant: what.into(), diagnostics: Box::new(r.diagnostics) }),
        None => Ok(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(k: usize) -> Vec<f64> {
        (1..=k).map(|j| 1.0 / j as f64).collect()
    }

    #[test]
    fn degenerate_alpha() {
        let k = 4096;
        let r = theta_builder(&vec![0.0; k], &inv(k), &inv(k)).unwrap();
        assert_eq!(r.diagnostics.tail_ratio, 0.0);
        assert!(r.diagnostics.theta_gamma_nonincreasing);
    }

    #[test]
    fn geometric_alpha() {
        let k = 4096;
        let alpha: Vec<f64> = (1..=k).map(|j| 0.5f64.powi(j as i32)).collect();
        let r = theta_builder(&alpha, &inv(k), &inv(k)).unwrap();
        assert!(r.diagnostics.tail_ratio <= 2.1, "{:?}", r.diagnostics);
    }

    #[test]
    fn flat_beta_cannot_diverge() {
        let k = 256;
        let err = theta_builder(&vec![0.0; k], &vec![1.0; k], &inv(k)).unwrap_err();
        assert!(matches!(err, Error::PropertyViolation { .. }));
    }
}
