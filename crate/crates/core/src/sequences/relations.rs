use crate::error::{Error, Result};
use crate::report::{bounded_trend, vanishing_trend, ConditionReport, Interval, Scale, Verdict};

use super::WeightSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `M_k ≤ N_k` for all k.
    Leq,
    /// `sup (M_k/N_k)^{1/k} < ∞`.
    Preceq,
    /// `(M_k/N_k)^{1/k} → 0`.
    Triangle,
    /// `≼` both ways.
    Equivalent,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Leq => "leq",
            Relation::Preceq => "preceq",
            Relation::Triangle => "triangle",
            Relation::Equivalent => "equivalent",
        }
    }
}

pub const MIN_RELATION_K: usize = 32;

/// `log (M_k/N_k)^{1/k}` for `k = 1..=K`.
pub(crate) fn root_log_ratio(m: &WeightSequence, n: &WeightSequence, k: usize) -> Vec<f64> {
    (1..=k).map(|i| (m.log_values()[i] - n.log_values()[i]) / i as f64).collect()
}

fn preceq_report(m: &WeightSequence, n: &WeightSequence, k: usize) -> ConditionReport {
    let profile = root_log_ratio(m, n, k);
    let verdict = bounded_trend(&profile, &profile, Scale::Log);
    let sup = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ConditionReport::new("preceq", verdict, k)
        .witness("C", sup.exp())
        .with_profile(profile.iter().enumerate().map(|(i, v)| ((i + 1) as f64, v.exp())))
}

/// Compare two sequences on their common horizon.
pub fn relation_check(kind: Relation, m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = m.len().min(n.len());
    if k < MIN_RELATION_K {
        return Err(Error::TruncationTooShort { got: k, need: MIN_RELATION_K });
    }
    let report = match kind {
        Relation::Leq => {
            let diffs: Vec<f64> = (0..=k).map(|i| m.log_values()[i] - n.log_values()[i]).collect();
            let worst = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-12 * m.log_values()[k].abs().max(1.0);
            let verdict = if worst <= slack { Verdict::HoldsTrend } else { Verdict::FailsTrend };
            ConditionReport::new("leq", verdict, k)
                .witness("max_log_ratio", worst)
                .with_profile(diffs.iter().enumerate().map(|(i, d)| (i as f64, d.exp())))
        }
        Relation::Preceq => preceq_report(m, n, k),
        Relation::Triangle => {
            let profile: Vec<f64> = root_log_ratio(m, n, k).iter().map(|v| v.exp()).collect();
            let verdict = vanishing_trend(&profile, &profile);
            ConditionReport::new("triangle", verdict, k)
                .witness("final", profile[k - 1])
                .with_profile(profile.iter().enumerate().map(|(i, v)| ((i + 1) as f64, *v)))
        }
        Relation::Equivalent => {
            let a = preceq_report(m, n, k);
            let b = preceq_report(n, m, k);
            let c = a.witnesses["C"].max(b.witnesses["C"]);
            ConditionReport {
                children: vec![a.clone(), b.clone()],
                ..ConditionReport::new("equivalent", a.verdict.and(b.verdict), k).witness("C", c)
            }
        }
    };
    Ok(report.note(format!("M = {}, N = {}", m.label(), n.label())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthIndex {
    /// `mg(M,N) = sup_{j+k≥1} (M_{j+k}/(N_j N_k))^{1/(j+k)}`.
    Mg,
    /// `dc(M,N) = sup_j (M_{j+1}/N_j)^{1/(j+1)}`.
    Dc,
}

/// Truncated mixed growth index with its argmax and a stabilization verdict.
pub fn growth_index(kind: GrowthIndex, m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = m.len().min(n.len());
    if k < 8 {
        return Err(Error::TruncationTooShort { got: k, need: 8 });
    }
    let lm = m.log_values();
    let ln = n.log_values();
    // profile[s-1] = best value over pairs with j + k = s (mg) or index j = s-1 (dc)
    let mut profile = Vec::with_capacity(k);
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    match kind {
        GrowthIndex::Mg => {
            for s in 1..=k {
                let mut row = (f64::NEG_INFINITY, 0);
                for j in 0..=s / 2 {
                    let v = (lm[s] - ln[j] - ln[s - j]) / s as f64;
                    if v > row.0 {
                        row = (v, j);
                    }
                }
                if row.0 > best.0 {
                    best = (row.0, row.1, s - row.1);
                }
                profile.push(row.0);
            }
        }
        GrowthIndex::Dc => {
            for j in 0..k {
                let v = (lm[j + 1] - ln[j]) / (j + 1) as f64;
                if v > best.0 {
                    best = (v, j, 0);
                }
                profile.push(v);
            }
        }
    }
    let verdict = bounded_trend(&profile, &profile, Scale::Log);
    let name = match kind {
        GrowthIndex::Mg => "mg",
        GrowthIndex::Dc => "dc",
    };
    let mut report = ConditionReport::new(name, verdict, k)
        .witness("value", best.0.exp())
        .witness("argmax_j", best.1 as f64)
        .with_profile(profile.iter().enumerate().map(|(i, v)| (i as f64 + if kind == GrowthIndex::Mg { 1.0 } else { 0.0 }, v.exp())));
    if kind == GrowthIndex::Mg {
        report = report.witness("argmax_k", best.2 as f64);
    }
    Ok(report.note(format!("M = {}, N = {}", m.label(), n.label())))
}

/// Non-quasianalyticity `Σ 1/μ_k < ∞` from partial sums and the tail model.
pub fn quasianalytic_check(m: &WeightSequence) -> Result<ConditionReport> {
    let k = m.len();
    if k < MIN_RELATION_K {
        return Err(Error::TruncationTooShort { got: k, need: MIN_RELATION_K });
    }
    let total = m.inverse_tail_sum(1);
    let partial: f64 = m.log_quotients().iter().map(|l| (-l).exp()).sum();
    let step = (k / 256).max(1);
    let mut acc = 0.0;
    let mut profile = Vec::new();
    for (i, l) in m.log_quotients().iter().enumerate() {
        acc += (-l).exp();
        if (i + 1) % step == 0 || i + 1 == k {
            profile.push(((i + 1) as f64, acc));
        }
    }
    let (verdict, why) = match m.tail() {
        None => (Verdict::Inconclusive, "no tail model: the series tail is undetermined".to_string()),
        Some(t) if t.exponent <= 1.0 => {
            (Verdict::FailsTrend, format!("tail exponent {} <= 1: series diverges", t.exponent))
        }
        Some(t) => (Verdict::HoldsTrend, format!("power-law tail exponent {} > 1", t.exponent)),
    };
    let mut report = ConditionReport::new("nonquasianalytic", verdict, k)
        .witness("partial_sum", partial)
        .witness("sum", total.mid())
        .with_profile(profile)
        .note(why);
    report.tail_bound = Some(Interval::new(total.lower, total.upper));
    Ok(report)
}
