//! Mixed growth conditions between two weight sequences and their matrix liftings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{kappa, poisson};
use crate::report::{bounded_trend, ConditionReport, Scale, Verdict};
use crate::sequences::{
    growth_index, quasianalytic_check, relation_check, witness_order, GrowthIndex, Param, Relation, WeightMatrix,
    WeightSequence, MIN_RELATION_K,
};
use crate::weights::{omega_assoc, PreWeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedKind {
    #[serde(rename = "SV")]
    Sv,
    Gamma1,
    L,
    StrongOmega1,
    #[serde(rename = "BMT_kappa")]
    BmtKappa,
}

impl MixedKind {
    pub fn name(self) -> &'static str {
        match self {
            MixedKind::Sv => "SV",
            MixedKind::Gamma1 => "gamma1",
            MixedKind::L => "L",
            MixedKind::StrongOmega1 => "strong_omega1",
            MixedKind::BmtKappa => "BMT_kappa",
        }
    }
}

impl std::str::FromStr for MixedKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sv" => MixedKind::Sv,
            "gamma1" | "γ1" => MixedKind::Gamma1,
            "l" => MixedKind::L,
            "strong_omega1" | "somega1" | "sw1" => MixedKind::StrongOmega1,
            "bmt_kappa" | "bmt" => MixedKind::BmtKappa,
            _ => return Err(Error::InvalidDescriptor(format!("unknown condition '{s}'"))),
        })
    }
}

/// Search ranges for a mixed condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedConditionSpec {
    pub kind: MixedKind,
    /// Candidate scalings `s` for SV.
    pub s_grid: Vec<f64>,
    /// Largest constant tried by the L search.
    pub c_max: f64,
    /// Log-grid `[lo, hi]` with `per_decade` points, used by L, sω₁ and BMT-κ.
    pub range: (f64, f64),
    pub per_decade: usize,
    pub tol: f64,
}

impl MixedConditionSpec {
    pub fn new(kind: MixedKind) -> Self {
        let range = match kind {
            MixedKind::BmtKappa => (10.0, 1e8),
            _ => (1.0, 1e8),
        };
        MixedConditionSpec {
            kind,
            s_grid: (0..=10).map(|i| f64::from(1u32 << i)).collect(),
            c_max: f64::from(1u32 << 20),
            range,
            per_decade: 4,
            tol: 1e-8,
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        if self.s_grid.is_empty() || !(lo > 0.0 && hi > lo && hi.is_finite()) || self.per_decade == 0 || !(self.c_max >= 1.0) {
            return Err(Error::InvalidDescriptor("empty or non-finite search range".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let n = ((hi / lo).log10() * self.per_decade as f64).round() as usize;
        (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
    }
}

fn check_len(m: &WeightSequence, n: &WeightSequence) -> Result<usize> {
    let k = m.len().min(n.len());
    if k < MIN_RELATION_K {
        return Err(Error::TruncationTooShort { got: k, need: MIN_RELATION_K });
    }
    Ok(k)
}

fn quasianalytic_n(kind: MixedKind, n: &WeightSequence, k: usize) -> Result<Option<ConditionReport>> {
    let q = quasianalytic_check(n)?;
    Ok((q.verdict == Verdict::FailsTrend).then(|| {
        ConditionReport::new(kind.name(), Verdict::FailsTrend, k)
            .note("QuasianalyticN: N is quasianalytic, the tail series diverges")
    }))
}

/// SV profile for a fixed `s`: `sup_{i<j} (M_j/(s^j N_i))^{1/(j-i)} · T_j / j`, `T_j = Σ_{k≥j} 1/ν_k`.
pub(crate) fn sv_profile(m: &WeightSequence, n: &WeightSequence, s: f64, k: usize) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = sv_log_profile(m, n, s, k);
    (lo.into_iter().map(f64::exp).collect(), hi.into_iter().map(f64::exp).collect())
}

/// Logarithms of the SV profile, so that rescalings far below `e^{-700}` stay representable.
pub(crate) fn sv_log_profile(m: &WeightSequence, n: &WeightSequence, s: f64, k: usize) -> (Vec<f64>, Vec<f64>) {
    let lm = m.log_values();
    let ln = n.log_values();
    let tails = n.inverse_tail_sums();
    let ls = s.ln();
    let mut lower = Vec::with_capacity(k);
    let mut upper = Vec::with_capacity(k);
    for j in 1..=k {
        let top = lm[j] - j as f64 * ls;
        let mut best = f64::NEG_INFINITY;
        for i in 0..j {
            best = best.max((top - ln[i]) / (j - i) as f64);
        }
        let t = tails[j - 1];
        let f = best - (j as f64).ln();
        lower.push(f + t.lower.ln());
        upper.push(f + t.upper.ln());
    }
    (lower, upper)
}

fn sv(spec: &MixedConditionSpec, m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = check_len(m, n)?;
    if let Some(r) = quasianalytic_n(MixedKind::Sv, n, k)? {
        return Ok(r);
    }
    let mut overall = Verdict::FailsTrend;
    let mut last = None;
    for &s in &spec.s_grid {
        let (lo, hi) = sv_profile(m, n, s, k);
        let v = bounded_trend(&lo, &hi, Scale::Relative);
        overall = overall.or(v);
        let sup = hi.iter().copied().fold(0.0, f64::max);
        let rep = ConditionReport::new("SV", v, k)
            .witness("s", s)
            .witness("C", sup)
            .with_profile(hi.iter().enumerate().map(|(j, x)| ((j + 1) as f64, *x)));
        if v.holds() {
            return Ok(rep.note(format!("first stabilizing s in {:?}", spec.s_grid)));
        }
        last = Some(rep);
    }
    let mut rep = last.unwrap();
    rep.verdict = overall;
    Ok(rep.note(format!("no s in {:?} gives a stabilized bounded profile; profile shown for the largest s", spec.s_grid)))
}

/// `sup_k (log M_k − log N_k)` bounded, i.e. `M ≤ C·N`.
pub fn leq_up_to_constant(m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = check_len(m, n)?;
    let diffs: Vec<f64> = (0..=k).map(|i| m.log_values()[i] - n.log_values()[i]).collect();
    let v = bounded_trend(&diffs, &diffs, Scale::Log);
    let sup = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ConditionReport::new("leq_const", v, k).witness("C", sup.exp()))
}

fn gamma1(m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = check_len(m, n)?;
    if let Some(r) = quasianalytic_n(MixedKind::Gamma1, n, k)? {
        return Ok(r);
    }
    let leq = leq_up_to_constant(m, n)?;
    if !leq.verdict.holds() {
        let mut r = ConditionReport::new("gamma1", Verdict::Inconclusive, k)
            .note("hypothesis M <= C N is not certified on the horizon; gamma1 is not offered");
        r.children.push(leq);
        return Ok(r);
    }
    let tails = n.inverse_tail_sums();
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    for j in 1..=k {
        let f = m.log_quotients()[j - 1].exp() / j as f64;
        lo.push(f * tails[j - 1].lower);
        hi.push(f * tails[j - 1].upper);
    }
    let v = bounded_trend(&lo, &hi, Scale::Relative);
    let mut r = ConditionReport::new("gamma1", v, k)
        .witness("C", hi.iter().copied().fold(0.0, f64::max))
        .with_profile(hi.iter().enumerate().map(|(j, x)| ((j + 1) as f64, *x)));
    r.children.push(leq);
    Ok(r)
}

/// Smallest `C ≥ 0` with `p ≤ ω_M(C s) + C`, or `None` above `c_max`.
fn minimal_c(m: &WeightSequence, s: f64, p: f64, c_max: f64) -> Result<Option<f64>> {
    let ok = |c: f64| -> Result<bool> { Ok(omega_assoc(m, c * s)? + c >= p) };
    if p <= 0.0 {
        return Ok(Some(0.0));
    }
    let mut hi = 1.0;
    while !ok(hi)? {
        hi *= 2.0;
        if hi > c_max {
            return Ok(None);
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    for _ in 0..60 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn l_condition(spec: &MixedConditionSpec, m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = check_len(m, n)?;
    if let Some(r) = quasianalytic_n(MixedKind::L, n, k)? {
        return Ok(r);
    }
    let wn = PreWeightFunction::from_sequence(n.clone());
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut prof = Vec::new();
    for s in spec.grid() {
        let p = poisson(&wn, Complex64::new(0.0, s), spec.tol)?;
        let c_hi = minimal_c(m, s, p.upper, spec.c_max)?.unwrap_or(f64::INFINITY);
        let c_lo = minimal_c(m, s, p.lower, spec.c_max)?.unwrap_or(f64::INFINITY);
        lo.push(c_lo);
        hi.push(c_hi);
        prof.push((s, c_hi));
    }
    let v = bounded_trend(&lo, &hi, Scale::Relative);
    let sup = hi.iter().copied().fold(0.0, f64::max);
    let mut r = ConditionReport::new("L", v, k).with_profile(prof).note(
        "profile: minimal C with P_N(is) <= omega_M(Cs) + C at each s; the constant acts inside omega_M",
    );
    if v.holds() {
        let c = if sup <= 1.0 { 1.0 } else { 2f64.powi(sup.log2().ceil() as i32) };
        r = r.witness("C", c.min(spec.c_max));
    } else {
        r = r.witness("C_sup", sup);
    }
    Ok(r)
}

/// Profile `ω_M(2t) − ω_N(t)` on the grid.
fn strong_omega1(spec: &MixedConditionSpec, m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = check_len(m, n)?;
    let mut d = Vec::new();
    for t in spec.grid() {
        d.push((t, omega_assoc(m, 2.0 * t)? - omega_assoc(n, t)?));
    }
    let vals: Vec<f64> = d.iter().map(|p| p.1).collect();
    let v = bounded_trend(&vals, &vals, Scale::Log);
    Ok(ConditionReport::new("strong_omega1", v, k)
        .witness("C", vals.iter().copied().fold(0.0, f64::max))
        .with_profile(d))
}

/// `κ_ω(r)/σ(r)` bounded.
pub fn bmt_kappa(spec: &MixedConditionSpec, sigma: &PreWeightFunction, omega: &PreWeightFunction) -> Result<ConditionReport> {
    spec.validate()?;
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut prof = Vec::new();
    for r in spec.grid() {
        let s = sigma.eval(r)?;
        let kap = match kappa(omega, r, spec.tol) {
            Ok(k) => k,
            Err(Error::QuasianalyticWeight) => {
                return Ok(ConditionReport::new("BMT_kappa", Verdict::FailsTrend, 0)
                    .note("omega is quasianalytic: kappa is infinite"))
            }
            Err(e) => return Err(e),
        };
        if s <= 0.0 {
            continue;
        }
        lo.push(kap.lower / s);
        hi.push(kap.upper / s);
        prof.push((r, kap.value / s));
    }
    let v = bounded_trend(&lo, &hi, Scale::Relative);
    Ok(ConditionReport::new("BMT_kappa", v, 0)
        .witness("C", hi.iter().copied().fold(0.0, f64::max))
        .with_profile(prof)
        .note(format!("sigma = {}, omega = {}", sigma.label(), omega.label())))
}

/// One mixed condition between `M` and `N`; BMT-κ uses `σ = ω_M`, `ω = ω_N`.
pub fn mixed_condition(spec: &MixedConditionSpec, m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    spec.validate()?;
    let r = match spec.kind {
        MixedKind::Sv => sv(spec, m, n)?,
        MixedKind::Gamma1 => gamma1(m, n)?,
        MixedKind::L => l_condition(spec, m, n)?,
        MixedKind::StrongOmega1 => strong_omega1(spec, m, n)?,
        MixedKind::BmtKappa => {
            check_len(m, n)?;
            let sigma = PreWeightFunction::from_sequence(m.clone());
            let omega = PreWeightFunction::from_sequence(n.clone());
            bmt_kappa(spec, &sigma, &omega)?
        }
    };
    Ok(r.note(format!("M = {}, N = {}", m.label(), n.label())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    /// Beurling form `∀y ∃x`.
    ForallYExistsX,
    /// Roumieu form `∀x ∃y`.
    ForallXExistsY,
}

/// Row-quantified mixed condition between two matrices.
pub fn matrix_mixed_condition(
    spec: &MixedConditionSpec,
    mm: &WeightMatrix,
    nn: &WeightMatrix,
    quantifier: Quantifier,
) -> Result<ConditionReport> {
    if mm.is_empty() || nn.is_empty() {
        return Err(Error::InsufficientRows { got: mm.len().min(nn.len()), need: 1 });
    }
    let (univ, exist) = match quantifier {
        Quantifier::ForallYExistsX => (nn, mm),
        Quantifier::ForallXExistsY => (mm, nn),
    };
    let xs: Vec<Param> = exist.rows().iter().map(|r| r.x).collect();
    let (uname, ename) = match quantifier {
        Quantifier::ForallYExistsX => ("y", "x"),
        Quantifier::ForallXExistsY => ("x", "y"),
    };
    let mut verdict = Verdict::HoldsTrend;
    let mut report = ConditionReport::new(spec.kind.name(), Verdict::HoldsTrend, mm.horizon().min(nn.horizon()));
    for u in univ.rows() {
        let mut row = Verdict::FailsTrend;
        let mut found = None;
        for i in witness_order(&xs, u.x) {
            let e = &exist.rows()[i].seq;
            let (m, n) = match quantifier {
                Quantifier::ForallYExistsX => (e, &u.seq),
                Quantifier::ForallXExistsY => (&u.seq, e),
            };
            let c = mixed_condition(spec, m, n)?;
            row = row.or(c.verdict);
            if c.verdict.holds() {
                found = Some((xs[i], c));
                break;
            }
            if c.notes.iter().any(|n| n.starts_with("QuasianalyticN")) {
                report.notes.push(format!("row {uname} = {}: QuasianalyticN", u.x));
            }
        }
        match found {
            Some((x, c)) => {
                report.witnesses.insert(format!("{ename}({uname}={})", u.x), x.value());
                for (name, v) in &c.witnesses {
                    report.witnesses.insert(format!("{name}({uname}={})", u.x), *v);
                }
                report.children.push(c);
            }
            None => report.notes.push(format!("no witness for {uname} = {}: {row}", u.x)),
        }
        verdict = verdict.and(row);
    }
    report.verdict = verdict;
    report.notes.push(format!(
        "quantifier {quantifier:?}; universal rows [{}], existential rows [{}]; only this ladder of parameters is searched",
        univ.row_set(),
        exist.row_set()
    ));
    Ok(report)
}

/// Runs SV, γ₁, L, BMT-κ and ≼ on one pair and checks the implications between their verdicts.
pub fn implication_consistency(m: &WeightSequence, n: &WeightSequence) -> Result<ConditionReport> {
    let k = check_len(m, n)?;
    let run = |kind| mixed_condition(&MixedConditionSpec::new(kind), m, n);
    let sv = run(MixedKind::Sv)?;
    let g1 = run(MixedKind::Gamma1)?;
    let l = run(MixedKind::L)?;
    let bmt = run(MixedKind::BmtKappa)?;
    let pre = relation_check(Relation::Preceq, m, n)?;
    let mg = growth_index(GrowthIndex::Mg, m, m)?;
    let leq = leq_up_to_constant(m, n)?;

    let decisive = |v: Verdict| v != Verdict::Inconclusive;
    let mut findings = Vec::new();
    if sv.verdict.holds() && pre.verdict == Verdict::FailsTrend {
        findings.push("SV holds but preceq fails".to_string());
    }
    if decisive(sv.verdict) && decisive(l.verdict) && sv.verdict != l.verdict {
        findings.push(format!("SV is {} but L is {}", sv.verdict, l.verdict));
    }
    if mg.verdict.holds() && leq.verdict.holds() && decisive(g1.verdict) && decisive(sv.verdict) && g1.verdict != sv.verdict {
        findings.push(format!("gamma1 is {} but SV is {}", g1.verdict, sv.verdict));
    }
    let verdict = if findings.is_empty() { Verdict::HoldsTrend } else { Verdict::FailsTrend };
    let mut r = ConditionReport::new("implication_consistency", verdict, k)
        .note(format!("M = {}, N = {}", m.label(), n.label()));
    for (name, v) in [("SV", sv.verdict), ("gamma1", g1.verdict), ("L", l.verdict), ("BMT_kappa", bmt.verdict), ("preceq", pre.verdict)] {
        r.notes.push(format!("{name}: {v}"));
    }
    r.notes.extend(findings.into_iter().map(|f| format!("finding: {f}")));
    r.children = vec![sv, g1, l, bmt, pre];
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: f64) -> WeightSequence {
        WeightSequence::gevrey(s, 2000).unwrap()
    }

    fn check(kind: MixedKind, s: f64, t: f64) -> Verdict {
        mixed_condition(&MixedConditionSpec::new(kind), &g(s), &g(t)).unwrap().verdict
    }

    #[test]
    fn sv_gevrey() {
        assert_eq!(check(MixedKind::Sv, 1.0, 2.0), Verdict::HoldsTrend);
        assert_eq!(check(MixedKind::Sv, 2.0, 1.5), Verdict::FailsTrend);
    }

    #[test]
    fn sv_quasianalytic_target() {
        let r = mixed_condition(&MixedConditionSpec::new(MixedKind::Sv), &g(1.0), &g(1.0)).unwrap();
        assert_eq!(r.verdict, Verdict::FailsTrend);
        assert!(r.notes[0].starts_with("QuasianalyticN"));
    }

    #[test]
    fn gamma1_profile_tends_to_one() {
        let r = mixed_condition(&MixedConditionSpec::new(MixedKind::Gamma1), &g(2.0), &g(2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend);
        let last = r.profile.last().unwrap().value;
        assert!((last - 1.0).abs() < 0.01, "{last}");
    }

    #[test]
    fn gamma1_needs_leq() {
        assert_eq!(check(MixedKind::Gamma1, 2.0, 1.5), Verdict::Inconclusive);
    }

    #[test]
    fn l_condition_gevrey() {
        let r = mixed_condition(&MixedConditionSpec::new(MixedKind::L), &g(2.0), &g(2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend);
        let c = r.witnesses["C"];
        let wn = PreWeightFunction::from_sequence(g(2.0));
        for i in 0..=16 {
            let s = 10f64.powf(i as f64 / 4.0);
            let p = poisson(&wn, Complex64::new(0.0, s), 1e-8).unwrap();
            assert!(p.value <= omega_assoc(&g(2.0), c * s).unwrap() + c);
        }
        assert_eq!(check(MixedKind::L, 3.0, 1.5), Verdict::FailsTrend);
    }

    #[test]
    fn bmt_gevrey() {
        assert_eq!(check(MixedKind::BmtKappa, 1.5, 2.0), Verdict::HoldsTrend);
        assert_eq!(check(MixedKind::BmtKappa, 3.0, 1.5), Verdict::FailsTrend);
    }

    #[test]
    fn consistency_on_gevrey_pair() {
        let r = implication_consistency(&g(1.5), &g(2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend, "{:?}", r.notes);
    }
}
