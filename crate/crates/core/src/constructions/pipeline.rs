use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{matrix_mixed_condition, mixed_condition, sv_log_profile, MixedConditionSpec, MixedKind, Quantifier};
use crate::report::{divergent_trend, vanishing_trend, ConditionReport, Scale, Verdict};
use crate::sequences::{jet_norm, ml_equivalent_matrix, Jet, JetWeight, Param, Sandwich, Tail, WeightMatrix, WeightSequence};

use super::theta::{theta_builder, theta_greedy, theta_violation, ThetaResult};

/// What to do when an interlacing index of Steps II–IV does not exist within `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonPolicy {
    /// Fail with `SelectionStalls` / `HorizonExceeded`.
    Strict,
    /// Keep the current level up to `K` and record the stall.
    #[default]
    Truncate,
}

fn slack(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

fn clamp_row(rows: &[WeightSequence], alpha: usize) -> &WeightSequence {
    &rows[alpha.clamp(1, rows.len()) - 1]
}

fn ladder_rows(mm: &WeightMatrix) -> Result<Vec<WeightSequence>> {
    (1..=mm.len() as u64)
        .map(|k| {
            mm.ladder_row(k)
                .cloned()
                .ok_or_else(|| Error::InvalidDescriptor(format!("{} must have rows x = 1/k, k = 1..{}", mm.label(), mm.len())))
        })
        .collect()
}

/// Output of Step I: `M'^{(1/k)}_j = r_k^j M^{(x(1/k))}_j` and the equivalent `N'`.
#[derive(Debug, Clone, Serialize)]
pub struct Step1 {
    #[serde(skip)]
    pub m_rows: Vec<WeightSequence>,
    #[serde(skip)]
    pub n_rows: Vec<WeightSequence>,
    /// `x(1/k)` after enforcing monotonicity and `x(y) ≤ y`.
    pub witnesses: Vec<String>,
    /// `log r(1/k)`.
    pub log_r: Vec<f64>,
    pub sandwiches: Vec<Sandwich>,
    /// First `j₀` with `N'^{(1/α)}_j ≥ 2^j N'^{(1/(α+1))}_j` for all `j₀ ≤ j ≤ K`.
    pub liminf_onset: Vec<Option<usize>>,
    /// `max_j` of the SV profile with `s = 1` for each rescaled pair.
    pub sv_bound: Vec<f64>,
}

fn witness_for(report: &ConditionReport, mm: &WeightMatrix, k: u64) -> Result<Param> {
    let key = format!("x(y={})", Param::inv(k));
    let v = report.witnesses.get(&key).copied().ok_or(Error::WitnessMissing { row: format!("1/{k}") })?;
    mm.rows()
        .iter()
        .map(|r| r.x)
        .find(|x| (x.value() - v).abs() <= 1e-12 * v)
        .ok_or(Error::WitnessMissing { row: format!("1/{k}") })
}

/// Step I: reindex `𝔐` by the SV witnesses, rescale by `r(1/k)^j` so that SV holds with
/// `C = s = 1` and `M' ≤ N'`, and replace `𝔑` by its equivalent matrix.
///
/// `r(1/k) = min(2^{-k}, 1/Q_k, inf_j (N'_j/M_j)^{1/j})`, made monotone, where `Q_k` is the
/// SV supremum with `s = 1`; shrinking `r` by `c ≤ 1` shrinks the SV quantity by at least `c`.
pub fn step1_normalize(mm: &WeightMatrix, nn: &WeightMatrix, sv_witnesses: &ConditionReport) -> Result<Step1> {
    let n = nn.len();
    let (n_ml, sandwiches) = ml_equivalent_matrix(nn)?;
    let n_rows = ladder_rows(&n_ml)?;
    let mut xs: Vec<Param> = Vec::with_capacity(n);
    for k in 1..=n as u64 {
        let x = witness_for(sv_witnesses, mm, k)?.min(Param::inv(k));
        let x = match xs.last() {
            Some(prev) => x.min(*prev),
            None => x,
        };
        let x = mm.rows().iter().map(|r| r.x).rfind(|r| *r <= x).ok_or(Error::WitnessMissing { row: format!("1/{k}") })?;
        xs.push(x);
    }
    let mut m_rows = Vec::with_capacity(n);
    let mut log_r = Vec::with_capacity(n);
    let mut sv_bound = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let k = i + 1;
        let m = mm.row(x).unwrap();
        let np = &n_rows[i];
        let big_k = m.len().min(np.len());
        let (_, hi) = sv_log_profile(m, np, 1.0, big_k);
        let log_q = hi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let fit = (1..=big_k).map(|j| (np.log_values()[j] - m.log_values()[j]) / j as f64).fold(f64::INFINITY, f64::min);
        let mut lr = (-(k as f64) * LN_2).min(fit).min(-log_q);
        if let Some(prev) = log_r.last() {
            lr = lr.min(*prev);
        }
        log_r.push(lr);
        let lmu: Vec<f64> = m.log_quotients()[..big_k].iter().map(|l| l + lr).collect();
        let row = WeightSequence::from_log_quotients(format!("r^j*{}", m.label()), lmu, Tail::None)?
            .with_tail_model(m.tail().map(|t| t.shifted(lr)));
        let (_, after) = sv_log_profile(&row, np, 1.0, big_k);
        let bound = after.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
        if bound > 1.0 + 1e-9 {
            return Err(Error::VerificationFailed(format!("step I (b) for y = 1/{k}: SV bound {bound}")));
        }
        if let Some(j) = (0..=big_k).find(|&j| row.log_values()[j] > np.log_values()[j] + slack(np.log_values()[j])) {
            return Err(Error::VerificationFailed(format!("step I (c) for y = 1/{k} at j = {j}")));
        }
        sv_bound.push(bound);
        m_rows.push(row);
    }
    let liminf_onset = (1..n)
        .map(|a| {
            let (hi, lo) = (&n_rows[a - 1], &n_rows[a]);
            let big_k = hi.len().min(lo.len());
            let bad = (1..=big_k).rev().find(|&j| hi.log_values()[j] - lo.log_values()[j] < j as f64 * LN_2 - slack(hi.log_values()[j]));
            match bad {
                None => Some(1),
                Some(j) if j < big_k => Some(j + 1),
                Some(_) => None,
            }
        })
        .collect();
    Ok(Step1 { m_rows, n_rows, witnesses: xs.iter().map(|x| x.to_string()).collect(), log_r, sandwiches, liminf_onset, sv_bound })
}

/// Output of Step II.
#[derive(Debug, Clone, Serialize)]
pub struct Step2 {
    /// `ε_1..ε_K`.
    pub eps: Vec<f64>,
    pub a: Vec<usize>,
    pub a_prime: Vec<usize>,
    /// Level `α` governing index `j` (position `j-1`).
    #[serde(skip)]
    pub level: Vec<usize>,
    pub notes: Vec<String>,
}

/// `ε^{(α)}_j = sup_{k ≥ j} (|λ_k| / M_k)^{1/k}` over the horizon, `j = 1..=K`.
fn eps_envelope(lambda: &Jet, m: &WeightSequence, big_k: usize) -> Vec<f64> {
    let mut out = vec![0.0; big_k];
    let mut run = f64::NEG_INFINITY;
    for k in (1..=big_k).rev() {
        run = run.max((lambda.log_abs()[k] - m.log_values()[k]) / k as f64);
        out[k - 1] = run.exp();
    }
    out
}

/// Step II: the decreasing envelope `ε` with `|λ_j| ≤ ε_1⋯ε_j M^{(1/(α+1))}_j` on `[a_α, a_{α+1})`.
pub fn step2_jet_envelope(lambda: &Jet, mm: &WeightMatrix, m_rows: &[WeightSequence], policy: HorizonPolicy) -> Result<Step2> {
    for r in mm.rows() {
        let probe = jet_norm(lambda, JetWeight::Sequence(&r.seq), 0.5)?;
        // a peak inside the horizon means the norm is finite even if the window rule flags growth
        let p = &probe.log_profile;
        let rising = p.len() >= 2 && p[p.len() - 1] > p[p.len() - 2];
        if probe.trend == Verdict::FailsTrend && rising {
            return Err(Error::JetNotInClass(format!("norm at r = 1/2, x = {} diverges", r.x)));
        }
    }
    let big_k = lambda.len().min(m_rows[0].len());
    let n = m_rows.len();
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut level_eps = |alpha: usize| -> Vec<f64> {
        let idx = (alpha + 1).min(n) - 1;
        cache[idx].get_or_insert_with(|| eps_envelope(lambda, &m_rows[idx], big_k)).clone()
    };
    let mut eps = vec![0.0; big_k];
    let mut level = vec![1; big_k];
    let mut a = vec![1usize];
    let mut a_prime = Vec::new();
    let mut notes = Vec::new();
    let mut alpha = 1;
    loop {
        let e = level_eps(alpha);
        let start = a[alpha - 1];
        let fill = |eps: &mut Vec<f64>, level: &mut Vec<usize>, from: usize, to: usize, v: Option<f64>| {
            for j in from..=to {
                eps[j - 1] = v.unwrap_or(e[j - 1]);
                level[j - 1] = alpha;
            }
        };
        if e[start - 1] == 0.0 {
            fill(&mut eps, &mut level, start, big_k, Some(0.0));
            notes.push(format!("jet vanishes beyond a_{alpha} = {start}"));
            break;
        }
        let target = e[start - 1] / (1.0 + alpha as f64);
        let Some(ap) = (start + 1..=big_k).find(|&j| e[j - 1] <= target) else {
            if policy == HorizonPolicy::Strict {
                return Err(Error::SelectionStalls { level: alpha, what: "a'".into(), k: big_k });
            }
            fill(&mut eps, &mut level, start, big_k, None);
            notes.push(format!("a'_{alpha} not found within K = {big_k}; level {alpha} kept to the horizon"));
            break;
        };
        fill(&mut eps, &mut level, start, ap, None);
        a_prime.push(ap);
        let e2 = level_eps(alpha + 1);
        let Some(next) = (ap + 1..=big_k).find(|&j| e2[j - 1] < e[ap - 1]) else {
            if policy == HorizonPolicy::Strict {
                return Err(Error::SelectionStalls { level: alpha, what: "a".into(), k: big_k });
            }
            fill(&mut eps, &mut level, ap + 1, big_k, Some(e[ap - 1]));
            notes.push(format!("a_{} not found within K = {big_k}; plateau kept to the horizon", alpha + 1));
            break;
        };
        fill(&mut eps, &mut level, ap + 1, next - 1, Some(e[ap - 1]));
        a.push(next);
        alpha += 1;
    }
    if eps.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
        return Err(Error::VerificationFailed("step II: eps is not decreasing".into()));
    }
    let mut acc = 0.0;
    for j in 1..=big_k {
        acc += eps[j - 1].ln();
        let m = clamp_row(m_rows, level[j - 1] + 1);
        let lhs = lambda.log_abs()[j];
        if lhs > f64::NEG_INFINITY && lhs > acc + m.log_values()[j] + slack(lhs) {
            return Err(Error::VerificationFailed(format!("step II: envelope inequality at j = {j}")));
        }
    }
    Ok(Step2 { eps, a, a_prime, level, notes })
}

/// Output of Step III.
#[derive(Debug, Clone, Serialize)]
pub struct Step3 {
    /// `log μ̲_1..log μ̲_K`.
    pub log_mu: Vec<f64>,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
    /// `log C_α`, `α = 1..`.
    pub log_c: Vec<f64>,
    pub notes: Vec<String>,
}

impl Step3 {
    pub fn log_values(&self) -> Vec<f64> {
        cumulative(&self.log_mu)
    }
}

fn cumulative(log_q: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(log_q.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for l in log_q {
        acc += l;
        out.push(acc);
    }
    out
}

/// `ln(e^x + 1)`.
fn ln_succ(x: f64) -> f64 {
    if x < 30.0 {
        (x.exp() + 1.0).ln()
    } else {
        x + (-x).exp().ln_1p()
    }
}

/// Strictly increasing integer constants with `log C_α ≥ sup_j (log lower_j − log row_α,j)`.
fn integer_constants(lower: &[f64], rows: &[WeightSequence], count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(count);
    for alpha in 1..=count {
        let row = clamp_row(rows, alpha);
        let sup = (0..lower.len()).map(|j| lower[j] - row.log_values()[j]).fold(0.0, f64::max);
        let mut c = if sup < 30.0 { sup.exp().ceil().ln() } else { sup };
        if let Some(&prev) = out.last() {
            // C_α + 1 in the log domain, or the next float once +1 is below resolution
            c = c.max(ln_succ(prev).max(f64::from_bits(prev.to_bits() + 1)));
        }
        out.push(c);
    }
    out
}

/// Step III: the interlaced lower sequence `μ̲` built from the rows of `𝔐'`.
pub fn step3_lower_m(m_rows: &[WeightSequence], a: &[usize], policy: HorizonPolicy) -> Result<Step3> {
    let big_k = m_rows[0].len();
    let lq = |alpha: usize, j: usize| clamp_row(m_rows, alpha).log_quotients()[j - 1];
    let mut log_mu = vec![0.0; big_k];
    let mut b = Vec::new();
    let mut b_prime = vec![1usize];
    let mut notes = Vec::new();
    let mut alpha = 1;
    loop {
        let bp = b_prime[alpha - 1];
        let floor = a.get(alpha - 1).copied().unwrap_or(big_k + 1).max(bp) + 1;
        let last_bad = (1..=big_k).rev().find(|&j| lq(alpha + 1, j) < (alpha as f64 * j as f64).ln()).unwrap_or(0);
        let bb = floor.max(last_bad + 1);
        if bb > big_k {
            if policy == HorizonPolicy::Strict {
                return Err(Error::HorizonExceeded { what: format!("b_{alpha}"), k: big_k });
            }
            for j in bp..=big_k {
                log_mu[j - 1] = lq(alpha, j);
            }
            notes.push(format!("b_{alpha} not found within K = {big_k}; row 1/{alpha} kept to the horizon"));
            break;
        }
        for j in bp..=bb {
            log_mu[j - 1] = lq(alpha, j);
        }
        b.push(bb);
        let top = lq(alpha, bb);
        let Some(next) = (bb + 1..=big_k).find(|&j| lq(alpha + 1, j) > top) else {
            if policy == HorizonPolicy::Strict {
                return Err(Error::HorizonExceeded { what: format!("b'_{}", alpha + 1), k: big_k });
            }
            for j in bb + 1..=big_k {
                log_mu[j - 1] = top;
            }
            notes.push(format!("b'_{} not found within K = {big_k}; plateau kept to the horizon", alpha + 1));
            break;
        };
        for j in bb + 1..next {
            log_mu[j - 1] = top;
        }
        b_prime.push(next);
        alpha += 1;
    }
    let lower = cumulative(&log_mu);
    for (i, &bb) in b.iter().enumerate() {
        let row = clamp_row(m_rows, i + 1);
        if let Some(j) = (0..=bb).find(|&j| row.log_values()[j] > lower[j] + slack(lower[j])) {
            return Err(Error::VerificationFailed(format!("step III: M^(1/{}) exceeds the lower sequence at j = {j}", i + 1)));
        }
    }
    let log_c = integer_constants(&lower, m_rows, b_prime.len() + 8);
    Ok(Step3 { log_mu, b, b_prime, log_c, notes })
}

/// Output of Step IV.
#[derive(Debug, Clone, Serialize)]
pub struct Step4 {
    /// `log ν̲_1..log ν̲_K`.
    pub log_nu: Vec<f64>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
    /// `log D_α`, nondecreasing.
    pub log_d_alpha: Vec<f64>,
    /// `log D`.
    pub log_d: f64,
    /// Largest measured ratio in the tail comparison with factor 2.
    pub tail_ratio: f64,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub lower: WeightSequence,
}

/// Step IV: the interlaced lower sequence `ν̲` from the rows of `𝔑'`, with the constants
/// `D_α`, `D`. The spacing rule uses `d_α ≥ ⌈log₂ C_{α+4}⌉ + d_{α-1}`.
pub fn step4_lower_n(n_rows: &[WeightSequence], log_c: &[f64], policy: HorizonPolicy) -> Result<Step4> {
    let big_k = n_rows[0].len();
    let nrow = |alpha: usize| clamp_row(n_rows, alpha);
    let lq = |alpha: usize, j: usize| nrow(alpha).log_quotients()[j - 1];
    let tails: Vec<Vec<crate::report::Interval>> = n_rows.iter().map(|r| r.inverse_tail_sums()).collect();
    let tail = |alpha: usize, j: usize| tails[alpha.clamp(1, n_rows.len()) - 1][j - 1];
    let c_const = |alpha: usize| log_c.get(alpha - 1).copied().unwrap_or(*log_c.last().unwrap());
    let mut log_nu = vec![0.0; big_k];
    let mut c = vec![1usize];
    let mut d: Vec<usize> = Vec::new();
    let mut notes = Vec::new();
    let mut alpha = 1;
    let mut last_level;
    loop {
        last_level = alpha;
        let ca = c[alpha - 1];
        let prev_d = if alpha == 1 { 0 } else { d[alpha - 2] };
        let spacing = (c_const(alpha + 4) / LN_2).ceil().max(0.0) as usize + prev_d;
        let half = 0.5 * tail(alpha, ca + 1).lower;
        let d1 = (ca..=big_k).find(|&dd| tail(alpha + 1, dd + 1).upper <= half);
        let (hi, lo) = (nrow(alpha + 2), nrow(alpha + 3));
        let last_bad = (1..=big_k)
            .rev()
            .find(|&j| hi.log_values()[j] - lo.log_values()[j] < j as f64 * LN_2 - slack(hi.log_values()[j]))
            .unwrap_or(0);
        let dd = d1.map(|d1| d1.max(spacing).max(ca).max(last_bad + 1).max(prev_d + 1));
        let dd = match dd {
            Some(v) if v <= big_k => v,
            _ => {
                if policy == HorizonPolicy::Strict {
                    return Err(Error::HorizonExceeded { what: format!("d_{alpha}"), k: big_k });
                }
                for j in ca..=big_k {
                    log_nu[j - 1] = lq(alpha, j);
                }
                notes.push(format!("d_{alpha} not found within K = {big_k}; row 1/{alpha} kept to the horizon"));
                break;
            }
        };
        for j in ca..=dd {
            log_nu[j - 1] = lq(alpha, j);
        }
        d.push(dd);
        let top = lq(alpha, dd);
        let Some(next) = (dd + 1..=big_k).find(|&j| lq(alpha + 1, j) > top) else {
            if policy == HorizonPolicy::Strict {
                return Err(Error::HorizonExceeded { what: format!("c_{}", alpha + 1), k: big_k });
            }
            for j in dd + 1..=big_k {
                log_nu[j - 1] = top;
            }
            notes.push(format!("c_{} not found within K = {big_k}; plateau kept to the horizon", alpha + 1));
            break;
        };
        for j in dd + 1..next {
            log_nu[j - 1] = top;
        }
        c.push(next);
        alpha += 1;
    }
    // beyond the horizon ν̲ follows the last active row
    let lower = WeightSequence::from_log_quotients("N_lower", log_nu.clone(), Tail::None)?
        .with_tail_model(nrow(last_level).tail().copied());
    let lv = lower.log_values();
    for (i, &dd) in d.iter().enumerate() {
        let row = nrow(i + 1);
        if let Some(j) = (0..=dd).find(|&j| row.log_values()[j] > lv[j] + slack(lv[j])) {
            return Err(Error::VerificationFailed(format!("step IV: N^(1/{}) exceeds the lower sequence at j = {j}", i + 1)));
        }
    }
    let mut log_d_alpha: Vec<f64> = Vec::new();
    for a in 1..=n_rows.len() {
        let row = nrow(a);
        let sup = (0..=big_k).map(|j| lv[j] - row.log_values()[j]).fold(0.0, f64::max);
        log_d_alpha.push(log_d_alpha.last().map_or(sup, |p: &f64| p.max(sup)));
    }
    let own = lower.inverse_tail_sums();
    let mut log_d: f64 = 0.0;
    let mut tail_ratio: f64 = 0.0;
    for (i, &ca) in c.iter().enumerate() {
        let a = i + 1;
        let end = c.get(i + 1).copied().unwrap_or(big_k + 1);
        let row3 = nrow(a + 3);
        for ii in 0..end.saturating_sub(1) {
            let j = ca.max(ii + 1);
            if j >= end {
                continue;
            }
            let v = c_const(a + 3) + row3.log_values()[ii] - (j - ii) as f64 * LN_2 - lv[ii];
            log_d = log_d.max(v);
        }
        for j in ca..end.min(big_k + 1) {
            tail_ratio = tail_ratio.max(own[j - 1].upper / tail(a + 2, j).lower);
        }
    }
    if !(tail_ratio <= 2.0 * (1.0 + 1e-9)) {
        notes.push(format!("tail comparison with factor 2 fails on the horizon: measured {tail_ratio}"));
    }
    Ok(Step4 { log_nu, c, d, log_d_alpha, log_d, tail_ratio, notes, lower })
}

/// Steps III and IV together.
pub fn step34_lower_sequences(step1: &Step1, step2: &Step2, policy: HorizonPolicy) -> Result<(Step3, Step4)> {
    let s3 = step3_lower_m(&step1.m_rows, &step2.a, policy)?;
    let s4 = step4_lower_n(&step1.n_rows, &s3.log_c, policy)?;
    Ok((s3, s4))
}

/// Everything the construction produces, with the three verification reports.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineResult {
    pub horizon: usize,
    pub policy: HorizonPolicy,
    pub step1: Step1,
    pub step2: Step2,
    pub step3: Step3,
    pub step4: Step4,
    pub theta: ThetaResult,
    pub theta_prime: ThetaResult,
    /// `log₂ A`.
    pub log2_a: f64,
    /// `log R_0..log R_K`.
    pub log_r: Vec<f64>,
    /// `log S_0..log S_K`.
    pub log_s: Vec<f64>,
    pub verify_jet: ConditionReport,
    pub verify_sv: ConditionReport,
    pub verify_small: ConditionReport,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub r: WeightSequence,
    #[serde(skip)]
    pub s: WeightSequence,
}

impl PipelineResult {
    pub fn verdict(&self) -> Verdict {
        self.verify_jet.verdict.and(self.verify_sv.verdict).and(self.verify_small.verdict)
    }

    /// `Err(VerificationFailed)` naming the first verification that did not hold.
    pub fn require_verified(&self) -> Result<()> {
        for (name, r) in [("(i)", &self.verify_jet), ("(ii)", &self.verify_sv), ("(iii)", &self.verify_small)] {
            if !r.verdict.holds() {
                return Err(Error::VerificationFailed(format!("{name}: {}", r.verdict)));
            }
        }
        Ok(())
    }
}

/// Step V: `θ`, `θ'`, `A` and the pair `R_j = M̲_j/(θ_0⋯θ_j)`, `S_j = A^j N̲_j/(θ'_0⋯θ'_j)`.
pub fn step5_build_rs(lambda: &Jet, step1: Step1, step2: Step2, step3: Step3, step4: Step4, policy: HorizonPolicy) -> Result<PipelineResult> {
    let big_k = step2.eps.len().min(step3.log_mu.len()).min(step4.log_nu.len());
    let lm = step3.log_values();
    let beta: Vec<f64> = (1..=big_k).map(|j| step2.eps[j - 1].max(j as f64 / (lm[j] / j as f64).exp())).collect();
    let gamma: Vec<f64> = (1..=big_k).map(|j| (-step3.log_mu[j - 1]).exp()).collect();
    // Strict propagates a θ-lemma violation; Truncate records it and carries on
    let build = |a: &[f64], b: &[f64], g: &[f64]| match policy {
        HorizonPolicy::Strict => theta_builder(a, b, g),
        HorizonPolicy::Truncate => theta_greedy(a, b, g),
    };
    let theta = build(&vec![0.0; big_k], &beta, &gamma)?;

    let inv_nu: Vec<f64> = (1..=big_k).map(|j| (-step4.log_nu[j - 1]).exp()).collect();
    let beta_p: Vec<f64> = (1..=big_k).map(|j| (1.0 / theta.at(j / 2).sqrt()).max(inv_nu[j - 1])).collect();
    let theta_p = build(&inv_nu, &beta_p, &inv_nu)?;

    let lt: Vec<f64> = cumulative(&theta.theta.iter().map(|t| t.ln()).collect::<Vec<_>>());
    let mut log_a = (theta_p.at(1) * inv_nu[0]).ln().max(0.0);
    for j in 1..=big_k {
        let ltp = theta_p.at(j).ln();
        log_a = log_a.max(ltp - theta.at(j).ln());
        for i in 0..j {
            log_a = log_a.max(ltp - (lt[j] - lt[i]) / (j - i) as f64);
        }
    }
    let log2_a = (log_a / LN_2).ceil().max(0.0);
    let ln_a = log2_a * LN_2;

    let r_q: Vec<f64> = (1..=big_k).map(|j| step3.log_mu[j - 1] - theta.at(j).ln()).collect();
    let r = WeightSequence::from_log_quotients("R", r_q, Tail::Fitted)?;
    let s_q: Vec<f64> = (1..=big_k).map(|j| ln_a + step4.log_nu[j - 1] - theta_p.at(j).ln()).collect();
    let frozen = ln_a - theta_p.at(big_k).ln();
    let s = WeightSequence::from_log_quotients("S", s_q, Tail::None)?.with_tail_model(step4.lower.tail().map(|t| t.shifted(frozen)));

    // (i) λ ∈ Λ^{R}
    let et: Vec<f64> = (1..=big_k).map(|j| step2.eps[j - 1] * theta.at(j)).collect();
    let mut acc = 0.0;
    let mut bound_ok = true;
    for j in 1..=big_k {
        acc += et[j - 1].ln();
        let lhs = lambda.log_abs()[j];
        bound_ok &= lhs == f64::NEG_INFINITY || lhs <= acc + r.log_values()[j] + slack(lhs);
    }
    let decay = et[big_k - 1] / et[0];
    let growth: Vec<f64> = (1..=big_k).map(|j| j as f64 / (r.log_values()[j] / j as f64).exp()).collect();
    let growth_ok = (1..=big_k).all(|j| growth[j - 1] <= theta.at(j) * beta[j - 1] * (1.0 + 1e-9));
    let growth_rep = ConditionReport::new("root_growth", vanishing_trend(&growth, &growth).and(if growth_ok { Verdict::HoldsTrend } else { Verdict::FailsTrend }), big_k)
        .witness("final", growth[big_k - 1])
        .note("j/(R_j)^(1/j) <= theta_j beta_j and tends to 0, i.e. (r_j)^(1/j) -> infinity");
    let jet_verdict = if bound_ok { vanishing_trend(&et, &et) } else { Verdict::FailsTrend };
    let mut verify_jet = ConditionReport::new("jet_in_roumieu_R", jet_verdict, big_k)
        .witness("decay_ratio", decay)
        .witness("eps_theta_final", et[big_k - 1])
        .with_profile(et.iter().enumerate().map(|(j, v)| ((j + 1) as f64, *v)))
        .note(if bound_ok { "|lambda_j| <= prod(eps_i theta_i) R_j on the horizon" } else { "envelope bound |lambda_j| <= prod(eps_i theta_i) R_j violated" });
    verify_jet.children.push(growth_rep);

    // (ii) R ≺_SV S
    let verify_sv = mixed_condition(&MixedConditionSpec::new(MixedKind::Sv), &r, &s)?;

    // (iii) S ◁ N'^{(1/α)} for every row
    let mut small = Verdict::HoldsTrend;
    let mut verify_small = ConditionReport::new("S_small_in_N", Verdict::HoldsTrend, big_k);
    for (i, row) in step1.n_rows.iter().enumerate() {
        let prof: Vec<f64> = (1..=big_k).map(|j| ((s.log_values()[j] - row.log_values()[j]) / j as f64).exp()).collect();
        let v = vanishing_trend(&prof, &prof);
        small = small.and(v);
        verify_small.witnesses.insert(format!("final(alpha={})", i + 1), prof[big_k - 1]);
        verify_small.children.push(
            ConditionReport::new(format!("S_small_in_N(alpha={})", i + 1), v, big_k)
                .with_profile(prof.iter().enumerate().map(|(j, x)| ((j + 1) as f64, *x))),
        );
    }
    verify_small.verdict = small;

    let mut notes = vec![
        "rescaling r(1/k) = min(2^-k, 1/Q_k, inf_j (N'_j/M_j)^(1/j)), monotone in k".to_string(),
        format!("theta' frozen beyond K = {big_k} for the tail of S"),
    ];
    for (name, t) in [("theta", &theta), ("theta'", &theta_p)] {
        if let Some(what) = theta_violation(&t.diagnostics) {
            notes.push(format!("{name} violates the lemma invariant '{what}' on the horizon"));
        }
    }
    let root: Vec<f64> = lm.iter().enumerate().skip(1).map(|(j, l)| (l / j as f64).exp() / j as f64).collect();
    if divergent_trend(&root, &root, Scale::Relative) != Verdict::HoldsTrend {
        notes.push("(M_lower_j)^(1/j)/j does not show divergence on the horizon".into());
    }
    let mut log_r = r.log_values().to_vec();
    log_r.truncate(big_k + 1);
    let mut log_s = s.log_values().to_vec();
    log_s.truncate(big_k + 1);
    Ok(PipelineResult {
        horizon: big_k,
        policy,
        step1,
        step2,
        step3,
        step4,
        theta,
        theta_prime: theta_p,
        log2_a,
        log_r,
        log_s,
        verify_jet,
        verify_sv,
        verify_small,
        notes,
        r,
        s,
    })
}

/// Runs SV witness search and Steps I–V for a Beurling jet.
pub fn run_pipeline(lambda: &Jet, mm: &WeightMatrix, nn: &WeightMatrix, policy: HorizonPolicy) -> Result<PipelineResult> {
    let sv = matrix_mixed_condition(&MixedConditionSpec::new(MixedKind::Sv), mm, nn, Quantifier::ForallYExistsX)?;
    let s1 = step1_normalize(mm, nn, &sv)?;
    let s2 = step2_jet_envelope(lambda, mm, &s1.m_rows, policy)?;
    let (s3, s4) = step34_lower_sequences(&s1, &s2, policy)?;
    let mut out = step5_build_rs(lambda, s1, s2, s3, s4, policy)?;
    out.notes.extend(out.step2.notes.clone());
    out.notes.extend(out.step3.notes.clone());
    out.notes.extend(out.step4.notes.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladders(s: f64, t: f64, k: usize) -> (WeightMatrix, WeightMatrix) {
        (
            WeightMatrix::constant(&WeightSequence::gevrey(s, k).unwrap(), 1..=6).unwrap(),
            WeightMatrix::constant(&WeightSequence::gevrey(t, k).unwrap(), 1..=6).unwrap(),
        )
    }

    fn sv_report(mm: &WeightMatrix, nn: &WeightMatrix) -> ConditionReport {
        matrix_mixed_condition(&MixedConditionSpec::new(MixedKind::Sv), mm, nn, Quantifier::ForallYExistsX).unwrap()
    }

    #[test]
    fn step1_rescaling() {
        let (mm, nn) = ladders(1.0, 2.0, 1000);
        let s1 = step1_normalize(&mm, &nn, &sv_report(&mm, &nn)).unwrap();
        assert!(s1.sv_bound.iter().all(|b| *b <= 1.0));
        assert!(s1.log_r.windows(2).all(|w| w[1] <= w[0]) && s1.log_r[0] <= 0.0);
        for (m, n) in s1.m_rows.iter().zip(&s1.n_rows) {
            assert!((0..=1000).all(|j| m.log_values()[j] <= n.log_values()[j] + 1e-9 * n.log_values()[j].abs().max(1.0)));
        }
        for (a, onset) in s1.liminf_onset.iter().enumerate() {
            let j0 = onset.expect("onset within the horizon");
            let (hi, lo) = (&s1.n_rows[a], &s1.n_rows[a + 1]);
            assert!((j0..=1000).all(|j| hi.log_values()[j] - lo.log_values()[j] >= j as f64 * LN_2 - 1e-6));
        }
    }

    #[test]
    fn missing_witness() {
        let (mm, nn) = ladders(1.0, 2.0, 200);
        let empty = ConditionReport::new("SV", Verdict::HoldsTrend, 0);
        assert_eq!(step1_normalize(&mm, &nn, &empty).unwrap_err(), Error::WitnessMissing { row: "1/1".into() });
    }

    #[test]
    fn finitely_supported_jet() {
        let (mm, nn) = ladders(1.5, 2.0, 600);
        let s1 = step1_normalize(&mm, &nn, &sv_report(&mm, &nn)).unwrap();
        let s2 = step2_jet_envelope(&Jet::unit(3, 600), &mm, &s1.m_rows, HorizonPolicy::Truncate).unwrap();
        assert!(s2.eps[3..].iter().all(|e| *e == 0.0));
        assert!(s2.eps[..3].iter().all(|e| *e > 0.0));
    }

    #[test]
    fn boundary_jet_rejected() {
        let (mm, nn) = ladders(1.5, 2.0, 600);
        let s1 = step1_normalize(&mm, &nn, &sv_report(&mm, &nn)).unwrap();
        let lambda = Jet::from_sequence(&WeightSequence::gevrey(1.5, 600).unwrap());
        assert!(matches!(step2_jet_envelope(&lambda, &mm, &s1.m_rows, HorizonPolicy::Truncate), Err(Error::JetNotInClass(_))));
    }

    #[test]
    fn strict_policy_reports_stall() {
        let (mm, nn) = ladders(1.5, 2.0, 600);
        let s1 = step1_normalize(&mm, &nn, &sv_report(&mm, &nn)).unwrap();
        let err = step2_jet_envelope(&Jet::factorial_power(1.0, 600), &mm, &s1.m_rows, HorizonPolicy::Strict).unwrap_err();
        assert!(matches!(err, Error::SelectionStalls { level: 1, .. }), "{err:?}");
    }

    #[test]
    fn pipeline_outputs_are_consistent() {
        let (mm, nn) = ladders(3.0, 4.0, 800);
        let lambda = Jet::unit(3, 800);
        let out = run_pipeline(&lambda, &mm, &nn, HorizonPolicy::Truncate).unwrap();
        assert_eq!(out.log_s[0], 0.0);
        assert!(out.s.log_quotients().windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(out.step3.log_mu.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(out.step4.log_nu.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(out.step3.log_c.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(out.verify_jet.verdict, Verdict::HoldsTrend);
        assert_eq!(out.verify_sv.verdict, Verdict::HoldsTrend);
        let again = run_pipeline(&lambda, &mm, &nn, HorizonPolicy::Truncate).unwrap();
        assert_eq!(serde_json::to_string(&out).unwrap(), serde_json::to_string(&again).unwrap());
    }
}
