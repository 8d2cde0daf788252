use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{bounded_trend, ConditionReport, Scale, Verdict};

use super::relations::{growth_index, quasianalytic_check, relation_check, GrowthIndex, Relation};
use super::{make_sequence, SequenceSpec, Tail, WeightSequence};

/// Positive rational matrix parameter `x = num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Param {
    pub num: u64,
    pub den: u64,
}

impl Param {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "matrix parameters are positive");
        let g = gcd(num, den);
        Param { num: num / g, den: den / g }
    }

    /// `x = 1/k`.
    pub fn inv(k: u64) -> Self {
        Param::new(1, k)
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `k` when `x = 1/k`.
    pub fn ladder_index(self) -> Option<u64> {
        (self.num == 1).then_some(self.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl PartialOrd for Param {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Param {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 { write!(f, "{}", self.num) } else { write!(f, "{}/{}", self.num, self.den) }
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDescriptor(format!("bad matrix parameter '{s}'"));
        let (a, b) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num: u64 = a.parse().map_err(|_| bad())?;
        let den: u64 = b.parse().map_err(|_| bad())?;
        if num == 0 || den == 0 {
            return Err(bad());
        }
        Ok(Param::new(num, den))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub x: Param,
    pub seq: WeightSequence,
}

/// Finite ladder of weight sequences, sorted ascending in `x` and pointwise ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    label: String,
    rows: Vec<MatrixRow>,
    quotient_ordered: bool,
}

fn slack(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

impl WeightMatrix {
    pub fn new(label: impl Into<String>, mut rows: Vec<MatrixRow>, quotient_ordered: bool) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientRows { got: 0, need: 1 });
        }
        rows.sort_by_key(|r| r.x);
        for w in rows.windows(2) {
            if w[0].x == w[1].x {
                return Err(Error::InvalidDescriptor(format!("duplicate row x = {}", w[0].x)));
            }
            let k = w[0].seq.len().min(w[1].seq.len());
            let (a, b) = (w[0].seq.log_values(), w[1].seq.log_values());
            if let Some(j) = (0..=k).find(|&j| a[j] > b[j] + slack(b[j])) {
                return Err(Error::InvalidDescriptor(format!(
                    "rows {} and {} not pointwise ordered at j = {j}",
                    w[0].x, w[1].x
                )));
            }
            if quotient_ordered {
                let (a, b) = (w[0].seq.log_quotients(), w[1].seq.log_quotients());
                if let Some(j) = (0..k).find(|&j| a[j] > b[j] + slack(b[j])) {
                    return Err(Error::InvalidDescriptor(format!(
                        "rows {} and {} not quotient ordered at j = {}",
                        w[0].x,
                        w[1].x,
                        j + 1
                    )));
                }
            }
        }
        Ok(WeightMatrix { label: label.into(), rows, quotient_ordered })
    }

    /// The constant matrix of one sequence over the ladder `x = 1/k`, `k ∈ ks`.
    pub fn constant(seq: &WeightSequence, ks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let rows = ks.into_iter().map(|k| MatrixRow { x: Param::inv(k), seq: seq.clone() }).collect();
        Self::new(format!("const[{}]", seq.label()), rows, true)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn quotient_ordered(&self) -> bool {
        self.quotient_ordered
    }

    pub fn row(&self, x: Param) -> Option<&WeightSequence> {
        self.rows.iter().find(|r| r.x == x).map(|r| &r.seq)
    }

    /// Row `x = 1/k`.
    pub fn ladder_row(&self, k: u64) -> Option<&WeightSequence> {
        self.row(Param::inv(k))
    }

    /// Common truncation of all rows.
    pub fn horizon(&self) -> usize {
        self.rows.iter().map(|r| r.seq.len()).min().unwrap_or(0)
    }

    pub fn row_set(&self) -> String {
        self.rows.iter().map(|r| r.x.to_string()).collect::<Vec<_>>().join(", ")
    }

    /// Whether `(m_j)^{1/j}` strictly increases over the final quarter of every row.
    pub fn realanalytic_trend(&self) -> Verdict {
        let mut all = Verdict::HoldsTrend;
        for r in &self.rows {
            let k = r.seq.len();
            let lm = r.seq.log_values();
            let root = |j: usize| (lm[j] - libm::lgamma(j as f64 + 1.0)) / j as f64;
            let start = (3 * k / 4).max(1);
            let ok = (start + 1..=k).all(|j| root(j) > root(j - 1));
            all = all.and(if ok { Verdict::HoldsTrend } else { Verdict::FailsTrend });
        }
        all
    }
}

/// Serialized matrix descriptor. Each `seq` is an inline sequence descriptor or `{"ref": path}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub rows: Vec<RowSpec>,
    #[serde(default)]
    pub quotient_ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSpec {
    pub x: String,
    pub seq: serde_json::Value,
}

/// Build a matrix; `resolve` maps `{"ref": ...}` rows to descriptors.
pub fn make_matrix(spec: &MatrixSpec, resolve: &dyn Fn(&str) -> Result<SequenceSpec>) -> Result<WeightMatrix> {
    let mut rows = Vec::with_capacity(spec.rows.len());
    for r in &spec.rows {
        let x: Param = r.x.parse()?;
        let seq_spec = match r.seq.get("ref").and_then(|v| v.as_str()) {
            Some(path) => resolve(path)?,
            None => serde_json::from_value(r.seq.clone())
                .map_err(|e| Error::InvalidDescriptor(format!("row {}: {e}", r.x)))?,
        };
        rows.push(MatrixRow { x, seq: make_sequence(&seq_spec)? });
    }
    WeightMatrix::new(spec.label.clone().unwrap_or_else(|| "matrix".into()), rows, spec.quotient_ordered)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixCondition {
    Preceq,
    Mg,
    Dc,
    ExpAbsorb,
    Nonquasianalytic,
}

impl MatrixCondition {
    pub fn name(self) -> &'static str {
        match self {
            MatrixCondition::Preceq => "matrix_preceq",
            MatrixCondition::Mg => "matrix_mg",
            MatrixCondition::Dc => "matrix_dc",
            MatrixCondition::ExpAbsorb => "matrix_exp_absorb",
            MatrixCondition::Nonquasianalytic => "matrix_nonquasianalytic",
        }
    }

    /// Default share of rows (largest `x` first) over which `∀y` is evaluated.
    pub fn default_scope(self) -> RowScope {
        match self {
            MatrixCondition::ExpAbsorb => RowScope::Upper(0.25),
            MatrixCondition::Mg | MatrixCondition::Dc => RowScope::Upper(0.5),
            _ => RowScope::All,
        }
    }
}

/// Which rows the universal quantifier ranges over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowScope {
    All,
    /// The given fraction of rows with the largest parameters (at least one row).
    Upper(f64),
}

impl RowScope {
    pub fn select(self, n: usize) -> std::ops::Range<usize> {
        match self {
            RowScope::All => 0..n,
            RowScope::Upper(f) => {
                let take = ((n as f64 * f).ceil() as usize).clamp(1, n);
                n - take..n
            }
        }
    }

    pub fn describe(self) -> String {
        match self {
            RowScope::All => "all rows".into(),
            RowScope::Upper(f) => format!("upper {:.0}% of rows", 100.0 * f),
        }
    }
}

/// Witness search order for `∃x` given `y`: equal parameter, then smaller, then larger.
pub fn witness_order(xs: &[Param], y: Param) -> Vec<usize> {
    let mut below: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] < y).collect();
    below.reverse();
    let above = (0..xs.len()).filter(|&i| xs[i] > y);
    (0..xs.len()).filter(|&i| xs[i] == y).chain(below).chain(above).collect()
}

fn exp_absorb(m: &WeightSequence, n: &WeightSequence, h: f64) -> ConditionReport {
    let k = m.len().min(n.len());
    let profile: Vec<f64> =
        (0..=k).map(|j| j as f64 * h.ln() + m.log_values()[j] - n.log_values()[j]).collect();
    let verdict = bounded_trend(&profile, &profile, Scale::Log);
    let sup = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ConditionReport::new("exp_absorb", verdict, k)
        .witness("h", h)
        .witness("A", sup.exp())
        .with_profile(profile.iter().enumerate().map(|(j, v)| (j as f64, *v)))
}

/// Quantified `∀y ∃x` check of a matrix condition over the available rows.
pub fn matrix_condition(
    kind: MatrixCondition,
    mm: &WeightMatrix,
    nn: Option<&WeightMatrix>,
) -> Result<ConditionReport> {
    matrix_condition_scoped(kind, mm, nn, kind.default_scope())
}

pub fn matrix_condition_scoped(
    kind: MatrixCondition,
    mm: &WeightMatrix,
    nn: Option<&WeightMatrix>,
    scope: RowScope,
) -> Result<ConditionReport> {
    let horizon = mm.horizon();
    if kind == MatrixCondition::Nonquasianalytic {
        let mut verdict = Verdict::HoldsTrend;
        let mut children = Vec::new();
        for r in mm.rows() {
            let c = quasianalytic_check(&r.seq)?;
            verdict = verdict.and(c.verdict);
            children.push(c.note(format!("row x = {}", r.x)));
        }
        let mut rep = ConditionReport::new(kind.name(), verdict, horizon).note(format!("rows: {}", mm.row_set()));
        rep.children = children;
        return Ok(rep);
    }
    let target = match kind {
        MatrixCondition::Preceq => nn.ok_or_else(|| Error::InvalidDescriptor("preceq needs a second matrix".into()))?,
        _ => mm,
    };
    let need = if kind == MatrixCondition::Preceq { 1 } else { 2 };
    if mm.len() < need {
        return Err(Error::InsufficientRows { got: mm.len(), need });
    }
    let xs: Vec<Param> = mm.rows().iter().map(|r| r.x).collect();
    let hs: &[f64] = if kind == MatrixCondition::ExpAbsorb { &[2.0, 4.0, 8.0] } else { &[1.0] };
    let mut verdict = Verdict::HoldsTrend;
    let mut report = ConditionReport::new(kind.name(), Verdict::HoldsTrend, horizon);
    for yi in scope.select(target.len()) {
        let y = target.rows()[yi].x;
        let ny = &target.rows()[yi].seq;
        for &h in hs {
            let mut row_verdict = Verdict::FailsTrend;
            let mut found = None;
            for xi in witness_order(&xs, y) {
                if kind == MatrixCondition::ExpAbsorb && xs[xi] >= y {
                    continue;
                }
                let mx = &mm.rows()[xi].seq;
                let c = match kind {
                    MatrixCondition::Preceq => relation_check(Relation::Preceq, mx, ny)?,
                    MatrixCondition::Mg => growth_index(GrowthIndex::Mg, mx, ny)?,
                    MatrixCondition::Dc => growth_index(GrowthIndex::Dc, mx, ny)?,
                    MatrixCondition::ExpAbsorb => exp_absorb(mx, ny, h),
                    MatrixCondition::Nonquasianalytic => unreachable!(),
                };
                row_verdict = row_verdict.or(c.verdict);
                if c.verdict.holds() {
                    found = Some((xs[xi], c));
                    break;
                }
            }
            let tag = if hs.len() > 1 { format!("x(y={y},h={h})") } else { format!("x(y={y})") };
            match found {
                Some((x, c)) => {
                    report.witnesses.insert(tag, x.value());
                    for (name, v) in &c.witnesses {
                        report.witnesses.insert(format!("{name}(y={y}{})", if hs.len() > 1 { format!(",h={h}") } else { String::new() }), *v);
                    }
                }
                None => report.notes.push(format!("no witness for y = {y}, h = {h}: {row_verdict}")),
            }
            verdict = verdict.and(row_verdict);
        }
    }
    report.verdict = verdict;
    report.notes.push(format!(
        "universal rows: {} of [{}]; existential rows: [{}]; the continuum of parameters is represented by this ladder only",
        scope.describe(),
        target.row_set(),
        mm.row_set()
    ));
    Ok(report)
}

/// Sandwich constants of the equivalent matrix: `A_k 2^{-kj} M_j ≤ N_j ≤ B_k 2^{-kj} M_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub k: u64,
    pub log_a: f64,
    pub log_b: f64,
    pub j0: usize,
    pub j1: usize,
}

fn ladder(mm: &WeightMatrix) -> Result<Vec<&WeightSequence>> {
    let n = mm.len() as u64;
    (1..=n)
        .map(|k| {
            mm.ladder_row(k)
                .ok_or_else(|| Error::InvalidDescriptor(format!("rows must be x = 1/k for k = 1..{n}; missing 1/{k}")))
        })
        .collect()
}

/// Equivalent matrix absorbing exponential growth, built by the greedy minimal-`j₁` recursion.
pub fn ml_equivalent_matrix(mm: &WeightMatrix) -> Result<(WeightMatrix, Vec<Sandwich>)> {
    let rows = ladder(mm)?;
    let big_k = mm.horizon();
    let ln2 = std::f64::consts::LN_2;
    let mut out: Vec<WeightSequence> = Vec::with_capacity(rows.len());
    let mut sandwiches: Vec<Sandwich> = Vec::with_capacity(rows.len());
    for (idx, m) in rows.iter().enumerate() {
        let k = (idx + 1) as f64;
        if !m.is_normalized() {
            return Err(Error::InvalidDescriptor(format!("row 1/{} is not normalized", idx + 1)));
        }
        let lmu = &m.log_quotients()[..big_k];
        let lm = m.log_values();
        let threshold = k * ln2;
        let j0 = match lmu.iter().position(|&l| l >= threshold) {
            Some(p) => p + 1,
            None => return Err(Error::HorizonExceeded { what: format!("j0 for row 1/{}", idx + 1), k: big_k }),
        };
        let j1 = if idx == 0 {
            j0
        } else {
            let prev = &out[idx - 1];
            let log_b = k * j0 as f64 * ln2 + prev.log_values()[j0] - sandwiches[idx - 1].log_a - lm[j0];
            let mut acc = 0.0;
            let mut found = None;
            for j in j0 + 1..=big_k {
                acc += lmu[j - 1] - threshold;
                if acc >= log_b {
                    found = Some(j);
                    break;
                }
            }
            found.ok_or_else(|| Error::HorizonExceeded { what: format!("j1 for row 1/{}", idx + 1), k: big_k })?
        };
        let nu: Vec<f64> = (1..=big_k).map(|j| if j <= j1 { 0.0 } else { lmu[j - 1] - threshold }).collect();
        let tail = m.tail().map(|t| t.shifted(-threshold));
        let n = WeightSequence::from_log_quotients(format!("ml[{}]", m.label()), nu, Tail::None)?.with_tail_model(tail);
        let ratio = |j: usize| n.log_values()[j] - (lm[j] - k * j as f64 * ln2);
        let (mut log_a, mut log_b) = (f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..=big_k {
            let r = ratio(j);
            log_a = log_a.min(r);
            log_b = log_b.max(r);
        }
        sandwiches.push(Sandwich { k: idx as u64 + 1, log_a, log_b, j0, j1 });
        out.push(n);
    }
    for i in 1..out.len() {
        let (a, b) = (out[i].log_values(), out[i - 1].log_values());
        if let Some(j) = (0..=big_k).find(|&j| a[j] > b[j] + slack(b[j])) {
            return Err(Error::VerificationFailed(format!("row 1/{} exceeds row 1/{} at j = {j}", i + 1, i)));
        }
    }
    let rows = out
        .into_iter()
        .enumerate()
        .map(|(i, seq)| MatrixRow { x: Param::inv(i as u64 + 1), seq })
        .collect::<Vec<_>>();
    let quotient_ordered = rows.windows(2).all(|w| {
        w[0].seq.log_quotients().iter().zip(w[1].seq.log_quotients()).all(|(a, b)| *a <= b + slack(*b))
    });
    Ok((WeightMatrix::new(format!("ml[{}]", mm.label()), rows, quotient_ordered)?, sandwiches))
}

/// Check `A_k 2^{-kj} M_j ≤ N_j ≤ B_k 2^{-kj} M_j` for every row and every `j ≤ K`.
pub fn verify_sandwich(mm: &WeightMatrix, nn: &WeightMatrix, sandwiches: &[Sandwich]) -> bool {
    let ln2 = std::f64::consts::LN_2;
    sandwiches.iter().all(|s| {
        let (Some(m), Some(n)) = (mm.ladder_row(s.k), nn.ladder_row(s.k)) else { return false };
        let big_k = m.len().min(n.len());
        (0..=big_k).all(|j| {
            let base = m.log_values()[j] - s.k as f64 * j as f64 * ln2;
            let nj = n.log_values()[j];
            s.log_a + base <= nj + slack(nj) && nj <= s.log_b + base + slack(nj)
        })
    })
}

/// Shifted matrix `(N_dc^{(1/k)})_j = N^{(1/k)}_{j-k}` (and 1 for `j < k`).
pub fn shift_dc_matrix(nn: &WeightMatrix) -> Result<WeightMatrix> {
    let mut rows = Vec::with_capacity(nn.len());
    for r in nn.rows() {
        let k = r.x.ladder_index().ok_or_else(|| {
            Error::InvalidDescriptor(format!("shift needs ladder rows x = 1/k, got {}", r.x))
        })? as usize;
        let big_k = r.seq.len();
        let mut lmu = vec![0.0; k.min(big_k)];
        lmu.extend_from_slice(&r.seq.log_quotients()[..big_k - k.min(big_k)]);
        let tail = match r.seq.tail() {
            Some(t) => Tail::PowerLaw(t.exponent),
            None => Tail::None,
        };
        let seq = WeightSequence::from_log_quotients(format!("dc[{}]", r.seq.label()), lmu, tail)?;
        rows.push(MatrixRow { x: r.x, seq });
    }
    WeightMatrix::new(format!("dc[{}]", nn.label()), rows, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(k: usize) -> WeightSequence {
        WeightSequence::gevrey(1.0, k).unwrap()
    }

    #[test]
    fn param_parsing_and_order() {
        let a: Param = "1/3".parse().unwrap();
        let b: Param = "2".parse().unwrap();
        assert!(a < b);
        assert_eq!(a.to_string(), "1/3");
        assert_eq!(Param::new(2, 4), Param::inv(2));
        assert!("0/1".parse::<Param>().is_err());
    }

    #[test]
    fn witness_order_prefers_diagonal() {
        let xs = [Param::inv(4), Param::inv(3), Param::inv(2), Param::inv(1)];
        assert_eq!(witness_order(&xs, Param::inv(2)), vec![2, 1, 0, 3]);
    }

    #[test]
    fn constant_matrix_preceq() {
        let a = WeightMatrix::constant(&fact(300), 1..=3).unwrap();
        let b = WeightMatrix::constant(&WeightSequence::gevrey(2.0, 300).unwrap(), 1..=3).unwrap();
        let r = matrix_condition(MatrixCondition::Preceq, &a, Some(&b)).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend);
    }

    #[test]
    fn constant_matrix_does_not_absorb() {
        let a = WeightMatrix::constant(&fact(300), 1..=4).unwrap();
        let r = matrix_condition(MatrixCondition::ExpAbsorb, &a, None).unwrap();
        assert_eq!(r.verdict, Verdict::FailsTrend);
    }

    #[test]
    fn ml_sandwich_and_order() {
        let mm = WeightMatrix::constant(&fact(2000), 1..=6).unwrap();
        let (nn, s) = ml_equivalent_matrix(&mm).unwrap();
        assert!(verify_sandwich(&mm, &nn, &s));
        assert_eq!(nn.ladder_row(1).unwrap().log_values()[0], 0.0);
        let r = matrix_condition(MatrixCondition::ExpAbsorb, &nn, None).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend, "{:?}", r.notes);
    }

    #[test]
    fn shifted_rows() {
        let mm = WeightMatrix::constant(&fact(200), 1..=3).unwrap();
        let dc = shift_dc_matrix(&mm).unwrap();
        let row = dc.ladder_row(1).unwrap();
        let vals: Vec<f64> = (0..6).map(|j| row.log_values()[j].exp()).collect();
        for (got, want) in vals.iter().zip([1.0, 1.0, 1.0, 2.0, 6.0, 24.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        for k in 1..=3u64 {
            let (a, b) = (dc.ladder_row(k).unwrap(), mm.ladder_row(k).unwrap());
            assert!((0..=200).all(|j| a.log_values()[j] <= b.log_values()[j] + 1e-12));
        }
        for k in 1..3u64 {
            let r = growth_index(GrowthIndex::Dc, dc.ladder_row(k + 1).unwrap(), dc.ladder_row(k).unwrap()).unwrap();
            assert!(r.witnesses["value"].is_finite());
        }
    }
}
