use crate::error::{Error, Result};
use crate::report::{bounded_trend, ConditionReport, Interval, Scale, Verdict};
use crate::sequences::{MatrixRow, Param, Tail, WeightMatrix, WeightSequence};

use super::function::{PreWeightFunction, Repr};

/// `μ_M(λ) = #{k ≥ 1 : μ_k ≤ λ}`, continued by the tail model beyond `μ_K`.
pub fn counting_mu(m: &WeightSequence, lambda: f64) -> Result<usize> {
    if !(lambda > 0.0) {
        return Ok(0);
    }
    let l = lambda.ln();
    let lmu = m.log_quotients();
    let k = lmu.len();
    if l <= lmu[k - 1] {
        return Ok(lmu.partition_point(|&q| q <= l));
    }
    let tail = m.tail().ok_or(Error::OutOfTrustedRange { t: lambda, limit: m.mu_max() })?;
    if tail.exponent <= 0.0 {
        return Err(Error::OutOfTrustedRange { t: lambda, limit: m.mu_max() });
    }
    let guess = ((l - tail.log_c) / tail.exponent).exp().floor();
    let mut n = (guess as usize).max(k);
    let at = |i: usize| tail.log_c + tail.exponent * (i as f64).ln();
    while n > k && at(n) > l {
        n -= 1;
    }
    while at(n + 1) <= l {
        n += 1;
    }
    Ok(n)
}

/// `ω_M(t) = sup_k log(t^k/M_k) = Σ_{μ_k ≤ t} log(t/μ_k)`.
pub fn omega_assoc(m: &WeightSequence, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Ok(0.0);
    }
    let n = counting_mu(m, t)?;
    if n == 0 {
        return Ok(0.0);
    }
    let log_mn = m.log_value(n).ok_or(Error::OutOfTrustedRange { t, limit: m.mu_max() })?;
    Ok((n as f64 * t.ln() - log_mn).max(0.0))
}

/// `log λ_M(t)` with `λ_M(t) = Σ_j t^j/M_j`, bracketed by the geometric tail bound.
pub fn lambda_series(m: &WeightSequence, t: f64) -> Result<Interval> {
    if t == 0.0 {
        return Ok(Interval::point(0.0));
    }
    let lt = t.ln();
    let k = m.len();
    let mut terms: Vec<f64> = (0..=k).map(|j| j as f64 * lt - m.log_values()[j]).collect();
    let mut last = k;
    // ratio of consecutive terms beyond `last` is at most t/μ_{last+1}
    let next_log_mu = |j: usize| m.log_mu(j + 1).unwrap_or(m.log_quotients()[k - 1]);
    if m.tail().is_some() {
        while lt - next_log_mu(last) > (0.5f64).ln() && last < k + 1_000_000 {
            last += 1;
            terms.push(last as f64 * lt - m.log_value(last).unwrap());
        }
    }
    let log_q = lt - next_log_mu(last);
    if log_q >= 0.0 {
        return Err(Error::NoDecayWithinK { t });
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let partial: f64 = terms.iter().map(|v| (v - top).exp()).sum();
    let q = log_q.exp();
    let tail = (terms[last] - top).exp() * q / (1.0 - q);
    Ok(Interval::new(top + partial.ln(), top + (partial + tail).ln()))
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// `log M_k` recovered as `sup_{t>0} log(t^k e^{-ω(t)})`.
pub fn recover_log_sequence(w: &PreWeightFunction, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(-w.eval(0.0)?);
    }
    let kf = k as f64;
    if let Some(m) = w.sequence() {
        // the objective is concave in log t with its maximum at a breakpoint
        let big_k = m.len();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, &l) in m.log_quotients().iter().enumerate() {
            let v = kf * l - omega_assoc(m, l.exp())?;
            if v > best.0 {
                best = (v, i + 1);
            }
        }
        if best.1 == big_k && m.tail().is_none() && k >= big_k {
            return Err(Error::SupAtBoundary { k });
        }
        return Ok(best.0);
    }
    let cap = w.t_max().min(1e300).ln();
    let g = |u: f64| -> Result<f64> { Ok(kf * u - w.eval(u.exp())?) };
    let mut hi = 1.0f64;
    let mut prev = g(0.0)?;
    loop {
        if hi >= cap {
            return Err(Error::SupAtBoundary { k });
        }
        let v = g(hi)?;
        if v < prev {
            break;
        }
        prev = v;
        hi = (hi * 2.0).min(cap);
    }
    let lo = -50.0 - kf.ln();
    let (_, mut best) = golden_max(&g, lo, hi)?;
    for b in w.breakpoints(hi.exp()) {
        best = best.max(g(b.ln())?);
    }
    Ok(best)
}

pub fn recover_sequence(w: &PreWeightFunction, k: usize) -> Result<f64> {
    recover_log_sequence(w, k).map(f64::exp)
}

/// Young conjugate `φ*_ω(x) = sup_{y ≥ 0} (x y − ω(e^y))`.
pub fn young_conjugate(w: &PreWeightFunction, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(-w.eval(1.0)?);
    }
    let vanishes_on_unit = w.is_normalized() || w.eval(1.0)? == 0.0;
    match w.repr() {
        Repr::FromSequence(m) if vanishes_on_unit => {
            let n = (x.ceil() as usize).max(1);
            let lmu = match m.log_mu(n) {
                Some(l) => l,
                None => return Err(Error::Unbounded),
            };
            let y = lmu.max(0.0);
            return Ok(x * y - omega_assoc(m, y.exp())?);
        }
        Repr::Power(a) => {
            let shift = if w.is_normalized() { 1.0 } else { 0.0 };
            let base = if x > *a { (x / a) * ((x / a).ln() - 1.0) } else { -1.0 };
            return Ok(base + shift);
        }
        Repr::Piecewise { final_slope, .. } if x > *final_slope => return Err(Error::Unbounded),
        _ => {}
    }
    if let Repr::FromSequence(m) = w.repr() {
        if m.tail().is_none() && x > m.len() as f64 {
            return Err(Error::Unbounded);
        }
    }
    let cap = w.t_max().min(1e300).ln();
    let h = |y: f64| -> Result<f64> { Ok(x * y - w.eval(y.exp())?) };
    let mut hi = 1.0f64;
    let mut prev = h(0.0)?;
    loop {
        let v = h(hi)?;
        if v < prev {
            break;
        }
        if hi >= cap.min(700.0) {
            return Err(Error::Unbounded);
        }
        prev = v;
        hi = (hi * 2.0).min(cap.min(700.0));
    }
    let (mut a, mut b) = (0.0, hi);
    for _ in 0..300 {
        if b - a <= 1e-12 * (1.0 + b) {
            break;
        }
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if h(m1)? < h(m2)? {
            a = m1;
        } else {
            b = m2;
        }
    }
    let mut best = h(0.5 * (a + b))?.max(h(0.0)?);
    for bp in w.breakpoints(hi.exp()) {
        if bp >= 1.0 {
            best = best.max(h(bp.ln())?);
        }
    }
    Ok(best)
}

/// Rows `W^{(x)}_k = exp(φ*(x k)/x)`, `k ≤ K`, of the matrix associated with `max(0, ω − ω(1))`.
pub fn assoc_matrix(w: &PreWeightFunction, xs: &[Param], k: usize) -> Result<WeightMatrix> {
    match w.envelope(1e8) {
        Some(env) if env.e < 1.0 => {}
        Some(_) => return Err(Error::NotSublinear),
        None => {}
    }
    let wn = if w.eval(1.0)? == 0.0 { w.clone() } else { w.clone().normalized() };
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let xv = x.value();
        let mut logs = Vec::with_capacity(k + 1);
        for j in 0..=k {
            logs.push(young_conjugate(&wn, xv * j as f64)? / xv);
        }
        logs[0] = 0.0;
        let seq = WeightSequence::from_log_values(format!("W^({x})[{}]", w.label()), &logs, Tail::Fitted)?;
        rows.push(MatrixRow { x, seq });
    }
    WeightMatrix::new(format!("Omega[{}]", w.label()), rows, false)
}

/// The testable items of the associated matrix: quotient order, the `2x` moderate-growth
/// bound on `j, k ≤ 50`, and `x ω_W ≤ ω ≤ 2x ω_W + D_x` on a log grid up to `t_max`.
pub fn assoc_matrix_checks(w: &PreWeightFunction, om: &WeightMatrix, t_max: f64) -> Result<ConditionReport> {
    let wn = if w.eval(1.0)? == 0.0 { w.clone() } else { w.clone().normalized() };
    let horizon = om.horizon();
    let mut verdict = Verdict::HoldsTrend;
    let mut report = ConditionReport::new("assoc_matrix", Verdict::HoldsTrend, horizon);
    let ordered = om.rows().windows(2).all(|p| {
        p[0].seq.log_quotients().iter().zip(p[1].seq.log_quotients()).all(|(a, b)| *a <= b + 1e-9 * b.abs().max(1.0))
    });
    report.witnesses.insert("quotient_ordered".into(), ordered as u8 as f64);
    if !ordered {
        verdict = Verdict::FailsTrend;
    }
    for r in om.rows() {
        let two = Param::new(r.x.num * 2, r.x.den);
        if let Some(w2) = om.row(two) {
            let lim = 50.min(horizon / 2);
            let (a, b) = (r.seq.log_values(), w2.log_values());
            let ok = (0..=lim).all(|j| (0..=lim).all(|kk| a[j + kk] <= b[j] + b[kk] + 1e-9 * a[j + kk].abs().max(1.0)));
            report.witnesses.insert(format!("mg2x(x={})", r.x), ok as u8 as f64);
            if !ok {
                verdict = Verdict::FailsTrend;
            }
        }
        let xv = r.x.value();
        let mut d: f64 = 0.0;
        let mut lower_ok = true;
        let limit = t_max.min(r.seq.mu_max());
        let n = 200;
        for i in 0..=n {
            let t = limit.powf(i as f64 / n as f64);
            let om_t = omega_assoc(&r.seq, t)?;
            let wt = wn.eval(t)?;
            lower_ok &= xv * om_t <= wt + 1e-9 * wt.max(1.0);
            d = d.max(wt - 2.0 * xv * om_t);
        }
        report.witnesses.insert(format!("D(x={})", r.x), d);
        if !lower_ok {
            verdict = Verdict::FailsTrend;
        }
    }
    report.verdict = verdict;
    report.notes.push(format!("grid t in [1, {t_max:e}], rows [{}]", om.row_set()));
    Ok(report)
}

/// `(ω₁)` via the ratio profile `ω(2t)/ω(t)` and non-quasianalyticity via `∫ ω(t)/(1+t²) dt`.
pub fn weightfn_predicates(w: &PreWeightFunction) -> Result<ConditionReport> {
    let top = w.t_max().min(1e12) / 2.0;
    if top < 1e3 {
        return Err(Error::TruncationTooShort { got: top as usize, need: 1000 });
    }
    let decades = top.log10();
    let n = (decades * 8.0).ceil() as usize;
    let mut prof = Vec::new();
    for i in 0..=n {
        let t = 10f64.powf(1.0 + (decades - 1.0) * i as f64 / n as f64);
        let wt = w.eval(t)?;
        if wt > 0.0 {
            prof.push((t, w.eval(2.0 * t)? / wt));
        }
    }
    let vals: Vec<f64> = prof.iter().map(|p| p.1).collect();
    let v1 = bounded_trend(&vals, &vals, Scale::Relative);
    let omega1 = ConditionReport::new("omega1", v1, prof.len())
        .witness("ratio_sup", vals.iter().copied().fold(0.0, f64::max))
        .witness("ratio_last", vals.last().copied().unwrap_or(f64::NAN))
        .with_profile(prof);
    let nq = match crate::harmonic::poisson(w, num_complex::Complex64::new(0.0, 1.0), 1e-9) {
        Ok(s) => {
            let half_pi = std::f64::consts::FRAC_PI_2;
            let mut r = ConditionReport::new("nonquasianalytic", Verdict::HoldsTrend, 0)
                .witness("integral", s.value * half_pi)
                .note("integral of omega(t)/(1+t^2) over [0, inf) = (pi/2) P(i), tail from the growth envelope");
            r.tail_bound = Some(Interval::new(s.lower * half_pi, s.upper * half_pi));
            r
        }
        Err(Error::QuasianalyticWeight) => ConditionReport::new("nonquasianalytic", Verdict::FailsTrend, 0)
            .note("growth envelope exponent >= 1: the integral diverges"),
        Err(Error::TailUnbounded { .. }) => ConditionReport::new("nonquasianalytic", Verdict::Inconclusive, 0)
            .note("no tail bound available"),
        Err(e) => return Err(e),
    };
    let mut report = ConditionReport::new("weightfn_predicates", omega1.verdict.and(nq.verdict), 0)
        .note(format!("omega = {}", w.label()));
    report.children = vec![omega1, nq];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(k: usize) -> WeightSequence {
        WeightSequence::gevrey(1.0, k).unwrap()
    }

    fn brute(m: &WeightSequence, t: f64) -> f64 {
        (0..=m.len()).map(|k| k as f64 * t.ln() - m.log_values()[k]).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn omega_of_factorial() {
        let m = fact(100);
        assert_eq!(omega_assoc(&m, 1.0).unwrap(), 0.0);
        assert!((omega_assoc(&m, 3.5).unwrap() - 1.96653).abs() < 1e-5);
        assert!((omega_assoc(&m, 3.5).unwrap() - brute(&m, 3.5)).abs() < 1e-12);
    }

    #[test]
    fn counting() {
        let m = fact(50);
        assert_eq!(counting_mu(&m, 3.5).unwrap(), 3);
        assert_eq!(counting_mu(&WeightSequence::gevrey(2.0, 50).unwrap(), 0.5).unwrap(), 0);
        assert_eq!(counting_mu(&m, m.mu_max()).unwrap(), 50);
        assert_eq!(counting_mu(&m, 1e4).unwrap(), 10_000);
    }

    #[test]
    fn lambda_of_factorial() {
        let m = fact(100);
        let l = lambda_series(&m, 1.0).unwrap();
        assert!((l.lower.exp() - std::f64::consts::E).abs() < 1e-10);
        assert!((l.upper.exp() - std::f64::consts::E).abs() < 1e-10);
        assert_eq!(lambda_series(&m, 0.0).unwrap().lower, 0.0);
    }

    #[test]
    fn recovery() {
        let w = PreWeightFunction::from_sequence(fact(100));
        assert!((recover_sequence(&w, 5).unwrap() - 120.0).abs() < 1e-8 * 120.0);
        assert!((recover_sequence(&w, 0).unwrap() - 1.0).abs() < 1e-15);
        let s = recover_sequence(&PreWeightFunction::sqrt(), 1).unwrap();
        assert!((s - 4.0 * (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn young_closed_forms() {
        let lin = PreWeightFunction::linear();
        assert!((young_conjugate(&lin, 2.0).unwrap() - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-12);
        assert_eq!(young_conjugate(&lin, 0.5).unwrap(), -1.0);
        assert_eq!(young_conjugate(&lin, 0.0).unwrap(), -1.0);
        // the numeric path agrees with the closed form
        let lin_sum = PreWeightFunction::sum(vec![PreWeightFunction::linear()]);
        assert!((young_conjugate(&lin_sum, 2.0).unwrap() - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn young_of_sequence_matches_numeric() {
        let m = fact(200);
        let w = PreWeightFunction::from_sequence(m);
        let generic = PreWeightFunction::sum(vec![w.clone()]);
        for x in [0.5, 1.0, 2.5, 7.0, 30.0] {
            let a = young_conjugate(&w, x).unwrap();
            let b = young_conjugate(&generic, x).unwrap();
            assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn sqrt_matrix_lemma_items() {
        let xs = [Param::new(1, 2), Param::inv(1), Param::new(2, 1)];
        let om = assoc_matrix(&PreWeightFunction::sqrt(), &xs, 400).unwrap();
        assert_eq!(om.row(Param::inv(1)).unwrap().log_values()[0], 0.0);
        let r = assoc_matrix_checks(&PreWeightFunction::sqrt(), &om, 1e4).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend, "{:?}", r.witnesses);
        assert!(r.witnesses["D(x=1)"].is_finite());
    }

    #[test]
    fn linear_is_not_sublinear() {
        assert_eq!(assoc_matrix(&PreWeightFunction::linear(), &[Param::inv(1)], 20).unwrap_err(), Error::NotSublinear);
    }
}
