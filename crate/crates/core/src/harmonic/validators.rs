use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::growth::{mixed_condition, MixedConditionSpec, MixedKind};
use crate::report::{bounded_trend, ConditionReport, Scale, Verdict};
use crate::sequences::WeightSequence;
use crate::weights::{omega_assoc, PreWeightFunction};

use super::poisson::poisson;

const GRID_NOTE: &str = "constants are grid-minimal: they certify the inequality on the declared grid only";

/// `P_ω(z) ≥ ω(|z|)` on the polar grid `radii × angles`.
pub fn est3(w: &PreWeightFunction, radii: &[f64], angles: &[f64], tol: f64) -> Result<ConditionReport> {
    let mut margin = f64::INFINITY;
    let mut worst = Complex64::new(0.0, 0.0);
    for &r in radii {
        for &a in angles {
            let z = Complex64::from_polar(r, a);
            let p = poisson(w, z, tol)?;
            let m = p.upper + tol - w.eval(r)?;
            if m < margin {
                margin = m;
                worst = z;
            }
        }
    }
    let v = if margin >= 0.0 { Verdict::HoldsTrend } else { Verdict::FailsTrend };
    Ok(ConditionReport::new("est3", v, 0)
        .witness("margin", margin)
        .witness("worst_re", worst.re)
        .witness("worst_im", worst.im)
        .note(GRID_NOTE))
}

/// `P(z₀) ≤` the `n`-point average of `P` over the circle of the given radius.
pub fn subharmonic_mean(w: &PreWeightFunction, z0: Complex64, radius: f64, n: usize, tol: f64) -> Result<ConditionReport> {
    if n < 3 {
        return Err(Error::InvalidDescriptor("circle average needs at least 3 points".into()));
    }
    let centre = poisson(w, z0, tol)?;
    let mut sum = 0.0;
    for i in 0..n {
        let z = z0 + Complex64::from_polar(radius, 2.0 * PI * i as f64 / n as f64);
        sum += poisson(w, z, tol)?.value;
    }
    let avg = sum / n as f64;
    let gap = avg - centre.value;
    let v = if gap >= -tol { Verdict::HoldsTrend } else { Verdict::FailsTrend };
    Ok(ConditionReport::new("subharmonic_mean", v, 0)
        .witness("centre", centre.value)
        .witness("average", avg)
        .witness("gap", gap))
}

fn require(report: ConditionReport, what: &str) -> Result<()> {
    if report.verdict.holds() {
        Ok(())
    } else {
        Err(Error::HypothesisNotMet(format!("{what}: {}", report.verdict)))
    }
}

/// Running maxima of a deficit over grid points ordered by modulus, as a trend profile.
fn deficit_report(name: &str, mut pts: Vec<(f64, f64)>) -> (Verdict, f64, Vec<(f64, f64)>) {
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let vals: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let v = bounded_trend(&vals, &vals, Scale::Log);
    let sup = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let _ = name;
    (v, sup, pts)
}

/// `P_M(x+iy) ≤ ω_N(x) + ε|y| + K(ε)` given `M ≺_{sω₁} N`, for `ε` in the grid.
pub fn w1(m: &WeightSequence, n: &WeightSequence, eps: &[f64], coords: &[f64], tol: f64) -> Result<ConditionReport> {
    require(mixed_condition(&MixedConditionSpec::new(MixedKind::StrongOmega1), m, n)?, "M strong-omega1 N")?;
    let wm = PreWeightFunction::from_sequence(m.clone());
    let mut verdict = Verdict::HoldsTrend;
    let mut report = ConditionReport::new("w1", Verdict::HoldsTrend, m.len().min(n.len())).note(GRID_NOTE);
    let mut samples = Vec::new();
    for &x in coords.iter().chain(std::iter::once(&0.0)) {
        for &y in coords {
            samples.push((x, y, poisson(&wm, Complex64::new(x, y), tol)?.upper, omega_assoc(n, x)?));
        }
    }
    for &e in eps {
        let pts = samples.iter().map(|&(x, y, p, on)| (x.hypot(y), p - on - e * y)).collect();
        let (v, sup, prof) = deficit_report("w1", pts);
        verdict = verdict.and(v);
        report.witnesses.insert(format!("K(eps={e})"), sup.max(0.0));
        if e == eps[eps.len() - 1] {
            report = report.with_profile(prof);
        }
    }
    report.verdict = verdict;
    Ok(report)
}

/// `P_{M¹}(z+w) ≤ P_{M³}(z) + A` for `|w| ≤ 1`, given `M¹ ≺_{sω₁} M² ≺_{sω₁} M³`.
pub fn mixed_w1(
    m1: &WeightSequence,
    m2: &WeightSequence,
    m3: &WeightSequence,
    grid: &[Complex64],
    tol: f64,
) -> Result<ConditionReport> {
    let spec = MixedConditionSpec::new(MixedKind::StrongOmega1);
    require(mixed_condition(&spec, m1, m2)?, "M1 strong-omega1 M2")?;
    require(mixed_condition(&spec, m2, m3)?, "M2 strong-omega1 M3")?;
    let w1f = PreWeightFunction::from_sequence(m1.clone());
    let w3f = PreWeightFunction::from_sequence(m3.clone());
    let shifts: Vec<Complex64> = std::iter::once(Complex64::new(0.0, 0.0))
        .chain((0..8).map(|i| Complex64::from_polar(1.0, PI * i as f64 / 4.0)))
        .collect();
    let mut pts = Vec::new();
    for &z in grid {
        let base = poisson(&w3f, z, tol)?.lower;
        let mut worst = f64::NEG_INFINITY;
        for &s in &shifts {
            worst = worst.max(poisson(&w1f, z + s, tol)?.upper - base);
        }
        pts.push((z.norm(), worst));
    }
    let (v, sup, prof) = deficit_report("mixed_w1", pts);
    Ok(ConditionReport::new("mixed_w1", v, m1.len())
        .witness("A", sup.max(0.0))
        .with_profile(prof)
        .note("shifts w: centre and 8 points of the unit circle")
        .note(GRID_NOTE))
}

/// Smallest power-of-two `C` with `P_{M^{l+1}}(z) + log(1+|z|^l) ≤ P_{M¹}(Cz) + C` on the grid.
pub fn dc_log_absorb(
    m_next: &WeightSequence,
    m_first: &WeightSequence,
    l: u32,
    grid: &[Complex64],
    tol: f64,
) -> Result<ConditionReport> {
    let wa = PreWeightFunction::from_sequence(m_next.clone());
    let wb = PreWeightFunction::from_sequence(m_first.clone());
    let mut lhs = Vec::with_capacity(grid.len());
    for &z in grid {
        lhs.push(poisson(&wa, z, tol)?.upper + (1.0 + z.norm().powi(l as i32)).ln());
    }
    let mut c = 1.0;
    let mut worst = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    while c <= f64::from(1u32 << 20) {
        worst = (f64::NEG_INFINITY, worst.1);
        for (i, &z) in grid.iter().enumerate() {
            let gap = lhs[i] - poisson(&wb, c * z, tol)?.lower - c;
            if gap > worst.0 {
                worst = (gap, z);
            }
        }
        if worst.0 <= 0.0 {
            return Ok(ConditionReport::new("dc_log_absorb", Verdict::HoldsTrend, m_next.len())
                .witness("C", c)
                .witness("l", l as f64)
                .note(GRID_NOTE));
        }
        c *= 2.0;
    }
    Ok(ConditionReport::new("dc_log_absorb", Verdict::FailsTrend, m_next.len())
        .witness("worst_re", worst.1.re)
        .witness("worst_im", worst.1.im)
        .witness("gap", worst.0)
        .note("no C <= 2^20 works on the grid"))
}

/// Phragmén–Lindelöf bound `log|f(z)| ≤ P_N(kz) + c₀`, where `c₀` is the real-axis constant
/// `max(0, sup_x log|f(x)| − ω_N(k|x|))` measured on `real_grid`.
pub fn phragmen(
    f: &dyn Fn(Complex64) -> Complex64,
    n: &WeightSequence,
    k: f64,
    real_grid: &[f64],
    grid: &[Complex64],
    tol: f64,
) -> Result<ConditionReport> {
    let mut c0: f64 = 0.0;
    for &x in real_grid {
        c0 = c0.max(f(Complex64::new(x, 0.0)).norm().ln() - omega_assoc(n, k * x.abs())?);
    }
    let wn = PreWeightFunction::from_sequence(n.clone());
    let mut margin = f64::INFINITY;
    let mut worst = Complex64::new(0.0, 0.0);
    for &z in grid {
        let m = poisson(&wn, k * z, tol)?.upper + c0 + tol - f(z).norm().ln();
        if m < margin {
            margin = m;
            worst = z;
        }
    }
    let v = if margin >= 0.0 { Verdict::HoldsTrend } else { Verdict::FailsTrend };
    Ok(ConditionReport::new("phragmen", v, n.len())
        .witness("real_axis_constant", c0)
        .witness("margin", margin)
        .witness("worst_re", worst.re)
        .witness("worst_im", worst.im)
        .note("the real-axis constant is folded into the bound"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn est3_sqrt() {
        let r = est3(&PreWeightFunction::sqrt(), &[1.0, 4.0, 16.0], &[0.0, PI / 4.0, PI / 2.0], 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend);
    }

    #[test]
    fn subharmonic_at_real_point() {
        let r = subharmonic_mean(&PreWeightFunction::sqrt(), Complex64::new(2.0, 0.0), 1.0, 64, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend, "{:?}", r.witnesses);
    }

    #[test]
    fn phragmen_square() {
        let n = WeightSequence::gevrey(2.0, 2000).unwrap();
        let real: Vec<f64> = (0..=200).map(|i| -10.0 + 0.1 * i as f64).collect();
        let grid: Vec<Complex64> = (1..=10)
            .flat_map(|r| (0..8).map(move |a| Complex64::from_polar(r as f64, PI * a as f64 / 4.0)))
            .collect();
        let r = phragmen(&|z| z * z, &n, 1.0, &real, &grid, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsTrend);
    }

    #[test]
    fn w1_hypothesis_enforced() {
        let a = WeightSequence::gevrey(2.0, 200).unwrap();
        let b = WeightSequence::gevrey(1.5, 200).unwrap();
        assert!(matches!(w1(&b, &a, &[1.0], &[1.0], 1e-8), Err(Error::HypothesisNotMet(_))));
    }
}
