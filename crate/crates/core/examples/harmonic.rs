//! Poisson extension P_ω, the concave transform κ_ω and the sandwich κ/π ≤ P(ir) ≤ 4κ/π.

use std::f64::consts::PI;

use num_complex::Complex64;
use ultragrowth::harmonic::{est3, kappa, poisson};
use ultragrowth::sequences::WeightSequence;
use ultragrowth::weights::PreWeightFunction;

fn main() -> ultragrowth::Result<()> {
    let tol = 1e-9;
    let sqrt = PreWeightFunction::sqrt();
    for y in [1.0, 4.0, 16.0] {
        let p = poisson(&sqrt, Complex64::new(0.0, y), tol)?;
        println!("P_sqrt(i{y}) = {:.9} (closed form {:.9}), kappa = {:.9}", p.value, (2.0 * y).sqrt(), kappa(&sqrt, y, tol)?.value);
    }

    let w = PreWeightFunction::from_sequence(WeightSequence::gevrey(2.0, 2000)?);
    println!("{:>8} {:>12} {:>12} {:>12}", "r", "kappa/pi", "P(ir)", "4kappa/pi");
    for r in [1.0, 10.0, 100.0] {
        let k = kappa(&w, r, tol)?;
        let p = poisson(&w, Complex64::new(0.0, r), tol)?;
        println!("{r:>8} {:>12.6} {:>12.6} {:>12.6}", k.lower / PI, p.value, 4.0 * k.upper / PI);
    }

    let angles: Vec<f64> = (1..8).map(|i| PI * i as f64 / 8.0).collect();
    let rep = est3(&w, &[1.0, 10.0, 100.0], &angles, tol)?;
    println!("{} -> {}", rep.condition, rep.verdict.as_str());
    Ok(())
}
