//! ω_M, λ_M and the recovery M_k = sup_t t^k e^{-ω_M(t)} for k! and k!².

use ultragrowth::sequences::WeightSequence;
use ultragrowth::weights::{counting_mu, lambda_series, omega_assoc, recover_log_sequence, PreWeightFunction};

fn main() -> ultragrowth::Result<()> {
    let fact = WeightSequence::gevrey(1.0, 2000)?;
    let fact2 = WeightSequence::gevrey(2.0, 2000)?;
    println!("{:>8} {:>12} {:>12} {:>6}", "t", "omega_k!", "omega_k!^2", "n(t)");
    for t in [1.0, 3.5, 10.0, 100.0, 1000.0] {
        println!("{t:>8} {:>12.6} {:>12.6} {:>6}", omega_assoc(&fact, t)?, omega_assoc(&fact2, t)?, counting_mu(&fact, t)?);
    }

    // e^{ω(t)} ≤ λ(t) ≤ 2 e^{ω(2t)}
    for t in [1.0, 5.0, 20.0] {
        let lam = lambda_series(&fact, t)?;
        println!(
            "t = {t:>4}: omega = {:.6}, log lambda in [{:.10}, {:.10}], log 2 + omega(2t) = {:.6}",
            omega_assoc(&fact, t)?,
            lam.lower,
            lam.upper,
            std::f64::consts::LN_2 + omega_assoc(&fact, 2.0 * t)?
        );
    }

    let w = PreWeightFunction::from_sequence(fact2.clone());
    for k in [1, 10, 100, 1000] {
        println!("k = {k:>4}: recovered log M_k = {:.10}, stored = {:.10}", recover_log_sequence(&w, k)?, fact2.log_values()[k]);
    }
    Ok(())
}
