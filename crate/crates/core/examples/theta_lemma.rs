//! The θ-sequence lemma: θ ↑ ∞, θγ ↓, θβ → 0 and Σ_{k≥j} θ_k α_k ≤ 8 θ_j Σ_{k≥j} α_k.

use ultragrowth::constructions::{theta_builder, theta_greedy, theta_violation};

fn main() -> ultragrowth::Result<()> {
    let k = 4096;
    let inv: Vec<f64> = (1..=k).map(|j| 1.0 / j as f64).collect();
    let geometric: Vec<f64> = (1..=k).map(|j| 0.5f64.powi(j as i32)).collect();
    let poly: Vec<f64> = (1..=k).map(|j| (j as f64).powi(-2)).collect();
    for (name, alpha) in [("zero", vec![0.0; k]), ("2^-k", geometric), ("k^-2", poly)] {
        let r = theta_builder(&alpha, &inv, &inv)?;
        let d = &r.diagnostics;
        println!(
            "alpha = {name:<5} theta_K = {:>9.3}, tail ratio = {:.3}, theta*beta quarters = {:.4} / {:.4}",
            r.theta[k - 1], d.tail_ratio, d.theta_beta_first_quarter, d.theta_beta_last_quarter
        );
    }
    // a flat β leaves no room for θ to grow
    let flat = theta_greedy(&vec![0.0; k], &vec![0.5; k], &inv)?;
    println!("flat beta: {:?}", theta_violation(&flat.diagnostics));
    Ok(())
}
