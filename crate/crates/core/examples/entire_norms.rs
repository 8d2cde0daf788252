//! Grid sup norms ‖f‖_{A_g} and both L² embeddings with the constants 3π and e^K.

use num_complex::Complex64;
use ultragrowth::entire::{ag_norm_profile, l2_embedding_check, DiscGrid, SampledFunction};
use ultragrowth::sequences::WeightSequence;
use ultragrowth::weights::omega_assoc;

fn main() -> ultragrowth::Result<()> {
    let m = WeightSequence::gevrey(2.0, 2000)?;
    let g = |z: Complex64| omega_assoc(&m, z.norm()).unwrap_or(f64::INFINITY);
    // ω is increasing, so g(z + u) ≤ g(|z| + 1) for |u| ≤ 1
    let h = |z: Complex64| omega_assoc(&m, z.norm() + 1.0).unwrap_or(f64::INFINITY);
    let grid = DiscGrid::new(50.0, 100, 64);
    for f in [SampledFunction::polynomial(vec![1.0])?, SampledFunction::polynomial(vec![0.0, 1.0])?, SampledFunction::polynomial(vec![0.0, 0.0, 1.0])?] {
        let rep = l2_embedding_check(&f, &g, &h, 0.0, &grid, 1e-8)?;
        println!("{f:?}: {}", rep.verdict.as_str());
        for c in &rep.children {
            println!("  {:<10} {:.6} <= {:.6}", c.condition, c.witnesses["lhs"], c.witnesses["rhs"]);
        }
    }
    let radii = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];
    let rep = ag_norm_profile(&SampledFunction::Exp { rate: 1.0, scale: 1.0 }, &g, &radii, 16, 32);
    println!("e^z against omega_(k!^2): {}", rep.verdict.as_str());
    Ok(())
}
