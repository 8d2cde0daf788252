//! Steps I–V on constant Gevrey ladders: `pipeline [K] [a] [s] [t]` runs λ_k = k!^a
//! (a = 0 means the unit jet e_3), 𝔐 = k!^s, 𝔑 = k!^t. Defaults 1500, 1.4, 1.5, 2.

use std::time::Instant;

use ultragrowth::constructions::{run_pipeline, HorizonPolicy};
use ultragrowth::sequences::{Jet, WeightMatrix, WeightSequence};

fn main() -> ultragrowth::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let k = arg(1, 1500.0) as usize;
    let (a, s, t) = (arg(2, 1.4), arg(3, 1.5), arg(4, 2.0));
    let rows = 1..=8;
    let mm = WeightMatrix::constant(&WeightSequence::gevrey(s, k)?, rows.clone())?;
    let nn = WeightMatrix::constant(&WeightSequence::gevrey(t, k)?, rows)?;
    let lambda = if a == 0.0 { Jet::unit(3, k) } else { Jet::factorial_power(a, k) };
    let start = Instant::now();
    let out = run_pipeline(&lambda, &mm, &nn, HorizonPolicy::Truncate)?;
    println!("K = {k}, {:.1?}", start.elapsed());
    println!("a = {:?}", out.step2.a);
    println!("b = {:?}, d = {:?}", out.step3.b, out.step4.d);
    println!("log2 A = {}, log D = {:.3}", out.log2_a, out.step4.log_d);
    println!("eps_1 = {:.4}, eps_K = {:.4}", out.step2.eps[0], out.step2.eps[out.horizon - 1]);
    for r in [&out.verify_jet, &out.verify_sv, &out.verify_small] {
        println!("{:<16} {:<13} {:?}", r.condition, r.verdict.as_str(), r.witnesses);
    }
    for n in &out.notes {
        println!("note: {n}");
    }
    Ok(())
}
