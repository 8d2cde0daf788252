//! Jet norms ‖λ‖^M_r = sup_k |λ_k|/(r^k M_k) and the Borel-class membership trend.

use ultragrowth::sequences::{jet_norm, Jet, JetWeight, WeightSequence};
use ultragrowth::weights::PreWeightFunction;

fn main() -> ultragrowth::Result<()> {
    let m = WeightSequence::gevrey(2.0, 1000)?;
    let w = PreWeightFunction::from_sequence(WeightSequence::gevrey(2.0, 1000)?);
    for (name, jet) in [("e_3", Jet::unit(3, 1000)), ("k!", Jet::factorial_power(1.0, 1000)), ("k!^2", Jet::factorial_power(2.0, 1000))] {
        for r in [0.5, 1.0, 2.0] {
            let n = jet_norm(&jet, JetWeight::Sequence(&m), r)?;
            println!("{name:<5} r = {r}: {:>12.5e} {}", n.value, n.trend.as_str());
        }
    }
    let n = jet_norm(&Jet::factorial_power(1.0, 200), JetWeight::Function(&w), 1.0)?;
    println!("k! against exp(phi*(k)) of omega_(k!^2): {:.5e}", n.value);
    Ok(())
}
