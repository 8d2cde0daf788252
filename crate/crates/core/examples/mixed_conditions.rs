//! SV, γ₁, L, sω₁ and BMT-κ on Gevrey pairs (k!^s, k!^t): each should hold iff s ≤ t.

use ultragrowth::growth::{implication_consistency, mixed_condition, MixedConditionSpec, MixedKind};
use ultragrowth::sequences::WeightSequence;

fn main() -> ultragrowth::Result<()> {
    let k = 2000;
    let kinds = [MixedKind::Sv, MixedKind::Gamma1, MixedKind::L, MixedKind::StrongOmega1, MixedKind::BmtKappa];
    print!("{:>5} {:>5}", "s", "t");
    for kind in kinds {
        print!(" {:>14}", kind.name());
    }
    println!();
    for (s, t) in [(1.5, 2.0), (2.0, 2.0), (2.0, 1.5), (1.25, 3.0)] {
        let m = WeightSequence::gevrey(s, k)?;
        let n = WeightSequence::gevrey(t, k)?;
        print!("{s:>5} {t:>5}");
        for kind in kinds {
            let r = mixed_condition(&MixedConditionSpec::new(kind), &m, &n)?;
            print!(" {:>14}", r.verdict.as_str());
        }
        println!();
    }
    let c = implication_consistency(&WeightSequence::gevrey(1.5, k)?, &WeightSequence::gevrey(2.0, k)?)?;
    println!("{} -> {}", c.condition, c.verdict.as_str());
    for n in &c.notes {
        println!("  {n}");
    }
    Ok(())
}
