//! Weight matrices: the 2^{-kj}-damped equivalent matrix and the quantified SV check.

use ultragrowth::growth::{matrix_mixed_condition, MixedConditionSpec, MixedKind, Quantifier};
use ultragrowth::sequences::{ml_equivalent_matrix, verify_sandwich, WeightMatrix, WeightSequence};

fn main() -> ultragrowth::Result<()> {
    let mm = WeightMatrix::constant(&WeightSequence::gevrey(1.0, 2000)?, 1..=6)?;
    let (nn, sandwiches) = ml_equivalent_matrix(&mm)?;
    for s in &sandwiches {
        println!("row 1/{}: A = {:.4e}, B = {:.4e}, j0 = {}, j1 = {}", s.k, s.log_a.exp(), s.log_b.exp(), s.j0, s.j1);
    }
    println!("sandwich verified: {}", verify_sandwich(&mm, &nn, &sandwiches));

    let m = WeightMatrix::constant(&WeightSequence::gevrey(1.0, 1000)?, 1..=4)?;
    let n = WeightMatrix::constant(&WeightSequence::gevrey(2.0, 1000)?, 1..=4)?;
    let rep = matrix_mixed_condition(&MixedConditionSpec::new(MixedKind::Sv), &m, &n, Quantifier::ForallYExistsX)?;
    println!("{} -> {}", rep.condition, rep.verdict.as_str());
    for (name, v) in rep.witnesses.iter().filter(|(k, _)| k.starts_with("x(")) {
        println!("  {name} = {v}");
    }
    Ok(())
}
