//! Young conjugates of weight functions and the associated matrix W^{(x)}_k = exp(φ*(xk)/x).

use ultragrowth::sequences::Param;
use ultragrowth::weights::{assoc_matrix, assoc_matrix_checks, weightfn_predicates, young_conjugate, PreWeightFunction};

fn main() -> ultragrowth::Result<()> {
    let w = PreWeightFunction::sqrt();
    for x in [0.5, 1.0, 4.0, 16.0] {
        // for t^α the conjugate is (x/α)(ln(x/α) − 1)
        println!("phi*(x = {x:>4}) = {:.8}", young_conjugate(&w, x)?);
    }
    let preds = weightfn_predicates(&w)?;
    println!("{} -> {}", preds.condition, preds.verdict.as_str());

    let xs: Vec<Param> = (1..=4).map(Param::inv).collect();
    let om = assoc_matrix(&w, &xs, 400)?;
    for row in om.rows() {
        let lv = row.seq.log_values();
        println!("x = {:>4}: log W_10 = {:>10.4}, log W_100 = {:>10.4}", row.x, lv[10], lv[100]);
    }
    let checks = assoc_matrix_checks(&w, &om, 1e6)?;
    println!("{} -> {}", checks.condition, checks.verdict.as_str());
    for c in &checks.children {
        println!("  {:<24} {}", c.condition, c.verdict.as_str());
    }
    Ok(())
}
