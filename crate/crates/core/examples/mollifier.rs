//! f_j = E_j ∗ χf for f(x) = x² and the seminorm error ‖f − f_j‖^{k!}_{[−1,1],0,1}.

use ultragrowth::entire::{frak_seminorm, kernel_mass, linspace, mollify, SampledFunction};
use ultragrowth::sequences::WeightSequence;

fn main() -> ultragrowth::Result<()> {
    let f = SampledFunction::polynomial(vec![0.0, 0.0, 1.0])?;
    let m = WeightSequence::gevrey(1.0, 64)?;
    let xs = linspace(-1.0, 1.0, 41);
    let exact = f.tabulate(xs.clone(), 2)?;
    let mut prev: Option<f64> = None;
    for j in [25u32, 100, 400, 1600] {
        let fj = mollify(&f, 1.0, j, xs.clone(), 2, 1e-12)?;
        let err = frak_seminorm(&exact.sub(&fj)?, &m, &xs, 0, 1.0)?;
        let ratio = prev.map(|p| format!("{:.3}", p / err)).unwrap_or_default();
        println!("j = {j:>5}: mass = {:.12}, f_j(0) = {:.8}, error = {err:.3e} {ratio}", kernel_mass(j as f64, 1e-13).value, fj.eval_real(0.0));
        prev = Some(err);
    }
    Ok(())
}
