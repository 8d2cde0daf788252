//! Weighted spaces of entire functions: grid sup norms, the `L²` embeddings, the Gaussian
//! mollifier `E_j ∗ χf` and the seminorms `‖f‖^M_{K,m,r}`.

mod function;
mod mollifier;
mod norms;

pub use function::{frak_seminorm, linspace, SampledFunction, CLOSED_FORM_ORDER_CAP, J_MAX};
pub use mollifier::{kernel_derivatives, kernel_mass, mollify, plateau_cutoff};
pub use norms::{ag_norm, ag_norm_profile, l2_embedding_check, l2_norm, DiscGrid};
