//! Pre-weight functions, associated weight functions, Young conjugates and associated matrices.

mod assoc;
mod function;

pub use assoc::{
    assoc_matrix, assoc_matrix_checks, counting_mu, lambda_series, omega_assoc, recover_log_sequence,
    recover_sequence, weightfn_predicates, young_conjugate,
};
pub use function::{make_weight_function, Envelope, PreWeightFunction, Repr, WeightFnSpec};
