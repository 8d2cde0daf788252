//! The θ-sequence lemma and the five-step construction of a Roumieu pair `(R, S)` from a
//! Beurling jet. Every defining inequality is re-checked on the constructed objects.

mod pipeline;
mod theta;

pub use pipeline::{
    run_pipeline, step1_normalize, step2_jet_envelope, step34_lower_sequences, step3_lower_m, step4_lower_n,
    step5_build_rs, HorizonPolicy, PipelineResult, Step1, Step2, Step3, Step4,
};
pub use theta::{theta_builder, theta_diagnostics, theta_greedy, theta_violation, ThetaDiagnostics, ThetaResult, DIVERGENCE_PROXY, TAIL_CONSTANT, THETA_CAP_EXPONENT};
