//! Weight sequences, weight matrices, jets and their order relations.

mod jet;
mod matrix;
mod relations;
mod sequence;

pub use jet::{jet_norm, make_jet, Jet, JetNorm, JetSpec, JetWeight};
pub use matrix::{
    make_matrix, matrix_condition, matrix_condition_scoped, ml_equivalent_matrix, shift_dc_matrix,
    verify_sandwich, witness_order, MatrixCondition, MatrixRow, MatrixSpec, Param, RowScope, RowSpec,
    Sandwich, WeightMatrix,
};
pub use relations::{growth_index, quasianalytic_check, relation_check, GrowthIndex, Relation, MIN_RELATION_K};
pub use sequence::{make_sequence, SequenceKind, SequenceSpec, Tail, TailModel, WeightSequence};
