//! Toric codes from lattice polytopes over finite fields.
//!
//! The crate builds the evaluation matrix of a lattice polytope over GF(q),
//! the primal toric code it generates and the dual code (its left kernel),
//! and computes their parameters by exhaustive search at desk scale. It also
//! carries the closed-form parameter predictions for polytopes of degree one
//! and a sampling layer for the mode of short dual words.

pub mod codes;
pub mod error;
pub mod formulas;
pub mod gf;
pub mod linalg;
pub mod polytope;
pub mod stats;

pub use codes::{
    dmin_dual, dmin_primal_bruteforce, dual_code, evaluation_matrix, f_s, primal_code, r_s, CodeRole, DualDistance,
    EvaluationMatrix, LinearCode, PrimalDistance,
};
pub use error::{Error, Result};
pub use formulas::{
    degree_one_params, dual_dmin_bound, dual_dmin_predicted, mode_predicted, verify_formulas, verify_moebius,
    verify_table1, ParamPrediction, ParamSource,
};
pub use gf::{embed, Embedding, Field, FieldDescriptor, FieldElement};
pub use linalg::{EchelonBasis, Matrix, Rref};
pub use polytope::{
    dilated_simplex, exceptional_simplex, interval, lawrence_prism, pyramid, DegreeOneBase, DegreeOneDescriptor,
    LatticePolytope, PolytopeReport, PolytopeSpec,
};
pub use stats::{
    generic_fraction_estimate, is_generic_tuple, mode, relative_mode, w_s, GenericFraction, GenericityReport,
    Histogram, ModeConfig, ModeReport, WValue,
};
