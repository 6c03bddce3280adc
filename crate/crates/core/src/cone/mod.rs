//! Truncated Givental spaces, genus-zero axioms, and recovery of cone points from a big point.
//! The only theory with an independent oracle is the point; others come from correlator tables.

pub mod algebra;
pub mod givental;
pub mod theory;

pub use algebra::{Elt, TruncAlgebra, ZMat, ZSer, ZVec};
pub use givental::{
    cone_defect, cone_point, demo_point, di_matrix, j_function, point_exponential, reconstruct, reparametrize,
    tangent_defect, tau_of, v_factor, DemoTranscript, GiventalPoint, ReconstructionResult, VFactor,
};
pub use theory::{
    axioms_check, point_psi_oracle, point_psi_string, AxiomReport, Evaluator, Genus0Theory, Ins, PointTheory,
    TableTheory, Tampered, TPoint,
};
