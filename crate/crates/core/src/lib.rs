//! Finite-dimensional models of masas, their commutants on L²(M), and the
//! combinatorics of dyadic constructions of multiplicity invariants.
//!
//! Numerical code is generic over [`scalar::Real`]; aliases for `f64` and
//! `f32` are provided at the crate root.

pub mod algebra;
pub mod constructions;
pub mod diagram;
pub mod error;
pub mod index_sets;
mod linalg;
pub mod matrix;
pub mod nset;
pub mod puk;
pub mod scalar;
pub mod suites;

pub use algebra::{
    commutant, cutdown_spectrum, finite_puk_spectrum, generate_algebra, jones_projection,
    minimal_projections, mixed_algebra, mixed_spectrum, AlgebraBasis, SpectrumReport,
};
pub use constructions::{build_gadget, AutomorphismKind, ResourceGuard, ShiftGadget, TruncatedAutomorphism};
pub use diagram::{diagram_from_construction, diagram_from_numeric, render, Format, MultiplicityDiagram};
pub use error::{Error, Result};
pub use index_sets::{BitSeq, LambdaSpec, MultiIndex, Quadrant, SiblingPair};
pub use matrix::{ComplexMatrix, Conjugation, GnsSpace, TracedAlgebraShape};
pub use nset::{direct_sum_puk, nset_product, tensor_mixed, tensor_mixed_infinite, NSet, NValue};
pub use puk::{eval_construction, CutdownOracle, EvalOutcome};
pub use scalar::Real;

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type GnsSpace64 = GnsSpace<f64>;
pub type GnsSpace32 = GnsSpace<f32>;
pub type AlgebraBasis64 = AlgebraBasis<f64>;
pub type AlgebraBasis32 = AlgebraBasis<f32>;
pub type SpectrumReport64 = SpectrumReport<f64>;
pub type SpectrumReport32 = SpectrumReport<f32>;
pub type ShiftGadget64 = ShiftGadget<f64>;
pub type ShiftGadget32 = ShiftGadget<f32>;
