//! Exact computational kernel for convex-geometric finite generation
//! experiments: rational cones and Hilbert bases, toric linear systems,
//! graded monomial algebras, and the verification pipelines built on top.

pub mod affine;
pub mod charsys;
pub mod chop;
pub mod cone;
pub mod dioph;
pub mod divisor;
pub mod error;
pub mod graded;
pub mod hilbert;
pub mod lifting;
pub mod linalg;
pub mod polyhedron;
pub mod quad;
pub mod rat;
pub mod regions;
pub mod restriction;
pub mod samples;
pub mod toric;

pub use error::KernelError;
pub use quad::{QuadExt, QuadVec};
pub use rat::{Int, IntVec, Rat, RatVec};
