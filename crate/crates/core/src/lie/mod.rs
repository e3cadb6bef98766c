//! Lie algebras given by structure constants, with optional matrix
//! representations integrating to SO(n), SU(n), U(n), tori or translations.

mod algebra;
mod group;
pub mod so3;

pub use algebra::{AlgebraElement, DualElement, LieAlgebra, MatrixRep, Representation};
pub use group::{GroupElement, MatrixGroupKind};
