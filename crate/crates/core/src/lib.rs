//! Numerical verification of moment maps, symplectic and Poisson reduction,
//! root systems of compact Lie algebras, and Poisson transversals.

pub mod action;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod models;
pub mod phase_space;
pub mod reduction;
pub mod roots;
pub mod transversal;

pub use error::{Error, Result};
pub use lie::{AlgebraElement, DualElement, GroupElement, LieAlgebra};
