//! Finite-dimensional experiments on traces of free groups and of free products
//! of matrix algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, structured constructors, random unitaries.
//! * [`words`]: reduced group words, matrix-unit monomials, moment vectors.
//! * [`algebra`]: generated algebras, commutants, surjectivity and factoriality.
//! * [`freegroup`]: unitary representations of free groups and midpoint approximation.
//! * [`matprod`]: pairs of matrix-unit systems and the perturbation `π ↦ π̃`.
//! * [`channels`]: transfer channels of matrix-unit pairs.
//! * [`obstructions`]: isolation gaps and weight bounds from character tables.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the default tolerances assume.

pub mod algebra;
pub mod channels;
pub mod error;
pub mod freegroup;
pub mod gate;
pub mod io;
pub mod linalg;
pub mod matprod;
pub mod obstructions;
pub mod scalar;
pub mod words;

pub use error::{Error, Result};
pub use gate::Gate;
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type CMatrix = linalg::Matrix<f64>;
pub type CMatrix32 = linalg::Matrix<f32>;
pub type Tolerance = linalg::Tolerance<f64>;
pub type UnitaryTuple = freegroup::UnitaryTuple<f64>;
pub type MnMnRep = matprod::MnMnRep<f64>;
pub type AlgebraBasis = algebra::AlgebraBasis<f64>;
pub type TransferChannel = channels::TransferChannel<f64>;
pub type MomentReport = words::MomentReport<f64>;
pub type CharacterTable = obstructions::CharacterTable<f64>;
