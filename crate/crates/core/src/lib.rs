//! Numerics around the isomorphism `SU(2) ⊗ SU(2) ≅ SO(4)` realised as an
//! adjoint action by a Bell-basis intertwiner, and the constructions built on it:
//! the n-qubit intertwiner and its three-qubit phase search, the spin map
//! `SU(2) → SO(3)`, charts on symmetric unitaries `U(n)/O(n)`, and the abelian
//! universal Yang-Mills action.

pub mod bell;
pub mod error;
pub mod grassmann;
pub mod linalg;
pub mod phase_search;
pub mod sampling;
pub mod spin;
pub mod yang_mills;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
