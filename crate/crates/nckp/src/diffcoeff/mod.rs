//! The coefficient differential *-algebra of the hierarchy.
//!
//! Two backends: the free associative algebra over the Gaussian rationals on
//! differential field symbols `D^m(U_k)` and their daggers, and a structured
//! backend (finite-dimensional algebra tensor commutative differential
//! polynomials in component fields).

mod ncpoly;
mod structured;

pub use ncpoly::{FieldSymbol, NCPoly, Word};
#[cfg(test)]
pub(crate) use ncpoly::random_poly;
pub use structured::{
    scalar_specialize, specialize, CommDiffPoly, CommMonomial, ComponentVar, StructuredElement,
};
