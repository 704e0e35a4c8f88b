//! Combinatorial machinery for the boundary pullback map of a Thurston map
//! with four postcritical points.
//!
//! Modules, bottom to top: [`words`] (free groups), [`projective`]
//! (P Γ(2) and its actions), [`cf`] (even continued fractions), [`schreier`]
//! (the index-4 subgroup H), [`virtualendo`] (φ and its extensions),
//! [`boundary`] (σ on Q ∪ {1/0}), [`wreath`] (wreath recursions) and
//! [`twister`] (the twisting classification).

pub mod boundary;
pub mod cf;
pub mod checks;
pub mod error;
pub mod par;
pub mod projective;
pub mod schreier;
pub mod twister;
pub mod virtualendo;
pub mod words;
pub mod wreath;

pub use error::{Error, Result};
pub use projective::{ExtRational, MatLetter, MobiusMat, ParityClass};
pub use words::{Base, Context, Letter, Word};
