//! Boolean nonlocal boxes over GF(2).
//!
//! Measurement inputs are odd-parity `n`-bit words, symmetries are affine maps
//! `x ↦ Rx ⊕ T` with `RᵗR = I`, and every closed-form bound in [`bounds`] has
//! an exhaustive-enumeration or Monte Carlo counterpart.

pub mod bounds;
pub mod boxes;
pub mod error;
pub mod fixtures;
pub mod gf2;
pub mod input_spaces;
pub mod invariant;
pub mod report;
pub mod symmetry;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use input_spaces::{InputPoint, InputSpace, TranslationPoint};

/// Exact rational used for every probability and enumerated average.
pub type Rational = num_rational::Ratio<i64>;
