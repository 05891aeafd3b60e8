//! Farey words, Farey polynomials and membership certificates for the Riley
//! slice of two-parabolic groups ⟨X, Y_μ⟩.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuation;
pub mod dd;
pub mod error;
pub mod eval;
pub mod farey;
pub mod kleinian;
pub mod membership;
pub mod poly;
pub mod rays;
pub mod render;
pub mod roots;
pub mod serde_c64;

pub use error::{Error, Result};
pub use farey::{enumerate_slopes, farey_word, FareyWord, Slope};
pub use num_complex::Complex64;
pub use poly::{trace_polys, FareyPolyPair, IntPoly, PolyMatrix2};
