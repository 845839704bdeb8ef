//! Exact homological algebra over prime fields.
//!
//! The crate implements divided-power differential operators in positive
//! characteristic together with the machinery needed to compute their
//! Hochschild cohomology at desk scale: sparse polynomials and Frobenius
//! twists ([`poly`]), the operator algebra and its matrix realizations
//! ([`dpdo`]), exact linear algebra and spectral sequences ([`linalg`]), bar
//! and Koszul complexes ([`hochschild`]), Gerstenhaber–Schack complexes over
//! finite posets ([`gs`]) and inverse systems with derived limits
//! ([`tower`]).

pub mod error;
pub mod gfp;
pub mod linalg;
pub mod poly;
pub mod dpdo;
pub mod gs;
pub mod hochschild;
pub mod tower;

pub use error::{Error, Result};
pub use gfp::{FpScalar, PrimeField};
