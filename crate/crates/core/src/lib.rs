//! Exact-arithmetic certificates for the Calabi-energy lower-bound functional
//! on the toric del Pezzo surfaces `CP2 # 2(-CP2)` and `CP2 # 3(-CP2)`.
//!
//! The crate rebuilds the functional from the moment polygon of each Kähler
//! class, cross-checks it against hand-transcribed closed forms, and emits
//! machine-checkable certificates (coefficient positivity, Sturm root counts,
//! symbolic identities) for its convexity and critical-point properties.

pub mod certify;
pub mod cli;
pub mod delpezzo;
pub mod fixture;
pub mod functional;
pub mod parser;
pub mod poly;
pub mod polytope;
pub mod ratfunc;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod univariate;

pub use poly::{Monomial, MultiPoly, PolyError, Vars};
pub use ratfunc::RatFunc;
pub use scalar::{PiScalar, Rational};
