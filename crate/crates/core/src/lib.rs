//! Predimension calculus for Hrushovski-style generic structures: exact
//! `δ_{β,α}`, dimension and strong substructures, intrinsic closure, the
//! class-𝒜 constructions, finite generic approximations and random-graph
//! sampling.

pub mod closure;
pub mod constructions;
pub mod dimension;
pub mod embed;
pub mod error;
pub mod generic;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod rational;
pub mod sampler;
pub mod structure;
pub mod suites;

pub use dimension::{AlphaSpec, DimResult, DimValue, Predim, Strategy};
pub use error::{Error, Result};
pub use rational::Rational;
pub use structure::{Elem, ElemSet, Signature, Structure};
