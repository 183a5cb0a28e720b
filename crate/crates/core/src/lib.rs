//! Numerical toolkit for the quantum Heisenberg group, its dual, their
//! doubles, dressing actions, twisted convolution algebras, the associated
//! representations and the braiding operators between them.

pub mod algebra;
pub mod braiding;
pub mod dressing;
pub mod error;
pub mod groups;
pub mod harness;
pub mod kernel;
pub mod representations;
pub mod rng;

pub use error::{Error, Result};
