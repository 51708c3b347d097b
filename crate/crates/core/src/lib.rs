//! Exact decomposition of functions on finite sets into sums of functions
//! invariant under pairwise-commuting transformations.
//!
//! Everything is computed over the rationals. The constructive algorithms
//! for two and three transformations are cross-checked against a linear
//! feasibility oracle that works for any number of transformations.

pub mod cli;
pub mod cohomology;
pub mod decomp;
pub mod error;
pub mod function;
pub mod generate;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod orbits;
pub mod rational;
pub mod star;
pub mod system;

pub use error::{Error, Result};
pub use function::RationalFunction;
pub use rational::Rational;
pub use system::{
    apply_word, delta, delta_pow, is_invariant, mixed_delta, validate_system, verify_decomposition, CommutingSystem,
    Decomposition, DecompositionDefect, Domain, Transformation,
};
