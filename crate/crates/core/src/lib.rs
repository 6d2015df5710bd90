//! Polynomial algebra, lattice quotients and finite instances of
//! translation-invariant CSS codes built from two generating polynomials.

pub mod appendix;
pub mod barrier;
pub mod codes;
pub mod distance;
pub mod exec;
pub mod fixtures;
pub mod gf2;
pub mod instantiate;
pub mod lattice;
pub mod poly;
pub mod specfile;
pub mod syntax;
