//! Twisted coefficient systems on the category of partial injections: exact
//! linear algebra, functors and their invariants, example families, the Burau
//! relation checker and twisted homology of symmetric groups.

pub mod burau;
pub mod linalg;
pub mod examples;
pub mod functor;
pub mod homology;
pub mod sigma;
