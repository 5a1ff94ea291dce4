//! Exact doubling measures, entropy gaps and coset recovery for sets in
//! finite abelian groups.

pub mod cli;
pub mod dist;
pub mod error;
pub mod families;
pub mod group;
pub mod measures;
pub mod rational;
pub mod recovery;
pub mod transform;

pub use error::{Error, Result};
pub use group::{Group, GroupElem, GroupSet, Subgroup};
pub use rational::Rational;
