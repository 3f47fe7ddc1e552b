//! Exact computations on both sides of mirror symmetry for the resolved conifold.

pub mod ainfinity;
pub mod dimer;
pub mod fixtures;
pub mod floer;
pub mod lincomb;
pub mod linalg;
pub mod mirror;
pub mod novikov;
pub mod paths;
pub mod rational;
pub mod report;
pub mod sheaf;
pub mod skyscraper;
pub mod transfer;

pub use lincomb::{LinearCombination, Scalar};
pub use novikov::NovikovScalar;
pub use rational::Rational;
pub use report::{CheckStatus, VerificationReport};
