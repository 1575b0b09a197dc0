//! Certified Hausdorff approximation of co-c.e. spheres and cells.
//!
//! Sets are given by an enumeration of rational balls covering their
//! complement. The search looks for chains of rational balls whose formal
//! mesh, covering and separation conditions can be semi-decided; once all of
//! them answer `Yes` the merged union is an approximation within a known
//! Hausdorff bound.

pub mod approx;
pub mod chains;
pub mod codec;
pub mod effsets;
pub mod error;
pub mod rational;
pub mod space;

pub use chains::{Chain, Face, PairWitness, View};
pub use error::{Error, Result};
pub use rational::Rational;
pub use space::{Ball, ComputableReal, Point, Space, SpaceSpec, Verdict};
