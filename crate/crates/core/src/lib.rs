//! Exact polyhedral-cone refinement for three-term linear relations among
//! theta series of positive-definite binary quadratic forms.
//!
//! The modules build on each other bottom-up:
//!
//! - [`geometry`]: rational polyhedral cones with closed and strict rows and a
//!   cached double description.
//! - [`quadform`]: binary quadratic forms, reduction, representation numbers.
//! - [`minima`]: the partial order on strongly primitive vectors and `MIN`.
//! - [`ksets`]: cones of reduced forms with prescribed successive minima.
//! - [`refinement`]: linsets, covering parameters and the refinement loop.
//! - [`relations`]: normalization, classification and verification of relations.
//! - [`fixtures`]: worked examples with known answers, replayed as a self-test.

pub mod fixtures;
pub mod geometry;
pub mod ksets;
pub mod minima;
pub mod quadform;
pub mod refinement;
pub mod relations;

pub use geometry::{Cone, GeometryError, IntVec, Rational};
