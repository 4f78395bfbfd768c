//! Computation on homogeneous (graded nilpotent) Lie groups.
//!
//! The crate covers exact structure constants and the group law in exponential
//! coordinates, weighted point-cloud measures, grid-based convolution operators
//! and a set of numerical experiments built from them. It is `no_std` with
//! `alloc`; the default `std` and `parallel` features only add thread-level
//! parallelism and std error integration.
#![cfg_attr(not(feature = "std"), no_std)]
// Float methods resolve to inherent std methods when std is on, leaving the
// num-traits import (needed for no_std) unused.
#![cfg_attr(feature = "std", allow(unused_imports))]

extern crate alloc;

pub mod algebra;
pub mod algebras;
pub mod error;
pub mod fit;
pub mod grid;
pub mod group;
pub mod linalg;
pub mod measure;
pub mod operator;
mod par;
pub mod rng;
pub mod verify;

pub use algebra::{AlgebraSpec, AlgebraVector, GradedLieAlgebra, Rational, Scalar};
pub use error::{Error, Result};
pub use fit::DecayFit;
pub use grid::{Grid, GridFunction};
pub use group::GroupElement;
pub use measure::DiscreteMeasure;
