//! Exact computation of bilinearized contact homology for finite free
//! graded-commutative DGAs over ℚ, together with the combinatorial models
//! (Conley–Zehnder indices, surface doubles, gluing counts) used to check it.

#![allow(clippy::needless_range_loop)]

pub mod bilinearization;
pub mod criterion;
pub mod error;
pub mod gluing_oracle;
pub mod graded_algebra;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod model_geometry;
pub mod random;
pub mod rational;
pub mod suite;
pub mod surface_doubles;

pub use error::{Error, Result};
pub use rational::Q;
