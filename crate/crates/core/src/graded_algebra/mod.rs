//! Free graded-commutative algebras over ℚ with Koszul signs, differentials
//! extended by the Leibniz rule, and presentation validation.

mod algebra;
mod grading;
mod polynomial;
mod presentation;

pub use algebra::{Generator, GradedAlgebra};
pub use grading::Grading;
pub use polynomial::{Monomial, Polynomial};
pub use presentation::{CdgaPresentation, PresentationBuilder, ValidationReport, Violation};

#[cfg(test)]
mod tests;
