//! Numerical toolkit for one-dimensional matrix Schrödinger operators with
//! distributional potentials `q = Q′ + s`, written in quasiderivative form.

pub mod analysis;
pub mod cli;
pub mod cauchy;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod potential;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
