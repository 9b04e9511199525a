//! Exact formal series, Borel–Laplace summation and the numerical pieces
//! needed to study divergent expansions and movable singularities.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel;
pub mod config;
pub mod error;
pub mod harrydym;
pub mod heat;
pub mod ilt;
pub mod ode;
pub mod p1;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod singularities;

pub use config::{Orientation, OutputFormat, SolverConfig};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use series::{Branch, Direction, HalfInt, PuiseuxSeries};
