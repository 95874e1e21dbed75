//! Holomorphic open books.
//!
//! Builds, from an abstract planar open book (page, monodromy), the stable
//! Hamiltonian structure on the glued manifold together with its contact
//! perturbation, integrates the J0-holomorphic half-cylinders that lift the
//! pages to the symplectization, and checks the accompanying inequalities,
//! Cauchy-Riemann residuals, asymptotics and indices numerically.

// NaN must fail validation, hence `!(x > 0.0)`; index loops mirror the maths.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod geometry;
pub mod holomorphic;
pub mod indices;
pub mod ode;
pub mod pipeline;
pub mod plot;
pub mod profiles;

pub use error::{Error, Result};
