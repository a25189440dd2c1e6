//! Normalized excited states of the supercritical Gross-Pitaevskii equation
//! `-Laplacian u + V u = mu u + a |u|^q u`, `int u^2 = 1`, in the plane with the
//! ellipse-shaped trap `V(x) = (|x|_b - A)^2`.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod functionals;
pub mod linalg;
pub mod manifest;
pub mod report;
pub mod scalar_field;
pub mod scaling;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
