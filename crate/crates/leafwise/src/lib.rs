//! Numerical exterior calculus for deformations of contact structures
//! into leafwise symplectic foliations.
//!
//! The crate builds explicit coordinate models — a torus binding with its
//! collar, the Milnor open book on the five-sphere, and a product
//! counterexample on S⁴×S¹ — and verifies, by seeded sampling against
//! closed-form oracles, the inequalities and identities that govern how a
//! contact structure degenerates into a foliation carrying a leafwise
//! symplectic form.
//!
//! Start with the [`exterior`] kernel (pointwise alternating forms), then
//! [`charts`] (forms as fields, exterior derivative, pullback, sampling),
//! [`profiles`] (the scalar transition functions), [`models`] (the
//! geometry), [`deformations`] (the t-parameterized families) and
//! [`verify`] (the check suite). The `leafwise` binary drives everything
//! from a run configuration; see the book under `book/` for a guided
//! tour.

pub mod charts;
pub mod deformations;
pub mod error;
pub mod exterior;
pub mod models;
pub mod profiles;
pub mod scalar;
pub mod verify;

pub mod cli;

mod guide;

pub use error::{Error, Result};
