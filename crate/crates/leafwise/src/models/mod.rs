//! Concrete geometric models.
//!
//! * [`torus`] — the T³ binding with its collar T³×D², on which the
//!   deformation theorems are verified in full.
//! * [`milnor`] — the five-sphere with its standard contact form and the
//!   cubic Milnor fibration, the adaptedness model and the outer-region
//!   branch of the deformation.
//! * [`product`] — S⁴×S¹ with the integrable form `θ₀` and the linear
//!   perturbation data, the counterexample to leafwise closedness.

pub mod milnor;
pub mod product;
pub mod torus;

pub use milnor::{milnor_model, MilnorModel};
pub use product::{product_model, ProductModel};
pub use torus::{collar, torus_binding, BindingData, CollarModel};
