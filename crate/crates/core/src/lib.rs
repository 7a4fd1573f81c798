//! Finite-difference laboratory for the clamped plate problem with tension,
//!
//! ```text
//! ε²Δ²u − Δu = f in Ω,   u = ∂_ν u = 0 on ∂Ω,
//! ```
//!
//! on intervals, rectangles and radially symmetric disks. Besides the solver the crate
//! carries closed-form oracles, the boundary-layer diagnostics of the small-ε regime
//! and a bisection harness for the positivity threshold in ε.

pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod problem;
pub mod threshold;

pub use error::{Error, Result};
pub use mesh::{DomainSpec, Field, Forcing, Grid, Node};
