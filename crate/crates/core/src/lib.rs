//! Numerics for generalized Picone inequalities and the (p,q)-Laplacian.
//!
//! The crate is split along the lines of what is being computed:
//!
//! - [`inequality`]: pointwise left/right-hand sides and slacks of the Picone
//!   family, plus a seeded fuzzing harness.
//! - [`region`]: the exponent set `I(q)` where the two-exponent inequality holds
//!   unconditionally, its thresholds and explicit violation witnesses.
//! - [`spectrum`]: radial first eigenpairs of the Dirichlet r-Laplacian and the
//!   nonexistence threshold `beta_star`.
//! - [`pqsolve`]: radial shooting for `-Δ_p u - Δ_q u = λ₁(p) u^{p-1} + μ u^{q-1}`
//!   and μ-sweeps of the existence band.

pub mod error;
pub mod export;
pub mod inequality;
pub mod numeric;
pub mod pqsolve;
pub mod region;
pub mod spectrum;

pub use error::{Error, Result};
pub use inequality::{ExponentPair, PiconePoint, SlackReport, Tolerance};
pub use region::RegionSample;
pub use spectrum::{Geometry, RadialProfile};
