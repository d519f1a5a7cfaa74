//! Stochastic Lie-Poisson dynamics on coadjoint orbits.
//!
//! The crate is organised bottom-up:
//!
//! - [`algebra`]: brackets, coadjoint actions and Casimirs for so(3), so(4)
//!   and the semidirect algebra so(3)⋉ℝ³, plus the Rodrigues exponential.
//! - [`systems`]: the rigid body, heavy top, four-dimensional rigid body and
//!   spring pendulum as drift/diffusion vector fields.
//! - [`integrators`]: the split-step scheme (RK4 drift, exact rotation for
//!   the noise), Stratonovich Heun and Itô Euler-Maruyama references,
//!   tangent propagation and attitude reconstruction.
//! - [`analysis`]: Lyapunov exponents, invariant-measure checks, pullback
//!   ensembles, sphere histograms and the kicked rigid body.

pub mod algebra;
pub mod analysis;
mod error;
pub mod integrators;
pub mod noise;
pub mod state;
pub mod systems;

pub use algebra::{Rotation3, Vec3};
pub use error::{Error, Result};
pub use state::{PhaseState, PhaseVector};
