//! Ergodic and ensemble diagnostics.

mod ensemble;
mod fk;
mod histogram;
mod kicked;
mod lax;
mod lyapunov;
mod measure;
mod sampler;

pub use ensemble::{
    member_rng, run_pullback_ensemble, EnsembleRun, EnsembleSnapshot, MemberFailure,
};
pub use fk::fk_integrand;
pub use histogram::{sphere_histogram, SphereHistogram};
pub use kicked::{
    count_clusters, kicked_regime, run_kicked, KickedRun, KickedSummary, CLUSTER_TOLERANCE,
};
pub use lax::{axial_momentum, check_lagrange, lax_invariants, lax_norm, symmetry_axis};
pub use lyapunov::{
    divergence_lyapunov_sum, gibbs_mean_energy, lyapunov_sum, lyapunov_sum_closed_form,
    lyapunov_top, rigid_body_ic, top_exponent_path, LyapunovEstimate, BURN_IN_FRACTION,
};
pub use measure::{
    check_ergodic, gibbs_density, invariant_measure_heavy_top, invariant_measure_rigid_body,
    FitReport, HistogramSpec, MEASURE_BURN_IN_FRACTION,
};
pub use sampler::{
    heavy_top_orbit_point, uniform_orbit_sampler, uniform_orthogonal, uniform_sphere,
};

/// Stream groups (the high 32 bits of a stream index) used by the
/// diagnostics, so that initial conditions, oracles and noise paths never
/// share a generator. Group 0 is left to plain trajectories.
pub mod streams {
    pub const LYAPUNOV_NOISE: u32 = 1;
    pub const LYAPUNOV_IC: u32 = 2;
    pub const MEASURE_ORACLE: u32 = 3;
    pub const ENSEMBLE_IC: u32 = 4;
    pub const ENSEMBLE_NOISE: u32 = 5;
    pub const KICKED_IC: u32 = 6;
}
