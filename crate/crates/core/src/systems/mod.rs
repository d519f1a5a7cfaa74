//! Model definitions: Hamiltonians, inertia maps, noise directions and
//! dissipation, assembled into drift and diffusion vector fields.
//!
//! Every system is a Stratonovich SDE
//! `dx = F(x) dt + Σᵢ Gᵢ(x) ∘ dWⁱ`
//! whose diffusions are affine in the state and whose stochastic part has an
//! exact, Casimir-preserving flow over one step ([`StochasticSystem::noise_substep`]).

mod heavy_top;
mod kick;
mod rigid_body;
mod so4;
mod spring_pendulum;

pub use heavy_top::{DissipationCasimir, HeavyTopSpec};
pub use kick::KickSpec;
pub use rigid_body::RigidBodySpec;
pub use so4::So4BodySpec;
pub use spring_pendulum::SpringPendulumSpec;

use crate::algebra::Vec3;
use crate::error::{invalid, Result};
use crate::state::{IntoPhaseState, PhaseVector};

pub trait StochasticSystem: Send + Sync {
    type State: PhaseVector + IntoPhaseState;

    /// Stratonovich drift F.
    fn drift(&self, s: &Self::State) -> Self::State;

    fn n_channels(&self) -> usize;

    /// Diffusion field Gᵢ; `channel` must be below [`Self::n_channels`].
    fn diffusion(&self, s: &Self::State, channel: usize) -> Self::State;

    /// Exact flow of `dx/ds = Σᵢ Gᵢ(x) dWⁱ` over unit time.
    fn noise_substep(&self, s: &Self::State, dw: &[f64]) -> Self::State;

    fn energy(&self, s: &Self::State) -> f64;

    fn casimirs(&self, s: &Self::State) -> Vec<f64>;

    /// Itô minus Stratonovich drift, ½ Σᵢ DGᵢ·Gᵢ.
    ///
    /// Diffusions are affine, so DGᵢ·Gᵢ(x) = Gᵢ(Gᵢ(x)) - Gᵢ(0).
    fn ito_correction(&self, s: &Self::State) -> Self::State {
        let zero = Self::State::zero();
        (0..self.n_channels()).fold(zero, |acc, i| {
            let g = self.diffusion(s, i);
            acc + (self.diffusion(&g, i) - self.diffusion(&zero, i)) * 0.5
        })
    }

    fn diffusions(&self, s: &Self::State) -> Vec<Self::State> {
        (0..self.n_channels())
            .map(|i| self.diffusion(s, i))
            .collect()
    }
}

/// Systems whose linearized flow is available for Lyapunov estimates.
pub trait TangentSystem: StochasticSystem {
    /// DF(x)·δ.
    fn drift_derivative(&self, s: &Self::State, delta: &Self::State) -> Self::State;

    /// Removes the components of δ normal to the orbit through `s`.
    fn project_tangent(&self, s: &Self::State, delta: &Self::State) -> Self::State;

    /// Differential of [`StochasticSystem::noise_substep`] applied to δ.
    fn tangent_noise_substep(
        &self,
        s: &Self::State,
        delta: &Self::State,
        dw: &[f64],
    ) -> Self::State {
        let _ = s;
        self.noise_substep(delta, dw) - self.noise_substep(&Self::State::zero(), dw)
    }
}

/// Systems for which the Itô generator of the energy can be evaluated.
pub trait EnergyGenerator: StochasticSystem {
    fn energy_gradient(&self, s: &Self::State) -> Self::State;

    /// Hessian of h applied to `v`; h is quadratic in the momenta.
    fn energy_hessian(&self, s: &Self::State, v: &Self::State) -> Self::State;
}

/// dt-coefficient of dh: ∇h·(F + Itô correction) + ½ Σᵢ Gᵢ·∇²h·Gᵢ.
pub fn predicted_energy_drift<S: EnergyGenerator>(system: &S, s: &S::State) -> f64 {
    let grad = system.energy_gradient(s);
    let mean = system.drift(s) + system.ito_correction(s);
    let quad: f64 = (0..system.n_channels())
        .map(|i| {
            let g = system.diffusion(s, i);
            g.inner(&system.energy_hessian(s, &g))
        })
        .sum();
    grad.inner(&mean) + 0.5 * quad
}

/// Isotropic noise σ e₁, σ e₂, σ e₃.
pub fn isotropic_sigmas(sigma: f64) -> Vec<Vec3> {
    (0..3).map(|i| Vec3::ith(i, sigma)).collect()
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta >= 0.0 {
        Ok(())
    } else {
        Err(invalid(
            "theta",
            format!("must be non-negative, got {theta}"),
        ))
    }
}

pub(crate) fn check_finite_vecs(name: &'static str, vs: &[Vec3]) -> Result<()> {
    if vs.iter().all(PhaseVector::is_finite) {
        Ok(())
    } else {
        Err(invalid(name, "components must be finite"))
    }
}

pub(crate) fn check_inertia(inertia: &Vec3) -> Result<()> {
    if inertia.iter().all(|&i| i.is_finite() && i > 0.0) {
        Ok(())
    } else {
        Err(invalid(
            "inertia",
            format!("entries must be positive, got {inertia:?}"),
        ))
    }
}

/// w = Σᵢ σᵢ dWⁱ.
pub(crate) fn noise_vector(sigmas: &[Vec3], dw: &[f64]) -> Vec3 {
    sigmas
        .iter()
        .zip(dw)
        .fold(Vec3::zeros(), |acc, (s, w)| acc + s * *w)
}
