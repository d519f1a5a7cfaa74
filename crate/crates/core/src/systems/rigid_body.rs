//! Free rigid body on so(3)* with selective-decay damping and noise
//! directions σᵢ.
//!
//! dΠ = (-Π×Ω + θ Π×(Π×Ω)) dt + Σᵢ σᵢ×Π ∘ dWⁱ, with Ω = 𝕀⁻¹Π.
//!
//! The damping term gives dh/dt = -θ‖Π×Ω‖² and leaves ‖Π‖ untouched.

use crate::algebra::{exp_so3, Vec3};
use crate::error::{Error, Result};

use super::{
    check_finite_vecs, check_inertia, check_theta, isotropic_sigmas, noise_vector, EnergyGenerator,
    StochasticSystem, TangentSystem,
};

#[derive(Clone, Debug, PartialEq)]
pub struct RigidBodySpec {
    inertia: Vec3,
    inv_inertia: Vec3,
    theta: f64,
    sigmas: Vec<Vec3>,
}

impl RigidBodySpec {
    pub fn new(inertia: Vec3, theta: f64, sigmas: Vec<Vec3>) -> Result<Self> {
        check_inertia(&inertia)?;
        check_theta(theta)?;
        check_finite_vecs("sigmas", &sigmas)?;
        Ok(Self {
            inertia,
            inv_inertia: inertia.map(|i| 1.0 / i),
            theta,
            sigmas,
        })
    }

    /// Noise σ e₁, σ e₂, σ e₃ on three channels.
    pub fn isotropic(inertia: Vec3, theta: f64, sigma: f64) -> Result<Self> {
        Self::new(inertia, theta, isotropic_sigmas(sigma))
    }

    pub fn inertia(&self) -> Vec3 {
        self.inertia
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigmas(&self) -> &[Vec3] {
        &self.sigmas
    }

    /// Copy with a different damping rate, e.g. for time reversal.
    pub fn with_theta_unchecked(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    /// Ω = 𝕀⁻¹Π.
    pub fn omega(&self, pi: &Vec3) -> Vec3 {
        pi.component_mul(&self.inv_inertia)
    }

    /// The i-th diffusion σᵢ×Π = -Π×σᵢ, with a range check.
    pub fn diffusion_checked(&self, pi: &Vec3, i: usize) -> Result<Vec3> {
        self.sigmas
            .get(i)
            .map(|s| s.cross(pi))
            .ok_or(Error::ChannelOutOfRange {
                index: i,
                len: self.sigmas.len(),
            })
    }

    /// Common σ of an isotropic noise set σ eₖ, if the set has that form.
    pub fn isotropic_sigma(&self) -> Option<f64> {
        if self.sigmas.len() != 3 {
            return None;
        }
        let s = self.sigmas[0].x;
        let expected = isotropic_sigmas(s);
        (self.sigmas == expected).then_some(s)
    }
}

impl StochasticSystem for RigidBodySpec {
    type State = Vec3;

    fn drift(&self, pi: &Vec3) -> Vec3 {
        let omega = self.omega(pi);
        let torque = pi.cross(&omega);
        -torque + pi.cross(&torque) * self.theta
    }

    fn n_channels(&self) -> usize {
        self.sigmas.len()
    }

    fn diffusion(&self, pi: &Vec3, channel: usize) -> Vec3 {
        self.sigmas[channel].cross(pi)
    }

    fn noise_substep(&self, pi: &Vec3, dw: &[f64]) -> Vec3 {
        exp_so3(&noise_vector(&self.sigmas, dw)) * pi
    }

    fn energy(&self, pi: &Vec3) -> f64 {
        0.5 * pi.dot(&self.omega(pi))
    }

    fn casimirs(&self, pi: &Vec3) -> Vec<f64> {
        vec![pi.norm_squared()]
    }

    fn ito_correction(&self, pi: &Vec3) -> Vec3 {
        self.sigmas
            .iter()
            .fold(Vec3::zeros(), |acc, s| acc + s.cross(&s.cross(pi)) * 0.5)
    }
}

impl TangentSystem for RigidBodySpec {
    fn drift_derivative(&self, pi: &Vec3, delta: &Vec3) -> Vec3 {
        let omega = self.omega(pi);
        let d_omega = self.omega(delta);
        let torque = pi.cross(&omega);
        let d_torque = delta.cross(&omega) + pi.cross(&d_omega);
        -d_torque + (delta.cross(&torque) + pi.cross(&d_torque)) * self.theta
    }

    fn project_tangent(&self, pi: &Vec3, delta: &Vec3) -> Vec3 {
        let n2 = pi.norm_squared();
        if n2 == 0.0 {
            return *delta;
        }
        delta - pi * (delta.dot(pi) / n2)
    }

    fn tangent_noise_substep(&self, _pi: &Vec3, delta: &Vec3, dw: &[f64]) -> Vec3 {
        self.noise_substep(delta, dw)
    }
}

impl EnergyGenerator for RigidBodySpec {
    fn energy_gradient(&self, pi: &Vec3) -> Vec3 {
        self.omega(pi)
    }

    fn energy_hessian(&self, _pi: &Vec3, v: &Vec3) -> Vec3 {
        self.omega(v)
    }
}
