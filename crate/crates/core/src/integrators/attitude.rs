//! Attitude reconstruction dg = g Ω̂ dt + Σᵢ g σ̂ᵢ ∘ dWⁱ and z-x-z Euler angles.
//!
//! Convention: R = Rz(ψ) Rx(θ) Rz(φ), with the vertical seen from the body
//! Γ = Rᵀe₃ = (sinθ sinφ, sinθ cosφ, cosθ). φ is the spin, θ the nutation
//! and ψ the precession.

use crate::algebra::{exp_so3, Rotation3, Vec3};
use crate::error::{invalid, Result};

/// |R₃₃| above this is treated as the gimbal-lock configuration.
const GIMBAL_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn to_rotation(&self) -> Rotation3 {
        let rz = |a: f64| Rotation3::from_axis_angle(&Vec3::z_axis(), a);
        let rx = Rotation3::from_axis_angle(&Vec3::x_axis(), self.theta);
        rz(self.psi) * rx * rz(self.phi)
    }
}

/// z-x-z angles of R. Near gimbal lock θ is clamped to 0 or π, φ is set to 0
/// and the whole in-plane rotation is assigned to ψ.
pub fn euler_angles_zxz(r: &Rotation3) -> EulerAngles {
    let m = r.matrix();
    let c = m[(2, 2)].clamp(-1.0, 1.0);
    if c.abs() > GIMBAL_THRESHOLD {
        return EulerAngles {
            phi: 0.0,
            theta: if c > 0.0 { 0.0 } else { std::f64::consts::PI },
            psi: m[(1, 0)].atan2(m[(0, 0)]),
        };
    }
    EulerAngles {
        phi: m[(2, 0)].atan2(m[(2, 1)]),
        theta: c.acos(),
        psi: m[(0, 2)].atan2(-m[(1, 2)]),
    }
}

/// An attitude with Rᵀe₃ = Γ/‖Γ‖ and zero precession angle.
pub fn attitude_from_gamma(gamma: &Vec3) -> Rotation3 {
    let u = gamma.normalize();
    EulerAngles {
        phi: u.x.atan2(u.y),
        theta: u.z.clamp(-1.0, 1.0).acos(),
        psi: 0.0,
    }
    .to_rotation()
}

/// g_{n+1} = gₙ exp(Ωₙ dt) exp(Σᵢ σᵢ dWⁱₙ). `increments` is step-major with
/// one entry per σ. Returns n+1 attitudes starting with `g0`.
pub fn reconstruct_attitude(
    g0: Rotation3,
    omega_path: &[Vec3],
    sigmas: &[Vec3],
    increments: &[f64],
    dt: f64,
) -> Result<Vec<Rotation3>> {
    let channels = sigmas.len();
    if increments.len() != omega_path.len() * channels {
        return Err(invalid(
            "increments",
            format!(
                "expected {} entries for {} steps, got {}",
                omega_path.len() * channels,
                omega_path.len(),
                increments.len()
            ),
        ));
    }
    let mut out = Vec::with_capacity(omega_path.len() + 1);
    out.push(g0);
    let mut g = g0;
    for (n, omega) in omega_path.iter().enumerate() {
        let dw = &increments[n * channels..(n + 1) * channels];
        let w = sigmas
            .iter()
            .zip(dw)
            .fold(Vec3::zeros(), |acc, (s, x)| acc + s * *x);
        g = g * exp_so3(&(omega * dt)) * exp_so3(&w);
        out.push(g);
    }
    Ok(out)
}
