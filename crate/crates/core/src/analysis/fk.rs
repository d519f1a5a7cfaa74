//! Furstenberg-Khasminskii integrand for the isotropically forced rigid body.

use crate::error::{invalid, Result};
use crate::systems::RigidBodySpec;

/// Q(μᵢ, Φⱼ) = -((n-1)/2)σ² + θc²(𝕀ᵢ⁻¹ - 𝕀ⱼ⁻¹) with n = 3, for a state on the
/// axis `mu_axis` perturbed towards `phi_axis` (both zero-based).
pub fn fk_integrand(
    system: &RigidBodySpec,
    radius: f64,
    mu_axis: usize,
    phi_axis: usize,
) -> Result<f64> {
    if mu_axis > 2 || phi_axis > 2 {
        return Err(invalid(
            "axis",
            format!("axes are 0..=2, got ({mu_axis}, {phi_axis})"),
        ));
    }
    if mu_axis == phi_axis {
        return Err(invalid(
            "axis",
            "the perturbation must be tangent: mu_axis != phi_axis",
        ));
    }
    let sigma = system
        .isotropic_sigma()
        .ok_or_else(|| invalid("sigmas", "needs isotropic noise σ eₖ"))?;
    let inertia = system.inertia();
    let n = 3.0;
    Ok(-0.5 * (n - 1.0) * sigma * sigma
        + system.theta() * radius * radius * (1.0 / inertia[mu_axis] - 1.0 / inertia[phi_axis]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Vec3;

    #[test]
    fn examples() {
        let b = RigidBodySpec::isotropic(Vec3::new(1.0, 2.0, 3.0), 0.5, 0.5).unwrap();
        let q = fk_integrand(&b, 1.0, 0, 2).unwrap();
        assert!((q - (-0.25 + 0.5 * (1.0 - 1.0 / 3.0))).abs() < 1e-15);
        assert!((q - 1.0 / 12.0).abs() < 1e-15);
        assert!(fk_integrand(&b, 1.0, 1, 1).is_err());
        assert!(fk_integrand(&b, 1.0, 0, 3).is_err());
    }

    #[test]
    fn theta_zero_leaves_noise_term() {
        let b = RigidBodySpec::isotropic(Vec3::new(1.0, 2.0, 3.0), 0.0, 0.7).unwrap();
        for i in 0..3 {
            for j in (0..3).filter(|&j| j != i) {
                assert!((fk_integrand(&b, 1.3, i, j).unwrap() + 0.49).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn damping_part_is_antisymmetric() {
        let b = RigidBodySpec::isotropic(Vec3::new(1.0, 2.0, 3.0), 0.8, 0.4).unwrap();
        let noise = -0.16;
        for i in 0..3 {
            for j in (0..3).filter(|&j| j != i) {
                let a = fk_integrand(&b, 1.1, i, j).unwrap() - noise;
                let c = fk_integrand(&b, 1.1, j, i).unwrap() - noise;
                assert!((a + c).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn anisotropic_noise_is_rejected() {
        let b = RigidBodySpec::new(Vec3::new(1.0, 2.0, 3.0), 0.5, vec![Vec3::x()]).unwrap();
        assert!(fk_integrand(&b, 1.0, 0, 1).is_err());
    }
}
