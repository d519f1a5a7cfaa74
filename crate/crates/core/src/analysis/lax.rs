//! Lax-pair invariants of the stochastic Lagrange top.
//!
//! For I₁ = I₂, χ = (0, 0, χ₃), noise along χ and no damping, the matrix
//! L(λ) = mg I₁ λ²χ + λΠ + Γ evolves by a cross product, so ‖L(λ)‖ is
//! conserved for every λ.

use crate::algebra::{SemidirectElement, Vec3};
use crate::error::{Error, Result};
use crate::systems::HeavyTopSpec;

/// Rejects anything but an undamped Lagrange top with noise along χ.
pub fn check_lagrange(system: &HeavyTopSpec) -> Result<()> {
    if !system.is_lagrange() {
        return Err(Error::NotLagrange(
            "needs I1 = I2 and chi on the symmetry axis".into(),
        ));
    }
    if system.theta() != 0.0 {
        return Err(Error::NotLagrange(
            "damping breaks integrability; theta must be 0".into(),
        ));
    }
    if system.sigmas().iter().any(|s| s.x != 0.0 || s.y != 0.0) {
        return Err(Error::NotLagrange(
            "noise directions must be parallel to chi".into(),
        ));
    }
    if system.etas().iter().any(|e| e.norm_squared() > 0.0) {
        return Err(Error::NotLagrange("eta must vanish".into()));
    }
    Ok(())
}

/// ‖mg I₁ λ²χ + λΠ + Γ‖.
pub fn lax_norm(system: &HeavyTopSpec, state: &SemidirectElement, lambda: f64) -> f64 {
    let scale = system.mg() * system.inertia().x * lambda * lambda;
    (system.chi() * scale + state.g * lambda + state.v).norm()
}

/// For each λ, max over the path of |‖L(λ)‖ - ‖L(λ)‖ at the first state|.
pub fn lax_invariants(
    system: &HeavyTopSpec,
    path: &[SemidirectElement],
    lambdas: &[f64],
) -> Result<Vec<f64>> {
    check_lagrange(system)?;
    let Some(first) = path.first() else {
        return Ok(vec![0.0; lambdas.len()]);
    };
    Ok(lambdas
        .iter()
        .map(|&l| {
            let l0 = lax_norm(system, first, l);
            path.iter()
                .map(|s| (lax_norm(system, s, l) - l0).abs())
                .fold(0.0, f64::max)
        })
        .collect())
}

/// Π·χ, conserved on a Lagrange top with noise along χ.
pub fn axial_momentum(system: &HeavyTopSpec, state: &SemidirectElement) -> f64 {
    state.g.dot(&system.chi())
}

/// Unit of χ, for callers that report Π along the symmetry axis.
pub fn symmetry_axis(system: &HeavyTopSpec) -> Vec3 {
    system.chi().normalize()
}
