//! Uniform initial conditions on coadjoint orbits.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraTag, SemidirectElement, Vec3};
use crate::error::{Error, Result};
use crate::state::PhaseState;

/// Uniform point on the sphere of radius `radius` (normalized Gaussian).
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::from_fn(|_, _| rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v * (radius / n);
        }
    }
}

/// Unit vector orthogonal to `axis`, uniform on that great circle.
pub fn uniform_orthogonal<R: Rng + ?Sized>(rng: &mut R, axis: &Vec3) -> Vec3 {
    let u = axis.normalize();
    loop {
        let v: Vec3 = Vec3::from_fn(|_, _| rng.sample(StandardNormal));
        let t = v - u * u.dot(&v);
        let n = t.norm();
        if n > 1e-12 {
            return t / n;
        }
    }
}

/// Heavy-top state with ‖Γ‖ = `gamma_norm`, Π·Γ = `pi_dot_gamma` and Γ
/// uniform on its sphere. Π is the Γ-parallel part plus, when `pi_norm` is
/// given, a uniformly oriented orthogonal part making ‖Π‖ = `pi_norm`.
pub fn heavy_top_orbit_point<R: Rng + ?Sized>(
    rng: &mut R,
    gamma_norm: f64,
    pi_dot_gamma: f64,
    pi_norm: Option<f64>,
) -> Result<SemidirectElement> {
    if !(gamma_norm.is_finite() && gamma_norm > 0.0) {
        return Err(Error::Infeasible(format!(
            "|Gamma| must be positive, got {gamma_norm}"
        )));
    }
    let gamma = uniform_sphere(rng, gamma_norm);
    let parallel = gamma * (pi_dot_gamma / (gamma_norm * gamma_norm));
    let pi = match pi_norm {
        None => parallel,
        Some(p) => {
            let along = pi_dot_gamma.abs() / gamma_norm;
            if !(p.is_finite() && p >= along) {
                return Err(Error::Infeasible(format!(
                    "|Pi.Gamma| = {} exceeds |Pi||Gamma| = {}",
                    pi_dot_gamma.abs(),
                    p * gamma_norm
                )));
            }
            parallel + uniform_orthogonal(rng, &gamma) * (p * p - along * along).sqrt()
        }
    };
    Ok(SemidirectElement::new(pi, gamma))
}

/// Uniform sample on the orbit with the given Casimir values:
/// so(3) `[‖Π‖²]`; semidirect `[‖Γ‖², Π·Γ]` or `[‖Γ‖², Π·Γ, ‖Π‖²]`.
pub fn uniform_orbit_sampler<R: Rng + ?Sized>(
    tag: AlgebraTag,
    casimir_values: &[f64],
    rng: &mut R,
) -> Result<PhaseState> {
    let sqrt_nonneg = |v: f64, what: &str| {
        if v.is_finite() && v >= 0.0 {
            Ok(v.sqrt())
        } else {
            Err(Error::Infeasible(format!(
                "{what} must be non-negative, got {v}"
            )))
        }
    };
    match (tag, casimir_values) {
        (AlgebraTag::So3, &[c2]) => Ok(PhaseState::RigidBody(uniform_sphere(
            rng,
            sqrt_nonneg(c2, "|Pi|^2")?,
        ))),
        (AlgebraTag::Semidirect, &[k2, c]) => Ok(PhaseState::HeavyTop(heavy_top_orbit_point(
            rng,
            sqrt_nonneg(k2, "|Gamma|^2")?,
            c,
            None,
        )?)),
        (AlgebraTag::Semidirect, &[k2, c, p2]) => Ok(PhaseState::HeavyTop(heavy_top_orbit_point(
            rng,
            sqrt_nonneg(k2, "|Gamma|^2")?,
            c,
            Some(sqrt_nonneg(p2, "|Pi|^2")?),
        )?)),
        _ => Err(Error::Infeasible(format!(
            "{} orbits are not sampled from {} values",
            tag.name(),
            casimir_values.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::histogram::SphereHistogram;
    use crate::noise::rng_for;

    #[test]
    fn so3_mean_is_centred() {
        let mut rng = rng_for(5, 0);
        let n = 1_000_000;
        let mean =
            (0..n).fold(Vec3::zeros(), |acc, _| acc + uniform_sphere(&mut rng, 1.0)) / n as f64;
        // each component has variance 1/3
        let bound = 3.0 * (1.0 / (3.0 * n as f64)).sqrt();
        assert!(mean.iter().all(|m| m.abs() < bound), "{mean:?}");
    }

    #[test]
    fn samples_meet_casimirs() {
        let mut rng = rng_for(6, 0);
        for _ in 0..1000 {
            let PhaseState::RigidBody(p) =
                uniform_orbit_sampler(AlgebraTag::So3, &[2.25], &mut rng).unwrap()
            else {
                panic!()
            };
            assert!((p.norm_squared() - 2.25).abs() < 1e-12);
            let PhaseState::HeavyTop(x) =
                uniform_orbit_sampler(AlgebraTag::Semidirect, &[1.0, 0.3, 1.0], &mut rng).unwrap()
            else {
                panic!()
            };
            assert!((x.v.norm_squared() - 1.0).abs() < 1e-12);
            assert!((x.g.dot(&x.v) - 0.3).abs() < 1e-12);
            assert!((x.g.norm_squared() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_values_are_rejected() {
        let mut rng = rng_for(6, 1);
        assert!(matches!(
            uniform_orbit_sampler(AlgebraTag::Semidirect, &[1.0, 2.0, 1.0], &mut rng),
            Err(Error::Infeasible(_))
        ));
        assert!(uniform_orbit_sampler(AlgebraTag::So3, &[-1.0], &mut rng).is_err());
        assert!(uniform_orbit_sampler(AlgebraTag::So4, &[1.0, 0.0], &mut rng).is_err());
    }

    #[test]
    fn heavy_top_gamma_is_uniform() {
        // polar cells hold 0.07% of the mass, so 3% needs tens of millions of draws
        let mut rng = rng_for(7, 0);
        let n = 40_000_000;
        let mut h = SphereHistogram::empty(12, 24).unwrap();
        for _ in 0..n {
            h.add(
                &heavy_top_orbit_point(&mut rng, 1.0, 0.0, Some(1.0))
                    .unwrap()
                    .v,
            )
            .unwrap();
        }
        let uniform = 1.0 / (4.0 * std::f64::consts::PI);
        let sup = h
            .densities()
            .iter()
            .map(|d| (d - uniform).abs())
            .fold(0.0, f64::max);
        assert!(sup / uniform < 0.03, "sup-norm {}", sup / uniform);
    }
}
