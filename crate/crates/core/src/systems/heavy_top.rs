//! Heavy top on (so(3)⋉ℝ³)*.
//!
//! State (Π, Γ): body angular momentum and the vertical unit vector seen in
//! the body frame; χ is the centre-of-mass offset.
//!
//! dΠ = (Π×Ω + mg Γ×χ + θ D_Π) dt + Σᵢ (Π×σᵢ - mg Γ×ηᵢ) ∘ dWⁱ
//! dΓ = (Γ×Ω + θ D_Γ) dt + Σᵢ Γ×σᵢ ∘ dWⁱ
//!
//! with h = ½ Π·𝕀⁻¹Π + mg Γ·χ. The damping (D_Π, D_Γ) is the double bracket
//! built from the Casimir Π·Γ, or from ‖Γ‖² when selected. A third choice
//! keeps only the part of the Π·Γ bracket that balances isotropic noise.

use crate::algebra::{exp_so3, SemidirectElement, Vec3};
use crate::error::{invalid, Result};

use super::{
    check_finite_vecs, check_inertia, check_positive, check_theta, noise_vector, EnergyGenerator,
    StochasticSystem,
};

/// Casimir used to build the double-bracket damping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DissipationCasimir {
    /// Π·Γ: both decay terms active.
    #[default]
    PiDotGamma,
    /// ‖Γ‖²: only the -θ‖Ω×Γ‖² decay.
    GammaSquared,
    /// (Π×T, Γ×T) with T = Π×Ω + mg Γ×χ: the Π·Γ damping without its
    /// -θ‖Ω×Γ‖² term. For isotropic σ and η = 0 this makes exp(-2θh/σ²)
    /// exactly stationary.
    NoiseBalanced,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeavyTopSpec {
    inertia: Vec3,
    inv_inertia: Vec3,
    m: f64,
    g: f64,
    chi: Vec3,
    theta: f64,
    sigmas: Vec<Vec3>,
    etas: Vec<Vec3>,
    dissipation: DissipationCasimir,
}

impl HeavyTopSpec {
    /// `etas` is either empty or one per noise channel.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        inertia: Vec3,
        m: f64,
        g: f64,
        chi: Vec3,
        theta: f64,
        sigmas: Vec<Vec3>,
        etas: Vec<Vec3>,
        dissipation: DissipationCasimir,
    ) -> Result<Self> {
        check_inertia(&inertia)?;
        check_positive("m", m)?;
        check_positive("g", g)?;
        check_theta(theta)?;
        check_finite_vecs("chi", &[chi])?;
        check_finite_vecs("sigmas", &sigmas)?;
        check_finite_vecs("etas", &etas)?;
        let etas = if etas.is_empty() {
            vec![Vec3::zeros(); sigmas.len()]
        } else if etas.len() == sigmas.len() {
            etas
        } else {
            return Err(invalid(
                "etas",
                format!(
                    "expected {} entries (one per sigma), got {}",
                    sigmas.len(),
                    etas.len()
                ),
            ));
        };
        Ok(Self {
            inertia,
            inv_inertia: inertia.map(|i| 1.0 / i),
            m,
            g,
            chi,
            theta,
            sigmas,
            etas,
            dissipation,
        })
    }

    pub fn inertia(&self) -> Vec3 {
        self.inertia
    }

    pub fn mg(&self) -> f64 {
        self.m * self.g
    }

    pub fn chi(&self) -> Vec3 {
        self.chi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigmas(&self) -> &[Vec3] {
        &self.sigmas
    }

    pub fn etas(&self) -> &[Vec3] {
        &self.etas
    }

    pub fn dissipation(&self) -> DissipationCasimir {
        self.dissipation
    }

    pub fn omega(&self, pi: &Vec3) -> Vec3 {
        pi.component_mul(&self.inv_inertia)
    }

    fn has_eta(&self) -> bool {
        self.etas.iter().any(|e| e.norm_squared() > 0.0)
    }

    /// Drift and all diffusions at one state.
    pub fn fields(&self, s: &SemidirectElement) -> (SemidirectElement, Vec<SemidirectElement>) {
        (self.drift(s), self.diffusions(s))
    }

    /// Whether this is a Lagrange top: I₁ = I₂ and χ on the symmetry axis.
    pub fn is_lagrange(&self) -> bool {
        self.inertia.x == self.inertia.y && self.chi.x == 0.0 && self.chi.y == 0.0
    }
}

impl StochasticSystem for HeavyTopSpec {
    type State = SemidirectElement;

    fn drift(&self, s: &SemidirectElement) -> SemidirectElement {
        let (pi, gamma) = (s.g, s.v);
        let omega = self.omega(&pi);
        let mg = self.mg();
        let mut d_pi = pi.cross(&omega) + gamma.cross(&self.chi) * mg;
        let mut d_gamma = gamma.cross(&omega);
        if self.theta != 0.0 {
            let t = self.theta;
            if self.dissipation != DissipationCasimir::NoiseBalanced {
                d_pi -= gamma.cross(&omega.cross(&gamma)) * t;
            }
            if self.dissipation != DissipationCasimir::GammaSquared {
                let torque = pi.cross(&omega) - self.chi.cross(&gamma) * mg;
                d_pi += pi.cross(&torque) * t;
                d_gamma += gamma.cross(&torque) * t;
            }
        }
        SemidirectElement::new(d_pi, d_gamma)
    }

    fn n_channels(&self) -> usize {
        self.sigmas.len()
    }

    fn diffusion(&self, s: &SemidirectElement, channel: usize) -> SemidirectElement {
        let sigma = &self.sigmas[channel];
        let eta = &self.etas[channel];
        SemidirectElement::new(
            s.g.cross(sigma) - s.v.cross(eta) * self.mg(),
            s.v.cross(sigma),
        )
    }

    /// Rotation by exp(-w). With ηᵢ ≠ 0 the step is the symmetric composition
    /// half rotation, Π shift by -mg Σ Γ×ηᵢ dWⁱ (exact since Γ is frozen), half
    /// rotation; every factor preserves both Casimirs.
    fn noise_substep(&self, s: &SemidirectElement, dw: &[f64]) -> SemidirectElement {
        let w = noise_vector(&self.sigmas, dw);
        if !self.has_eta() {
            let r = exp_so3(&-w);
            return SemidirectElement::new(r * s.g, r * s.v);
        }
        let half = exp_so3(&(w * -0.5));
        let (pi, gamma) = (half * s.g, half * s.v);
        let eta_w = noise_vector(&self.etas, dw);
        let pi = pi - gamma.cross(&eta_w) * self.mg();
        SemidirectElement::new(half * pi, half * gamma)
    }

    fn energy(&self, s: &SemidirectElement) -> f64 {
        0.5 * s.g.dot(&self.omega(&s.g)) + self.mg() * s.v.dot(&self.chi)
    }

    fn casimirs(&self, s: &SemidirectElement) -> Vec<f64> {
        vec![s.v.norm_squared(), s.g.dot(&s.v)]
    }
}

impl EnergyGenerator for HeavyTopSpec {
    fn energy_gradient(&self, s: &SemidirectElement) -> SemidirectElement {
        SemidirectElement::new(self.omega(&s.g), self.chi * self.mg())
    }

    fn energy_hessian(&self, _s: &SemidirectElement, v: &SemidirectElement) -> SemidirectElement {
        SemidirectElement::new(self.omega(&v.g), Vec3::zeros())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::predicted_energy_drift;
    use crate::systems::testing::{random_vec, rng};
    use rand_distr::{Distribution, StandardNormal};

    fn top(theta: f64, sigma: f64, eta: f64, d: DissipationCasimir) -> HeavyTopSpec {
        HeavyTopSpec::new(
            Vec3::new(1.0, 2.0, 3.0),
            1.3,
            0.9,
            Vec3::new(0.2, -0.1, 0.8),
            theta,
            (0..3).map(|i| Vec3::ith(i, sigma)).collect(),
            (0..3).map(|i| Vec3::ith((i + 1) % 3, eta)).collect(),
            d,
        )
        .unwrap()
    }

    fn random_state(r: &mut rand_chacha::ChaCha8Rng) -> SemidirectElement {
        SemidirectElement::new(random_vec(r, 2.0), random_vec(r, 1.0))
    }

    #[test]
    fn sleeping_top_is_an_equilibrium() {
        let spec = HeavyTopSpec::new(
            Vec3::new(1.0, 1.0, 2.0),
            1.0,
            1.0,
            Vec3::z(),
            0.0,
            vec![],
            vec![],
            DissipationCasimir::PiDotGamma,
        )
        .unwrap();
        let s = SemidirectElement::new(Vec3::new(0.0, 0.0, 1.7), Vec3::z());
        assert_eq!(spec.drift(&s), SemidirectElement::default());
    }

    #[test]
    fn eta_length_is_checked() {
        let r = HeavyTopSpec::new(
            Vec3::repeat(1.0),
            1.0,
            1.0,
            Vec3::z(),
            0.0,
            vec![Vec3::x(), Vec3::y()],
            vec![Vec3::x()],
            DissipationCasimir::PiDotGamma,
        );
        assert!(r.is_err());
    }

    #[test]
    fn drift_and_diffusions_preserve_casimirs() {
        let mut r = rng(11);
        for d in [
            DissipationCasimir::PiDotGamma,
            DissipationCasimir::GammaSquared,
            DissipationCasimir::NoiseBalanced,
        ] {
            let spec = top(0.7, 0.5, 0.3, d);
            for _ in 0..1000 {
                let s = random_state(&mut r);
                let (drift, diffs) = spec.fields(&s);
                for f in std::iter::once(drift).chain(diffs) {
                    let d_gamma_sq = 2.0 * s.v.dot(&f.v);
                    let d_pi_gamma = s.v.dot(&f.g) + s.g.dot(&f.v);
                    assert!(d_gamma_sq.abs() < 1e-13);
                    assert!(d_pi_gamma.abs() < 1e-13, "{d_pi_gamma}");
                }
            }
        }
    }

    #[test]
    fn conservative_drift_conserves_energy() {
        let spec = top(0.0, 0.0, 0.0, DissipationCasimir::PiDotGamma);
        let mut r = rng(12);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let grad = spec.energy_gradient(&s);
            assert!(grad.dot(&spec.drift(&s)).abs() < 1e-13);
        }
    }

    #[test]
    fn damped_energy_decay_matches_two_term_formula() {
        let theta = 0.8;
        let spec = top(theta, 0.0, 0.0, DissipationCasimir::PiDotGamma);
        let mut r = rng(13);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let (pi, gamma) = (s.g, s.v);
            let omega = spec.omega(&pi);
            let rate = spec.energy_gradient(&s).dot(&spec.drift(&s));
            let expected = -theta * omega.cross(&gamma).norm_squared()
                - theta * (omega.cross(&pi) + spec.chi().cross(&gamma) * spec.mg()).norm_squared();
            assert!((rate - expected).abs() < 1e-12, "{rate} vs {expected}");
        }
        let spec = top(theta, 0.0, 0.0, DissipationCasimir::GammaSquared);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let omega = spec.omega(&s.g);
            let rate = spec.energy_gradient(&s).dot(&spec.drift(&s));
            assert!((rate + theta * omega.cross(&s.v).norm_squared()).abs() < 1e-12);
        }
        let spec = top(theta, 0.0, 0.0, DissipationCasimir::NoiseBalanced);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let t = s.g.cross(&spec.omega(&s.g)) + s.v.cross(&spec.chi()) * spec.mg();
            let rate = spec.energy_gradient(&s).dot(&spec.drift(&s));
            assert!((rate + theta * t.norm_squared()).abs() < 1e-12);
        }
    }

    #[test]
    fn diffusion_matches_components() {
        let spec = top(0.0, 0.4, 0.6, DissipationCasimir::PiDotGamma);
        let s = SemidirectElement::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.0, 0.6, 0.8));
        // channel 0: σ = 0.4 e₁, η = 0.6 e₂
        let g = spec.diffusion(&s, 0);
        let mg = spec.mg();
        let expected_pi =
            Vec3::new(0.0, 3.0 * 0.4, -2.0 * 0.4) - Vec3::new(-0.8 * 0.6, 0.0, 0.0) * mg;
        let expected_gamma = Vec3::new(0.0, 0.8 * 0.4, -0.6 * 0.4);
        assert!((g.g - expected_pi).norm() < 1e-15);
        assert!((g.v - expected_gamma).norm() < 1e-15);
    }

    #[test]
    fn noise_substep_is_casimir_exact() {
        let mut r = rng(14);
        for eta in [0.0, 0.5] {
            let spec = top(0.0, 0.7, eta, DissipationCasimir::PiDotGamma);
            for _ in 0..200 {
                let s = random_state(&mut r);
                let dw = random_vec(&mut r, 0.5);
                let t = spec.noise_substep(&s, dw.as_slice());
                let (c0, c1) = (spec.casimirs(&s), spec.casimirs(&t));
                assert!((c0[0] - c1[0]).abs() < 1e-13 * c0[0].max(1.0));
                assert!((c0[1] - c1[1]).abs() < 1e-13 * s.g.norm() * s.v.norm());
            }
        }
    }

    #[test]
    fn noise_substep_is_first_order_consistent() {
        // For small increments the substep matches x + Σ Gᵢ dWⁱ to second order.
        let spec = top(0.0, 0.7, 0.4, DissipationCasimir::PiDotGamma);
        let s = SemidirectElement::new(Vec3::new(0.3, -1.0, 0.5), Vec3::new(0.6, 0.0, 0.8));
        let dw = [1e-4, -2e-4, 0.5e-4];
        let exact = spec.noise_substep(&s, &dw);
        let linear = (0..3).fold(s, |acc, i| acc + spec.diffusion(&s, i) * dw[i]);
        assert!((exact - linear).norm() < 1e-7);
    }

    #[test]
    fn energy_generator_matches_one_step_monte_carlo() {
        let spec = top(0.0, 0.5, 0.3, DissipationCasimir::PiDotGamma);
        let s = SemidirectElement::new(Vec3::new(0.4, -0.9, 0.6), Vec3::new(0.48, 0.6, 0.64));
        let dt = 1e-2;
        let n = 100_000;
        let mut r = rng(15);
        let h0 = spec.energy(&s);
        let mu = spec.drift(&s) + spec.ito_correction(&s);
        let diffs = spec.diffusions(&s);
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                let mut x = s + mu * dt;
                for g in &diffs {
                    let z: f64 = StandardNormal.sample(&mut r);
                    x = x + *g * (z * dt.sqrt());
                }
                (spec.energy(&x) - h0) / dt
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let bias = 0.5 * mu.g.dot(&spec.omega(&mu.g)) * dt;
        let predicted = predicted_energy_drift(&spec, &s);
        assert!(
            (mean - bias - predicted).abs() < 3.0 * se,
            "{mean} ± {se} vs {predicted}"
        );
    }
}
