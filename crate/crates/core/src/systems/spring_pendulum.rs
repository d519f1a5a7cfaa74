//! Spring pendulum: a heavy top on a spring in the limit of vanishing axial
//! inertia, 𝕀 = diag(I, I, ε) with ε → 0, realized as Ω₃ = 0.
//!
//! h = (Π₁² + Π₂²)/(2 m R² I) + mgR Γ·χ + P²/(2m) + k(R-1)²/2, χ = e₃.
//!
//! dΠ = (Π×Ω + mgR Γ×χ) dt + Σᵢ (Π×σᵢ + Γ×ηᵢ) ∘ dWⁱ
//! dΓ = Γ×Ω dt + Σᵢ Γ×σᵢ ∘ dWⁱ
//! dR = P/m dt + β ∘ dW⁰
//! dP = (-mg Γ·χ - k(R-1) + (Π₁² + Π₂²)/(I m R³)) dt - α ∘ dW⁰
//!
//! The spring noise (α, β) rides on channel 0. Gravity points along -χ, so
//! the stable rest state is Γ = -χ, Π = 0, P = 0, R = 1 + mg/k.

use crate::algebra::{exp_so3, Vec3};
use crate::error::{invalid, Error, Result};
use crate::state::SpringPendulumState;

use super::{check_finite_vecs, check_positive, noise_vector, StochasticSystem};

/// Spring lengths below this are treated as the singular configuration.
pub const R_MIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct SpringPendulumSpec {
    m: f64,
    g: f64,
    k: f64,
    i_planar: f64,
    chi: Vec3,
    sigmas: Vec<Vec3>,
    etas: Vec<Vec3>,
    alpha: f64,
    beta: f64,
}

impl SpringPendulumSpec {
    /// `etas` is either empty or one per noise channel. If α or β is nonzero
    /// and no σ is given, a single zero-σ channel carries the spring noise.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: f64,
        g: f64,
        k: f64,
        i_planar: f64,
        sigmas: Vec<Vec3>,
        etas: Vec<Vec3>,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        check_positive("m", m)?;
        check_positive("g", g)?;
        check_positive("k", k)?;
        check_positive("i_planar", i_planar)?;
        check_finite_vecs("sigmas", &sigmas)?;
        check_finite_vecs("etas", &etas)?;
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(invalid("alpha/beta", "must be finite"));
        }
        let mut sigmas = sigmas;
        if sigmas.is_empty() && (alpha != 0.0 || beta != 0.0) {
            sigmas.push(Vec3::zeros());
        }
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
            m,
            g,
            k,
            i_planar,
            chi: Vec3::z(),
            sigmas,
            etas,
            alpha,
            beta,
        })
    }

    pub fn mg(&self) -> f64 {
        self.m * self.g
    }

    pub fn chi(&self) -> Vec3 {
        self.chi
    }

    /// Ω = (Π₁, Π₂, 0)/(m R² I).
    pub fn omega(&self, s: &SpringPendulumState) -> Vec3 {
        let scale = 1.0 / (self.m * s.r * s.r * self.i_planar);
        Vec3::new(s.pi.x * scale, s.pi.y * scale, 0.0)
    }

    /// Rest state: hanging along -χ at the stretched length R = 1 + mg/k.
    pub fn equilibrium(&self) -> SpringPendulumState {
        SpringPendulumState {
            pi: Vec3::zeros(),
            gamma: -self.chi,
            r: 1.0 + self.mg() / self.k,
            p: 0.0,
        }
    }

    /// Drift and diffusions, refusing states near R = 0.
    pub fn fields(
        &self,
        s: &SpringPendulumState,
    ) -> Result<(SpringPendulumState, Vec<SpringPendulumState>)> {
        if s.r.abs() < R_MIN {
            return Err(Error::SingularConfiguration {
                r: s.r,
                r_min: R_MIN,
            });
        }
        Ok((self.drift(s), self.diffusions(s)))
    }
}

impl StochasticSystem for SpringPendulumSpec {
    type State = SpringPendulumState;

    fn drift(&self, s: &SpringPendulumState) -> SpringPendulumState {
        let omega = self.omega(s);
        let mg = self.mg();
        let planar_sq = s.pi.x * s.pi.x + s.pi.y * s.pi.y;
        SpringPendulumState {
            pi: s.pi.cross(&omega) + s.gamma.cross(&self.chi) * (mg * s.r),
            gamma: s.gamma.cross(&omega),
            r: s.p / self.m,
            p: -mg * s.gamma.dot(&self.chi) - self.k * (s.r - 1.0)
                + planar_sq / (self.i_planar * self.m * s.r.powi(3)),
        }
    }

    fn n_channels(&self) -> usize {
        self.sigmas.len()
    }

    fn diffusion(&self, s: &SpringPendulumState, channel: usize) -> SpringPendulumState {
        let sigma = &self.sigmas[channel];
        let (r, p) = if channel == 0 {
            (self.beta, -self.alpha)
        } else {
            (0.0, 0.0)
        };
        SpringPendulumState {
            pi: s.pi.cross(sigma) + s.gamma.cross(&self.etas[channel]),
            gamma: s.gamma.cross(sigma),
            r,
            p,
        }
    }

    /// Half rotation by exp(-w/2), Π shift by Σ Γ×ηᵢ dWⁱ, half rotation, then
    /// the additive spring increments.
    fn noise_substep(&self, s: &SpringPendulumState, dw: &[f64]) -> SpringPendulumState {
        if self.sigmas.is_empty() {
            return *s;
        }
        let w = noise_vector(&self.sigmas, dw);
        let half = exp_so3(&(w * -0.5));
        let (pi, gamma) = (half * s.pi, half * s.gamma);
        let pi = pi + gamma.cross(&noise_vector(&self.etas, dw));
        SpringPendulumState {
            pi: half * pi,
            gamma: half * gamma,
            r: s.r + self.beta * dw[0],
            p: s.p - self.alpha * dw[0],
        }
    }

    fn energy(&self, s: &SpringPendulumState) -> f64 {
        let planar_sq = s.pi.x * s.pi.x + s.pi.y * s.pi.y;
        planar_sq / (2.0 * self.m * s.r * s.r * self.i_planar)
            + self.mg() * s.r * s.gamma.dot(&self.chi)
            + s.p * s.p / (2.0 * self.m)
            + 0.5 * self.k * (s.r - 1.0).powi(2)
    }

    fn casimirs(&self, s: &SpringPendulumState) -> Vec<f64> {
        vec![s.gamma.norm_squared()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PhaseVector;
    use crate::systems::testing::{random_vec, rng};
    use rand::Rng;

    fn pendulum(sigma: f64, eta: f64, alpha: f64, beta: f64) -> SpringPendulumSpec {
        SpringPendulumSpec::new(
            1.2,
            9.81,
            40.0,
            0.7,
            (0..3).map(|i| Vec3::ith(i, sigma)).collect(),
            (0..3).map(|i| Vec3::ith(i, eta)).collect(),
            alpha,
            beta,
        )
        .unwrap()
    }

    fn random_state(r: &mut rand_chacha::ChaCha8Rng) -> SpringPendulumState {
        SpringPendulumState {
            pi: random_vec(r, 1.0),
            gamma: random_vec(r, 1.0),
            r: r.random_range(0.5..2.0),
            p: r.random_range(-1.0..1.0),
        }
    }

    #[test]
    fn equilibrium_from_force_balance() {
        let spec = pendulum(0.0, 0.0, 0.0, 0.0);
        let eq = spec.equilibrium();
        // solve -mg Γ·χ - k(R-1) = 0 for R by bisection as an independent check
        let force = |r: f64| -spec.mg() * eq.gamma.dot(&spec.chi()) - 40.0 * (r - 1.0);
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if force(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((eq.r - lo).abs() < 1e-12);
        let (drift, _) = spec.fields(&eq).unwrap();
        assert!(drift.norm() < 1e-12);
    }

    #[test]
    fn singular_length_is_rejected() {
        let spec = pendulum(0.0, 0.0, 0.0, 0.0);
        let s = SpringPendulumState {
            r: 1e-7,
            ..spec.equilibrium()
        };
        assert!(matches!(
            spec.fields(&s),
            Err(Error::SingularConfiguration { .. })
        ));
    }

    #[test]
    fn gamma_norm_is_preserved_by_all_fields() {
        let spec = pendulum(0.4, 0.3, 0.2, 0.1);
        let mut r = rng(31);
        for _ in 0..1000 {
            let s = random_state(&mut r);
            let (drift, diffs) = spec.fields(&s).unwrap();
            for f in std::iter::once(drift).chain(diffs) {
                assert!((2.0 * s.gamma.dot(&f.gamma)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn conservative_drift_conserves_energy() {
        let spec = pendulum(0.0, 0.0, 0.0, 0.0);
        let mut r = rng(32);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let h = 1e-6;
            let d = spec.drift(&s);
            let rate = (spec.energy(&(s + d * h)) - spec.energy(&(s - d * h))) / (2.0 * h);
            assert!(rate.abs() < 1e-7, "{rate}");
        }
    }

    #[test]
    fn noise_substep_preserves_gamma_norm() {
        let spec = pendulum(0.8, 0.5, 0.3, 0.2);
        let mut r = rng(33);
        for _ in 0..200 {
            let s = random_state(&mut r);
            let dw = random_vec(&mut r, 0.5);
            let t = spec.noise_substep(&s, dw.as_slice());
            assert!((t.gamma.norm() - s.gamma.norm()).abs() < 1e-13);
            assert!(PhaseVector::is_finite(&t));
        }
    }
}
