//! Four-dimensional rigid body on so(4)*.
//!
//! Π = JΩ + ΩJ with J = diag(J₁..J₄) acts diagonally on the six-vector:
//! Πₖ = (J_a + J_b) Ωₖ over the index pairs (1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
//!
//! dΠ = (ad*_Ω Π + θ [X,[X,Ω]]) dt + Σᵢ ad*_σᵢ Π ∘ dWⁱ, with X = ∂C₂/∂Π = (Π₂,Π₁)
//! for the Casimir C₂ = Π₁·Π₂. The sign of the damping gives
//! dh/dt = -θ‖[X,Ω]‖².
//!
//! The noise flow decouples in A = Π₁+Π₂ and B = Π₁-Π₂, where it is a pair of
//! rotations.

use rand::Rng;

use crate::algebra::{bracket_so4, coad_so4, exp_so3, So4Element, Vec3};
use crate::error::{invalid, Result};

use super::{check_positive, check_theta, StochasticSystem};

const INDEX_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Number of random states sampled by the construction-time sign check.
const SIGN_CHECK_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct So4BodySpec {
    j: [f64; 4],
    inv_moments: [f64; 6],
    theta: f64,
    sigmas: Vec<So4Element>,
}

impl So4BodySpec {
    pub fn new(j: [f64; 4], theta: f64, sigmas: Vec<So4Element>) -> Result<Self> {
        for &jk in &j {
            check_positive("j", jk)?;
        }
        check_theta(theta)?;
        if !sigmas
            .iter()
            .all(|s| s.a.iter().chain(s.b.iter()).all(|c| c.is_finite()))
        {
            return Err(invalid("sigmas", "components must be finite"));
        }
        let inv_moments = INDEX_PAIRS.map(|(a, b)| 1.0 / (j[a] + j[b]));
        let spec = Self {
            j,
            inv_moments,
            theta,
            sigmas,
        };
        spec.check_dissipation_sign()?;
        Ok(spec)
    }

    /// Noise along the six basis directions with amplitude σ.
    pub fn isotropic(j: [f64; 4], theta: f64, sigma: f64) -> Result<Self> {
        let sigmas = (0..6)
            .map(|k| {
                let mut s = So4Element::default();
                if k < 3 {
                    s.a[k] = sigma;
                } else {
                    s.b[k - 3] = sigma;
                }
                s
            })
            .collect();
        Self::new(j, theta, sigmas)
    }

    pub fn j(&self) -> [f64; 4] {
        self.j
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigmas(&self) -> &[So4Element] {
        &self.sigmas
    }

    pub fn omega(&self, pi: &So4Element) -> So4Element {
        let m = &self.inv_moments;
        So4Element::new(
            Vec3::new(pi.a.x * m[0], pi.a.y * m[1], pi.a.z * m[2]),
            Vec3::new(pi.b.x * m[3], pi.b.y * m[4], pi.b.z * m[5]),
        )
    }

    pub fn fields(&self, pi: &So4Element) -> (So4Element, Vec<So4Element>) {
        (self.drift(pi), self.diffusions(pi))
    }

    fn damping(&self, pi: &So4Element) -> So4Element {
        let x = So4Element::new(pi.b, pi.a);
        bracket_so4(&x, &bracket_so4(&x, &self.omega(pi)))
    }

    /// Samples random states and confirms the damping never raises the energy.
    fn check_dissipation_sign(&self) -> Result<()> {
        let mut rng = crate::noise::rng_for(0x5034, 0);
        for _ in 0..SIGN_CHECK_SAMPLES {
            let pi = So4Element::new(
                Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
                Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
            );
            let rate = self.omega(&pi).dot(&self.damping(&pi));
            if rate > 1e-12 {
                return Err(invalid("theta", "damping term raises the energy"));
            }
        }
        Ok(())
    }
}

impl StochasticSystem for So4BodySpec {
    type State = So4Element;

    fn drift(&self, pi: &So4Element) -> So4Element {
        let conservative = coad_so4(&self.omega(pi), pi);
        if self.theta == 0.0 {
            return conservative;
        }
        conservative + self.damping(pi) * self.theta
    }

    fn n_channels(&self) -> usize {
        self.sigmas.len()
    }

    fn diffusion(&self, pi: &So4Element, channel: usize) -> So4Element {
        coad_so4(&self.sigmas[channel], pi)
    }

    fn noise_substep(&self, pi: &So4Element, dw: &[f64]) -> So4Element {
        let (wa, wb) = self
            .sigmas
            .iter()
            .zip(dw)
            .fold((Vec3::zeros(), Vec3::zeros()), |(wa, wb), (s, w)| {
                (wa + (s.a + s.b) * *w, wb + (s.a - s.b) * *w)
            });
        let a = exp_so3(&-wa) * (pi.a + pi.b);
        let b = exp_so3(&-wb) * (pi.a - pi.b);
        So4Element::new((a + b) * 0.5, (a - b) * 0.5)
    }

    fn energy(&self, pi: &So4Element) -> f64 {
        0.5 * pi.dot(&self.omega(pi))
    }

    fn casimirs(&self, pi: &So4Element) -> Vec<f64> {
        vec![pi.a.norm_squared() + pi.b.norm_squared(), pi.a.dot(&pi.b)]
    }
}
