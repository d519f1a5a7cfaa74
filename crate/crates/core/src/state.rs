//! Phase-space states and the vector-space operations the integrators need.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::{SemidirectElement, So4Element, Vec3};

/// A finite-dimensional state that RK4 and the reference schemes can combine
/// linearly.
pub trait PhaseVector:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    const DIM: usize;

    fn zero() -> Self;
    fn inner(&self, other: &Self) -> f64;
    fn write_components(&self, out: &mut Vec<f64>);

    fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    fn components(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::DIM);
        self.write_components(&mut out);
        out
    }

    fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }
}

impl PhaseVector for Vec3 {
    const DIM: usize = 3;

    fn zero() -> Self {
        Vec3::zeros()
    }

    fn inner(&self, other: &Self) -> f64 {
        self.dot(other)
    }

    fn write_components(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.as_slice());
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

macro_rules! pair_phase {
    ($ty:ident, $x:ident, $y:ident) => {
        impl PhaseVector for $ty {
            const DIM: usize = 6;

            fn zero() -> Self {
                Self::default()
            }

            fn inner(&self, other: &Self) -> f64 {
                self.dot(other)
            }

            fn write_components(&self, out: &mut Vec<f64>) {
                out.extend_from_slice(self.$x.as_slice());
                out.extend_from_slice(self.$y.as_slice());
            }

            fn is_finite(&self) -> bool {
                PhaseVector::is_finite(&self.$x) && PhaseVector::is_finite(&self.$y)
            }
        }
    };
}

pair_phase!(So4Element, a, b);
pair_phase!(SemidirectElement, g, v);

/// Spring-pendulum state: body momentum Π, vertical direction Γ in the body
/// frame, spring length R and its conjugate momentum P.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpringPendulumState {
    pub pi: Vec3,
    pub gamma: Vec3,
    pub r: f64,
    pub p: f64,
}

impl Add for SpringPendulumState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            pi: self.pi + o.pi,
            gamma: self.gamma + o.gamma,
            r: self.r + o.r,
            p: self.p + o.p,
        }
    }
}

impl Sub for SpringPendulumState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for SpringPendulumState {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for SpringPendulumState {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            pi: self.pi * k,
            gamma: self.gamma * k,
            r: self.r * k,
            p: self.p * k,
        }
    }
}

impl PhaseVector for SpringPendulumState {
    const DIM: usize = 8;

    fn zero() -> Self {
        Self::default()
    }

    fn inner(&self, o: &Self) -> f64 {
        self.pi.dot(&o.pi) + self.gamma.dot(&o.gamma) + self.r * o.r + self.p * o.p
    }

    fn write_components(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.pi.as_slice());
        out.extend_from_slice(self.gamma.as_slice());
        out.push(self.r);
        out.push(self.p);
    }
}

/// The evolved variables of any of the four systems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseState {
    RigidBody(Vec3),
    HeavyTop(SemidirectElement),
    So4(So4Element),
    SpringPendulum(SpringPendulumState),
}

impl PhaseState {
    pub fn components(&self) -> Vec<f64> {
        match self {
            PhaseState::RigidBody(x) => x.components(),
            PhaseState::HeavyTop(x) => x.components(),
            PhaseState::So4(x) => x.components(),
            PhaseState::SpringPendulum(x) => x.components(),
        }
    }

    /// Column names matching [`PhaseState::components`].
    pub fn component_names(&self) -> &'static [&'static str] {
        match self {
            PhaseState::RigidBody(_) => &["pi1", "pi2", "pi3"],
            PhaseState::HeavyTop(_) => &["pi1", "pi2", "pi3", "gamma1", "gamma2", "gamma3"],
            PhaseState::So4(_) => &["x1", "x2", "x3", "x4", "x5", "x6"],
            PhaseState::SpringPendulum(_) => {
                &["pi1", "pi2", "pi3", "gamma1", "gamma2", "gamma3", "r", "p"]
            }
        }
    }
}

/// Conversion between a concrete state type and the [`PhaseState`] enum.
pub trait IntoPhaseState: Sized {
    fn into_phase(self) -> PhaseState;
    fn from_phase(state: &PhaseState) -> Option<Self>;
}

macro_rules! phase_conv {
    ($ty:ty, $variant:ident) => {
        impl IntoPhaseState for $ty {
            fn into_phase(self) -> PhaseState {
                PhaseState::$variant(self)
            }

            fn from_phase(state: &PhaseState) -> Option<Self> {
                match state {
                    PhaseState::$variant(x) => Some(*x),
                    _ => None,
                }
            }
        }
    };
}

phase_conv!(Vec3, RigidBody);
phase_conv!(SemidirectElement, HeavyTop);
phase_conv!(So4Element, So4);
phase_conv!(SpringPendulumState, SpringPendulum);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_names_match_lengths() {
        let states = [
            PhaseState::RigidBody(Vec3::x()),
            PhaseState::HeavyTop(SemidirectElement::default()),
            PhaseState::So4(So4Element::default()),
            PhaseState::SpringPendulum(SpringPendulumState::default()),
        ];
        for s in states {
            assert_eq!(s.components().len(), s.component_names().len());
        }
    }

    #[test]
    fn spring_state_arithmetic() {
        let a = SpringPendulumState {
            pi: Vec3::new(1.0, 2.0, 0.0),
            gamma: Vec3::z(),
            r: 1.5,
            p: -0.5,
        };
        let b = a * 2.0 - a;
        assert_eq!(a, b);
        assert_eq!(a.inner(&a), 1.0 + 4.0 + 1.0 + 2.25 + 0.25);
        assert!(!PhaseVector::is_finite(&(a * f64::NAN)));
    }
}
