//! Concrete Lie-algebra kernels.
//!
//! All pairings are Euclidean dot products on components, so the flat and
//! sharp maps are identities. On so(3) this is A·B = -κ(A,B)/2.

use nalgebra::{DMatrix, Matrix3};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::state::PhaseState;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Rotation3 = nalgebra::Rotation3<f64>;

/// Relative singular-value threshold used by the Hörmander rank check.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Below this angle `exp_so3` switches to a Taylor series.
const EXP_SERIES_THRESHOLD: f64 = 1e-4;

/// An element of so(4) as the pair (X₁, X₂) of the six-vector
/// x = (x₁..x₆), with X₁ = (x₁,x₂,x₃) and X₂ = (x₄,x₅,x₆).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct So4Element {
    pub a: Vec3,
    pub b: Vec3,
}

/// An element of so(3)⋉ℝ³: `g` is the rotational part, `v` the vector part.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SemidirectElement {
    pub g: Vec3,
    pub v: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraTag {
    So3,
    /// so(3)⋉ℝ³, the heavy top.
    Semidirect,
    So4,
}

impl AlgebraTag {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraTag::So3 => "so(3)",
            AlgebraTag::Semidirect => "so(3)⋉ℝ³",
            AlgebraTag::So4 => "so(4)",
        }
    }
}

macro_rules! pair_ops {
    ($ty:ident, $x:ident, $y:ident) => {
        impl $ty {
            pub fn new($x: Vec3, $y: Vec3) -> Self {
                Self { $x, $y }
            }

            pub fn dot(&self, other: &Self) -> f64 {
                self.$x.dot(&other.$x) + self.$y.dot(&other.$y)
            }

            pub fn norm(&self) -> f64 {
                self.dot(self).sqrt()
            }
        }

        impl Add for $ty {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self::new(self.$x + rhs.$x, self.$y + rhs.$y)
            }
        }

        impl Sub for $ty {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self::new(self.$x - rhs.$x, self.$y - rhs.$y)
            }
        }

        impl Neg for $ty {
            type Output = Self;
            fn neg(self) -> Self {
                Self::new(-self.$x, -self.$y)
            }
        }

        impl Mul<f64> for $ty {
            type Output = Self;
            fn mul(self, k: f64) -> Self {
                Self::new(self.$x * k, self.$y * k)
            }
        }
    };
}

pair_ops!(So4Element, a, b);
pair_ops!(SemidirectElement, g, v);

pub fn bracket_so3(a: &Vec3, b: &Vec3) -> Vec3 {
    a.cross(b)
}

/// ad*_ξ μ = μ × ξ.
pub fn coad_so3(xi: &Vec3, mu: &Vec3) -> Vec3 {
    mu.cross(xi)
}

/// κ(a,b) = Tr(ad_a ad_b) = -2 a·b.
pub fn killing_so3(a: &Vec3, b: &Vec3) -> f64 {
    -2.0 * a.dot(b)
}

pub fn bracket_so4(x: &So4Element, y: &So4Element) -> So4Element {
    So4Element::new(
        x.a.cross(&y.a) + x.b.cross(&y.b),
        x.a.cross(&y.b) + x.b.cross(&y.a),
    )
}

/// ad*_ξ μ on so(4) under the sum-of-dot-products pairing.
pub fn coad_so4(xi: &So4Element, mu: &So4Element) -> So4Element {
    So4Element::new(
        mu.a.cross(&xi.a) + mu.b.cross(&xi.b),
        mu.a.cross(&xi.b) + mu.b.cross(&xi.a),
    )
}

/// [(ξ,q),(η,r)] = (ξ×η, ξ×r - η×q).
pub fn bracket_semidirect(x: &SemidirectElement, y: &SemidirectElement) -> SemidirectElement {
    SemidirectElement::new(x.g.cross(&y.g), x.g.cross(&y.v) - y.g.cross(&x.v))
}

/// ad*_(ξ,q)(μ,p) = (μ×ξ + p×q, p×ξ).
pub fn coad_semidirect(act: &SemidirectElement, on: &SemidirectElement) -> SemidirectElement {
    SemidirectElement::new(on.g.cross(&act.g) + on.v.cross(&act.v), on.v.cross(&act.g))
}

pub fn hat(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Rodrigues exponential of the hat map.
pub fn exp_so3(w: &Vec3) -> Rotation3 {
    let angle_sq = w.norm_squared();
    let angle = angle_sq.sqrt();
    let (a, b) = if angle < EXP_SERIES_THRESHOLD {
        (
            1.0 - angle_sq / 6.0 + angle_sq * angle_sq / 120.0,
            0.5 - angle_sq / 24.0 + angle_sq * angle_sq / 720.0,
        )
    } else {
        (angle.sin() / angle, (1.0 - angle.cos()) / angle_sq)
    };
    let k = hat(w);
    Rotation3::from_matrix_unchecked(Matrix3::identity() + k * a + k * k * b)
}

/// All Casimir values of a state on the given algebra.
pub fn casimirs(tag: AlgebraTag, state: &PhaseState) -> Result<Vec<f64>> {
    match (tag, state) {
        (AlgebraTag::So3, PhaseState::RigidBody(pi)) => Ok(vec![pi.norm_squared()]),
        (AlgebraTag::Semidirect, PhaseState::HeavyTop(x)) => {
            Ok(vec![x.v.norm_squared(), x.g.dot(&x.v)])
        }
        (AlgebraTag::So4, PhaseState::So4(x)) => {
            Ok(vec![x.a.norm_squared() + x.b.norm_squared(), x.a.dot(&x.b)])
        }
        _ => Err(Error::StateMismatch {
            expected: tag.name(),
        }),
    }
}

/// Rank of the span of the noise vector fields at `state`.
///
/// so(3): span{Π×σᵢ}. Heavy top and spring pendulum: span{(Π×σᵢ, Γ×σᵢ)}.
/// so(4) states have their own entry point, [`hormander_rank_so4`].
pub fn hormander_rank(state: &PhaseState, sigmas: &[Vec3]) -> Result<usize> {
    if sigmas.is_empty() {
        return Err(crate::error::invalid("sigmas", "at least one direction"));
    }
    let columns: Vec<Vec<f64>> = match state {
        PhaseState::RigidBody(pi) => sigmas
            .iter()
            .map(|s| pi.cross(s).iter().copied().collect())
            .collect(),
        PhaseState::HeavyTop(x) => sigmas
            .iter()
            .map(|s| {
                x.g.cross(s)
                    .iter()
                    .chain(x.v.cross(s).iter())
                    .copied()
                    .collect()
            })
            .collect(),
        PhaseState::SpringPendulum(x) => sigmas
            .iter()
            .map(|s| {
                x.pi.cross(s)
                    .iter()
                    .chain(x.gamma.cross(s).iter())
                    .copied()
                    .collect()
            })
            .collect(),
        PhaseState::So4(_) => {
            return Err(Error::StateMismatch {
                expected: "so(3) or so(3)⋉ℝ³",
            })
        }
    };
    Ok(numerical_rank(&columns))
}

/// so(4) analogue of [`hormander_rank`]: span{ad*_σᵢ Π}.
pub fn hormander_rank_so4(state: &So4Element, sigmas: &[So4Element]) -> usize {
    let columns: Vec<Vec<f64>> = sigmas
        .iter()
        .map(|s| {
            let c = coad_so4(s, state);
            c.a.iter().chain(c.b.iter()).copied().collect()
        })
        .collect();
    numerical_rank(&columns)
}

pub(crate) fn numerical_rank(columns: &[Vec<f64>]) -> usize {
    let Some(first) = columns.first() else {
        return 0;
    };
    let m = DMatrix::from_fn(first.len(), columns.len(), |i, j| columns[j][i]);
    let sv = m.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * largest).count()
}
