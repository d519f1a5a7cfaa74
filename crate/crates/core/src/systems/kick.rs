//! Periodic kicking: a rotation about a fixed axis applied every period.

use crate::algebra::{exp_so3, Vec3};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickSpec {
    period: f64,
    kick_vector: Vec3,
}

impl KickSpec {
    pub fn new(period: f64, kick_vector: Vec3) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid("period", format!("must be positive, got {period}")));
        }
        if !kick_vector.iter().all(|c| c.is_finite()) {
            return Err(invalid("kick_vector", "components must be finite"));
        }
        Ok(Self {
            period,
            kick_vector,
        })
    }

    /// Kick vector -amplitude·(1,1,1): a rotation by √3·amplitude about the
    /// (-1,-1,-1) axis, the orientation of the noise substep exp(-w) with
    /// σ = amplitude·(1,1,1).
    pub fn diagonal(period: f64, amplitude: f64) -> Result<Self> {
        Self::new(period, -Vec3::repeat(amplitude))
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn kick_vector(&self) -> Vec3 {
        self.kick_vector
    }

    /// Π ↦ exp(kick)Π.
    pub fn kick_map(&self, pi: &Vec3) -> Vec3 {
        exp_so3(&self.kick_vector) * pi
    }
}
