//! Tangent (variational) propagation along split-step trajectories.
//!
//! The base state and the tangent vectors are advanced together by RK4 on the
//! augmented system (x, δ) ↦ (F(x), DF(x)δ), so the linearization is evaluated
//! at exactly the RK4 stage states of the base step. The noise substep is a
//! linear map and is applied to δ unchanged.

use crate::error::{Error, Result};
use crate::state::PhaseVector;
use crate::systems::TangentSystem;

/// Tangent norms outside this range before renormalization are treated as
/// loss of exponent range.
pub const TANGENT_NORM_RANGE: (f64, f64) = (1e-200, 1e200);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentState<T> {
    pub delta: T,
    pub log_norm_accum: f64,
}

impl<T: PhaseVector> TangentState<T> {
    /// Unit tangent with an empty accumulator.
    pub fn new(delta: T) -> Self {
        let n = delta.norm();
        Self {
            delta: delta * (1.0 / n),
            log_norm_accum: 0.0,
        }
    }
}

fn rk4_augmented<S: TangentSystem>(
    system: &S,
    x: &S::State,
    deltas: &mut [S::State],
    dt: f64,
) -> S::State {
    let h = 0.5 * dt;
    let k1 = system.drift(x);
    let x2 = *x + k1 * h;
    let k2 = system.drift(&x2);
    let x3 = *x + k2 * h;
    let k3 = system.drift(&x3);
    let x4 = *x + k3 * dt;
    let k4 = system.drift(&x4);
    for d in deltas.iter_mut() {
        let l1 = system.drift_derivative(x, d);
        let l2 = system.drift_derivative(&x2, &(*d + l1 * h));
        let l3 = system.drift_derivative(&x3, &(*d + l2 * h));
        let l4 = system.drift_derivative(&x4, &(*d + l3 * dt));
        *d = *d + (l1 + (l2 + l3) * 2.0 + l4) * (dt / 6.0);
    }
    *x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0)
}

fn checked_norm<T: PhaseVector>(v: &T, step: usize) -> Result<f64> {
    let n = v.norm();
    if n.is_finite() && n > TANGENT_NORM_RANGE.0 && n < TANGENT_NORM_RANGE.1 {
        Ok(n)
    } else {
        Err(Error::ExponentRange { step, norm: n })
    }
}

/// One split step of the base state together with a single tangent vector,
/// followed by projection onto the orbit tangent space, log-norm
/// accumulation and renormalization. `step` is only used for error reports.
pub fn step_tangent<S: TangentSystem>(
    system: &S,
    x: &S::State,
    tangent: &TangentState<S::State>,
    dt: f64,
    dw: &[f64],
    step: usize,
) -> Result<(S::State, TangentState<S::State>)> {
    let mut deltas = [tangent.delta];
    let y = rk4_augmented(system, x, &mut deltas, dt);
    let z = system.noise_substep(&y, dw);
    if !z.is_finite() {
        return Err(Error::Divergence { step });
    }
    let d = system.tangent_noise_substep(&y, &deltas[0], dw);
    let d = system.project_tangent(&z, &d);
    let n = checked_norm(&d, step)?;
    Ok((
        z,
        TangentState {
            delta: d * (1.0 / n),
            log_norm_accum: tangent.log_norm_accum + n.ln(),
        },
    ))
}

/// One split step with a full tangent frame, re-orthonormalized by modified
/// Gram-Schmidt (a QR factorization). Adds log|Rₖₖ| to `log_diag[k]`.
pub fn step_tangent_frame<S: TangentSystem>(
    system: &S,
    x: &S::State,
    frame: &mut [S::State],
    log_diag: &mut [f64],
    dt: f64,
    dw: &[f64],
    step: usize,
) -> Result<S::State> {
    let y = rk4_augmented(system, x, frame, dt);
    let z = system.noise_substep(&y, dw);
    if !z.is_finite() {
        return Err(Error::Divergence { step });
    }
    for k in 0..frame.len() {
        let mut v = system.tangent_noise_substep(&y, &frame[k], dw);
        for q in &frame[..k] {
            v = v - *q * q.inner(&v);
        }
        let r = checked_norm(&v, step)?;
        log_diag[k] += r.ln();
        frame[k] = v * (1.0 / r);
    }
    Ok(z)
}
