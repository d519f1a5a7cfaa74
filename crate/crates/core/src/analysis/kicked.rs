//! Periodically kicked damped rigid body: stroboscopic exponents and
//! terminal-state clustering.
//!
//! Between kicks the noise-free damped body is integrated with RK4. Kicks
//! act at t = nT, n ≥ 1, and the stroboscopic sample at nT is taken just
//! before the kick.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{exp_so3, Vec3};
use crate::error::{invalid, Result};
use crate::integrators::{step_tangent, TangentState};
use crate::noise::{rng_for, stream_index};
use crate::systems::{KickSpec, RigidBodySpec, StochasticSystem, TangentSystem};

use super::lyapunov::LyapunovEstimate;
use super::streams;

/// Distance below which terminal states count as one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct KickedRun {
    /// Tangent growth rate per unit time after the burn-in periods.
    pub lambda_top: f64,
    /// Stroboscopic samples, one per period.
    pub strobe: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KickedSummary {
    pub amplitude: f64,
    pub estimate: LyapunovEstimate,
    pub n_clusters: usize,
    pub terminal_states: Vec<Vec3>,
}

/// Steps of size dt per kick period; the period must be a whole multiple.
fn steps_per_period(kick: &KickSpec, dt: f64) -> Result<usize> {
    let n = (kick.period() / dt).round();
    if n.is_nan() || n < 1.0 || ((n * dt - kick.period()).abs() > 1e-9 * kick.period()) {
        return Err(invalid(
            "dt",
            format!("must divide the kick period {}", kick.period()),
        ));
    }
    Ok(n as usize)
}

/// Runs `n_periods` periods from `x0` with tangent `delta0`; growth before
/// `burn_in_periods` is discarded.
pub fn run_kicked(
    system: &RigidBodySpec,
    kick: &KickSpec,
    dt: f64,
    n_periods: usize,
    burn_in_periods: usize,
    x0: Vec3,
    delta0: Vec3,
) -> Result<KickedRun> {
    if system.n_channels() != 0 {
        return Err(invalid(
            "sigmas",
            "kicks replace the noise; use a noise-free body",
        ));
    }
    if burn_in_periods >= n_periods {
        return Err(invalid("n_periods", "must exceed the burn-in periods"));
    }
    let per = steps_per_period(kick, dt)?;
    let rotation = exp_so3(&kick.kick_vector());
    let mut x = x0;
    let mut t = TangentState::new(system.project_tangent(&x0, &delta0));
    let mut strobe = Vec::with_capacity(n_periods);
    for period in 0..n_periods {
        if period == burn_in_periods {
            t.log_norm_accum = 0.0;
        }
        for k in 0..per {
            (x, t) = step_tangent(system, &x, &t, dt, &[], period * per + k + 1)?;
        }
        strobe.push(x);
        x = rotation * x;
        t.delta = rotation * t.delta;
    }
    let measured = (n_periods - burn_in_periods) as f64 * kick.period();
    Ok(KickedRun {
        lambda_top: t.log_norm_accum / measured,
        strobe,
    })
}

/// Number of single-linkage clusters of `points` at distance `tol`.
pub fn count_clusters(points: &[Vec3], tol: f64) -> usize {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() < tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..points.len())
        .filter(|&i| root(&mut parent, i) == i)
        .count()
}

/// Kicked regime at one amplitude (see [`KickSpec::diagonal`]): exponents averaged over
/// `n_realizations` runs from `initial` (drawn from per-realization streams
/// of `seed`) and the cluster count of their last stroboscopic samples.
#[allow(clippy::too_many_arguments)]
pub fn kicked_regime<F>(
    system: &RigidBodySpec,
    period: f64,
    amplitude: f64,
    dt: f64,
    n_periods: usize,
    burn_in_periods: usize,
    n_realizations: usize,
    seed: u64,
    initial: F,
) -> Result<KickedSummary>
where
    F: Fn(&mut ChaCha8Rng) -> (Vec3, Vec3) + Sync,
{
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(invalid(
            "amplitude",
            format!("must be positive, got {amplitude}"),
        ));
    }
    if n_realizations == 0 {
        return Err(invalid("n_realizations", "must be at least 1"));
    }
    let kick = KickSpec::diagonal(period, amplitude)?;
    let runs = (0..n_realizations as u32)
        .into_par_iter()
        .map(|r| {
            let (x0, d0) = initial(&mut rng_for(seed, stream_index(streams::KICKED_IC, r)));
            run_kicked(system, &kick, dt, n_periods, burn_in_periods, x0, d0)
        })
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = runs.iter().map(|r| r.lambda_top).collect();
    let terminal_states: Vec<Vec3> = runs
        .iter()
        .filter_map(|r| r.strobe.last().copied())
        .collect();
    let t_span = n_periods as f64 * period;
    Ok(KickedSummary {
        amplitude,
        estimate: LyapunovEstimate::from_samples(&lambdas, t_span),
        n_clusters: count_clusters(&terminal_states, CLUSTER_TOLERANCE),
        terminal_states,
    })
}
