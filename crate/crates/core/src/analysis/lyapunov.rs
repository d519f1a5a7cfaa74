//! Lyapunov exponents from tangent propagation along split-step paths.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::Vec3;
use crate::error::{invalid, Error, Result};
use crate::integrators::{step_tangent, step_tangent_frame, Scheme, SolverConfig, TangentState};
use crate::noise::{rng_for, stream_index, NoisePath};
use crate::state::PhaseVector;
use crate::systems::{RigidBodySpec, StochasticSystem, TangentSystem};

use super::sampler::uniform_sphere;
use super::streams;

/// Fraction of each run discarded before accumulating growth rates.
pub const BURN_IN_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovEstimate {
    /// Mean growth rate over realizations, in units of 1/time.
    pub lambda: f64,
    /// Sample standard error of the mean; zero for a single realization.
    pub std_error: f64,
    pub n_realizations: usize,
    pub t_span: f64,
}

impl LyapunovEstimate {
    pub(crate) fn from_samples(samples: &[f64], t_span: f64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            lambda: mean,
            std_error,
            n_realizations: n,
            t_span,
        }
    }
}

/// Burn-in and measured step counts for a run of length `t_span`.
fn step_budget(solver: &SolverConfig, t_span: f64) -> Result<(usize, usize)> {
    solver.validate()?;
    if solver.scheme != Scheme::SplitStep {
        return Err(invalid("scheme", "tangent propagation runs on split_step"));
    }
    if !(t_span.is_finite() && t_span > 0.0) {
        return Err(invalid("t_span", format!("must be positive, got {t_span}")));
    }
    let total = (t_span / solver.dt).round() as usize;
    let burn = (BURN_IN_FRACTION * total as f64).round() as usize;
    if total <= burn {
        return Err(invalid("t_span", "shorter than one step after burn-in"));
    }
    Ok((burn, total - burn))
}

fn check_realizations(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("n_realizations", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Initial conditions for rigid-body runs: Π uniform on ‖Π‖ = `radius` and a
/// raw tangent uniform on the unit sphere (projected by the caller).
pub fn rigid_body_ic(radius: f64) -> impl Fn(&mut ChaCha8Rng) -> (Vec3, Vec3) + Sync {
    move |rng| (uniform_sphere(rng, radius), uniform_sphere(rng, 1.0))
}

/// One realization of the top exponent starting from `(x0, raw tangent)`.
pub fn top_exponent_path<S: TangentSystem>(
    system: &S,
    x0: S::State,
    tangent: S::State,
    dt: f64,
    (burn, measured): (usize, usize),
    path: &mut NoisePath,
) -> Result<f64> {
    let mut dw = vec![0.0; system.n_channels()];
    let mut x = x0;
    let d0 = system.project_tangent(&x, &tangent);
    if d0.norm().is_nan() || d0.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut t = TangentState::new(d0);
    for n in 0..burn + measured {
        if n == burn {
            t.log_norm_accum = 0.0;
        }
        path.fill(&mut dw);
        (x, t) = step_tangent(system, &x, &t, dt, &dw, n + 1)?;
    }
    Ok(t.log_norm_accum / (measured as f64 * dt))
}

/// Top exponent averaged over `n_realizations` independent noise paths and
/// initial conditions. Realization r uses noise stream
/// `stream_index(LYAPUNOV_NOISE, r)` and draws its initial condition from
/// `stream_index(LYAPUNOV_IC, r)` of the solver seed.
pub fn lyapunov_top<S, F>(
    system: &S,
    solver: &SolverConfig,
    t_span: f64,
    n_realizations: usize,
    initial: F,
) -> Result<LyapunovEstimate>
where
    S: TangentSystem,
    F: Fn(&mut ChaCha8Rng) -> (S::State, S::State) + Sync,
{
    check_realizations(n_realizations)?;
    let budget = step_budget(solver, t_span)?;
    let samples = (0..n_realizations as u32)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(solver.rng_seed, stream_index(streams::LYAPUNOV_IC, r));
            let (x0, d0) = initial(&mut rng);
            let mut path = NoisePath::new(
                solver.rng_seed,
                stream_index(streams::LYAPUNOV_NOISE, r),
                solver.dt,
                system.n_channels(),
            );
            top_exponent_path(system, x0, d0, solver.dt, budget, &mut path)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LyapunovEstimate::from_samples(&samples, t_span))
}

/// Sum of all three exponents of a rigid body from a full tangent frame with
/// QR re-orthonormalization every step, averaged over realizations started
/// uniformly on ‖Π‖ = `radius`.
pub fn lyapunov_sum(
    system: &RigidBodySpec,
    solver: &SolverConfig,
    radius: f64,
    t_span: f64,
    n_realizations: usize,
) -> Result<LyapunovEstimate> {
    check_realizations(n_realizations)?;
    let (burn, measured) = step_budget(solver, t_span)?;
    let samples = (0..n_realizations as u32)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(solver.rng_seed, stream_index(streams::LYAPUNOV_IC, r));
            let mut x = uniform_sphere(&mut rng, radius);
            let mut path = NoisePath::new(
                solver.rng_seed,
                stream_index(streams::LYAPUNOV_NOISE, r),
                solver.dt,
                system.n_channels(),
            );
            let mut dw = vec![0.0; system.n_channels()];
            let mut frame = [Vec3::x(), Vec3::y(), Vec3::z()];
            let mut log_diag = [0.0; 3];
            for n in 0..burn + measured {
                if n == burn {
                    log_diag = [0.0; 3];
                }
                path.fill(&mut dw);
                x = step_tangent_frame(
                    system,
                    &x,
                    &mut frame,
                    &mut log_diag,
                    solver.dt,
                    &dw,
                    n + 1,
                )?;
            }
            Ok(log_diag.iter().sum::<f64>() / (measured as f64 * solver.dt))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LyapunovEstimate::from_samples(&samples, t_span))
}

/// Gibbs average of h on ‖Π‖ = `radius` with its standard error, by
/// self-normalized importance sampling of `n_draws` uniform sphere points
/// weighted by exp(-2θh/σ²).
pub fn gibbs_mean_energy<R: Rng + ?Sized>(
    system: &RigidBodySpec,
    radius: f64,
    sigma: f64,
    n_draws: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if n_draws < 2 {
        return Err(invalid("n_draws", "need at least two draws"));
    }
    let draws: Vec<(f64, f64)> = (0..n_draws)
        .map(|_| {
            let p = uniform_sphere(rng, radius);
            let h = system.energy(&p);
            Ok((h, super::gibbs_density(h, system.theta(), sigma)?))
        })
        .collect::<Result<_>>()?;
    let w_sum: f64 = draws.iter().map(|(_, w)| w).sum();
    let mean = draws.iter().map(|(h, w)| h * w).sum::<f64>() / w_sum;
    let var = draws
        .iter()
        .map(|(h, w)| (w * (h - mean)).powi(2))
        .sum::<f64>()
        / (w_sum * w_sum);
    Ok((mean, var.sqrt()))
}

fn isotropic_sigma(system: &RigidBodySpec) -> Result<f64> {
    system
        .isotropic_sigma()
        .ok_or_else(|| invalid("sigmas", "the closed form needs isotropic noise σ eₖ"))
}

/// Closed form -3σ² - θ(c² Tr 𝕀⁻¹ - 6 E∞h), with E∞h the Gibbs mean energy
/// on ‖Π‖ = c.
///
/// This is the Gibbs average of the Itô drift divergence. Split-step QR sums
/// do not reproduce the -3σ² term and agree with
/// [`divergence_lyapunov_sum`] instead.
pub fn lyapunov_sum_closed_form(
    system: &RigidBodySpec,
    radius: f64,
    mean_energy: f64,
) -> Result<f64> {
    let sigma = isotropic_sigma(system)?;
    Ok(-3.0 * sigma * sigma + divergence_lyapunov_sum(system, radius, mean_energy))
}

/// Gibbs average of div F for the Stratonovich drift,
/// θ(6 E∞h - c² Tr 𝕀⁻¹). The noise fields are divergence-free rotations,
/// so this is the rate of log-volume growth along split-step paths.
pub fn divergence_lyapunov_sum(system: &RigidBodySpec, radius: f64, mean_energy: f64) -> f64 {
    let trace: f64 = system.inertia().iter().map(|i| 1.0 / i).sum();
    system.theta() * (6.0 * mean_energy - radius * radius * trace)
}
