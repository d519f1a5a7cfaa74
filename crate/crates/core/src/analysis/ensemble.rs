//! Pullback ensembles: many initial conditions driven by one noise path.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::integrators::{integrate, SolverConfig};
use crate::noise::{rng_for, stream_index, NoisePath};
use crate::systems::StochasticSystem;

use super::streams;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSnapshot<T> {
    pub time: f64,
    /// Member indices of `states`, ascending; diverged members are absent.
    pub members: Vec<usize>,
    pub states: Vec<T>,
    /// Noise stream shared by every member.
    pub shared_path_id: u64,
}

impl<T> EnsembleSnapshot<T> {
    /// Largest relative deviation of any Casimir from its value at
    /// `reference` across the snapshot.
    pub fn max_casimir_deviation<S>(&self, system: &S, reference: &[Vec<f64>]) -> f64
    where
        S: StochasticSystem<State = T>,
    {
        self.members
            .iter()
            .zip(&self.states)
            .flat_map(|(&m, s)| {
                system
                    .casimirs(s)
                    .into_iter()
                    .zip(reference[m].clone())
                    .map(|(c, c0)| (c - c0).abs() / c0.abs().max(f64::MIN_POSITIVE))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberFailure {
    pub member: usize,
    pub error: Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleRun<T> {
    pub initial: Vec<T>,
    pub snapshots: Vec<EnsembleSnapshot<T>>,
    pub failures: Vec<MemberFailure>,
}

/// Initial condition of member `member`, drawn from its own stream so any
/// member can be replayed alone.
pub fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    rng_for(seed, stream_index(streams::ENSEMBLE_IC, member as u32))
}

/// Step indices of `times` on the solver grid; times must be sorted and
/// inside [0, t_end].
fn snapshot_steps(solver: &SolverConfig, times: &[f64]) -> Result<Vec<usize>> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("snapshot_times", "must be sorted"));
    }
    times
        .iter()
        .map(|&t| {
            if t.is_finite() && t >= 0.0 && t <= solver.t_end * (1.0 + 1e-12) {
                Ok((t / solver.dt).round() as usize)
            } else {
                Err(invalid(
                    "snapshot_times",
                    format!("{t} is outside [0, t_end]"),
                ))
            }
        })
        .collect()
}

/// Integrates `n_members` initial conditions, `ic_sampler(member, rng)`
/// with the rng from [`member_rng`], against the
/// single noise path `(solver.rng_seed, shared_stream)` up to the last
/// snapshot time and records the members at each time. A member that
/// diverges is reported in `failures` and left out of every snapshot.
pub fn run_pullback_ensemble<S, F>(
    system: &S,
    solver: &SolverConfig,
    n_members: usize,
    ic_sampler: F,
    snapshot_times: &[f64],
    shared_stream: u64,
) -> Result<EnsembleRun<S::State>>
where
    S: StochasticSystem,
    F: Fn(usize, &mut ChaCha8Rng) -> Result<S::State> + Sync,
{
    solver.validate()?;
    if n_members == 0 {
        return Err(invalid("n_members", "must be at least 1"));
    }
    let steps = snapshot_steps(solver, snapshot_times)?;
    let last = steps.last().copied().unwrap_or(0);
    let initial: Vec<S::State> = (0..n_members)
        .map(|m| ic_sampler(m, &mut member_rng(solver.rng_seed, m)))
        .collect::<Result<_>>()?;
    let outcomes: Vec<std::result::Result<Vec<S::State>, Error>> = initial
        .par_iter()
        .map(|&x0| {
            let mut path = NoisePath::new(
                solver.rng_seed,
                shared_stream,
                solver.dt,
                system.n_channels(),
            );
            let mut recorded = Vec::with_capacity(steps.len());
            let mut next = 0;
            integrate(
                system,
                solver.scheme,
                x0,
                solver.dt,
                last,
                &mut path,
                |n, x| {
                    while next < steps.len() && steps[next] == n {
                        recorded.push(*x);
                        next += 1;
                    }
                },
            )?;
            Ok(recorded)
        })
        .collect();
    let mut snapshots: Vec<EnsembleSnapshot<S::State>> = snapshot_times
        .iter()
        .map(|&time| EnsembleSnapshot {
            time,
            members: Vec::new(),
            states: Vec::new(),
            shared_path_id: shared_stream,
        })
        .collect();
    let mut failures = Vec::new();
    for (member, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(recorded) => {
                for (snap, x) in snapshots.iter_mut().zip(recorded) {
                    snap.members.push(member);
                    snap.states.push(x);
                }
            }
            Err(error) => failures.push(MemberFailure { member, error }),
        }
    }
    Ok(EnsembleRun {
        initial,
        snapshots,
        failures,
    })
}
