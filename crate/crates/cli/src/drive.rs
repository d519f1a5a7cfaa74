//! Step-by-step integration with per-step callbacks, shared by the
//! trajectory-writing subcommands.

use coadjoint::integrators::{step, SolverConfig};
use coadjoint::noise::NoisePath;
use coadjoint::systems::StochasticSystem;
use coadjoint::PhaseVector;

use crate::error::CliError;
use crate::output::{CsvOut, Run};

/// Runs `solver.n_steps()` steps on noise stream `stream`, calling
/// `visit(n, &x, &dw)` on the initial state (n = 0, zero increments) and
/// after every step with the increments that produced it. A non-finite state
/// or a `guard` failure ends the run with [`CliError::Truncated`].
pub fn drive<S, G, V>(
    system: &S,
    solver: &SolverConfig,
    x0: S::State,
    stream: u64,
    guard: G,
    mut visit: V,
) -> Result<S::State, CliError>
where
    S: StochasticSystem,
    G: Fn(&S::State) -> coadjoint::Result<()>,
    V: FnMut(usize, &S::State, &[f64]) -> Result<(), CliError>,
{
    let channels = system.n_channels();
    let mut path = NoisePath::new(solver.rng_seed, stream, solver.dt, channels);
    let mut dw = vec![0.0; channels];
    let mut x = x0;
    visit(0, &x, &dw)?;
    for n in 1..=solver.n_steps() {
        path.fill(&mut dw);
        x = step(system, solver.scheme, &x, solver.dt, &dw);
        if !x.is_finite() {
            return Err(CliError::Truncated(coadjoint::Error::Divergence { step: n }));
        }
        guard(&x).map_err(CliError::Truncated)?;
        visit(n, &x, &dw)?;
    }
    Ok(x)
}

/// Closes a trajectory file and the run. A truncated run keeps its rows,
/// gains a marker row and a "truncated" manifest, and still fails.
pub fn finish_trajectory<T>(
    mut run: Run,
    mut csv: CsvOut,
    outcome: Result<T, CliError>,
) -> Result<(), CliError> {
    match outcome {
        Ok(_) => {
            run.record(csv.finish()?);
            run.finish("complete")
        }
        Err(CliError::Truncated(e)) => {
            csv.truncation_marker(&e.to_string())?;
            run.record(csv.finish()?);
            run.notes.push(format!("truncated: {e}"));
            run.finish("truncated")?;
            Err(CliError::Truncated(e))
        }
        Err(e) => Err(e),
    }
}
