//! `simulate`: trajectory.csv with columns
//! `t, <state components>, h, <Casimirs>` every `experiment.stride` steps
//! and at the last step.
//!
//! | system          | state components                       | Casimir columns             |
//! |-----------------|----------------------------------------|-----------------------------|
//! | rigid_body      | pi1..pi3                               | pi_sq                       |
//! | heavy_top       | pi1..pi3, gamma1..gamma3               | gamma_sq, pi_dot_gamma, then pi_norm |
//! | so4_body        | x1..x6                                 | c1, c2                      |
//! | spring_pendulum | pi1..pi3, gamma1..gamma3, r, p         | gamma_sq                    |

use coadjoint::integrators::SolverConfig;
use coadjoint::state::IntoPhaseState;
use coadjoint::systems::StochasticSystem;
use coadjoint::PhaseVector;

use crate::config::SystemConfig;
use crate::drive::{drive, finish_trajectory};
use crate::error::CliError;
use crate::output::Run;
use crate::Context;

pub const TRAJECTORY_STREAM: u64 = 0;

pub fn run(ctx: &Context, name: &str) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let solver = cfg.solver.solver()?;
    let stride = cfg.experiment.stride;
    let mut run = Run::start(&cfg.output.dir, name, &cfg.canonical(), solver.rng_seed)?;
    run.streams.insert("trajectory".into(), TRAJECTORY_STREAM);
    match &cfg.system {
        SystemConfig::RigidBody(c) => {
            let (spec, x0) = c.build()?;
            write(run, &spec, &solver, x0, stride, &["pi_sq"], |_| vec![], |_| Ok(()))
        }
        SystemConfig::HeavyTop(c) => {
            let (spec, x0) = c.build()?;
            write(
                run,
                &spec,
                &solver,
                x0,
                stride,
                &["gamma_sq", "pi_dot_gamma", "pi_norm"],
                |x| vec![x.g.norm()],
                |_| Ok(()),
            )
        }
        SystemConfig::So4Body(c) => {
            let (spec, x0) = c.build()?;
            write(run, &spec, &solver, x0, stride, &["c1", "c2"], |_| vec![], |_| Ok(()))
        }
        SystemConfig::SpringPendulum(c) => {
            let (spec, x0) = c.build()?;
            let guard = |x: &_| spec.fields(x).map(drop);
            write(run, &spec, &solver, x0, stride, &["gamma_sq"], |_| vec![], guard)
        }
    }
}

/// `extra_names` lists the Casimir columns followed by the columns `extra`
/// appends.
#[allow(clippy::too_many_arguments)]
fn write<S, E, G>(
    run: Run,
    system: &S,
    solver: &SolverConfig,
    x0: S::State,
    stride: usize,
    extra_names: &[&str],
    extra: E,
    guard: G,
) -> Result<(), CliError>
where
    S: StochasticSystem,
    E: Fn(&S::State) -> Vec<f64>,
    G: Fn(&S::State) -> coadjoint::Result<()>,
{
    let mut header = vec!["t"];
    header.extend(x0.into_phase().component_names());
    header.push("h");
    header.extend(extra_names);
    let mut csv = run.csv("trajectory.csv", &header)?;
    let last = solver.n_steps();
    let outcome = drive(system, solver, x0, TRAJECTORY_STREAM, guard, |n, x, _| {
        if n % stride != 0 && n != last {
            return Ok(());
        }
        let mut row = vec![n as f64 * solver.dt];
        row.extend(x.components());
        row.push(system.energy(x));
        row.extend(system.casimirs(x));
        row.extend(extra(x));
        csv.floats(&row)
    });
    finish_trajectory(run, csv, outcome)
}
