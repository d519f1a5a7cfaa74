//! `kicked`: rigid body with periodic kicks exp(-a(1,1,1)) in place of
//! noise, one row per amplitude a.
//!
//! - `kicked.csv`: `amplitude, lambda_top, std_error, n_realizations, n_clusters`
//! - `kicked_terminal.csv`: `amplitude, realization, pi1, pi2, pi3`, the last
//!   stroboscopic sample (taken just before a kick) of each realization.

use coadjoint::analysis::{kicked_regime, rigid_body_ic, streams};
use coadjoint::noise::stream_index;
use coadjoint::systems::RigidBodySpec;

use crate::config::{ConfigError, SystemConfig};
use crate::error::CliError;
use crate::output::{float, Run};
use crate::Context;

pub fn run(ctx: &Context, name: &str) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let SystemConfig::RigidBody(body) = &cfg.system else {
        return Err(cfg.wrong_kind(name, "rigid_body").into());
    };
    if body.sigma.is_some_and(|s| s != 0.0) || body.sigmas.as_ref().is_some_and(|v| !v.is_empty()) {
        return Err(ConfigError::Field {
            field: "system.sigma".into(),
            reason: "kicks replace the noise; leave sigma unset".into(),
        }
        .into());
    }
    let (spec, x0) = body.build()?;
    let spec = RigidBodySpec::new(spec.inertia(), spec.theta(), vec![])?;
    let solver = cfg.solver.solver()?;
    let exp = &cfg.experiment;
    let per_period = exp.kick_period / solver.dt;
    if (per_period - per_period.round()).abs() > 1e-9 * per_period {
        return Err(ConfigError::Field {
            field: "solver.dt".into(),
            reason: format!("must divide experiment.kick_period = {}", exp.kick_period),
        }
        .into());
    }

    let mut run = Run::start(&cfg.output.dir, name, &cfg.canonical(), solver.rng_seed)?;
    run.streams
        .insert("kicked_ic_group".into(), stream_index(streams::KICKED_IC, 0));
    let mut table = run.csv(
        "kicked.csv",
        &["amplitude", "lambda_top", "std_error", "n_realizations", "n_clusters"],
    )?;
    let mut terminal = run.csv(
        "kicked_terminal.csv",
        &["amplitude", "realization", "pi1", "pi2", "pi3"],
    )?;
    for &a in &exp.amplitudes {
        let s = kicked_regime(
            &spec,
            exp.kick_period,
            a,
            solver.dt,
            exp.periods,
            exp.burn_in_periods,
            exp.realizations,
            solver.rng_seed,
            rigid_body_ic(x0.norm()),
        )?;
        table.row(&[
            float(a),
            float(s.estimate.lambda),
            float(s.estimate.std_error),
            s.estimate.n_realizations.to_string(),
            s.n_clusters.to_string(),
        ])?;
        for (r, x) in s.terminal_states.iter().enumerate() {
            terminal.row(&[float(a), r.to_string(), float(x.x), float(x.y), float(x.z)])?;
        }
    }
    run.record(table.finish()?);
    run.record(terminal.finish()?);
    run.finish("complete")
}
