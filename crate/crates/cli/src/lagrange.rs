//! `lagrange-check`: lagrange.csv with columns
//! `t, h, gamma_sq, pi_dot_gamma, pi_dot_chi, lax_0.5, lax_1, lax_2,
//! euler_phi, euler_theta, euler_psi` every `experiment.stride` steps.
//!
//! The body must have I₁ = I₂ and χ on the symmetry axis. Damping, η, or
//! noise off the χ axis are allowed with a warning: the run then shows which
//! quantities stop being conserved. The attitude starts at the z-x-z
//! rotation with Rᵀe₃ = Γ̂ and zero precession and follows
//! g ← g exp(Ω dt) exp(Σ σᵢ dWⁱ).

use coadjoint::analysis::{axial_momentum, check_lagrange, lax_norm};
use coadjoint::integrators::{attitude_from_gamma, euler_angles_zxz, reconstruct_attitude};
use coadjoint::systems::StochasticSystem;
use coadjoint::Error;

use crate::config::{ConfigError, SystemConfig};
use crate::drive::{drive, finish_trajectory};
use crate::error::CliError;
use crate::output::Run;
use crate::simulate::TRAJECTORY_STREAM;
use crate::Context;

pub const HEADER: [&str; 11] = [
    "t",
    "h",
    "gamma_sq",
    "pi_dot_gamma",
    "pi_dot_chi",
    "lax_0.5",
    "lax_1",
    "lax_2",
    "euler_phi",
    "euler_theta",
    "euler_psi",
];

pub fn run(ctx: &Context, name: &str) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let SystemConfig::HeavyTop(c) = &cfg.system else {
        return Err(cfg.wrong_kind(name, "heavy_top").into());
    };
    let (top, x0) = c.build()?;
    if !top.is_lagrange() {
        return Err(ConfigError::Field {
            field: "system.inertia".into(),
            reason: Error::NotLagrange("needs I1 = I2 and chi on the symmetry axis".into()).to_string(),
        }
        .into());
    }
    let solver = cfg.solver.solver()?;
    let mut run = Run::start(&cfg.output.dir, name, &cfg.canonical(), solver.rng_seed)?;
    run.streams.insert("trajectory".into(), TRAJECTORY_STREAM);
    if let Err(e) = check_lagrange(&top) {
        eprintln!("warning: {e}");
        run.notes.push(format!("not integrable: {e}"));
    }
    let stride = cfg.experiment.stride;
    let last = solver.n_steps();
    let mut csv = run.csv("lagrange.csv", &HEADER)?;
    let mut attitude = attitude_from_gamma(&x0.v);
    let mut omega = top.omega(&x0.g);
    let outcome = drive(&top, &solver, x0, TRAJECTORY_STREAM, |_| Ok(()), |n, x, dw| {
        if n > 0 {
            attitude = reconstruct_attitude(attitude, &[omega], top.sigmas(), dw, solver.dt)?[1];
            omega = top.omega(&x.g);
        }
        if n % stride != 0 && n != last {
            return Ok(());
        }
        let angles = euler_angles_zxz(&attitude);
        let c = top.casimirs(x);
        csv.floats(&[
            n as f64 * solver.dt,
            top.energy(x),
            c[0],
            c[1],
            axial_momentum(&top, x),
            lax_norm(&top, x, 0.5),
            lax_norm(&top, x, 1.0),
            lax_norm(&top, x, 2.0),
            angles.phi,
            angles.theta,
            angles.psi,
        ])
    });
    finish_trajectory(run, csv, outcome)
}
