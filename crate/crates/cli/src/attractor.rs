//! `attractor`: pullback ensemble on one shared noise path.
//!
//! Member 0 starts at the configured initial state, so a one-member run
//! reproduces `simulate` at the snapshot times. The other members start
//! uniformly on the same orbit: on the sphere of radius ‖initial‖ for the
//! rigid body, and with the same ‖Γ‖, Π·Γ and ‖Π‖ for the heavy top.
//!
//! Per snapshot i (in `experiment.snapshot_times` order):
//! - `snapshot_{i}.csv`: `member, t, <state components>`;
//! - with `output.histograms`, sphere histograms with columns
//!   `cell, colatitude, longitude, solid_angle, count, density`:
//!   `snapshot_{i}_hist.csv` of Π for the rigid body,
//!   `snapshot_{i}_pi_hist.csv` and `snapshot_{i}_gamma_hist.csv` for the
//!   heavy top.
//!
//! Summaries: `entropy.csv` with `snapshot, t, members, entropy` (heavy top:
//! `entropy_pi, entropy_gamma`) and, for the heavy top, `pi_norm_series.csv`
//! with `snapshot, t, pi_norm_mean, pi_norm_min, pi_norm_max`.

use coadjoint::analysis::{
    heavy_top_orbit_point, run_pullback_ensemble, sphere_histogram, uniform_sphere, EnsembleRun,
    SphereHistogram,
};
use coadjoint::PhaseVector;
use coadjoint::Vec3;

use crate::config::SystemConfig;
use crate::error::CliError;
use crate::output::{float, Run};
use crate::simulate::TRAJECTORY_STREAM;
use crate::Context;

const HIST_HEADER: [&str; 6] = ["cell", "colatitude", "longitude", "solid_angle", "count", "density"];

fn write_histogram(run: &mut Run, name: &str, h: &SphereHistogram) -> Result<(), CliError> {
    let mut out = run.csv(name, &HIST_HEADER)?;
    let densities = h.densities();
    for (k, (count, area)) in h.counts().iter().zip(h.solid_angles()).enumerate() {
        let (colat, lon) = h.cell_center(k);
        out.row(&[
            k.to_string(),
            float(colat),
            float(lon),
            float(*area),
            count.to_string(),
            float(densities[k]),
        ])?;
    }
    run.record(out.finish()?);
    Ok(())
}

fn write_points<T: PhaseVector + coadjoint::state::IntoPhaseState>(
    run: &mut Run,
    ensemble: &EnsembleRun<T>,
) -> Result<(), CliError> {
    for (i, snap) in ensemble.snapshots.iter().enumerate() {
        let Some(first) = ensemble.initial.first() else {
            continue;
        };
        let mut header = vec!["member", "t"];
        header.extend(first.into_phase().component_names());
        let mut out = run.csv(&format!("snapshot_{i}.csv"), &header)?;
        for (m, x) in snap.members.iter().zip(&snap.states) {
            let mut row = vec![m.to_string(), float(snap.time)];
            row.extend(x.components().into_iter().map(float));
            out.row(&row)?;
        }
        run.record(out.finish()?);
    }
    Ok(())
}

fn note_failures<T>(run: &mut Run, ensemble: &EnsembleRun<T>) {
    for f in &ensemble.failures {
        run.notes
            .push(format!("member {} left out: {}", f.member, f.error));
    }
}

pub fn run(ctx: &Context, name: &str) -> Result<(), CliError> {
    let cfg = &ctx.config;
    cfg.check_snapshot_window()?;
    let solver = cfg.solver.solver()?;
    let exp = &cfg.experiment;
    let (n_lat, n_lon) = (exp.n_lat, exp.n_lon);
    let mut run = Run::start(&cfg.output.dir, name, &cfg.canonical(), solver.rng_seed)?;
    run.streams.insert("shared_path".into(), TRAJECTORY_STREAM);
    let hists = cfg.output.histograms;
    match &cfg.system {
        SystemConfig::RigidBody(c) => {
            let (spec, x0) = c.build()?;
            let radius = x0.norm();
            let ensemble = run_pullback_ensemble(
                &spec,
                &solver,
                exp.members,
                |m, rng| Ok(if m == 0 { x0 } else { uniform_sphere(rng, radius) }),
                &exp.snapshot_times,
                TRAJECTORY_STREAM,
            )?;
            write_points(&mut run, &ensemble)?;
            let mut entropy = run.csv("entropy.csv", &["snapshot", "t", "members", "entropy"])?;
            for (i, snap) in ensemble.snapshots.iter().enumerate() {
                let h = sphere_histogram(&snap.states, n_lat, n_lon)?;
                if hists {
                    write_histogram(&mut run, &format!("snapshot_{i}_hist.csv"), &h)?;
                }
                entropy.row(&[
                    i.to_string(),
                    float(snap.time),
                    snap.members.len().to_string(),
                    float(h.entropy()),
                ])?;
            }
            run.record(entropy.finish()?);
            note_failures(&mut run, &ensemble);
        }
        SystemConfig::HeavyTop(c) => {
            let (spec, x0) = c.build()?;
            let (k, c0, p) = (x0.v.norm(), x0.g.dot(&x0.v), x0.g.norm());
            let ensemble = run_pullback_ensemble(
                &spec,
                &solver,
                exp.members,
                |m, rng| {
                    if m == 0 {
                        Ok(x0)
                    } else {
                        heavy_top_orbit_point(rng, k, c0, Some(p))
                    }
                },
                &exp.snapshot_times,
                TRAJECTORY_STREAM,
            )?;
            write_points(&mut run, &ensemble)?;
            let mut entropy = run.csv(
                "entropy.csv",
                &["snapshot", "t", "members", "entropy_pi", "entropy_gamma"],
            )?;
            let mut norms = run.csv(
                "pi_norm_series.csv",
                &["snapshot", "t", "pi_norm_mean", "pi_norm_min", "pi_norm_max"],
            )?;
            for (i, snap) in ensemble.snapshots.iter().enumerate() {
                let pis: Vec<Vec3> = snap.states.iter().map(|s| s.g).collect();
                let gammas: Vec<Vec3> = snap.states.iter().map(|s| s.v).collect();
                let hp = sphere_histogram(&pis, n_lat, n_lon)?;
                let hg = sphere_histogram(&gammas, n_lat, n_lon)?;
                if hists {
                    write_histogram(&mut run, &format!("snapshot_{i}_pi_hist.csv"), &hp)?;
                    write_histogram(&mut run, &format!("snapshot_{i}_gamma_hist.csv"), &hg)?;
                }
                entropy.row(&[
                    i.to_string(),
                    float(snap.time),
                    snap.members.len().to_string(),
                    float(hp.entropy()),
                    float(hg.entropy()),
                ])?;
                let n: Vec<f64> = pis.iter().map(|p| p.norm()).collect();
                let mean = n.iter().sum::<f64>() / n.len().max(1) as f64;
                norms.row(&[
                    i.to_string(),
                    float(snap.time),
                    float(mean),
                    float(n.iter().copied().fold(f64::INFINITY, f64::min)),
                    float(n.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                ])?;
            }
            run.record(entropy.finish()?);
            run.record(norms.finish()?);
            note_failures(&mut run, &ensemble);
        }
        _ => return Err(cfg.wrong_kind(name, "rigid_body or heavy_top").into()),
    }
    run.finish("complete")
}
