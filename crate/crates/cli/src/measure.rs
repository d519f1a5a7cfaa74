//! `invariant-measure`: one long trajectory from the configured initial
//! state (10% burn-in dropped) binned against the predicted density.
//!
//! - `histogram.csv`: for `momentum_sphere`
//!   `cell, colatitude, longitude, solid_angle, count, empirical_density, predicted_density`;
//!   for `energy` and `gamma_along_chi`
//!   `bin, bin_lo, bin_hi, count, empirical_density, predicted_density`.
//! - `fit_report.json`: histogram kind, sample count, sup-norm, χ², dof.
//! - heavy top only, `pi_norm_histogram.csv`:
//!   `t, bin_lo, bin_hi, count, bound`. `experiment.members` independent
//!   trajectories from the initial state are binned by ‖Π‖ at
//!   `experiment.norm_snapshots` evenly spaced times; `bound` is
//!   ‖Π₀‖ + mg‖χ‖‖Γ‖t.

use coadjoint::analysis::{
    invariant_measure_heavy_top, invariant_measure_rigid_body, streams, FitReport, HistogramSpec,
    SphereHistogram,
};
use coadjoint::integrators::{integrate, SolverConfig};
use coadjoint::noise::{stream_index, NoisePath};
use coadjoint::systems::{HeavyTopSpec, StochasticSystem};
use coadjoint::algebra::SemidirectElement;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, HistogramKind, SystemConfig};
use crate::error::CliError;
use crate::output::{float, Run};
use crate::simulate::TRAJECTORY_STREAM;
use crate::Context;

#[derive(Serialize)]
struct FitSummary<'a> {
    system: &'a str,
    histogram: &'a str,
    n_samples: u64,
    sup_norm: f64,
    chi_square: f64,
    dof: usize,
}

fn histogram_spec(kind: HistogramKind, cfg: &crate::config::ExperimentBlock) -> HistogramSpec {
    match kind {
        HistogramKind::MomentumSphere => HistogramSpec::MomentumSphere {
            n_lat: cfg.n_lat,
            n_lon: cfg.n_lon,
        },
        HistogramKind::Energy => HistogramSpec::Energy {
            bins: cfg.bins,
            oracle_draws: cfg.oracle_draws,
        },
        HistogramKind::GammaAlongChi => HistogramSpec::GammaAlongChi { bins: cfg.bins },
    }
}

/// Out-of-range parameters from the analysis are config errors here.
fn as_config(e: coadjoint::Error) -> CliError {
    match e {
        coadjoint::Error::InvalidParameter { name, reason } => ConfigError::Field {
            field: format!("system.{name}"),
            reason,
        }
        .into(),
        other => other.into(),
    }
}

fn write_report(run: &mut Run, system: &str, r: &FitReport, sphere: Option<(usize, usize)>) -> Result<(), CliError> {
    match sphere {
        Some((n_lat, n_lon)) => {
            let grid = SphereHistogram::empty(n_lat, n_lon)?;
            let mut out = run.csv(
                "histogram.csv",
                &[
                    "cell",
                    "colatitude",
                    "longitude",
                    "solid_angle",
                    "count",
                    "empirical_density",
                    "predicted_density",
                ],
            )?;
            for (k, area) in grid.solid_angles().iter().enumerate() {
                let (colat, lon) = grid.cell_center(k);
                out.row(&[
                    k.to_string(),
                    float(colat),
                    float(lon),
                    float(*area),
                    r.counts[k].to_string(),
                    float(r.empirical_density[k]),
                    float(r.predicted_density[k]),
                ])?;
            }
            run.record(out.finish()?);
        }
        None => {
            let mut out = run.csv(
                "histogram.csv",
                &["bin", "bin_lo", "bin_hi", "count", "empirical_density", "predicted_density"],
            )?;
            for (k, edge) in r.bin_edges.windows(2).enumerate() {
                out.row(&[
                    k.to_string(),
                    float(edge[0]),
                    float(edge[1]),
                    r.counts[k].to_string(),
                    float(r.empirical_density[k]),
                    float(r.predicted_density[k]),
                ])?;
            }
            run.record(out.finish()?);
        }
    }
    run.write_json(
        "fit_report.json",
        &FitSummary {
            system,
            histogram: r.histogram,
            n_samples: r.n_samples,
            sup_norm: r.sup_norm,
            chi_square: r.chi_square,
            dof: r.dof,
        },
    )
}

pub fn run(ctx: &Context, name: &str) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let exp = &cfg.experiment;
    let solver = cfg.solver.solver()?;
    let mut run = Run::start(&cfg.output.dir, name, &cfg.canonical(), solver.rng_seed)?;
    run.streams.insert("trajectory".into(), TRAJECTORY_STREAM);
    match &cfg.system {
        SystemConfig::RigidBody(c) => {
            let (spec, x0) = c.build()?;
            let kind = exp.histogram.unwrap_or(if spec.theta() == 0.0 {
                HistogramKind::MomentumSphere
            } else {
                HistogramKind::Energy
            });
            let hs = histogram_spec(kind, exp);
            if matches!(hs, HistogramSpec::Energy { .. }) {
                run.streams
                    .insert("oracle".into(), stream_index(streams::MEASURE_ORACLE, 0));
            }
            let report = invariant_measure_rigid_body(&spec, &solver, x0, hs, TRAJECTORY_STREAM)
                .map_err(as_config)?;
            let sphere = match hs {
                HistogramSpec::MomentumSphere { n_lat, n_lon } => Some((n_lat, n_lon)),
                _ => None,
            };
            write_report(&mut run, "rigid_body", &report, sphere)?;
        }
        SystemConfig::HeavyTop(c) => {
            let (spec, x0) = c.build()?;
            let hs = histogram_spec(exp.histogram.unwrap_or(HistogramKind::GammaAlongChi), exp);
            let report = invariant_measure_heavy_top(&spec, &solver, x0, hs, TRAJECTORY_STREAM)
                .map_err(as_config)?;
            write_report(&mut run, "heavy_top", &report, None)?;
            run.streams.insert(
                "norm_ensemble_group".into(),
                stream_index(streams::ENSEMBLE_NOISE, 0),
            );
            norm_histogram(&mut run, &spec, &solver, x0, exp.members, exp.norm_snapshots, exp.norm_bins)?;
        }
        _ => return Err(cfg.wrong_kind(name, "rigid_body or heavy_top").into()),
    }
    run.finish("complete")
}

fn norm_histogram(
    run: &mut Run,
    top: &HeavyTopSpec,
    solver: &SolverConfig,
    x0: SemidirectElement,
    members: usize,
    snapshots: usize,
    bins: usize,
) -> Result<(), CliError> {
    let n = solver.n_steps();
    let steps: Vec<usize> = (1..=snapshots).map(|k| k * n / snapshots).collect();
    let norms: Vec<Vec<f64>> = (0..members as u32)
        .into_par_iter()
        .map(|m| {
            let mut path = NoisePath::new(
                solver.rng_seed,
                stream_index(streams::ENSEMBLE_NOISE, m),
                solver.dt,
                top.n_channels(),
            );
            let mut out = Vec::with_capacity(steps.len());
            integrate(top, solver.scheme, x0, solver.dt, n, &mut path, |k, x| {
                if steps.contains(&k) {
                    out.push(x.g.norm());
                }
            })?;
            Ok(out)
        })
        .collect::<coadjoint::Result<_>>()?;
    let growth = top.mg() * top.chi().norm() * x0.v.norm();
    let p0 = x0.g.norm();
    let hi = p0 + growth * solver.t_end;
    let width = hi / bins as f64;
    let mut out = run.csv("pi_norm_histogram.csv", &["t", "bin_lo", "bin_hi", "count", "bound"])?;
    for (j, &k) in steps.iter().enumerate() {
        let t = k as f64 * solver.dt;
        let mut counts = vec![0u64; bins + 1];
        for m in &norms {
            // the last bin collects anything at or beyond the end-time bound
            counts[((m[j] / width) as usize).min(bins)] += 1;
        }
        for (b, c) in counts.iter().enumerate() {
            let lo = b as f64 * width;
            let hi_edge = if b == bins { f64::INFINITY } else { lo + width };
            out.row(&[float(t), float(lo), float(hi_edge), c.to_string(), float(p0 + growth * t)])?;
        }
    }
    run.record(out.finish()?);
    Ok(())
}
