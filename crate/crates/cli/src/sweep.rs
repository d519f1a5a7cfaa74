//! `lyapunov-sweep`: sweep.csv with columns
//! `theta, sigma, lambda_top, std_error, n_realizations, t_span, error`,
//! one row per grid cell in theta-major order.
//!
//! Each cell is an isotropic rigid body (inertia from the config, noise
//! σ e₁, σ e₂, σ e₃) started uniformly on the sphere of radius ‖initial‖,
//! and uses the same seed, so any cell can be recomputed alone. Cells are
//! appended as they finish and the file is rewritten in grid order at the
//! end. With `--resume`, complete rows already in the file are kept and only
//! the missing cells run. A failed cell gets NaN values and the error text.

use std::collections::HashMap;
use std::sync::Mutex;

use coadjoint::analysis::{lyapunov_top, rigid_body_ic, streams};
use coadjoint::noise::stream_index;
use coadjoint::systems::RigidBodySpec;
use coadjoint::Vec3;
use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::error::CliError;
use crate::output::{float, sha256_hex, CsvOut, Run};
use crate::Context;

pub const HEADER: [&str; 7] = [
    "theta",
    "sigma",
    "lambda_top",
    "std_error",
    "n_realizations",
    "t_span",
    "error",
];

type Key = (String, String);

fn key(theta: f64, sigma: f64) -> Key {
    (float(theta), float(sigma))
}

/// Complete rows of an earlier sweep.csv, by cell. A last line without its
/// newline was cut off mid-write and is dropped.
fn existing_rows(path: &std::path::Path) -> Result<HashMap<Key, Vec<String>>, CliError> {
    let mut text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(HashMap::new()),
        Err(e) => return Err(CliError::io(path, e)),
    };
    if !text.ends_with('\n') {
        text.truncate(text.rfind('\n').map_or(0, |i| i + 1));
    }
    if text.is_empty() {
        return Ok(HashMap::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    if reader.headers()? != HEADER.as_slice() {
        return Err(CliError::Usage(format!(
            "{}: header differs from a sweep file; refusing to resume",
            path.display()
        )));
    }
    let mut rows = HashMap::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != HEADER.len() {
            continue;
        }
        let row: Vec<String> = record.iter().map(str::to_owned).collect();
        rows.insert((row[0].clone(), row[1].clone()), row);
    }
    Ok(rows)
}

/// Resuming is only sound against a run of the same effective config.
fn check_resumable(dir: &std::path::Path, canonical: &str) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let Ok(text) = std::fs::read_to_string(&path) else {
        return Ok(());
    };
    let manifest: serde_json::Value = serde_json::from_str(&text)?;
    let ours = sha256_hex(canonical.as_bytes());
    match manifest.get("config_sha256").and_then(|v| v.as_str()) {
        Some(theirs) if theirs != ours => Err(CliError::Usage(format!(
            "{}: earlier run used a different config; refusing to resume",
            path.display()
        ))),
        _ => Ok(()),
    }
}

pub fn run(ctx: &Context, name: &str) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let SystemConfig::RigidBody(body) = &cfg.system else {
        return Err(cfg.wrong_kind(name, "rigid_body").into());
    };
    let (base, x0) = body.build()?;
    let inertia: Vec3 = base.inertia();
    let radius = x0.norm();
    let solver = cfg.solver.solver()?;
    let exp = &cfg.experiment;
    let canonical = cfg.canonical();

    let grid: Vec<(f64, f64)> = exp
        .thetas
        .iter()
        .flat_map(|&t| exp.sigmas.iter().map(move |&s| (t, s)))
        .collect();
    let path = cfg.output.dir.join("sweep.csv");
    let kept = if ctx.resume {
        check_resumable(&cfg.output.dir, &canonical)?;
        existing_rows(&path)?
    } else {
        HashMap::new()
    };
    let mut run = Run::start(&cfg.output.dir, name, &canonical, solver.rng_seed)?;
    run.streams.insert(
        "lyapunov_noise_group".into(),
        stream_index(streams::LYAPUNOV_NOISE, 0),
    );
    run.streams
        .insert("lyapunov_ic_group".into(), stream_index(streams::LYAPUNOV_IC, 0));
    run.notes.push("cells use isotropic noise from the grid; system.sigma is ignored".into());

    let mut rows: HashMap<Key, Vec<String>> = grid
        .iter()
        .filter_map(|&(t, s)| kept.get(&key(t, s)).map(|r| (key(t, s), r.clone())))
        .collect();
    let pending: Vec<(f64, f64)> = grid
        .iter()
        .copied()
        .filter(|&(t, s)| !rows.contains_key(&key(t, s)))
        .collect();
    run.notes.push(format!(
        "{} cells kept from an earlier run, {} computed",
        rows.len(),
        pending.len()
    ));

    // Restart the file from the kept rows, then append cells as they finish
    // so an interrupted sweep can resume.
    let mut out = CsvOut::create(path.clone(), &HEADER)?;
    for (t, s) in &grid {
        if let Some(r) = rows.get(&key(*t, *s)) {
            out.row(r)?;
        }
    }
    out.flush()?;
    let out = Mutex::new(out);
    let fresh: Vec<(Key, Vec<String>)> = pending
        .par_iter()
        .map(|&(theta, sigma)| {
            let row = cell(inertia, theta, sigma, radius, &solver, exp.t_span, exp.realizations);
            let mut out = out.lock().expect("sweep writer");
            out.row(&row)?;
            out.flush()?;
            Ok((key(theta, sigma), row))
        })
        .collect::<Result<_, CliError>>()?;
    drop(out);
    rows.extend(fresh);

    let mut out = CsvOut::create(path, &HEADER)?;
    for (t, s) in &grid {
        out.row(&rows[&key(*t, *s)])?;
    }
    run.record(out.finish()?);
    run.finish("complete")
}

fn cell(
    inertia: Vec3,
    theta: f64,
    sigma: f64,
    radius: f64,
    solver: &coadjoint::integrators::SolverConfig,
    t_span: f64,
    realizations: usize,
) -> Vec<String> {
    let estimate = RigidBodySpec::isotropic(inertia, theta, sigma)
        .and_then(|b| lyapunov_top(&b, solver, t_span, realizations, rigid_body_ic(radius)));
    match estimate {
        Ok(e) => vec![
            float(theta),
            float(sigma),
            float(e.lambda),
            float(e.std_error),
            e.n_realizations.to_string(),
            float(e.t_span),
            String::new(),
        ],
        Err(err) => vec![
            float(theta),
            float(sigma),
            float(f64::NAN),
            float(f64::NAN),
            "0".into(),
            float(t_span),
            err.to_string(),
        ],
    }
}
