//! Invariant-measure checks: long single trajectories binned against the
//! uniform, Gibbs or advected-marginal densities.

use crate::algebra::SemidirectElement;
use crate::algebra::{numerical_rank, Vec3};
use crate::error::{invalid, Error, Result};
use crate::integrators::{integrate, SolverConfig};
use crate::noise::{rng_for, stream_index, NoisePath};
use crate::systems::{HeavyTopSpec, RigidBodySpec, StochasticSystem};

use super::histogram::SphereHistogram;
use super::sampler::uniform_sphere;
use super::streams;

/// Trajectory fraction skipped before binning.
pub const MEASURE_BURN_IN_FRACTION: f64 = 0.1;

/// Unnormalized Gibbs density exp(-2θh/σ²).
pub fn gibbs_density(h: f64, theta: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    Ok((-2.0 * theta * h / (sigma * sigma)).exp())
}

/// What to bin and which density to compare against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HistogramSpec {
    /// Direction of Π on an equiangular grid, against the uniform density.
    /// Requires θ = 0.
    MomentumSphere { n_lat: usize, n_lon: usize },
    /// Rigid-body energy in equal-width bins over [h_min, h_max], against
    /// the Gibbs weight times the microcanonical area factor estimated from
    /// `oracle_draws` uniform sphere points.
    Energy { bins: usize, oracle_draws: usize },
    /// Heavy-top Γ·χ̂ in equal-width bins over [-‖Γ‖, ‖Γ‖], against
    /// exp(-2θ mg‖χ‖ u/σ²).
    GammaAlongChi { bins: usize },
}

impl HistogramSpec {
    pub fn name(&self) -> &'static str {
        match self {
            HistogramSpec::MomentumSphere { .. } => "momentum_sphere",
            HistogramSpec::Energy { .. } => "energy",
            HistogramSpec::GammaAlongChi { .. } => "gamma_along_chi",
        }
    }
}

/// Empirical against predicted densities, cell by cell.
#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub histogram: &'static str,
    pub n_samples: u64,
    /// Cell boundaries for one-dimensional histograms; empty for sphere grids.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub empirical_density: Vec<f64>,
    pub predicted_density: Vec<f64>,
    /// max |empirical - predicted| / max predicted.
    pub sup_norm: f64,
    /// Σ (O - E)²/E over cells with E > 0. Samples along one path are
    /// correlated, so this is descriptive rather than a calibrated test.
    pub chi_square: f64,
    pub dof: usize,
}

impl FitReport {
    /// `cell_measure[k]` is the length or solid angle of cell k and
    /// `predicted_mass[k]` its predicted probability.
    fn build(
        histogram: &'static str,
        bin_edges: Vec<f64>,
        counts: Vec<u64>,
        cell_measure: &[f64],
        predicted_mass: &[f64],
    ) -> Self {
        let n: u64 = counts.iter().sum();
        let nf = n.max(1) as f64;
        let empirical_density: Vec<f64> = counts
            .iter()
            .zip(cell_measure)
            .map(|(&c, &a)| c as f64 / (nf * a))
            .collect();
        let predicted_density: Vec<f64> = predicted_mass
            .iter()
            .zip(cell_measure)
            .map(|(p, a)| p / a)
            .collect();
        let max_pred = predicted_density.iter().copied().fold(0.0, f64::max);
        let sup = empirical_density
            .iter()
            .zip(&predicted_density)
            .map(|(e, p)| (e - p).abs())
            .fold(0.0, f64::max);
        let chi_square = counts
            .iter()
            .zip(predicted_mass)
            .filter(|(_, &p)| p > 0.0)
            .map(|(&c, &p)| {
                let e = p * nf;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let dof = predicted_mass
            .iter()
            .filter(|&&p| p > 0.0)
            .count()
            .saturating_sub(1);
        Self {
            histogram,
            n_samples: n,
            bin_edges,
            counts,
            empirical_density,
            predicted_density,
            sup_norm: sup / max_pred,
            chi_square,
            dof,
        }
    }
}

/// Refuses noise sets that do not span ℝ³: such runs are not ergodic on the
/// orbit.
pub fn check_ergodic(sigmas: &[Vec3]) -> Result<()> {
    let columns: Vec<Vec<f64>> = sigmas.iter().map(|s| s.iter().copied().collect()).collect();
    let rank = numerical_rank(&columns);
    if rank < 3 {
        Err(Error::NonSpanningNoise { rank, dim: 3 })
    } else {
        Ok(())
    }
}

fn check_bins(bins: usize) -> Result<()> {
    if bins == 0 {
        Err(invalid("bins", "must be at least 1"))
    } else {
        Ok(())
    }
}

fn isotropic(system_sigma: Option<f64>) -> Result<f64> {
    system_sigma.ok_or_else(|| invalid("sigmas", "the Gibbs prediction needs isotropic noise σ eₖ"))
}

/// Runs one trajectory of `solver` from `x0` on noise stream `stream`,
/// calling `visit` on every state after the burn-in.
fn sample_path<S: StochasticSystem>(
    system: &S,
    solver: &SolverConfig,
    x0: S::State,
    stream: u64,
    mut visit: impl FnMut(&S::State) -> Result<()>,
) -> Result<()> {
    solver.validate()?;
    let n_steps = solver.n_steps();
    let burn = (MEASURE_BURN_IN_FRACTION * n_steps as f64).round() as usize;
    let mut path = NoisePath::new(solver.rng_seed, stream, solver.dt, system.n_channels());
    let mut failure = None;
    integrate(
        system,
        solver.scheme,
        x0,
        solver.dt,
        n_steps,
        &mut path,
        |n, x| {
            if n > burn && failure.is_none() {
                failure = visit(x).err();
            }
        },
    )?;
    failure.map_or(Ok(()), Err)
}

fn linear_bin(value: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let k = ((value - lo) / (hi - lo) * bins as f64).floor();
    (k.max(0.0) as usize).min(bins - 1)
}

fn edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
        .collect()
}

/// Rigid-body invariant-measure check along one trajectory from `x0`.
pub fn invariant_measure_rigid_body(
    system: &RigidBodySpec,
    solver: &SolverConfig,
    x0: Vec3,
    histogram: HistogramSpec,
    stream: u64,
) -> Result<FitReport> {
    check_ergodic(system.sigmas())?;
    let radius = x0.norm();
    match histogram {
        HistogramSpec::MomentumSphere { n_lat, n_lon } => {
            if system.theta() != 0.0 {
                return Err(invalid(
                    "theta",
                    "the uniform prediction holds for theta = 0 only",
                ));
            }
            let mut h = SphereHistogram::empty(n_lat, n_lon)?;
            sample_path(system, solver, x0, stream, |x| h.add(x))?;
            let mass: Vec<f64> = h
                .solid_angles()
                .iter()
                .map(|a| a / (4.0 * std::f64::consts::PI))
                .collect();
            Ok(FitReport::build(
                histogram.name(),
                Vec::new(),
                h.counts().to_vec(),
                h.solid_angles(),
                &mass,
            ))
        }
        HistogramSpec::Energy { bins, oracle_draws } => {
            check_bins(bins)?;
            if oracle_draws == 0 {
                return Err(invalid("oracle_draws", "must be at least 1"));
            }
            let sigma = isotropic(system.isotropic_sigma())?;
            let inertia = system.inertia();
            let lo = radius * radius / (2.0 * inertia.max());
            let hi = radius * radius / (2.0 * inertia.min());
            if hi.is_nan() || hi <= lo {
                return Err(invalid(
                    "inertia",
                    "energy range is degenerate for a symmetric body",
                ));
            }
            let mut counts = vec![0u64; bins];
            sample_path(system, solver, x0, stream, |x| {
                counts[linear_bin(system.energy(x), lo, hi, bins)] += 1;
                Ok(())
            })?;
            let mut rng = rng_for(solver.rng_seed, stream_index(streams::MEASURE_ORACLE, 0));
            let mut mass = vec![0.0; bins];
            for _ in 0..oracle_draws {
                let h = system.energy(&uniform_sphere(&mut rng, radius));
                mass[linear_bin(h, lo, hi, bins)] += gibbs_density(h, system.theta(), sigma)?;
            }
            let z: f64 = mass.iter().sum();
            mass.iter_mut().for_each(|m| *m /= z);
            let widths = vec![(hi - lo) / bins as f64; bins];
            Ok(FitReport::build(
                histogram.name(),
                edges(lo, hi, bins),
                counts,
                &widths,
                &mass,
            ))
        }
        HistogramSpec::GammaAlongChi { .. } => Err(invalid(
            "histogram",
            "gamma_along_chi applies to the heavy top",
        )),
    }
}

/// Heavy-top check of the Γ·χ̂ marginal along one trajectory from `x0`
/// against exp(-2θ mg χ·Γ/σ²).
///
/// The prediction is exact for [`DissipationCasimir::NoiseBalanced`] with
/// equal moments of inertia. The Π·Γ damping carries an extra -θ‖Ω×Γ‖²
/// term that the noise does not balance, and its measured marginal decays
/// about twice as fast; the report then measures that departure.
///
/// [`DissipationCasimir::NoiseBalanced`]: crate::systems::DissipationCasimir::NoiseBalanced
pub fn invariant_measure_heavy_top(
    system: &HeavyTopSpec,
    solver: &SolverConfig,
    x0: SemidirectElement,
    histogram: HistogramSpec,
    stream: u64,
) -> Result<FitReport> {
    check_ergodic(system.sigmas())?;
    let HistogramSpec::GammaAlongChi { bins } = histogram else {
        return Err(invalid(
            "histogram",
            "the heavy top supports gamma_along_chi only",
        ));
    };
    check_bins(bins)?;
    if system.etas().iter().any(|e| e.norm_squared() > 0.0) {
        return Err(invalid("etas", "the marginal prediction assumes eta = 0"));
    }
    let sigma = {
        let s = system.sigmas();
        let candidate = s.first().map(|v| v.norm()).unwrap_or(0.0);
        let expected = crate::systems::isotropic_sigmas(candidate);
        if s.len() == 3 && s.iter().zip(&expected).all(|(a, b)| a == b) {
            candidate
        } else {
            return Err(invalid(
                "sigmas",
                "the marginal prediction needs isotropic noise σ eₖ",
            ));
        }
    };
    let chi_norm = system.chi().norm();
    if chi_norm == 0.0 {
        return Err(invalid("chi", "must be nonzero"));
    }
    let axis = system.chi() / chi_norm;
    let k = x0.v.norm();
    let mut counts = vec![0u64; bins];
    sample_path(system, solver, x0, stream, |x| {
        counts[linear_bin(x.v.dot(&axis), -k, k, bins)] += 1;
        Ok(())
    })?;
    // Γ uniform on its sphere makes Γ·χ̂ uniform on [-k, k] (Archimedes),
    // so the marginal is exp(-a u) with a = 2θ mg‖χ‖/σ².
    let a = 2.0 * system.theta() * system.mg() * chi_norm / (sigma * sigma);
    let e = edges(-k, k, bins);
    let primitive = |u: f64| if a == 0.0 { u } else { -(-a * u).exp() / a };
    let mut mass: Vec<f64> = e
        .windows(2)
        .map(|w| primitive(w[1]) - primitive(w[0]))
        .collect();
    let z: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|m| *m /= z);
    let widths = vec![2.0 * k / bins as f64; bins];
    Ok(FitReport::build(
        histogram.name(),
        e,
        counts,
        &widths,
        &mass,
    ))
}
