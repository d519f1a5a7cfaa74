//! Time stepping.
//!
//! The split-step scheme advances the drift with classical RK4 and then
//! applies the exact flow of the noise fields (a rotation), so every Casimir
//! is preserved to rounding. Stratonovich Heun and Itô Euler-Maruyama are
//! kept as references for cross-validation.

mod attitude;
mod tangent;

pub use attitude::{attitude_from_gamma, euler_angles_zxz, reconstruct_attitude, EulerAngles};
pub use tangent::{step_tangent, step_tangent_frame, TangentState, TANGENT_NORM_RANGE};

use crate::error::{invalid, Error, Result};
use crate::noise::NoisePath;
use crate::state::PhaseVector;
use crate::systems::StochasticSystem;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    #[default]
    SplitStep,
    HeunStratonovich,
    EulerMaruyama,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::SplitStep => "split_step",
            Scheme::HeunStratonovich => "heun_stratonovich",
            Scheme::EulerMaruyama => "euler_maruyama",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split_step" => Ok(Scheme::SplitStep),
            "heun_stratonovich" => Ok(Scheme::HeunStratonovich),
            "euler_maruyama" => Ok(Scheme::EulerMaruyama),
            other => Err(invalid("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    pub rng_seed: u64,
    pub tangent_enabled: bool,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, rng_seed: u64) -> Result<Self> {
        let cfg = Self {
            dt,
            scheme: Scheme::SplitStep,
            t_end,
            rng_seed,
            tangent_enabled: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(invalid(
                "t_end",
                format!("must be at least dt, got {}", self.t_end),
            ));
        }
        Ok(())
    }

    /// Number of steps covering [0, t_end], rounded to the nearest integer.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Source of per-step Wiener increments.
pub trait Increments {
    fn fill(&mut self, out: &mut [f64]);
}

impl Increments for NoisePath {
    fn fill(&mut self, out: &mut [f64]) {
        NoisePath::fill(self, out)
    }
}

/// Replays a step-major increment table.
#[derive(Clone, Debug)]
pub struct TableIncrements<'a> {
    table: &'a [f64],
    channels: usize,
    pos: usize,
}

impl<'a> TableIncrements<'a> {
    pub fn new(table: &'a [f64], channels: usize) -> Self {
        Self {
            table,
            channels,
            pos: 0,
        }
    }
}

impl Increments for TableIncrements<'_> {
    fn fill(&mut self, out: &mut [f64]) {
        let row = &self.table[self.pos * self.channels..(self.pos + 1) * self.channels];
        out[..self.channels].copy_from_slice(row);
        self.pos += 1;
    }
}

/// Classical fourth-order Runge-Kutta step of the drift.
pub fn rk4<S: StochasticSystem>(system: &S, x: &S::State, dt: f64) -> S::State {
    let k1 = system.drift(x);
    let k2 = system.drift(&(*x + k1 * (0.5 * dt)));
    let k3 = system.drift(&(*x + k2 * (0.5 * dt)));
    let k4 = system.drift(&(*x + k3 * dt));
    *x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0)
}

/// RK4 on the drift, then the exact noise flow with w = Σ σᵢ dWⁱ.
pub fn step_split<S: StochasticSystem>(system: &S, x: &S::State, dt: f64, dw: &[f64]) -> S::State {
    let y = rk4(system, x, dt);
    system.noise_substep(&y, dw)
}

fn noise_sum<S: StochasticSystem>(system: &S, x: &S::State, dw: &[f64]) -> S::State {
    dw.iter().enumerate().fold(S::State::zero(), |acc, (i, w)| {
        acc + system.diffusion(x, i) * *w
    })
}

/// Stratonovich Heun predictor-corrector.
pub fn step_heun<S: StochasticSystem>(system: &S, x: &S::State, dt: f64, dw: &[f64]) -> S::State {
    let f0 = system.drift(x);
    let g0 = noise_sum(system, x, dw);
    let predictor = *x + f0 * dt + g0;
    let f1 = system.drift(&predictor);
    let g1 = noise_sum(system, &predictor, dw);
    *x + (f0 + f1) * (0.5 * dt) + (g0 + g1) * 0.5
}

/// Euler-Maruyama on the Itô form (drift plus Itô correction).
pub fn step_em_ito<S: StochasticSystem>(system: &S, x: &S::State, dt: f64, dw: &[f64]) -> S::State {
    let mean = system.drift(x) + system.ito_correction(x);
    *x + mean * dt + noise_sum(system, x, dw)
}

pub fn step<S: StochasticSystem>(
    system: &S,
    scheme: Scheme,
    x: &S::State,
    dt: f64,
    dw: &[f64],
) -> S::State {
    match scheme {
        Scheme::SplitStep => step_split(system, x, dt, dw),
        Scheme::HeunStratonovich => step_heun(system, x, dt, dw),
        Scheme::EulerMaruyama => step_em_ito(system, x, dt, dw),
    }
}

/// Advances `n_steps` steps, calling `observe(n, &x)` on the initial state
/// (n = 0) and after every step n. A non-finite state stops the run with
/// [`Error::Divergence`] carrying the failing step index.
pub fn integrate<S, I, F>(
    system: &S,
    scheme: Scheme,
    x0: S::State,
    dt: f64,
    n_steps: usize,
    increments: &mut I,
    mut observe: F,
) -> Result<S::State>
where
    S: StochasticSystem,
    I: Increments,
    F: FnMut(usize, &S::State),
{
    let mut dw = vec![0.0; system.n_channels()];
    let mut x = x0;
    observe(0, &x);
    for n in 1..=n_steps {
        increments.fill(&mut dw);
        x = step(system, scheme, &x, dt, &dw);
        if !x.is_finite() {
            return Err(Error::Divergence { step: n });
        }
        observe(n, &x);
    }
    Ok(x)
}

/// Runs a solver configuration on stream `stream` of its seed and returns the
/// final state.
pub fn run<S: StochasticSystem>(
    system: &S,
    solver: &SolverConfig,
    x0: S::State,
    stream: u64,
) -> Result<S::State> {
    solver.validate()?;
    let mut path = NoisePath::new(solver.rng_seed, stream, solver.dt, system.n_channels());
    integrate(
        system,
        solver.scheme,
        x0,
        solver.dt,
        solver.n_steps(),
        &mut path,
        |_, _| {},
    )
}
