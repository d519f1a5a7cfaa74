//! Reproducible Wiener increments.
//!
//! Every path is a ChaCha8 keystream. The 64-bit user seed is expanded to the
//! 256-bit ChaCha key by `SeedableRng::seed_from_u64`, and the stream index is
//! written into the ChaCha nonce, so distinct `(seed, stream)` pairs give
//! independent streams without any shared state between workers. Ensembles
//! and sweeps derive stream indices with [`stream_index`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream index for item `index` of group `group` (e.g. a sweep cell and
/// one of its realizations): `group << 32 | index`.
pub fn stream_index(group: u32, index: u32) -> u64 {
    (u64::from(group) << 32) | u64::from(index)
}

/// A generator seeded from `(seed, stream)`; used for random initial
/// conditions so they never overlap the Wiener streams.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Lazily generated Gaussian increments dWⁱₙ ~ N(0, dt), one per channel per
/// step.
#[derive(Clone, Debug)]
pub struct NoisePath {
    seed: u64,
    stream: u64,
    dt: f64,
    channels: usize,
    sqrt_dt: f64,
    rng: ChaCha8Rng,
    step: u64,
}

impl NoisePath {
    pub fn new(seed: u64, stream: u64, dt: f64, channels: usize) -> Self {
        Self {
            seed,
            stream,
            dt,
            channels,
            sqrt_dt: dt.sqrt(),
            rng: rng_for(seed, stream),
            step: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of steps drawn so far.
    pub fn position(&self) -> u64 {
        self.step
    }

    /// Writes the next step's increments into `out[..channels]`.
    pub fn fill(&mut self, out: &mut [f64]) {
        for dw in &mut out[..self.channels] {
            let z: f64 = self.rng.sample(StandardNormal);
            *dw = self.sqrt_dt * z;
        }
        self.step += 1;
    }

    /// The next `n_steps` increments, flattened step-major.
    pub fn table(&mut self, n_steps: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_steps * self.channels];
        for row in out.chunks_mut(self.channels.max(1)) {
            self.fill(row);
        }
        out
    }
}

/// Sums groups of `factor` consecutive steps of a step-major increment table,
/// giving the same Brownian path sampled at `factor` times the step.
pub fn coarsen(table: &[f64], channels: usize, factor: usize) -> Vec<f64> {
    let fine_steps = table.len() / channels;
    assert_eq!(fine_steps % factor, 0, "table length must divide evenly");
    let mut out = vec![0.0; fine_steps / factor * channels];
    for (n, row) in table.chunks(channels).enumerate() {
        let coarse = n / factor;
        for (c, dw) in row.iter().enumerate() {
            out[coarse * channels + c] += dw;
        }
    }
    out
}
