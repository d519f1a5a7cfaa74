//! Equiangular latitude-longitude histograms on the unit sphere.
//!
//! Row `i` covers colatitude [iπ/n_lat, (i+1)π/n_lat], column `j` covers
//! longitude [-π + 2πj/n_lon, -π + 2π(j+1)/n_lon]. Cells are stored row-major.

use std::f64::consts::PI;

use crate::algebra::Vec3;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SphereHistogram {
    n_lat: usize,
    n_lon: usize,
    counts: Vec<u64>,
    /// Solid angle of each cell; sums to 4π.
    solid_angles: Vec<f64>,
    total: u64,
}

impl SphereHistogram {
    pub fn empty(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(invalid(
                "grid",
                format!("need at least one cell, got {n_lat}x{n_lon}"),
            ));
        }
        let dphi = 2.0 * PI / n_lon as f64;
        let solid_angles = (0..n_lat)
            .flat_map(|i| {
                let (t0, t1) = (
                    PI * i as f64 / n_lat as f64,
                    PI * (i + 1) as f64 / n_lat as f64,
                );
                let a = dphi * (t0.cos() - t1.cos());
                std::iter::repeat_n(a, n_lon)
            })
            .collect();
        Ok(Self {
            n_lat,
            n_lon,
            counts: vec![0; n_lat * n_lon],
            solid_angles,
            total: 0,
        })
    }

    /// Cell index of the direction of `p`.
    pub fn cell_of(&self, p: &Vec3) -> Result<usize> {
        let n = p.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroVector);
        }
        let colat = (p.z / n).clamp(-1.0, 1.0).acos();
        let lon = p.y.atan2(p.x);
        let i = ((colat / PI * self.n_lat as f64) as usize).min(self.n_lat - 1);
        let j = (((lon + PI) / (2.0 * PI) * self.n_lon as f64) as usize).min(self.n_lon - 1);
        Ok(i * self.n_lon + j)
    }

    pub fn add(&mut self, p: &Vec3) -> Result<()> {
        let k = self.cell_of(p)?;
        self.counts[k] += 1;
        self.total += 1;
        Ok(())
    }

    /// Cell-wise sum of two histograms on the same grid.
    pub fn merge(mut self, other: &Self) -> Result<Self> {
        if (self.n_lat, self.n_lon) != (other.n_lat, other.n_lon) {
            return Err(invalid("grid", "histograms have different grids"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(self)
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn solid_angles(&self) -> &[f64] {
        &self.solid_angles
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Empirical probability density with respect to solid angle.
    pub fn densities(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts
            .iter()
            .zip(&self.solid_angles)
            .map(|(&c, &a)| c as f64 / (n * a))
            .collect()
    }

    /// Shannon entropy -Σ pₖ ln pₖ of the cell probabilities pₖ = countₖ/total.
    pub fn entropy(&self) -> f64 {
        let n = self.total as f64;
        self.counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    }

    /// (colatitude, longitude) of the centre of cell `k`.
    pub fn cell_center(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.n_lon, k % self.n_lon);
        (
            PI * (i as f64 + 0.5) / self.n_lat as f64,
            -PI + 2.0 * PI * (j as f64 + 0.5) / self.n_lon as f64,
        )
    }
}

/// Bins the directions of `points` on an `n_lat` × `n_lon` grid.
pub fn sphere_histogram(points: &[Vec3], n_lat: usize, n_lon: usize) -> Result<SphereHistogram> {
    let mut h = SphereHistogram::empty(n_lat, n_lon)?;
    for p in points {
        h.add(p)?;
    }
    Ok(h)
}
