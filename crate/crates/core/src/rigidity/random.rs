//! Seeded band-limited random fields on flat tori.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::MetricField;
use crate::mesh::{Field, Grid, Kind, Spectral};

use super::hodge::constant_metric;
use super::RigidityError;

/// Deterministic generator; every draw depends only on the seed and the
/// call sequence.
pub struct FieldSampler {
    rng: ChaCha8Rng,
    /// Largest mode number per axis.
    pub kmax: i64,
}

impl FieldSampler {
    pub fn new(seed: u64, kmax: i64) -> FieldSampler {
        FieldSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            kmax,
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Random spectrum supported on `|m|_∞ ≤ kmax` (excluding Nyquist),
    /// with amplitudes decaying like `1/(1 + |m|²)`.
    fn spectrum(&mut self, sp: &Spectral, with_mean: bool) -> Vec<Complex64> {
        (0..sp.len())
            .map(|idx| {
                let m = sp.mode(idx);
                let inside = m.iter().all(|k| k.abs() <= self.kmax) && !sp.has_nyquist(idx);
                if !inside || (idx == 0 && !with_mean) {
                    return Complex64::new(0.0, 0.0);
                }
                let amp = 1.0 / (1.0 + m.iter().map(|k| (k * k) as f64).sum::<f64>());
                let re: f64 = self.rng.gen_range(-1.0..1.0);
                let im: f64 = self.rng.gen_range(-1.0..1.0);
                Complex64::new(re, im) * amp * sp.len() as f64
            })
            .collect()
    }

    fn components(
        &mut self,
        grid: &Arc<Grid>,
        kind: Kind,
        with_mean: bool,
    ) -> Result<(Spectral, Vec<Vec<Complex64>>), RigidityError> {
        let sp = Spectral::new(grid).map_err(|_| RigidityError::NotTorus)?;
        let d = grid.dim();
        let ncomp = d.pow(kind.rank() as u32);
        let mut spectra: Vec<Vec<Complex64>> = (0..ncomp).map(|_| self.spectrum(&sp, with_mean)).collect();
        if kind == Kind::Sym2 {
            for a in 0..d {
                for b in 0..a {
                    spectra[a * d + b] = spectra[b * d + a].clone();
                }
            }
        }
        Ok((sp, spectra))
    }

    pub fn scalar(&mut self, grid: &Arc<Grid>, with_mean: bool) -> Result<Field, RigidityError> {
        self.field(grid, Kind::Scalar, with_mean)
    }

    pub fn covector(&mut self, grid: &Arc<Grid>, with_mean: bool) -> Result<Field, RigidityError> {
        self.field(grid, Kind::Covector, with_mean)
    }

    pub fn vector(&mut self, grid: &Arc<Grid>, with_mean: bool) -> Result<Field, RigidityError> {
        self.field(grid, Kind::Vector, with_mean)
    }

    pub fn sym2(&mut self, grid: &Arc<Grid>, with_mean: bool) -> Result<Field, RigidityError> {
        self.field(grid, Kind::Sym2, with_mean)
    }

    fn field(&mut self, grid: &Arc<Grid>, kind: Kind, with_mean: bool) -> Result<Field, RigidityError> {
        let (sp, spectra) = self.components(grid, kind, with_mean)?;
        Ok(sp.inverse_field(grid, kind, &spectra))
    }

    /// Transverse-traceless tensor for the constant metric `g`. On `T²`
    /// only the constant trace-free part survives.
    pub fn tt(&mut self, g: &MetricField) -> Result<Field, RigidityError> {
        let (big, inv) = constant_metric(g)?;
        let grid = g.grid();
        let d = grid.dim();
        let (sp, mut spectra) = self.components(grid, Kind::Sym2, true)?;
        let zero = Complex64::new(0.0, 0.0);
        for m in 0..sp.len() {
            let h: Vec<Complex64> = (0..d * d).map(|c| spectra[c][m]).collect();
            let out = if m == 0 {
                let tr: Complex64 = (0..d * d).map(|c| inv[c] * h[c]).sum();
                (0..d * d).map(|c| h[c] - big[c] * tr / d as f64).collect::<Vec<_>>()
            } else {
                let xi = sp.xi(m);
                let xi_up: Vec<f64> = (0..d)
                    .map(|a| (0..d).map(|b| inv[a * d + b] * xi[b]).sum())
                    .collect();
                let q: f64 = (0..d).map(|a| xi[a] * xi_up[a]).sum();
                if q <= 1e-14 || d < 2 {
                    vec![zero; d * d]
                } else {
                    // P_a^b = δ_a^b − ξ_a ξ^b / |ξ|²
                    let p = |a: usize, b: usize| {
                        (if a == b { 1.0 } else { 0.0 }) - xi[a] * xi_up[b] / q
                    };
                    let mut ph = vec![zero; d * d];
                    for a in 0..d {
                        for b in 0..d {
                            let mut s = zero;
                            for c in 0..d {
                                for e in 0..d {
                                    s += p(a, c) * p(b, e) * h[c * d + e];
                                }
                            }
                            ph[a * d + b] = s;
                        }
                    }
                    let tr: Complex64 = (0..d * d).map(|c| inv[c] * ph[c]).sum();
                    (0..d)
                        .flat_map(|a| (0..d).map(move |b| (a, b)))
                        .map(|(a, b)| {
                            let pi = big[a * d + b] - xi[a] * xi[b] / q;
                            ph[a * d + b] - pi * tr / (d as f64 - 1.0)
                        })
                        .collect()
                }
            };
            for c in 0..d * d {
                spectra[c][m] = out[c];
            }
        }
        Ok(sp.inverse_field(grid, Kind::Sym2, &spectra))
    }

    /// `ġ = c₀ g + L_{W₀} g + h_TT` with mean-free `W₀`.
    pub fn deformation(&mut self, g: &MetricField) -> Result<Deformation, RigidityError> {
        let c0 = self.uniform(-1.0, 1.0);
        let w0 = self.vector(g.grid(), false)?;
        let h_tt = self.tt(g)?;
        let lie = g.lie_metric(&w0)?;
        let gdot = g.g().scale(c0).add(&lie)?.add(&h_tt)?;
        Ok(Deformation { gdot, c0, w0, h_tt })
    }
}

/// A symmetric tensor with known decomposition.
#[derive(Debug, Clone)]
pub struct Deformation {
    pub gdot: Field,
    pub c0: f64,
    pub w0: Field,
    pub h_tt: Field,
}
