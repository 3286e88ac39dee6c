//! Multi-dimensional FFTs on fully periodic (torus) grids.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::deriv::wavenumbers;
use super::{AxisKind, Field, Grid, Kind, MeshError};

/// Forward/inverse transforms over every axis of a torus grid. The inverse
/// is normalized so that `inverse(forward(f)) = f`.
pub struct Spectral {
    shape: Vec<usize>,
    /// Effective angular wavenumbers per axis (Nyquist zeroed).
    xi: Vec<Vec<f64>>,
    /// Integer mode numbers per axis (signed, FFT order).
    modes: Vec<Vec<i64>>,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Result<Spectral, MeshError> {
        if grid.axes().iter().any(|a| a.kind != AxisKind::Periodic) {
            return Err(MeshError::InvalidGrid("spectral transforms need a torus grid".into()));
        }
        let shape = grid.shape();
        let xi = grid.axes().iter().map(|a| wavenumbers(a.points, a.length)).collect();
        let modes = shape
            .iter()
            .map(|&n| {
                (0..n)
                    .map(|m| if 2 * m <= n { m as i64 } else { m as i64 - n as i64 })
                    .collect()
            })
            .collect();
        Ok(Spectral { shape, xi, modes })
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Effective wave covector at spectral index `flat`.
    pub fn xi(&self, flat: usize) -> Vec<f64> {
        self.index(flat)
            .iter()
            .enumerate()
            .map(|(a, &m)| self.xi[a][m])
            .collect()
    }

    /// Signed mode numbers at spectral index `flat`.
    pub fn mode(&self, flat: usize) -> Vec<i64> {
        self.index(flat)
            .iter()
            .enumerate()
            .map(|(a, &m)| self.modes[a][m])
            .collect()
    }

    /// True if some axis sits at its Nyquist index.
    pub fn has_nyquist(&self, flat: usize) -> bool {
        self.index(flat)
            .iter()
            .zip(&self.shape)
            .any(|(&m, &n)| 2 * m == n)
    }

    fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (k, &n) in self.shape.iter().enumerate().rev() {
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// Inverse transform; returns the real part.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        self.transform(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let mut planner = FftPlanner::new();
        let total = self.len();
        for axis in 0..self.shape.len() {
            let n = self.shape[axis];
            let fft = if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            };
            let stride: usize = self.shape[axis + 1..].iter().product();
            let outer = total / (n * stride);
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for (k, l) in line.iter_mut().enumerate() {
                        *l = buf[base + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, l) in line.iter().enumerate() {
                        buf[base + k * stride] = *l;
                    }
                }
            }
        }
    }

    /// Forward transforms of every component of a field.
    pub fn forward_field(&self, f: &Field) -> Vec<Vec<Complex64>> {
        (0..f.ncomp()).map(|c| self.forward(f.comp(c))).collect()
    }

    /// Assembles a field from component spectra.
    pub fn inverse_field(
        &self,
        grid: &std::sync::Arc<Grid>,
        kind: Kind,
        spectra: &[Vec<Complex64>],
    ) -> Field {
        let mut out = Field::zeros(grid, kind);
        for (c, s) in spectra.iter().enumerate() {
            out.comp_mut(c).copy_from_slice(&self.inverse(s));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exprlang::parse;
    use crate::mesh::sample_scalar;

    #[test]
    fn round_trip_and_modes() {
        let g = Arc::new(Grid::torus(&[8, 10], &[1.0, 2.0], 0.0).unwrap());
        let f = sample_scalar(&parse("cos(2*pi*x1) + sin(pi*x2)").unwrap(), &g).unwrap();
        let sp = Spectral::new(&g).unwrap();
        let spec = sp.forward(f.comp(0));
        let back = sp.inverse(&spec);
        for (a, b) in back.iter().zip(f.comp(0)) {
            assert!((a - b).abs() < 1e-14);
        }
        // cos(2π x1) lives at mode (±1, 0) with amplitude N/2.
        let idx = 10; // (1, 0)
        assert_eq!(sp.mode(idx), vec![1, 0]);
        assert!((spec[idx].re - 40.0).abs() < 1e-10);
        assert!((sp.xi(idx)[0] - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!(sp.has_nyquist(4 * 10));
    }
}
