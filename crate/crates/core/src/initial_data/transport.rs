//! Parallel transport of ambient vectors along axis-aligned grid polylines.
//!
//! Along a segment in coordinate direction `c` the equation `∇̄_{∂_c} V = 0`
//! reads `d/dt (a, X) = −M(t) (a, X)` with
//! `M = [[0, k_cm], [k_c^b, Γ^b_cm]]`. The coefficients are known at grid
//! nodes; between nodes they are interpolated (trigonometric interpolation
//! on periodic axes, 6-point Lagrange on the interval). Each segment is
//! integrated with classical RK4, halving the step until two successive
//! resolutions agree.

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::mesh::{AxisKind, Grid};

use super::{DataError, InitialDataSet};

#[derive(Debug, Error)]
pub enum PathError {
    #[error("start node {0:?} is outside the grid")]
    StartOutside(Vec<usize>),
    #[error("move {index} along axis {axis} leaves the interval")]
    LeavesInterval { index: usize, axis: usize },
    #[error("move {index} refers to axis {axis}, grid has {dim}")]
    BadAxis { index: usize, axis: usize, dim: usize },
}

/// Result of transporting `V₀` along a path.
#[derive(Debug, Clone)]
pub struct Transport {
    pub a: f64,
    pub x: Vec<f64>,
    pub end: Vec<usize>,
    /// `|ḡ(V,V) − ḡ(V₀,V₀)|` at the end node.
    pub drift: f64,
    /// Riemannian length of the path.
    pub length: f64,
    /// Total RK4 steps taken at the accepted resolution.
    pub steps: usize,
}

const REL_TOL: f64 = 1e-13;
const MAX_REFINE: u32 = 14;

/// Transports `(a₀, X₀)` from `start` through the moves `(axis, signed
/// node count)`. Periodic axes wrap; the interval axis must stay in range.
pub fn parallel_transport(
    ids: &InitialDataSet,
    a0: f64,
    x0: &[f64],
    start: &[usize],
    moves: &[(usize, i64)],
) -> Result<Transport, DataError> {
    let grid = ids.grid();
    let n = ids.n();
    if start.len() != n || start.iter().zip(grid.axes()).any(|(&i, a)| i >= a.points) {
        return Err(PathError::StartOutside(start.to_vec()).into());
    }
    let g0 = node_metric(ids, grid.flat_index(start));
    let norm0 = ambient_norm(a0, x0, &g0, n);
    let mut state: Vec<f64> = std::iter::once(a0).chain(x0.iter().copied()).collect();
    let mut node = start.to_vec();
    let mut length = 0.0;
    let mut steps = 0;
    for (index, &(axis, count)) in moves.iter().enumerate() {
        if axis >= n {
            return Err(PathError::BadAxis { index, axis, dim: n }.into());
        }
        let ax = grid.axis(axis);
        let target = node[axis] as i64 + count;
        if ax.kind == AxisKind::Interval && (target < 0 || target >= ax.points as i64) {
            return Err(PathError::LeavesInterval { index, axis }.into());
        }
        if count == 0 {
            continue;
        }
        let line = SegmentCoefficients::new(ids, &node, axis);
        let t0 = node[axis] as f64;
        let t1 = target as f64;
        let h = ax.spacing();
        let cells = count.unsigned_abs() as usize;
        let mut nsub = 2 * cells;
        let (mut prev, mut len) = integrate(&line, &state, t0, t1, h, nsub);
        let mut accepted = None;
        for _ in 0..MAX_REFINE {
            nsub *= 2;
            let (next, next_len) = integrate(&line, &state, t0, t1, h, nsub);
            let scale = 1.0 + next.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let diff = prev
                .iter()
                .zip(&next)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            prev = next;
            len = next_len;
            if diff <= REL_TOL * scale {
                accepted = Some(nsub);
                break;
            }
        }
        let Some(used) = accepted else {
            return Err(DataError::StepUnderflow { segment: index });
        };
        steps += used;
        state = prev;
        length += len;
        node[axis] = target.rem_euclid(ax.points as i64) as usize;
    }
    let g1 = node_metric(ids, grid.flat_index(&node));
    let norm1 = ambient_norm(state[0], &state[1..], &g1, n);
    Ok(Transport {
        a: state[0],
        x: state[1..].to_vec(),
        end: node,
        drift: (norm1 - norm0).abs(),
        length,
        steps,
    })
}

fn node_metric(ids: &InitialDataSet, p: usize) -> Vec<f64> {
    let n = ids.n();
    (0..n * n).map(|c| ids.metric().g().at(c, p)).collect()
}

fn ambient_norm(a: f64, x: &[f64], g: &[f64], n: usize) -> f64 {
    let mut s = -a * a;
    for i in 0..n {
        for j in 0..n {
            s += g[i * n + j] * x[i] * x[j];
        }
    }
    s
}

/// RK4 over `nsub` equal steps in node-index units from `t0` to `t1`.
fn integrate(
    line: &SegmentCoefficients,
    v0: &[f64],
    t0: f64,
    t1: f64,
    h: f64,
    nsub: usize,
) -> (Vec<f64>, f64) {
    let dt = (t1 - t0) / nsub as f64;
    let mut v = v0.to_vec();
    let mut length = 0.0;
    let rhs = |t: f64, v: &[f64]| -> (Vec<f64>, f64) {
        let (m, gcc) = line.eval(t);
        let d = v.len();
        let out = (0..d)
            .map(|r| -(0..d).map(|c| m[r * d + c] * v[c]).sum::<f64>() * h)
            .collect();
        (out, gcc.max(0.0).sqrt())
    };
    for step in 0..nsub {
        let t = t0 + step as f64 * dt;
        let (k1, l1) = rhs(t, &v);
        let y2: Vec<f64> = v.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let (k2, l2) = rhs(t + 0.5 * dt, &y2);
        let y3: Vec<f64> = v.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let (k3, _) = rhs(t + 0.5 * dt, &y3);
        let y4: Vec<f64> = v.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let (k4, l4) = rhs(t + dt, &y4);
        for i in 0..v.len() {
            v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        length += (dt * h).abs() / 6.0 * (l1 + 4.0 * l2 + l4);
    }
    (v, length)
}

/// Node values of `M` and `g_cc` along the grid line through a node.
struct SegmentCoefficients {
    dim: usize,
    periodic: bool,
    /// entries[e][i]: entry `e` (the `(n+1)²` entries of `M`, then `g_cc`)
    /// at line node `i`.
    entries: Vec<Vec<f64>>,
    /// Fourier coefficients per entry (periodic lines only).
    spectra: Vec<Vec<Complex64>>,
}

impl SegmentCoefficients {
    fn new(ids: &InitialDataSet, node: &[usize], axis: usize) -> SegmentCoefficients {
        let grid: &Grid = ids.grid();
        let n = ids.n();
        let d = n + 1;
        let npts = grid.axis(axis).points;
        let periodic = grid.axis(axis).kind == AxisKind::Periodic;
        let g = ids.metric();
        let inv = g.inverse();
        let gam = g.christoffels();
        let k = ids.k();
        let mut entries = vec![vec![0.0; npts]; d * d + 1];
        let mut idx = node.to_vec();
        for i in 0..npts {
            idx[axis] = i;
            let p = grid.flat_index(&idx);
            let c = axis;
            for m in 0..n {
                entries[1 + m][i] = k.at2(c, m, p);
            }
            for b in 0..n {
                let kb: f64 = (0..n).map(|m| inv.at2(b, m, p) * k.at2(c, m, p)).sum();
                entries[(1 + b) * d][i] = kb;
                for m in 0..n {
                    entries[(1 + b) * d + 1 + m][i] = gam.at((b * n + c) * n + m, p);
                }
            }
            entries[d * d][i] = g.g().at2(c, c, p);
        }
        let spectra = if periodic {
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_forward(npts);
            entries
                .iter()
                .map(|e| {
                    let mut buf: Vec<Complex64> = e.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                    fft.process(&mut buf);
                    buf
                })
                .collect()
        } else {
            Vec::new()
        };
        SegmentCoefficients {
            dim: d,
            periodic,
            entries,
            spectra,
        }
    }

    /// Interpolated `M` (row-major) and `g_cc` at fractional node index `t`.
    fn eval(&self, t: f64) -> (Vec<f64>, f64) {
        let d = self.dim;
        let vals: Vec<f64> = if self.periodic {
            self.spectra.iter().map(|s| trig_interp(s, t)).collect()
        } else {
            self.entries.iter().map(|e| lagrange6(e, t)).collect()
        };
        let gcc = vals[d * d];
        (vals[..d * d].to_vec(), gcc)
    }
}

/// Evaluates the trigonometric interpolant with the given DFT at index `t`.
fn trig_interp(spec: &[Complex64], t: f64) -> f64 {
    let n = spec.len();
    let mut s = spec[0].re;
    let w = 2.0 * std::f64::consts::PI * t / n as f64;
    for m in 1..n / 2 {
        let (sin, cos) = (w * m as f64).sin_cos();
        // Conjugate pair m and n - m.
        s += 2.0 * (spec[m].re * cos - spec[m].im * sin);
    }
    if n % 2 == 0 {
        s += spec[n / 2].re * (w * (n / 2) as f64).cos();
    }
    s / n as f64
}

/// 6-point Lagrange interpolation at fractional index `t` (stencil shifted
/// inwards near the ends).
fn lagrange6(f: &[f64], t: f64) -> f64 {
    let n = f.len();
    let w = 6.min(n);
    let mut lo = t.floor() as i64 - (w as i64 / 2 - 1);
    lo = lo.clamp(0, (n - w) as i64);
    let lo = lo as usize;
    let mut s = 0.0;
    for i in lo..lo + w {
        let mut l = 1.0;
        for j in lo..lo + w {
            if j != i {
                l *= (t - j as f64) / (i as f64 - j as f64);
            }
        }
        s += l * f[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolants_reproduce_nodes_and_smooth_data() {
        let n = 16;
        let vals: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin())
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let mut buf: Vec<Complex64> = vals.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.process(&mut buf);
        for i in 0..n {
            assert!((trig_interp(&buf, i as f64) - vals[i]).abs() < 1e-14);
        }
        let t = 3.37;
        let exact = (2.0 * std::f64::consts::PI * t / n as f64).sin();
        assert!((trig_interp(&buf, t) - exact).abs() < 1e-14);

        let cubic: Vec<f64> = (0..10).map(|i| (i as f64).powi(5) - 3.0 * i as f64).collect();
        for t in [0.3, 4.5, 8.9] {
            let want = f64::powi(t, 5) - 3.0 * t;
            assert!((lagrange6(&cubic, t) - want).abs() < 1e-9);
        }
    }
}
