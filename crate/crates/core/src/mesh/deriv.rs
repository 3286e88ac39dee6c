//! Partial derivative operators along a single grid axis.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{AxisKind, Field, Grid, MeshError, Scheme};

/// Componentwise partial derivative along grid axis `axis` with `scheme`.
pub fn partial(f: &Field, axis: usize, scheme: Scheme) -> Result<Field, MeshError> {
    let grid = f.grid();
    let dim = grid.dim();
    if axis >= dim {
        return Err(MeshError::AxisOutOfRange { axis, dim });
    }
    let ax = grid.axis(axis);
    if scheme == Scheme::Spectral && ax.kind == AxisKind::Interval {
        return Err(MeshError::SpectralOnInterval(axis));
    }
    let mut out = f.clone();
    let op = LineOp::new(grid, axis, scheme);
    let mut buf = vec![0.0; ax.points];
    let mut res = vec![0.0; ax.points];
    for c in 0..f.ncomp() {
        let src = f.comp(c);
        let dst = out.comp_mut(c);
        for_each_line(grid, axis, |idx| {
            for (b, &i) in buf.iter_mut().zip(idx) {
                *b = src[i];
            }
            op.apply(&buf, &mut res);
            for (&r, &i) in res.iter().zip(idx) {
                dst[i] = r;
            }
        });
    }
    Ok(out)
}

/// Partial derivative with respect to tensor coordinate `a` using the grid's
/// configured scheme. Coordinates below `f.lead()` are analytic directions
/// along which all fields are constant.
pub fn partial_index(f: &Field, a: usize) -> Result<Field, MeshError> {
    if a < f.lead() {
        let mut z = f.clone();
        z.data.fill(0.0);
        return Ok(z);
    }
    let axis = a - f.lead();
    if axis >= f.grid().dim() {
        return Err(MeshError::AxisOutOfRange {
            axis,
            dim: f.grid().dim(),
        });
    }
    partial(f, axis, f.grid().scheme(axis))
}

/// Calls `body` with the flat node indices of every grid line along `axis`.
fn for_each_line(grid: &Arc<Grid>, axis: usize, mut body: impl FnMut(&[usize])) {
    let n = grid.axis(axis).points;
    let stride = grid.stride(axis);
    let outer = grid.len() / (n * stride);
    let mut idx = vec![0; n];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * n * stride + inner;
            for (k, slot) in idx.iter_mut().enumerate() {
                *slot = base + k * stride;
            }
            body(&idx);
        }
    }
}

enum LineOp {
    Fd {
        order: usize,
        periodic: bool,
        h: f64,
    },
    Spectral {
        fwd: Arc<dyn rustfft::Fft<f64>>,
        inv: Arc<dyn rustfft::Fft<f64>>,
        mult: Vec<f64>,
    },
}

impl LineOp {
    fn new(grid: &Grid, axis: usize, scheme: Scheme) -> LineOp {
        let ax = grid.axis(axis);
        let periodic = ax.kind == AxisKind::Periodic;
        let h = ax.spacing();
        match scheme {
            Scheme::Fd2 => LineOp::Fd {
                order: 2,
                periodic,
                h,
            },
            Scheme::Fd4 => LineOp::Fd {
                order: 4,
                periodic,
                h,
            },
            Scheme::Spectral => {
                let n = ax.points;
                let mut planner = FftPlanner::new();
                LineOp::Spectral {
                    fwd: planner.plan_fft_forward(n),
                    inv: planner.plan_fft_inverse(n),
                    mult: wavenumbers(n, ax.length),
                }
            }
        }
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        match self {
            LineOp::Fd { order, periodic, h } => {
                if *periodic {
                    fd_periodic(f, out, *order, *h)
                } else {
                    fd_interval(f, out, *order, *h)
                }
            }
            LineOp::Spectral { fwd, inv, mult } => {
                let n = f.len();
                let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fwd.process(&mut buf);
                for (b, &k) in buf.iter_mut().zip(mult) {
                    *b = Complex64::new(-b.im * k, b.re * k);
                }
                inv.process(&mut buf);
                let scale = 1.0 / n as f64;
                for (o, b) in out.iter_mut().zip(&buf) {
                    *o = b.re * scale;
                }
            }
        }
    }
}

/// Angular wavenumbers `2πm/L` in FFT order, with the Nyquist mode zeroed so
/// that the first derivative of a real field stays real.
pub(crate) fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / length;
    (0..n)
        .map(|m| {
            if 2 * m == n {
                0.0
            } else if 2 * m < n {
                base * m as f64
            } else {
                base * (m as f64 - n as f64)
            }
        })
        .collect()
}

fn fd_periodic(f: &[f64], out: &mut [f64], order: usize, h: f64) {
    let n = f.len();
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    for (i, o) in out.iter_mut().enumerate() {
        let i = i as isize;
        *o = if order == 2 {
            (at(i + 1) - at(i - 1)) / (2.0 * h)
        } else {
            (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h)
        };
    }
}

fn fd_interval(f: &[f64], out: &mut [f64], order: usize, h: f64) {
    let n = f.len();
    if order == 2 {
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        return;
    }
    let d = 12.0 * h;
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / d;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / d;
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / d;
    }
    out[n - 2] =
        -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) / d;
    out[n - 1] =
        -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5])
            / d;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::{parse, Var};
    use crate::mesh::{sample_scalar, Grid};

    fn grid2(ns: usize, nx: usize) -> Arc<Grid> {
        Arc::new(Grid::product(2, 1.0, ns, &[nx], &[1.0]).unwrap())
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = grid2(9, 8);
        let f = Field::constant(&g, 3.5);
        for (axis, scheme) in [(0, Scheme::Fd2), (0, Scheme::Fd4), (1, Scheme::Fd4), (1, Scheme::Spectral)] {
            assert_eq!(partial(&f, axis, scheme).unwrap().max_abs(), 0.0);
        }
        assert!(matches!(
            partial(&f, 0, Scheme::Spectral),
            Err(MeshError::SpectralOnInterval(0))
        ));
    }

    #[test]
    fn spectral_matches_oracle() {
        let g = grid2(9, 16);
        let e = parse("sin(2*pi*x1/1)").unwrap();
        let f = sample_scalar(&e, &g).unwrap();
        let d = partial(&f, 1, Scheme::Spectral).unwrap();
        let exact = sample_scalar(&e.diff(Var::leaf(1).unwrap()), &g).unwrap();
        assert!(d.max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn fd_orders() {
        let e = parse("exp(0.7*s)*cos(3*s)").unwrap();
        let de = e.diff(Var::S);
        for (scheme, min_order) in [(Scheme::Fd2, 1.9), (Scheme::Fd4, 3.8)] {
            let errs: Vec<f64> = [17, 33, 65]
                .iter()
                .map(|&ns| {
                    let g = grid2(ns, 8);
                    let f = sample_scalar(&e, &g).unwrap();
                    let d = partial(&f, 0, scheme).unwrap();
                    d.max_abs_diff(&sample_scalar(&de, &g).unwrap())
                })
                .collect();
            let order = (errs[1] / errs[2]).log2();
            assert!(order >= min_order, "{scheme:?}: errors {errs:?}, order {order}");
        }
    }

    #[test]
    fn fd4_exact_on_quartics() {
        let g = grid2(9, 8);
        let e = parse("1 - 2*s + s^2 - 3*s^3 + s^4").unwrap();
        let f = sample_scalar(&e, &g).unwrap();
        let d = partial(&f, 0, Scheme::Fd4).unwrap();
        assert!(d.max_abs_diff(&sample_scalar(&e.diff(Var::S), &g).unwrap()) < 1e-11);
    }

    #[test]
    fn nyquist_mode_has_zero_derivative() {
        let g = grid2(9, 8);
        let f = sample_scalar(&parse("cos(8*pi*x1)").unwrap(), &g).unwrap();
        assert!(partial(&f, 1, Scheme::Spectral).unwrap().max_abs() < 1e-12);
    }
}
