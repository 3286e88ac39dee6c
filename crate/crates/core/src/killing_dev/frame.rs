//! Lorentzian orthonormal frames and sampled dominant-energy checks.

use crate::mesh::Field;

fn dot(g: &[f64], d: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for a in 0..d {
        for b in 0..d {
            s += g[a * d + b] * x[a] * y[b];
        }
    }
    s
}

/// Gram–Schmidt in a Lorentzian metric. The first seed must be timelike;
/// later seeds are orthogonalized in order, skipping (near-)dependent ones,
/// and the coordinate basis fills any remaining slots. Returns `d` vectors
/// with `ḡ(e₀,e₀) = −1` and `ḡ(e_A,e_A) = 1` otherwise.
pub fn orthonormal_frame(g: &[f64], d: usize, seeds: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut signs: Vec<f64> = Vec::with_capacity(d);
    let basis = (0..d).map(|i| {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        e
    });
    for (k, seed) in seeds.iter().cloned().chain(basis).enumerate() {
        if frame.len() == d {
            break;
        }
        let scale = dot(g, d, &seed, &seed).abs().max(seed.iter().map(|v| v * v).sum());
        let mut v = seed;
        for (e, s) in frame.iter().zip(&signs) {
            let c = dot(g, d, &v, e) * s;
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= c * ei;
            }
        }
        let n = dot(g, d, &v, &v);
        if k == 0 && !(n < 0.0) {
            return None;
        }
        if n.abs() <= 1e-12 * scale {
            continue;
        }
        if k > 0 && n < 0.0 {
            return None;
        }
        let r = 1.0 / n.abs().sqrt();
        v.iter_mut().for_each(|x| *x *= r);
        signs.push(n.signum());
        frame.push(v);
    }
    (frame.len() == d).then_some(frame)
}

/// Deterministic quasi-uniform unit vectors in `R^m` (`m` = 1 to 3):
/// evenly spaced on the circle, a Fibonacci spiral on `S²`, and a Hopf
/// parametrization driven by a Kronecker sequence on `S³`.
pub fn null_directions(m: usize, count: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    match m {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => (0..count)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let t = 2.0 * PI * i as f64 / golden;
                vec![r * t.cos(), r * t.sin(), z]
            })
            .collect(),
        _ => {
            // Plastic-number generalization of the golden ratio.
            let phi3 = 1.220_744_084_605_759_5_f64;
            let a = [1.0 / phi3, 1.0 / (phi3 * phi3), 1.0 / (phi3 * phi3 * phi3)];
            (0..count)
                .map(|i| {
                    let q: Vec<f64> = a.iter().map(|x| (0.5 + x * i as f64).fract()).collect();
                    let (u, v, w) = (q[0], 2.0 * PI * q[1], 2.0 * PI * q[2]);
                    let (r1, r2) = ((1.0 - u).sqrt(), u.sqrt());
                    let mut out = vec![r1 * v.cos(), r1 * v.sin(), r2 * w.cos(), r2 * w.sin()];
                    out.resize(m.max(4), 0.0);
                    out.truncate(m);
                    out
                })
                .collect()
        }
    }
}

/// Outcome of a sampled DEC check.
#[derive(Debug, Clone)]
pub struct DecReport {
    /// Minimum of `Ein(X, Y)` over sampled future-causal pairs and nodes.
    pub min: f64,
    /// Node and coordinates of the minimum.
    pub node: usize,
    pub coords: Vec<f64>,
    /// Nodes where the minimum falls below `−tol`.
    pub violations: usize,
    pub tol: f64,
    pub samples: usize,
}

impl DecReport {
    pub fn holds(&self) -> bool {
        self.min >= -self.tol
    }
}

/// Checks `Ein(X, Y) ≥ −tol` for `X, Y` drawn from `e₀` and the future
/// null vectors `e₀ + c` with `c` on the sampled unit sphere. Nonnegative
/// combinations of these span the future causal cone, so this samples the
/// full condition.
pub fn dec_check_frame(ein: &Field, samples: usize, tol: f64) -> DecReport {
    let d = ein.dim();
    let dirs = null_directions(d - 1, samples);
    let mut vecs: Vec<Vec<f64>> = vec![{
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    }];
    for c in &dirs {
        let mut x = vec![1.0];
        x.extend_from_slice(c);
        vecs.push(x);
    }
    let grid = ein.grid();
    let mut report = DecReport {
        min: f64::INFINITY,
        node: 0,
        coords: Vec::new(),
        violations: 0,
        tol,
        samples: dirs.len(),
    };
    let mut y = vec![0.0; d];
    for p in 0..grid.len() {
        let e: Vec<f64> = (0..d * d).map(|c| ein.at(c, p)).collect();
        let mut node_min = f64::INFINITY;
        for xk in &vecs {
            for (a, ya) in y.iter_mut().enumerate() {
                *ya = (0..d).map(|b| e[a * d + b] * xk[b]).sum();
            }
            for xj in &vecs {
                let v: f64 = xj.iter().zip(&y).map(|(u, w)| u * w).sum();
                node_min = node_min.min(v);
            }
        }
        if node_min < -tol {
            report.violations += 1;
        }
        if node_min < report.min {
            report.min = node_min;
            report.node = p;
        }
    }
    report.coords = grid.coords(report.node);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minkowski_frame_and_directions() {
        // ds dv + dv ds + ds² + dx²
        let g = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let seeds = vec![vec![1.0, -1.0, 0.0]];
        let f = orthonormal_frame(&g, 3, &seeds).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let want = if a != b { 0.0 } else if a == 0 { -1.0 } else { 1.0 };
                assert!((dot(&g, 3, &f[a], &f[b]) - want).abs() < 1e-14);
            }
        }
        assert!(orthonormal_frame(&g, 3, &[vec![0.0, 1.0, 0.0]]).is_none());
        for m in 1..=4 {
            for c in null_directions(m, 64) {
                let n: f64 = c.iter().map(|x| x * x).sum();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
        // Fibonacci points cover both hemispheres evenly.
        let z: f64 = null_directions(3, 64).iter().map(|c| c[2]).sum();
        assert!(z.abs() < 1e-12);
    }
}
