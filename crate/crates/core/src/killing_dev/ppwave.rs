//! The pp-wave family `ḡ = −ds⊗dv − dv⊗ds + f ds² + δ` on `R × M`.
//!
//! `∂_v` is parallel and lightlike, and the only non-zero Einstein
//! component is `Ein_ss = −½ Δf` with `Δ = Σ ∂²_{x_i}` the flat leaf
//! Laplacian. Since `∂_v♭ = −ds`, this reads `Ein = ½ Δ_+ f ∂_v♭ ⊗ ∂_v♭`
//! with the nonnegative Laplacian `Δ_+ = −Δ`. For future-causal `X, Y`
//! both `X^s = −ḡ(X, ∂_v)` and `Y^s` are nonnegative, so the spacetime is
//! DEC exactly where `Δf ≤ 0`.

use std::sync::Arc;

use crate::exprlang::{Expr, Var};
use crate::geometry::{cholesky_ok, invert_small, MetricField};
use crate::initial_data::{AmbientVector, InitialDataSet};
use crate::mesh::{Field, Grid, Kind};
use crate::symbolic::{coord_diff, SymMetric};

use super::frame::{dec_check_frame, orthonormal_frame, DecReport};
use super::{frame_components, parallel_residual, KdError, KillingDevelopment};

/// A pp-wave profile `f(s, x)` on `R × M` with `dim M = n`.
#[derive(Debug, Clone)]
pub struct PpWaveSpec {
    pub n: usize,
    pub f: Expr,
}

impl PpWaveSpec {
    pub fn new(n: usize, f: Expr) -> PpWaveSpec {
        PpWaveSpec { n, f }
    }

    /// Row-major components in coordinates `(v, s, x₁, …)`.
    pub fn metric_exprs(&self) -> Vec<Expr> {
        let d = self.n + 1;
        let mut g = vec![Expr::constant(0.0); d * d];
        g[1] = Expr::constant(-1.0);
        g[d] = Expr::constant(-1.0);
        g[d + 1] = self.f.clone();
        for i in 2..d {
            g[i * d + i] = Expr::constant(1.0);
        }
        g
    }

    pub fn sym_metric(&self) -> SymMetric {
        SymMetric::new(self.n + 1, 1, self.metric_exprs())
    }

    /// `Δf = Σ ∂²_{x_i} f` (analyst's sign).
    pub fn leaf_laplacian(&self) -> Expr {
        (1..self.n)
            .filter_map(Var::from_index)
            .map(|v| self.f.diff(v).diff(v))
            .reduce(|a, b| Expr::Add(Box::new(a), Box::new(b)))
            .unwrap_or(Expr::constant(0.0))
    }

    /// The metric sampled on the grid of `M` with `v` as analytic index.
    pub fn metric_field(&self, grid: &Arc<Grid>) -> Result<MetricField, KdError> {
        let exprs = self.metric_exprs();
        let d = self.n + 1;
        let mut err = None;
        let g = Field::from_fn(grid, Kind::Sym2, 1, |p, out| {
            let pt = grid.point(p);
            for (c, e) in exprs.iter().enumerate().take(d * d) {
                match e.eval(&pt) {
                    Ok(v) => out[c] = v,
                    Err(e) => err = Some(e),
                }
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        Ok(MetricField::lorentzian(g)?)
    }
}

/// Residuals of the pp-wave Einstein formula on a grid.
#[derive(Debug, Clone)]
pub struct PpWaveReport {
    /// Coordinate Einstein tensor from grid curvature.
    pub einstein: Field,
    /// Max `|Ein − (−½Δf) ds⊗ds|` over all components.
    pub formula_residual: f64,
    /// Max `|½Δf|`.
    pub expected_max: f64,
    /// Max `|∇̄ ∂_v|`.
    pub parallel_residual: f64,
    pub scal_max: f64,
    /// Max of `Δf` over the grid; superharmonic iff `≤ tol`.
    pub laplacian_max: f64,
    pub superharmonic: bool,
    pub dec: DecReport,
}

/// Grid curvature of the pp-wave against the closed-form Einstein tensor.
pub fn ppwave_einstein_check(
    spec: &PpWaveSpec,
    grid: &Arc<Grid>,
    samples: usize,
    tol: f64,
) -> Result<PpWaveReport, KdError> {
    let metric = spec.metric_field(grid)?;
    let curv = metric.riemann()?;
    let ein = curv.einstein(&metric);
    let lap = spec.leaf_laplacian();
    let d = spec.n + 1;
    let mut residual = 0.0f64;
    let mut expected_max = 0.0f64;
    let mut lap_max = f64::NEG_INFINITY;
    for p in 0..grid.len() {
        let l = lap.eval(&grid.point(p))?;
        lap_max = lap_max.max(l);
        expected_max = expected_max.max((0.5 * l).abs());
        for a in 0..d {
            for b in 0..d {
                let want = if a == 1 && b == 1 { -0.5 * l } else { 0.0 };
                residual = residual.max((ein.at2(a, b, p) - want).abs());
            }
        }
    }
    let frames = (0..grid.len())
        .map(|p| ppwave_frame(&metric, p))
        .collect::<Result<Vec<_>, _>>()?;
    let table = frame_components(&ein, &frames);
    Ok(PpWaveReport {
        formula_residual: residual,
        expected_max,
        parallel_residual: parallel_residual(&metric),
        scal_max: curv.scal.max_abs(),
        laplacian_max: lap_max,
        superharmonic: lap_max <= tol,
        dec: dec_check_frame(&table, samples, tol),
        einstein: ein,
    })
}

/// Orthonormal frame seeded by the future timelike `∂_v + c ∂_s`,
/// `c = 1/(1 + |f|)`, so `ḡ(T, T) = c(fc − 2) < 0` for any sign of `f`.
fn ppwave_frame(metric: &MetricField, p: usize) -> Result<Vec<Vec<f64>>, KdError> {
    let d = metric.dim();
    let g: Vec<f64> = (0..d * d).map(|c| metric.g().at(c, p)).collect();
    let c = 1.0 / (1.0 + g[d + 1].abs());
    let mut t = vec![0.0; d];
    t[0] = 1.0;
    t[1] = c;
    orthonormal_frame(&g, d, &[t]).ok_or(KdError::Frame(p))
}

/// Initial data induced on the graph `v = w(s, x)` with its parallel field.
#[derive(Debug, Clone)]
pub struct InducedPpWave {
    pub ids: InitialDataSet,
    /// `∂_v` split as `a e₀ + X` along the graph.
    pub v: AmbientVector,
    pub w: Expr,
}

struct NodeData {
    g: Vec<f64>,
    k: Vec<f64>,
    a: f64,
    x: Vec<f64>,
}

/// Induced metric, second fundamental form and `∂_v = a e₀ + X` at one point.
///
/// With `T_a = ∂_a + ∂_a w ∂_v` and `N = dv − dw`, the future unit normal is
/// `n_μ = −N_μ / sqrt(−ḡ^{μν}N_μN_ν)` and
/// `k_ab = −n_v ∂_a∂_b w − n_μ Γ̄^μ_{νρ} T_a^ν T_b^ρ`.
fn induced_node(
    sym: &SymMetric,
    dw: &[Expr],
    ddw: &[Expr],
    grid: &Grid,
    p: usize,
) -> Result<Option<NodeData>, KdError> {
    let n = grid.dim();
    let d = n + 1;
    let pt = grid.point(p);
    let pg = sym.at(&pt)?;
    let wa: Vec<f64> = dw.iter().map(|e| e.eval(&pt)).collect::<Result<_, _>>()?;
    let mut big_n = vec![1.0; d];
    for a in 0..n {
        big_n[a + 1] = -wa[a];
    }
    let mut nn = 0.0;
    for m in 0..d {
        for q in 0..d {
            nn += pg.ginv[m * d + q] * big_n[m] * big_n[q];
        }
    }
    if !(nn < 0.0) {
        return Ok(None);
    }
    let norm = (-nn).sqrt();
    let nl: Vec<f64> = big_n.iter().map(|v| -v / norm).collect();
    let tang = |a: usize| {
        let mut t = vec![0.0; d];
        t[0] = wa[a];
        t[a + 1] = 1.0;
        t
    };
    let ts: Vec<Vec<f64>> = (0..n).map(tang).collect();
    let mut g = vec![0.0; n * n];
    let mut k = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut gab = 0.0;
            for m in 0..d {
                for q in 0..d {
                    gab += pg.g[m * d + q] * ts[a][m] * ts[b][q];
                }
            }
            g[a * n + b] = gab;
            let mut kab = -nl[0] * ddw[a * n + b].eval(&pt)?;
            for m in 0..d {
                for r in 0..d {
                    for q in 0..d {
                        kab -= nl[m] * pg.gamma[(m * d + r) * d + q] * ts[a][r] * ts[b][q];
                    }
                }
            }
            k[a * n + b] = kab;
        }
    }
    if !cholesky_ok(&g, n, 0) {
        return Ok(None);
    }
    let (ginv, _) = invert_small(&g, n).expect("positive definite");
    Ok(Some(NodeData {
        a: -nl[0],
        x: (0..n).map(|a| -ginv[a * n]).collect(),
        g,
        k,
    }))
}

/// Induced data on `v = w(s, x)`. Errors if the graph is not spacelike at
/// some node, and with `NotProductForm` unless `w` depends on `s` only.
pub fn induce_from_ppwave(
    spec: &PpWaveSpec,
    grid: &Arc<Grid>,
    w: &Expr,
) -> Result<InducedPpWave, KdError> {
    let n = grid.dim();
    assert_eq!(n, spec.n, "grid dimension must match the pp-wave");
    let sym = spec.sym_metric();
    let dw: Vec<Expr> = (0..n).map(|a| coord_diff(w, a, 0)).collect();
    let ddw: Vec<Expr> = (0..n * n)
        .map(|c| coord_diff(&dw[c / n], c % n, 0))
        .collect();
    let mut nodes = Vec::with_capacity(grid.len());
    for p in 0..grid.len() {
        match induced_node(&sym, &dw, &ddw, grid, p)? {
            Some(nd) => nodes.push(nd),
            None => {
                return Err(KdError::NotSpacelike {
                    node: p,
                    coords: grid.coords(p),
                })
            }
        }
    }
    let g = Field::from_fn(grid, Kind::Sym2, 0, |p, out| out.copy_from_slice(&nodes[p].g));
    let k = Field::from_fn(grid, Kind::Sym2, 0, |p, out| out.copy_from_slice(&nodes[p].k));
    let phi = Field::from_fn(grid, Kind::Scalar, 0, |p, out| out[0] = nodes[p].g[0].sqrt());
    let a = Field::from_fn(grid, Kind::Scalar, 0, |p, out| out[0] = nodes[p].a);
    let x = Field::from_fn(grid, Kind::Vector, 0, |p, out| out.copy_from_slice(&nodes[p].x));
    let ids = InitialDataSet::from_fields(phi, g, k)?;
    Ok(InducedPpWave {
        ids,
        v: AmbientVector::new(a, x)?,
        w: w.clone(),
    })
}

/// `∂_v` restricted to the graph `v = w`, as an ambient vector on the
/// induced data: `a = −n_v`, `X^a = −g^{as}`.
pub fn ppwave_parallel_field(
    spec: &PpWaveSpec,
    grid: &Arc<Grid>,
    w: &Expr,
) -> Result<AmbientVector, KdError> {
    Ok(induce_from_ppwave(spec, grid, w)?.v)
}

/// Closed-form pp-wave Einstein tensor in the frames of a development built
/// from induced data. The development's point `(v', y)` is identified with
/// the pp-wave point `(v' + w(y), y)`, which pushes `∂_{v'}` to `∂_v` and
/// `∂_a` to `∂_a + ∂_a w ∂_v`.
pub fn ppwave_frame_table(
    spec: &PpWaveSpec,
    w: &Expr,
    kd: &KillingDevelopment,
) -> Result<Field, KdError> {
    let grid = kd.base().grid();
    let n = grid.dim();
    let d = n + 1;
    let sym = spec.sym_metric();
    let dw: Vec<Expr> = (0..n).map(|a| coord_diff(w, a, 0)).collect();
    let mut rows = Vec::with_capacity(grid.len());
    for p in 0..grid.len() {
        let pt = grid.point(p);
        let ein = sym.at(&pt)?.einstein();
        let wa: Vec<f64> = dw.iter().map(|e| e.eval(&pt)).collect::<Result<_, _>>()?;
        let frame: Vec<Vec<f64>> = kd
            .frame(p)?
            .into_iter()
            .map(|mut e| {
                e[0] += (0..n).map(|a| wa[a] * e[a + 1]).sum::<f64>();
                e
            })
            .collect();
        let mut out = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for m in 0..d {
                    for q in 0..d {
                        s += ein[m * d + q] * frame[a][m] * frame[b][q];
                    }
                }
                out[a * d + b] = s;
            }
        }
        rows.push(out);
    }
    Ok(Field::from_fn(grid, Kind::Tensor2, 1, |p, out| out.copy_from_slice(&rows[p])))
}
