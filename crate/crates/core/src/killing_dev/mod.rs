//! Killing developments `(R × M, −U♭⊗dv − dv⊗U♭ + g)` of data carrying a
//! parallel lightlike ambient vector `V = u e₀ − U`, their Einstein tensor
//! in an adapted orthonormal frame, sampled dominant-energy checks, and the
//! pp-wave family as an end-to-end cross-check.
//!
//! Spacetime fields live on the grid of `M` with one leading analytic index
//! for `v`; nothing depends on `v`, so all `v`-derivatives vanish exactly.

mod frame;
mod ppwave;

use std::io::Write;

use log::warn;
use thiserror::Error;

use crate::geometry::{GeometryError, MetricField};
use crate::initial_data::{ambient_gradient, AmbientVector, DataError, InitialDataSet};
use crate::mesh::{write_csv, Field, Kind, MeshError};

pub use frame::{dec_check_frame, null_directions, orthonormal_frame, DecReport};
pub use ppwave::{
    induce_from_ppwave, ppwave_einstein_check, ppwave_frame_table, ppwave_parallel_field,
    InducedPpWave, PpWaveReport, PpWaveSpec,
};

#[derive(Debug, Error)]
pub enum KdError {
    #[error("graph v = w is not spacelike at node {node} (coordinates {coords:?})")]
    NotSpacelike { node: usize, coords: Vec<f64> },
    #[error("no orthonormal frame at node {0}")]
    Frame(usize),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Expr(#[from] crate::exprlang::ExprError),
}

/// The development of `ids` along `V`.
#[derive(Debug, Clone)]
pub struct KillingDevelopment {
    ids: InitialDataSet,
    u: Field,
    u_flat: Field,
    metric: MetricField,
}

/// Builds `ḡ = −U♭⊗dv − dv⊗U♭ + g` with `U = −X` for `V = (a, X)`.
/// Warns if `V` is not lightlike or not parallel within `tol`.
pub fn build_kd(
    ids: &InitialDataSet,
    v: &AmbientVector,
    tol: f64,
) -> Result<KillingDevelopment, KdError> {
    if let Some((node, &value)) = v.a.comp(0).iter().enumerate().find(|(_, a)| !(**a > 0.0)) {
        return Err(DataError::NotTransversal { node, value }.into());
    }
    let norm = v.norm_sq(ids.metric())?.max_abs();
    if norm > tol {
        warn!("V is not lightlike: max |ḡ(V,V)| = {norm:e}");
    }
    let par = ambient_gradient(ids, v)?
        .iter()
        .map(|w| w.max_abs())
        .fold(0.0, f64::max);
    if par > tol {
        warn!("V is not parallel: max |∇̄V| = {par:e}");
    }
    let u = v.x.scale(-1.0);
    let u_flat = ids.metric().lower(&u)?;
    let n = ids.n();
    let g = ids.metric().g();
    let gbar = Field::from_fn(ids.grid(), Kind::Sym2, 1, |p, out| {
        let d = n + 1;
        out[0] = 0.0;
        for a in 0..n {
            out[a + 1] = -u_flat.at(a, p);
            out[(a + 1) * d] = -u_flat.at(a, p);
            for b in 0..n {
                out[(a + 1) * d + b + 1] = g.at2(a, b, p);
            }
        }
    });
    let metric = MetricField::lorentzian(gbar)?;
    Ok(KillingDevelopment {
        ids: ids.clone(),
        u,
        u_flat,
        metric,
    })
}

impl KillingDevelopment {
    pub fn base(&self) -> &InitialDataSet {
        &self.ids
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn u(&self) -> &Field {
        &self.u
    }

    pub fn u_flat(&self) -> &Field {
        &self.u_flat
    }

    /// Max `|Γ^a_{b v}|`, i.e. `|∇̄ ∂_v|`.
    pub fn killing_parallel_residual(&self) -> f64 {
        parallel_residual(&self.metric)
    }

    /// Max `|ḡ|_{v=0} − g|` over the spatial block (zero by construction).
    pub fn slice_defect(&self) -> f64 {
        let n = self.ids.n();
        let g = self.ids.metric().g();
        let gb = self.metric.g();
        let mut worst = 0.0f64;
        for p in 0..g.nodes() {
            for a in 0..n {
                for b in 0..n {
                    worst = worst.max((gb.at2(a + 1, b + 1, p) - g.at2(a, b, p)).abs());
                }
            }
            worst = worst.max(gb.at2(0, 0, p).abs());
        }
        worst
    }

    /// Adapted frame `(e₀, e₁, …, e_{n−1}, ν)` at node `p`: `e₀` the future
    /// unit normal of `{v = const}`, `ν = −U/|U|`, the `e_i` by Gram–Schmidt
    /// from the leaf coordinate vectors. Row `A` holds `e_A`.
    pub fn frame(&self, p: usize) -> Result<Vec<Vec<f64>>, KdError> {
        let d = self.metric.dim();
        let g: Vec<f64> = (0..d * d).map(|c| self.metric.g().at(c, p)).collect();
        let inv = self.metric.inverse();
        // −ḡ^{μv}: ḡ(N, ∂_v) = −1 < 0, so N is future-directed.
        let normal: Vec<f64> = (0..d).map(|m| -inv.at2(m, 0, p)).collect();
        let mut nu = vec![0.0; d];
        for a in 0..d - 1 {
            nu[a + 1] = -self.u.at(a, p);
        }
        let mut seeds = vec![normal, nu];
        for i in 2..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            seeds.push(e);
        }
        let mut f = orthonormal_frame(&g, d, &seeds).ok_or(KdError::Frame(p))?;
        // (e₀, ν, e₁, …) → (e₀, e₁, …, ν)
        let nu = f.remove(1);
        f.push(nu);
        Ok(f)
    }
}

pub(crate) fn parallel_residual(metric: &MetricField) -> f64 {
    let d = metric.dim();
    let gam = metric.christoffels();
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            worst = worst.max(gam.comp((a * d + b) * d).iter().fold(0.0, |m, v| m.max(v.abs())));
        }
    }
    worst
}

/// Frame components of the Einstein and Ricci tensors of a development,
/// with the residuals of the expected `(ρ, −ρ, ρ)` pattern.
#[derive(Debug, Clone)]
pub struct EinsteinTable {
    /// `Ein(e_A, e_B)`; index 0 is `e₀`, the last index is `ν`.
    pub einstein: Field,
    pub ricci: Field,
    pub scal: Field,
    /// `ρ` of the base data.
    pub rho: Field,
    /// `max(1, max|R̄|)`.
    pub curvature_scale: f64,
    /// Max deviation from `Ein(e₀,e₀) = ρ`, `Ein(e₀,ν) = −ρ`,
    /// `Ein(ν,ν) = ρ` and zero elsewhere.
    pub pattern_defect: f64,
    /// Max of `|Ric(e_i, e_j)|` over leaf-tangent frame vectors.
    pub leaf_block: f64,
    /// Max of `|ric^{g_τ}|` over all leaves.
    pub leaf_ricci: f64,
    /// Max of `|Ric(e₀, e₀ + ν)|`.
    pub marginal_chain: f64,
    pub scal_max: f64,
    /// Max `|∇̄ ∂_v|`.
    pub killing_parallel: f64,
}

impl EinsteinTable {
    /// Frame table as CSV: node coordinates then `comp_AB` columns.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MeshError> {
        write_csv(&self.einstein, w)
    }

    /// Off-pattern residual relative to the curvature scale.
    pub fn relative_pattern_defect(&self) -> f64 {
        self.pattern_defect / self.curvature_scale
    }
}

/// Projects a spacetime covariant 2-tensor onto per-node frames.
pub(crate) fn frame_components(t: &Field, frames: &[Vec<Vec<f64>>]) -> Field {
    let d = t.dim();
    Field::from_fn(t.grid(), Kind::Tensor2, t.lead(), |p, out| {
        let f = &frames[p];
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for m in 0..d {
                    for q in 0..d {
                        s += t.at2(m, q, p) * f[a][m] * f[b][q];
                    }
                }
                out[a * d + b] = s;
            }
        }
    })
}

pub fn kd_einstein(kd: &KillingDevelopment) -> Result<EinsteinTable, KdError> {
    let curv = kd.metric.riemann()?;
    let ein = curv.einstein(&kd.metric);
    let grid = kd.ids.grid();
    let frames: Vec<Vec<Vec<f64>>> = (0..grid.len()).map(|p| kd.frame(p)).collect::<Result<_, _>>()?;
    let einstein = frame_components(&ein, &frames);
    let ricci = frame_components(&curv.ricci, &frames);
    let rho = kd.ids.constraints()?.rho;
    let d = kd.metric.dim();
    let nu = d - 1;
    let mut pattern = 0.0f64;
    let mut leaf_block = 0.0f64;
    let mut chain = 0.0f64;
    for p in 0..grid.len() {
        let r = rho.at(0, p);
        for a in 0..d {
            for b in 0..d {
                let want = match (a, b) {
                    (0, 0) => r,
                    (x, y) if x == nu && y == nu => r,
                    (0, x) | (x, 0) if x == nu => -r,
                    _ => 0.0,
                };
                pattern = pattern.max((einstein.at2(a, b, p) - want).abs());
                if (1..nu).contains(&a) && (1..nu).contains(&b) {
                    leaf_block = leaf_block.max(ricci.at2(a, b, p).abs());
                }
            }
        }
        chain = chain.max((ricci.at2(0, 0, p) + ricci.at2(0, nu, p)).abs());
    }
    let mut leaf_ricci = 0.0f64;
    for tau in 0..grid.interval_points() {
        let gl = kd.ids.leaf_metric(tau)?;
        leaf_ricci = leaf_ricci.max(gl.riemann()?.ricci.max_abs());
    }
    Ok(EinsteinTable {
        scal_max: curv.scal.max_abs(),
        curvature_scale: curv.scale(),
        einstein,
        ricci,
        scal: curv.scal,
        rho,
        pattern_defect: pattern,
        leaf_block,
        leaf_ricci,
        marginal_chain: chain,
        killing_parallel: kd.killing_parallel_residual(),
    })
}

/// Sampled DEC check of a development's Einstein table.
pub fn kd_dec_check(table: &EinsteinTable, samples: usize, tol: f64) -> DecReport {
    dec_check_frame(&table.einstein, samples, tol)
}

#[cfg(test)]
mod tests;
