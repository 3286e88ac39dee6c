//! Null geometry of the leaves `F_τ = {s = s_τ}`:
//! `χ⁺ = (∇ν)♭|_{TF⊗TF} + k|_{TF⊗TF}` and `θ⁺ = tr^{g_τ} χ⁺`.

use crate::geometry::MetricField;
use crate::mesh::{Field, Kind};

use super::{DataError, InitialDataSet};

/// `χ⁺` and `θ⁺` on all of `M`; `χ⁺` has zero `s` components.
#[derive(Debug, Clone)]
pub struct NullGeometry {
    pub chi: Field,
    pub theta: Field,
}

impl NullGeometry {
    pub fn compute(ids: &InitialDataSet) -> Result<NullGeometry, DataError> {
        let g = ids.metric();
        let n = ids.n();
        let nabla_nu = g.covariant_derivative(&ids.nu())?;
        let k = ids.k();
        let gm = g.g();
        let chi = Field::from_fn(ids.grid(), Kind::Sym2, 0, |p, out| {
            for i in 1..n {
                for j in i..n {
                    // g(∇_i ν, ∂_j), symmetrized
                    let mut s = 0.0;
                    for b in 0..n {
                        s += 0.5
                            * (gm.at2(j, b, p) * nabla_nu.at2(i, b, p)
                                + gm.at2(i, b, p) * nabla_nu.at2(j, b, p));
                    }
                    let v = s + k.at2(i, j, p);
                    out[i * n + j] = v;
                    out[j * n + i] = v;
                }
            }
        });
        // Product form: the leaf block of g⁻¹ is the inverse leaf metric.
        let theta = g.trace2(&chi);
        Ok(NullGeometry { chi, theta })
    }
}

/// Restriction of the null geometry to one leaf.
#[derive(Debug, Clone)]
pub struct LeafData {
    pub tau: usize,
    pub metric: MetricField,
    /// Lapse on the leaf; `ν = φ⁻¹ ∂_s`.
    pub phi: Field,
    pub chi: Field,
    pub theta: Field,
    /// Max of `||ν|_g − 1|` on the leaf.
    pub nu_norm_defect: f64,
}

impl LeafData {
    /// Max of `|θ⁺ − tr^{g_τ} χ⁺|`.
    pub fn trace_defect(&self) -> f64 {
        let tr = self.metric.trace2(&self.chi);
        tr.max_abs_diff(&self.theta)
    }
}

pub fn leaf_null_geometry(ids: &InitialDataSet, tau: usize) -> Result<LeafData, DataError> {
    let ng = NullGeometry::compute(ids)?;
    leaf_from(ids, &ng, tau)
}

pub(crate) fn leaf_from(
    ids: &InitialDataSet,
    ng: &NullGeometry,
    tau: usize,
) -> Result<LeafData, DataError> {
    let metric = ids.leaf_metric(tau)?;
    let phi = ids.phi().leaf_slice(tau)?;
    let gss = ids.metric().g().component(0).leaf_slice(tau)?;
    let nu_norm_defect = (0..phi.nodes())
        .map(|p| ((gss.at(0, p)).sqrt() / phi.at(0, p) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(LeafData {
        tau,
        metric,
        phi,
        chi: ng.chi.leaf_slice(tau)?,
        theta: ng.theta.leaf_slice(tau)?,
        nu_norm_defect,
    })
}
