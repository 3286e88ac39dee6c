//! Rigidity identities for product initial data: the lightlike parallel
//! candidate `V = φ⁻¹(e₀ + ν)`, the 1-form `λ`, the 2-for-3 identity, the
//! closedness of `φλ`, the leaf variation formula, and the Hodge/TT pipeline
//! on flat-torus leaves.

mod hodge;
mod identities;
pub mod random;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::exprlang::{periodicity_lint, Expr, ExprError, Var};
use crate::geometry::{exterior_d, GeometryError};
use crate::initial_data::{
    ambient_gradient, AmbientVector, Constraints, DataError, InitialDataSet, NullGeometry,
};
use crate::mesh::{Field, Grid, Kind, MeshError, Norms};

pub use hodge::{
    bilaplacian_bound, div_part_identity_residual, hodge_decompose, j_equation_residual,
    lambda_min, tt_split, HodgeSplit, SpectralBound, TTSplit,
};
pub use identities::{
    closedness_residual, lambda_form, lambda_from_curvature, two_for_three_residual,
    variation_residual, Closedness, RigidityContext, TwoForThree, Variation,
};

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error("{var} is not periodic: values at 0 and L differ by {mismatch:e}")]
    NonPeriodic { var: String, mismatch: f64 },
    #[error("leaf metric must have constant coefficients (variation {0:e})")]
    NonConstantLeafMetric(f64),
    #[error("operation needs a torus grid")]
    NotTorus,
    #[error("elliptic solve failed: right-hand side zero mode {0:e} exceeds tolerance")]
    SolverZeroMode(f64),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Data with `g = φ² ds² + δ`, `k|_{FF} = 0`, `k(X, ν) = ∂_X log φ` and
/// `k(ν, ν) = ∂_ν log φ`; in coordinates `k_ss = ∂_s φ`, `k_si = ∂_i φ`.
pub fn rigid_recipe(phi: &Expr, grid: &Arc<Grid>) -> Result<InitialDataSet, RigidityError> {
    let m = grid.dim() - 1;
    let identity: Vec<Expr> = (0..m * m)
        .map(|c| Expr::constant(if c / m == c % m { 1.0 } else { 0.0 }))
        .collect();
    rigid_recipe_with_leaf(phi, &identity, grid)
}

/// As [`rigid_recipe`] with a constant flat leaf metric.
pub fn rigid_recipe_with_leaf(
    phi: &Expr,
    leaf_metric: &[Expr],
    grid: &Arc<Grid>,
) -> Result<InitialDataSet, RigidityError> {
    let circ: Vec<f64> = grid.axes()[1..].iter().map(|a| a.length).collect();
    if let Some(w) = periodicity_lint(phi, grid.axis(0).length, &circ).into_iter().next() {
        return Err(RigidityError::NonPeriodic {
            var: w.var.name(),
            mismatch: w.mismatch,
        });
    }
    if leaf_metric.iter().any(|e| e.as_constant().is_none()) {
        return Err(RigidityError::NonConstantLeafMetric(f64::NAN));
    }
    let k = recipe_k(phi, grid.dim());
    Ok(InitialDataSet::from_exprs(grid, phi, leaf_metric, &k)?)
}

/// Row-major `k` entries of the rigid recipe.
pub fn recipe_k(phi: &Expr, n: usize) -> Vec<Expr> {
    let mut k = vec![Expr::constant(0.0); n * n];
    k[0] = phi.diff(Var::S);
    for i in 1..n {
        let d = phi.diff(Var::leaf(i).expect("leaf index"));
        k[i] = d.clone();
        k[i * n] = d;
    }
    k
}

/// `V = φ⁻¹(e₀ + ν)`, i.e. `a = φ⁻¹`, `X = φ⁻² ∂_s`.
pub fn build_parallel_candidate(ids: &InitialDataSet) -> Result<AmbientVector, RigidityError> {
    let phi = ids.phi();
    if let Some((node, &value)) = phi.comp(0).iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(DataError::NonPositiveLapse { node, value }.into());
    }
    let a = phi.map(|p| 1.0 / p);
    let x = Field::from_fn(ids.grid(), Kind::Vector, 0, |p, out| {
        out[0] = 1.0 / phi.at(0, p).powi(2);
    });
    Ok(AmbientVector::new(a, x)?)
}

/// Residual norms of every rigidity identity.
#[derive(Debug, Clone)]
pub struct RigidReport {
    /// `d log φ(X) − k(X, ν)` for leaf-tangent `X`.
    pub addrigid: Norms,
    /// `ρ + j(ν)`.
    pub marginality: Norms,
    /// `χ⁺` over all leaves.
    pub chi: Norms,
    /// `∇̄_X V` for leaf-tangent coordinate directions.
    pub leaf_parallel: Norms,
    /// `∇̄_ν V`.
    pub normal_parallel: Norms,
    pub lambda: Norms,
    /// Difference of the tensor and curvature formulas for `λ`.
    pub lambda_crosscheck: Norms,
    /// `d(φλ)` over all leaves.
    pub closedness: Norms,
    /// `dλ + d log φ ∧ λ` over all leaves.
    pub closedness_identity: Norms,
    pub two_for_three: Norms,
    /// `ġ + 2φk` on leaf-tangent pairs.
    pub two_for_three_intermediate: Norms,
    pub variation: Norms,
    /// Simplified minus unsimplified variation right-hand sides.
    pub variation_crosscheck: Norms,
}

impl RigidReport {
    pub fn compute(ids: &InitialDataSet) -> Result<RigidReport, RigidityError> {
        let ctx = RigidityContext::new(ids)?;
        ctx.report()
    }

    /// Flat `name.max` / `name.l2` map.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for (name, n) in self.entries() {
            m.insert(format!("{name}.max"), n.max);
            m.insert(format!("{name}.l2"), n.l2);
        }
        m
    }

    pub fn entries(&self) -> Vec<(&'static str, Norms)> {
        vec![
            ("addrigid", self.addrigid),
            ("marginality", self.marginality),
            ("chi", self.chi),
            ("leaf_parallel", self.leaf_parallel),
            ("normal_parallel", self.normal_parallel),
            ("lambda", self.lambda),
            ("lambda_crosscheck", self.lambda_crosscheck),
            ("closedness", self.closedness),
            ("closedness_identity", self.closedness_identity),
            ("two_for_three", self.two_for_three),
            ("two_for_three_intermediate", self.two_for_three_intermediate),
            ("variation", self.variation),
            ("variation_crosscheck", self.variation_crosscheck),
        ]
    }
}

/// `d log φ(∂_i) − k(∂_i, ν)` on leaf directions (zero `s` component).
pub fn addrigid_residual(ids: &InitialDataSet) -> Result<Field, RigidityError> {
    let logphi = ids.phi().map(f64::ln);
    let dl = exterior_d(&logphi)?;
    let kn = ids.k_nu();
    Ok(Field::from_fn(ids.grid(), Kind::Covector, 0, |p, out| {
        for i in 1..ids.n() {
            out[i] = dl.at(i, p) - kn.at(i, p);
        }
    }))
}

/// Pointwise magnitudes of `∇̄_X V` over leaf directions and of `∇̄_ν V`.
pub fn parallelism_residuals(
    ids: &InitialDataSet,
    v: &AmbientVector,
) -> Result<(Field, Field), RigidityError> {
    let grads = ambient_gradient(ids, v)?;
    let mags: Vec<Field> = grads.iter().map(|w| w.magnitude()).collect();
    let leaf = Field::from_fn(ids.grid(), Kind::Scalar, 0, |p, out| {
        out[0] = mags[1..].iter().map(|m| m.at(0, p).powi(2)).sum::<f64>().sqrt();
    });
    let normal = Field::from_fn(ids.grid(), Kind::Scalar, 0, |p, out| {
        out[0] = mags[0].at(0, p) / ids.phi().at(0, p);
    });
    Ok((leaf, normal))
}

/// Max of `‖j + ρ ν♭‖` (marginal DEC forces `j = −ρ ν♭`).
pub fn marginal_momentum_residual(ids: &InitialDataSet, c: &Constraints) -> Field {
    let nu = ids.nu_flat();
    Field::from_fn(ids.grid(), Kind::Covector, 0, |p, out| {
        for b in 0..ids.n() {
            out[b] = c.j.at(b, p) + c.rho.at(0, p) * nu.at(b, p);
        }
    })
}

/// `χ⁺` restricted to all leaves (for reports and dumps).
pub fn chi_field(ids: &InitialDataSet) -> Result<Field, RigidityError> {
    Ok(NullGeometry::compute(ids)?.chi)
}
