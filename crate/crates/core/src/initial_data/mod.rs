//! Initial data sets `(M, g, k)` in product form `g = φ² ds² + g_s`, the
//! constraint map, the dominant energy condition, the ambient connection on
//! `R ⊕ TM`, leaf null geometry and parallel transport.
//!
//! Sign convention for `k`: the ambient connection satisfies
//! `∇̄_Y e₀ = k(Y, ·)♯`, i.e. `k(X, Y) = ḡ(∇̄_X e₀, Y)` for the future unit
//! normal `e₀` of `M` in any spacetime extension. The unit normal of the
//! leaves is always `ν = φ⁻¹ ∂_s`.

mod ambient;
mod leaf;
mod transport;

use std::sync::Arc;

use thiserror::Error;

use crate::exprlang::{Expr, ExprError};
use crate::geometry::{exterior_d, GeometryError, MetricField};
use crate::mesh::{sample, Field, Grid, Kind, MeshError};
use crate::symbolic::SymData;

pub use ambient::{
    ambient_connection, ambient_curvature, ambient_gradient, metricity_residual, AmbientCurvature,
    AmbientVector,
};
pub use leaf::{leaf_null_geometry, LeafData, NullGeometry};
pub use transport::{parallel_transport, PathError, Transport};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("lapse φ is not positive at node {node} (value {value})")]
    NonPositiveLapse { node: usize, value: f64 },
    #[error("metric is not in product form: |g(∂_s, ∂_{axis})| = {value:e} at node {node}")]
    NotProductForm { node: usize, axis: usize, value: f64 },
    #[error("expected {expected} components for the {what}, found {found}")]
    ComponentCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("transversality fails: a = {value} at node {node}")]
    NotTransversal { node: usize, value: f64 },
    #[error("parallel transport step size underflow on segment {segment}")]
    StepUnderflow { segment: usize },
    #[error("invalid path: {0}")]
    Path(#[from] PathError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// An initial data set on `[0, ℓ] × T^{n-1}` in product form.
#[derive(Debug, Clone)]
pub struct InitialDataSet {
    phi: Field,
    g: MetricField,
    k: Field,
    closed: Option<SymData>,
}

impl InitialDataSet {
    /// Assembles `g = φ² ds² + g_s` from closed forms: `leaf_metric` holds
    /// `(n-1)²` entries and `k` holds `n²` entries, both row-major.
    pub fn from_exprs(
        grid: &Arc<Grid>,
        phi: &Expr,
        leaf_metric: &[Expr],
        k: &[Expr],
    ) -> Result<InitialDataSet, DataError> {
        let n = grid.dim();
        let m = n - 1;
        if leaf_metric.len() != m * m {
            return Err(DataError::ComponentCount {
                what: "leaf metric",
                expected: m * m,
                found: leaf_metric.len(),
            });
        }
        if k.len() != n * n {
            return Err(DataError::ComponentCount {
                what: "second fundamental form k",
                expected: n * n,
                found: k.len(),
            });
        }
        let g = assemble_metric(phi, leaf_metric, n);
        let phi_f = sample(std::slice::from_ref(phi), grid, Kind::Scalar)?;
        let g_f = sample(&g, grid, Kind::Sym2)?;
        let k_f = sample(k, grid, Kind::Sym2)?;
        let mut ids = Self::from_fields(phi_f, g_f, k_f)?;
        ids.closed = Some(SymData::new(g, k.to_vec()));
        Ok(ids)
    }

    /// Wraps sampled fields. `g` must be in product form with `g_ss = φ²`.
    pub fn from_fields(phi: Field, g: Field, k: Field) -> Result<InitialDataSet, DataError> {
        if let Some((node, &value)) = phi.comp(0).iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(DataError::NonPositiveLapse { node, value });
        }
        let n = g.dim();
        let scale = g.max_abs().max(1.0);
        for axis in 1..n {
            let c = g.comp(g.idx2(0, axis));
            if let Some((node, &value)) =
                c.iter().enumerate().find(|(_, v)| v.abs() > 1e-12 * scale)
            {
                return Err(DataError::NotProductForm { node, axis, value });
            }
        }
        let g = MetricField::new(g)?;
        if k.kind() != Kind::Sym2 {
            return Err(GeometryError::Kind {
                expected: "symmetric 2-tensor",
                found: k.kind().name(),
            }
            .into());
        }
        k.check_finite()?;
        Ok(InitialDataSet {
            phi,
            g,
            k,
            closed: None,
        })
    }

    /// Attaches closed forms used by oracle cross-checks.
    pub fn with_closed_form(mut self, closed: SymData) -> InitialDataSet {
        self.closed = Some(closed);
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.g.grid()
    }

    pub fn n(&self) -> usize {
        self.g.dim()
    }

    pub fn phi(&self) -> &Field {
        &self.phi
    }

    pub fn metric(&self) -> &MetricField {
        &self.g
    }

    pub fn k(&self) -> &Field {
        &self.k
    }

    pub fn closed_form(&self) -> Option<&SymData> {
        self.closed.as_ref()
    }

    /// Metric of the leaf `F_τ`.
    pub fn leaf_metric(&self, tau: usize) -> Result<MetricField, DataError> {
        Ok(MetricField::new(self.g.g().leaf_slice(tau)?)?)
    }

    /// `ν = φ⁻¹ ∂_s`.
    pub fn nu(&self) -> Field {
        let n = self.n();
        Field::from_fn(self.grid(), Kind::Vector, 0, |p, out| {
            out[0] = 1.0 / self.phi.at(0, p);
            for o in out.iter_mut().take(n).skip(1) {
                *o = 0.0;
            }
        })
    }

    /// `ν♭ = φ ds`.
    pub fn nu_flat(&self) -> Field {
        Field::from_fn(self.grid(), Kind::Covector, 0, |p, out| {
            out[0] = self.phi.at(0, p);
        })
    }

    /// `k(ν, ·)` as a covector.
    pub fn k_nu(&self) -> Field {
        let n = self.n();
        Field::from_fn(self.grid(), Kind::Covector, 0, |p, out| {
            let f = 1.0 / self.phi.at(0, p);
            for (b, o) in out.iter_mut().enumerate().take(n) {
                *o = f * self.k.at2(0, b, p);
            }
        })
    }

    /// `ρ = ½(scal + tr(k)² − |k|²)`, `j = div k − d tr k`.
    pub fn constraints(&self) -> Result<Constraints, DataError> {
        let curv = self.g.riemann()?;
        let tr = self.g.trace_sym2(&self.k)?;
        let norm = self.g.dot_2tensors(&self.k, &self.k)?;
        let rho = Field::from_fn(self.grid(), Kind::Scalar, 0, |p, out| {
            let t = tr.at(0, p);
            out[0] = 0.5 * (curv.scal.at(0, p) + t * t - norm.at(0, p));
        });
        let j = self.g.div_sym2(&self.k)?.sub(&exterior_d(&tr)?)?;
        rho.check_finite()?;
        j.check_finite()?;
        Ok(Constraints { rho, j })
    }

    /// `ρ + j(ν)`, the marginality defect on the leaves.
    pub fn marginality(&self, c: &Constraints) -> Field {
        Field::from_fn(self.grid(), Kind::Scalar, 0, |p, out| {
            out[0] = c.rho.at(0, p) + c.j.at(0, p) / self.phi.at(0, p);
        })
    }
}

/// Row-major `n × n` entries of `φ² ds² + g_s`.
pub fn assemble_metric(phi: &Expr, leaf_metric: &[Expr], n: usize) -> Vec<Expr> {
    let m = n - 1;
    let mut g = vec![Expr::constant(0.0); n * n];
    g[0] = Expr::Pow(Box::new(phi.clone()), Box::new(Expr::constant(2.0)));
    for i in 0..m {
        for j in 0..m {
            g[(i + 1) * n + j + 1] = leaf_metric[i * m + j].clone();
        }
    }
    g
}

/// Energy density `ρ` and momentum density `j`.
#[derive(Debug, Clone)]
pub struct Constraints {
    pub rho: Field,
    pub j: Field,
}

/// `ρ − |j|_g` pointwise.
pub fn dec_margin(rho: &Field, j: &Field, g: &MetricField) -> Result<Field, DataError> {
    let jj = g.dot_covectors(j, j)?;
    Ok(Field::from_fn(rho.grid(), Kind::Scalar, 0, |p, out| {
        out[0] = rho.at(0, p) - jj.at(0, p).max(0.0).sqrt();
    }))
}

/// Default DEC tolerance `1e-8 (1 + max|ρ|)`.
pub fn default_dec_tol(rho: &Field) -> f64 {
    1e-8 * (1.0 + rho.max_abs())
}

/// True iff `margin ≥ −tol` at every node.
pub fn dec_holds(margin: &Field, tol: f64) -> bool {
    margin.comp(0).iter().all(|&m| m >= -tol)
}

#[cfg(test)]
mod tests;
