//! Leafwise identities: `λ`, 2-for-3, closedness of `φλ` and the variation
//! of `θ⁺` along the foliation.

use log::warn;

use crate::geometry::{exterior_d, wedge_11, MetricField};
use crate::initial_data::{ambient_curvature, AmbientVector, Constraints, InitialDataSet, NullGeometry};
use crate::mesh::{partial_index, Field, Kind};

use super::{
    addrigid_residual, build_parallel_candidate, parallelism_residuals, RigidReport,
    RigidityError,
};

/// Fields on `M` shared by the per-leaf identities.
pub struct RigidityContext<'a> {
    ids: &'a InitialDataSet,
    constraints: Constraints,
    null: NullGeometry,
    lambda: Field,
    gdot: Field,
    dtheta: Field,
    leaf_parallel: Field,
    normal_parallel: Field,
    /// Leafwise `|∇̄_X V|` above which the hypotheses are reported as violated.
    pub hypothesis_tol: f64,
}

/// `j + λ + ½φ⁻¹(div ġ − d tr ġ)` on a leaf, plus `ġ + 2φk|_{TF}`.
#[derive(Debug, Clone)]
pub struct TwoForThree {
    pub residual: Field,
    pub intermediate: Field,
}

/// `d(φλ)` and `dλ + d log φ ∧ λ` on a leaf.
#[derive(Debug, Clone)]
pub struct Closedness {
    pub d_phi_lambda: Field,
    pub identity: Field,
}

/// `∂_s θ⁺` against both forms of the variation right-hand side.
#[derive(Debug, Clone)]
pub struct Variation {
    pub dtheta: Field,
    /// `(div Y − |Y|² + Q) φ` with `Y = X − grad log φ`.
    pub rhs: Field,
    /// `−Δφ + 2∂_X φ + (div X − |X|² + Q) φ`.
    pub rhs_unsimplified: Field,
    pub residual: Field,
}

impl Variation {
    pub fn unsimplified_residual(&self) -> Field {
        self.dtheta.sub(&self.rhs_unsimplified).expect("same leaf grid")
    }

    pub fn formula_difference(&self) -> Field {
        self.rhs.sub(&self.rhs_unsimplified).expect("same leaf grid")
    }
}

impl<'a> RigidityContext<'a> {
    pub fn new(ids: &'a InitialDataSet) -> Result<RigidityContext<'a>, RigidityError> {
        let constraints = ids.constraints()?;
        let null = NullGeometry::compute(ids)?;
        let lambda = lambda_on_m(ids)?;
        let gdot = partial_index(ids.metric().g(), 0)?;
        let dtheta = partial_index(&null.theta, 0)?;
        let v = build_parallel_candidate(ids)?;
        let (leaf_parallel, normal_parallel) = parallelism_residuals(ids, &v)?;
        Ok(RigidityContext {
            ids,
            constraints,
            null,
            lambda,
            gdot,
            dtheta,
            leaf_parallel,
            normal_parallel,
            hypothesis_tol: 1e-6,
        })
    }

    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    pub fn null_geometry(&self) -> &NullGeometry {
        &self.null
    }

    /// `λ` on `M` (zero `s` component).
    pub fn lambda(&self) -> &Field {
        &self.lambda
    }

    fn check_hypotheses(&self, tau: usize, what: &str) -> Result<(), RigidityError> {
        let worst = self.leaf_parallel.leaf_slice(tau)?.max_abs();
        if worst > self.hypothesis_tol {
            warn!("{what} on leaf {tau}: leafwise ∇̄V reaches {worst:e}, identity need not hold");
        }
        Ok(())
    }

    pub fn lambda_leaf(&self, tau: usize) -> Result<Field, RigidityError> {
        Ok(self.lambda.leaf_slice(tau)?)
    }

    pub fn two_for_three(&self, tau: usize) -> Result<TwoForThree, RigidityError> {
        self.check_hypotheses(tau, "2-for-3")?;
        let ids = self.ids;
        let gl = ids.leaf_metric(tau)?;
        let gdot = self.gdot.leaf_slice(tau)?;
        let phi = ids.phi().leaf_slice(tau)?;
        let k = ids.k().leaf_slice(tau)?;
        let div = gl.div_sym2(&gdot)?;
        let dtr = exterior_d(&gl.trace_sym2(&gdot)?)?;
        let half_inv_phi = phi.map(|p| 0.5 / p);
        let geo = div.sub(&dtr)?.mul_scalar(&half_inv_phi)?;
        let residual = self
            .constraints
            .j
            .leaf_slice(tau)?
            .add(&self.lambda_leaf(tau)?)?
            .add(&geo)?;
        let intermediate = gdot.add(&k.mul_scalar(&phi.scale(2.0))?)?;
        Ok(TwoForThree {
            residual,
            intermediate,
        })
    }

    pub fn closedness(&self, tau: usize) -> Result<Closedness, RigidityError> {
        self.check_hypotheses(tau, "closedness")?;
        let phi = self.ids.phi().leaf_slice(tau)?;
        let lam = self.lambda_leaf(tau)?;
        let d_phi_lambda = exterior_d(&lam.mul_scalar(&phi)?)?;
        let dlog = exterior_d(&phi.map(f64::ln))?;
        let identity = exterior_d(&lam)?.add(&wedge_11(&dlog, &lam))?;
        Ok(Closedness {
            d_phi_lambda,
            identity,
        })
    }

    pub fn variation(&self, tau: usize) -> Result<Variation, RigidityError> {
        let ids = self.ids;
        let gl = ids.leaf_metric(tau)?;
        let phi = ids.phi().leaf_slice(tau)?;
        let dtheta = self.dtheta.leaf_slice(tau)?;
        let x = gl.raise(&ids.k_nu().leaf_slice(tau)?)?;
        let q = self.q_leaf(&gl, tau)?;

        let logphi = phi.map(f64::ln);
        let y = x.sub(&gl.gradient(&logphi)?)?;
        let rhs = gl
            .div_vector(&y)?
            .sub(&gl.dot_vectors(&y, &y)?)?
            .add(&q)?
            .mul_scalar(&phi)?;

        let dphi = exterior_d(&phi)?;
        let x_phi = Field::from_fn(phi.grid(), Kind::Scalar, 0, |p, out| {
            out[0] = (0..gl.dim()).map(|i| x.at(i, p) * dphi.at(i, p)).sum();
        });
        let rhs_unsimplified = gl
            .laplacian(&phi)?
            .scale(-1.0)
            .add(&x_phi.scale(2.0))?
            .add(
                &gl.div_vector(&x)?
                    .sub(&gl.dot_vectors(&x, &x)?)?
                    .add(&q)?
                    .mul_scalar(&phi)?,
            )?;
        let residual = dtheta.sub(&rhs)?;
        Ok(Variation {
            dtheta,
            rhs,
            rhs_unsimplified,
            residual,
        })
    }

    /// `Q = ½ scal^F − (ρ + j(ν)) − ½|χ⁺|²` on a leaf.
    fn q_leaf(&self, gl: &MetricField, tau: usize) -> Result<Field, RigidityError> {
        let scal = gl.riemann()?.scal;
        let marg = self.ids.marginality(&self.constraints).leaf_slice(tau)?;
        let chi = self.null.chi.leaf_slice(tau)?;
        let chi2 = gl.dot_2tensors(&chi, &chi)?;
        Ok(scal.scale(0.5).sub(&marg)?.sub(&chi2.scale(0.5))?)
    }

    /// Every residual norm over all leaves.
    pub fn report(&self) -> Result<RigidReport, RigidityError> {
        let ids = self.ids;
        let grid = ids.grid();
        let ns = grid.interval_points();
        let mut t23 = Vec::with_capacity(ns);
        let mut t23i = Vec::with_capacity(ns);
        let mut closed = Vec::with_capacity(ns);
        let mut closed_id = Vec::with_capacity(ns);
        let mut var = Vec::with_capacity(ns);
        let mut var_x = Vec::with_capacity(ns);
        for tau in 0..ns {
            let t = self.two_for_three(tau)?;
            t23.push(t.residual);
            t23i.push(t.intermediate);
            let c = self.closedness(tau)?;
            closed.push(c.d_phi_lambda);
            closed_id.push(c.identity);
            let v = self.variation(tau)?;
            var_x.push(v.formula_difference());
            var.push(v.residual);
        }
        let lam_curv = lambda_from_curvature(ids)?;
        Ok(RigidReport {
            addrigid: addrigid_residual(ids)?.norms(),
            marginality: ids.marginality(&self.constraints).norms(),
            chi: self.null.chi.norms(),
            leaf_parallel: self.leaf_parallel.norms(),
            normal_parallel: self.normal_parallel.norms(),
            lambda: self.lambda.norms(),
            lambda_crosscheck: self.lambda.sub(&lam_curv)?.norms(),
            closedness: Field::from_leaves(grid, &closed)?.norms(),
            closedness_identity: Field::from_leaves(grid, &closed_id)?.norms(),
            two_for_three: Field::from_leaves(grid, &t23)?.norms(),
            two_for_three_intermediate: Field::from_leaves(grid, &t23i)?.norms(),
            variation: Field::from_leaves(grid, &var)?.norms(),
            variation_crosscheck: Field::from_leaves(grid, &var_x)?.norms(),
        })
    }
}

/// `λ_i = φ⁻² (∇_i k_ss − ∇_s k_is)` on `M`.
fn lambda_on_m(ids: &InitialDataSet) -> Result<Field, RigidityError> {
    let nk = ids.metric().covariant_derivative(ids.k())?;
    let phi = ids.phi();
    Ok(Field::from_fn(ids.grid(), Kind::Covector, 0, |p, out| {
        let f = phi.at(0, p).powi(-2);
        for i in 1..ids.n() {
            out[i] = f * (nk.at(nk.idx3(i, 0, 0), p) - nk.at(nk.idx3(0, i, 0), p));
        }
    }))
}

/// `λ` on `M` from the ambient curvature: `λ_i = (R̄(∂_i, ∂_s)(e₀ + ν))^s`.
pub fn lambda_from_curvature(ids: &InitialDataSet) -> Result<Field, RigidityError> {
    let grid = ids.grid();
    let v = AmbientVector::new(Field::constant(grid, 1.0), ids.nu())?;
    let r = ambient_curvature(ids, &v)?;
    let n = ids.n();
    Ok(Field::from_fn(grid, Kind::Covector, 0, |p, out| {
        for i in 1..n {
            out[i] = r.x.at((i * n) * n, p);
        }
    }))
}

/// `λ` on the leaf `F_τ`.
pub fn lambda_form(ids: &InitialDataSet, tau: usize) -> Result<Field, RigidityError> {
    Ok(lambda_on_m(ids)?.leaf_slice(tau)?)
}

pub fn two_for_three_residual(
    ids: &InitialDataSet,
    tau: usize,
) -> Result<TwoForThree, RigidityError> {
    RigidityContext::new(ids)?.two_for_three(tau)
}

pub fn closedness_residual(ids: &InitialDataSet, tau: usize) -> Result<Closedness, RigidityError> {
    RigidityContext::new(ids)?.closedness(tau)
}

pub fn variation_residual(ids: &InitialDataSet, tau: usize) -> Result<Variation, RigidityError> {
    RigidityContext::new(ids)?.variation(tau)
}
