//! Fourier-space Hodge decomposition, the TT split of `ġ` and the spectral
//! lower bound for the Hodge Laplacian, all on flat tori with a constant
//! metric.

use num_complex::Complex64;

use crate::geometry::{codifferential, exterior_d, hodge_laplacian, l2_inner, MetricField};
use crate::mesh::{Field, Kind, Spectral};

use super::RigidityError;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Constant coefficients `(G, G⁻¹)` of a flat torus metric.
pub(crate) fn constant_metric(g: &MetricField) -> Result<(Vec<f64>, Vec<f64>), RigidityError> {
    if g.grid().has_interval() {
        return Err(RigidityError::NotTorus);
    }
    let d = g.dim();
    let mut variation = 0.0f64;
    for c in 0..d * d {
        let v = g.g().comp(c);
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        variation = variation.max(hi - lo);
    }
    if variation > 1e-12 * g.g().max_abs().max(1.0) {
        return Err(RigidityError::NonConstantLeafMetric(variation));
    }
    let big: Vec<f64> = (0..d * d).map(|c| g.g().at(c, 0)).collect();
    let inv: Vec<f64> = (0..d * d).map(|c| g.inverse().at(c, 0)).collect();
    Ok((big, inv))
}

fn spectral(g: &MetricField) -> Result<Spectral, RigidityError> {
    Spectral::new(g.grid()).map_err(|_| RigidityError::NotTorus)
}

fn norm_sq(xi: &[f64], inv: &[f64]) -> f64 {
    let d = xi.len();
    let mut s = 0.0;
    for a in 0..d {
        for b in 0..d {
            s += inv[a * d + b] * xi[a] * xi[b];
        }
    }
    s
}

/// Relative threshold below which an effective wavenumber counts as zero.
fn is_zero_mode(q: f64) -> bool {
    q <= 1e-14
}

/// `ω = df + α + δβ`: exact, harmonic (constant) and co-exact parts of a
/// 1-form, with the potential `f` of the exact part.
#[derive(Debug, Clone)]
pub struct HodgeSplit {
    pub exact: Field,
    pub harmonic: Field,
    pub coexact: Field,
    pub potential: Field,
}

impl HodgeSplit {
    /// Max of `|ω − (df + α + δβ)|`.
    pub fn reconstruction_defect(&self, omega: &Field) -> f64 {
        let sum = self
            .exact
            .add(&self.harmonic)
            .and_then(|s| s.add(&self.coexact))
            .expect("parts share a grid");
        sum.max_abs_diff(omega)
    }

    /// Largest absolute L² inner product between two different parts.
    pub fn orthogonality_defect(&self, g: &MetricField) -> Result<f64, RigidityError> {
        let parts = [&self.exact, &self.harmonic, &self.coexact];
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max(l2_inner(parts[i], parts[j], g)?.abs());
            }
        }
        Ok(worst)
    }

    /// Max of `|δ(coexact)|`, `|d(exact)|` and `|d(harmonic)| + |δ(harmonic)|`.
    pub fn closedness_defects(&self, g: &MetricField) -> Result<[f64; 3], RigidityError> {
        let exact = exterior_d(&self.exact)?.max_abs();
        let coexact = codifferential(&self.coexact, g)?.max_abs();
        let harm = exterior_d(&self.harmonic)?.max_abs()
            + codifferential(&self.harmonic, g)?.max_abs();
        Ok([exact, coexact, harm])
    }
}

/// Hodge decomposition of a 1-form on a flat torus. Modes whose effective
/// wavenumber vanishes (the constant mode and Nyquist-only modes) carry no
/// derivative information; the constant mode is harmonic and the others are
/// assigned to the co-exact part.
pub fn hodge_decompose(omega: &Field, g: &MetricField) -> Result<HodgeSplit, RigidityError> {
    if omega.kind() != Kind::Covector {
        return Err(crate::geometry::GeometryError::Kind {
            expected: "covector",
            found: omega.kind().name(),
        }
        .into());
    }
    let (_, inv) = constant_metric(g)?;
    let sp = spectral(g)?;
    let d = g.dim();
    let w_hat = sp.forward_field(omega);
    let zero = Complex64::new(0.0, 0.0);
    let mut exact = vec![vec![zero; sp.len()]; d];
    let mut harm = vec![vec![zero; sp.len()]; d];
    let mut coexact = vec![vec![zero; sp.len()]; d];
    let mut pot = vec![vec![zero; sp.len()]];
    for m in 0..sp.len() {
        if m == 0 {
            for b in 0..d {
                harm[b][0] = w_hat[b][0];
            }
            continue;
        }
        let xi = sp.xi(m);
        let q = norm_sq(&xi, &inv);
        if is_zero_mode(q) {
            for b in 0..d {
                coexact[b][m] = w_hat[b][m];
            }
            continue;
        }
        // s = ξ^a ω̂_a
        let mut s = zero;
        for a in 0..d {
            for b in 0..d {
                s += inv[a * d + b] * xi[a] * w_hat[b][m];
            }
        }
        pot[0][m] = -I * s / q;
        for b in 0..d {
            exact[b][m] = xi[b] * s / q;
            coexact[b][m] = w_hat[b][m] - exact[b][m];
        }
    }
    let grid = omega.grid();
    Ok(HodgeSplit {
        exact: sp.inverse_field(grid, Kind::Covector, &exact),
        harmonic: sp.inverse_field(grid, Kind::Covector, &harm),
        coexact: sp.inverse_field(grid, Kind::Covector, &coexact),
        potential: sp.inverse_field(grid, Kind::Scalar, &pot),
    })
}

/// `div(L_W g) − d tr(L_W g) + δ d W♭`, which vanishes on flat tori.
pub fn div_part_identity_residual(w: &Field, g: &MetricField) -> Result<Field, RigidityError> {
    let l = g.lie_metric(w)?;
    let lhs = j_equation_residual(&l, g)?;
    let ddw = codifferential(&exterior_d(&g.lower(w)?)?, g)?;
    Ok(lhs.add(&ddw)?)
}

/// `div T − d tr T` for a symmetric 2-tensor.
pub fn j_equation_residual(t: &Field, g: &MetricField) -> Result<Field, RigidityError> {
    let div = g.div_sym2(t)?;
    let dtr = exterior_d(&g.trace_sym2(t)?)?;
    Ok(div.sub(&dtr)?)
}

/// `ġ = c g + L_W g + h`.
#[derive(Debug, Clone)]
pub struct TTSplit {
    pub c: f64,
    pub w: Field,
    pub lie: Field,
    pub h: Field,
}

impl TTSplit {
    /// Max of `|div h|` and of `|tr h|`.
    pub fn tt_defects(&self, g: &MetricField) -> Result<(f64, f64), RigidityError> {
        Ok((g.div_sym2(&self.h)?.max_abs(), g.trace_sym2(&self.h)?.max_abs()))
    }
}

/// Splits a symmetric 2-tensor on a flat torus. `c` is fixed by the mean
/// trace, `W` solves `div(L_W g) = div(ġ − c g)` with zero mean, and `h` is
/// the remainder. `h` is transverse-traceless exactly when `ġ` lies in
/// `R g + im L + TT`.
pub fn tt_split(gdot: &Field, g: &MetricField, tol: f64) -> Result<TTSplit, RigidityError> {
    let (big, inv) = constant_metric(g)?;
    let sp = spectral(g)?;
    let d = g.dim();
    let grid = g.grid();
    let tr = g.trace_sym2(gdot)?;
    let c = tr.comp(0).iter().sum::<f64>() / (tr.nodes() as f64 * d as f64);
    let gc = Field::from_fn(grid, Kind::Sym2, 0, |_, out| {
        for (o, b) in out.iter_mut().zip(&big) {
            *o = c * b;
        }
    });
    let rest = gdot.sub(&gc)?;
    let r = g.div_sym2(&rest)?;
    let r_hat = sp.forward_field(&r);
    let zero_mode = (0..d).map(|b| r_hat[b][0].norm()).fold(0.0, f64::max) / sp.len() as f64;
    if zero_mode > tol * (1.0 + r.max_abs()) {
        return Err(RigidityError::SolverZeroMode(zero_mode));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut w_hat = vec![vec![zero; sp.len()]; d];
    for m in 1..sp.len() {
        let xi = sp.xi(m);
        let q = norm_sq(&xi, &inv);
        if is_zero_mode(q) {
            continue;
        }
        // W = −A⁻¹ r̂, A = |ξ|² G + ξ ξᵀ.
        let ginv_r: Vec<Complex64> = (0..d)
            .map(|a| (0..d).map(|b| inv[a * d + b] * r_hat[b][m]).sum())
            .collect();
        let ginv_xi: Vec<f64> = (0..d)
            .map(|a| (0..d).map(|b| inv[a * d + b] * xi[b]).sum())
            .collect();
        let xi_ginv_r: Complex64 = (0..d).map(|a| xi[a] * ginv_r[a]).sum();
        for a in 0..d {
            w_hat[a][m] = -(ginv_r[a] - ginv_xi[a] * xi_ginv_r / (2.0 * q)) / q;
        }
    }
    let w = sp.inverse_field(grid, Kind::Vector, &w_hat);
    let lie = g.lie_metric(&w)?;
    let h = rest.sub(&lie)?;
    Ok(TTSplit { c, w, lie, h })
}

/// Smallest nonzero eigenvalue `min |ξ|²_g` of the Hodge Laplacian on the
/// torus grid of `g`.
pub fn lambda_min(g: &MetricField) -> Result<f64, RigidityError> {
    let (_, inv) = constant_metric(g)?;
    let sp = spectral(g)?;
    Ok((1..sp.len())
        .map(|m| norm_sq(&sp.xi(m), &inv))
        .filter(|&q| !is_zero_mode(q))
        .fold(f64::INFINITY, f64::min))
}

/// `‖△²ω‖ ≥ λ_min² ‖ω‖` for `ω` orthogonal to the kernel.
#[derive(Debug, Clone, Copy)]
pub struct SpectralBound {
    pub lambda_min: f64,
    pub norm: f64,
    pub bilaplacian_norm: f64,
}

impl SpectralBound {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.bilaplacian_norm >= self.lambda_min.powi(2) * self.norm * (1.0 - rel_tol)
    }

    /// `‖△²ω‖ / (λ_min² ‖ω‖)`, at least one when the bound holds.
    pub fn ratio(&self) -> f64 {
        self.bilaplacian_norm / (self.lambda_min.powi(2) * self.norm)
    }
}

/// Projects `ω` off the kernel of `△` (modes with zero effective
/// wavenumber) and measures both sides of the bound.
pub fn bilaplacian_bound(omega: &Field, g: &MetricField) -> Result<SpectralBound, RigidityError> {
    let (_, inv) = constant_metric(g)?;
    let sp = spectral(g)?;
    let mut spec = sp.forward_field(omega);
    for m in 0..sp.len() {
        if m == 0 || is_zero_mode(norm_sq(&sp.xi(m), &inv)) {
            for s in spec.iter_mut() {
                s[m] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let w = sp.inverse_field(omega.grid(), omega.kind(), &spec);
    let lap2 = hodge_laplacian(&hodge_laplacian(&w, g)?, g)?;
    Ok(SpectralBound {
        lambda_min: lambda_min(g)?,
        norm: l2_inner(&w, &w, g)?.sqrt(),
        bilaplacian_norm: l2_inner(&lap2, &lap2, g)?.sqrt(),
    })
}
