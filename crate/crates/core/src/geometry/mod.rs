//! Coordinate tensor calculus on grids: Christoffel symbols, covariant
//! derivatives, curvature, divergence and trace, Lie derivative of the metric,
//! and the exterior calculus of forms.
//!
//! Conventions: `Γ^a_bc` is stored as component `(a, b, c)`; the covariant
//! derivative puts the derivative index first, `(∇T)_{a…} = ∇_a T_…`; for a
//! vector `X` the result component `(a, b)` is `∇_a X^b`. Curvature follows
//! `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z` with
//! `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`,
//! `R_abcd = g_ae R^e_bcd`, Ricci `R_bd = R^a_bad`.

mod forms;
mod linalg;

use std::sync::Arc;

use thiserror::Error;

use crate::mesh::{partial_index, Field, Grid, Kind, MeshError};

pub use forms::{codifferential, exterior_d, hodge_laplacian, l2_inner, wedge_11};
pub use linalg::{cholesky_ok, invert_small, is_lorentzian, symmetric_eigenvalues};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("metric is not positive definite at node {node} (coordinates {coords:?})")]
    NotPositiveDefinite { node: usize, coords: Vec<f64> },
    #[error("metric is not Lorentzian at node {node} (coordinates {coords:?})")]
    NotLorentzian { node: usize, coords: Vec<f64> },
    #[error("expected {expected}, got {found}")]
    Kind { expected: &'static str, found: &'static str },
    #[error("form rank {0} not supported")]
    Rank(usize),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// A metric with cached inverse, volume density and Christoffel symbols.
#[derive(Debug, Clone)]
pub struct MetricField {
    g: Field,
    inv: Field,
    density: Field,
    gamma: Field,
}

impl MetricField {
    /// Riemannian metric; fails unless every node passes a Cholesky test.
    pub fn new(g: Field) -> Result<MetricField, GeometryError> {
        Self::build(g, false)
    }

    /// Lorentzian metric of signature `(−,+,…,+)`, checked by counting
    /// eigenvalue signs at every node.
    pub fn lorentzian(g: Field) -> Result<MetricField, GeometryError> {
        Self::build(g, true)
    }

    fn build(g: Field, lorentzian: bool) -> Result<MetricField, GeometryError> {
        if g.kind() != Kind::Sym2 {
            return Err(GeometryError::Kind {
                expected: "symmetric 2-tensor",
                found: g.kind().name(),
            });
        }
        g.check_finite()?;
        let d = g.dim();
        let lead = g.lead();
        let grid = Arc::clone(g.grid());
        let mut inv = Field::zeros_ext(&grid, Kind::Sym2, lead);
        let mut density = Field::zeros(&grid, Kind::Scalar);
        let mut m = vec![0.0; d * d];
        for p in 0..grid.len() {
            for (c, slot) in m.iter_mut().enumerate() {
                *slot = g.at(c, p);
            }

            let bad = |p: usize| {
                if lorentzian {
                    GeometryError::NotLorentzian {
                        node: p,
                        coords: grid.coords(p),
                    }
                } else {
                    GeometryError::NotPositiveDefinite {
                        node: p,
                        coords: grid.coords(p),
                    }
                }
            };
            let ok = if lorentzian {
                is_lorentzian(&m, d)
            } else {
                cholesky_ok(&m, d, 0)
            };
            if !ok {
                return Err(bad(p));
            }
            let (mi, det) = invert_small(&m, d).ok_or_else(|| bad(p))?;
            if lorentzian && det >= 0.0 {
                return Err(bad(p));
            }
            for (c, v) in mi.iter().enumerate() {
                inv.set(c, p, *v);
            }
            density.set(0, p, det.abs().sqrt());
        }
        // Symmetrize the numerical inverse exactly.
        for a in 0..d {
            for b in a + 1..d {
                for p in 0..grid.len() {
                    let v = 0.5 * (inv.at2(a, b, p) + inv.at2(b, a, p));
                    inv.set(a * d + b, p, v);
                    inv.set(b * d + a, p, v);
                }
            }
        }
        let gamma = christoffels_of(&g, &inv)?;
        Ok(MetricField {
            g,
            inv,
            density,
            gamma,
        })
    }

    pub fn g(&self) -> &Field {
        &self.g
    }

    pub fn inverse(&self) -> &Field {
        &self.inv
    }

    /// `sqrt |det g|` in coordinates.
    pub fn density(&self) -> &Field {
        &self.density
    }

    pub fn christoffels(&self) -> &Field {
        &self.gamma
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.g.grid()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn lead(&self) -> usize {
        self.g.lead()
    }

    /// Max of `|g^ab g_bc − δ^a_c|` over all nodes.
    pub fn inverse_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for p in 0..self.grid().len() {
            for a in 0..d {
                for c in 0..d {
                    let mut s = 0.0;
                    for b in 0..d {
                        s += self.inv.at2(a, b, p) * self.g.at2(b, c, p);
                    }
                    let want = if a == c { 1.0 } else { 0.0 };
                    worst = worst.max((s - want).abs());
                }
            }
        }
        worst
    }

    fn check_compatible(&self, f: &Field) -> Result<(), GeometryError> {
        if !f.grid().same_as(self.grid()) {
            return Err(MeshError::GridMismatch.into());
        }
        if f.rank() > 0 && (f.dim() != self.dim() || f.lead() != self.lead()) {
            return Err(MeshError::KindMismatch("index dimension differs from metric".into()).into());
        }
        Ok(())
    }

    /// `X^a -> g_ab X^b`.
    pub fn lower(&self, x: &Field) -> Result<Field, GeometryError> {
        self.expect(x, Kind::Vector)?;
        Ok(self.contract1(x, &self.g, Kind::Covector))
    }

    /// `ω_a -> g^ab ω_b`.
    pub fn raise(&self, w: &Field) -> Result<Field, GeometryError> {
        self.expect(w, Kind::Covector)?;
        Ok(self.contract1(w, &self.inv, Kind::Vector))
    }

    fn contract1(&self, x: &Field, m: &Field, kind: Kind) -> Field {
        let d = self.dim();
        Field::from_fn(self.grid(), kind, self.lead(), |p, out| {
            for a in 0..d {
                out[a] = (0..d).map(|b| m.at2(a, b, p) * x.at(b, p)).sum();
            }
        })
    }

    fn expect(&self, f: &Field, kind: Kind) -> Result<(), GeometryError> {
        self.check_compatible(f)?;
        if f.kind() != kind {
            return Err(GeometryError::Kind {
                expected: kind.name(),
                found: f.kind().name(),
            });
        }
        Ok(())
    }

    /// Pointwise `g(X, Y)` for vectors.
    pub fn dot_vectors(&self, x: &Field, y: &Field) -> Result<Field, GeometryError> {
        self.expect(x, Kind::Vector)?;
        self.expect(y, Kind::Vector)?;
        Ok(self.bilinear(x, y, &self.g))
    }

    /// Pointwise `g^{ab} ω_a η_b` for covectors.
    pub fn dot_covectors(&self, x: &Field, y: &Field) -> Result<Field, GeometryError> {
        self.expect(x, Kind::Covector)?;
        self.expect(y, Kind::Covector)?;
        Ok(self.bilinear(x, y, &self.inv))
    }

    fn bilinear(&self, x: &Field, y: &Field, m: &Field) -> Field {
        let d = self.dim();
        Field::from_fn(self.grid(), Kind::Scalar, 0, |p, out| {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += m.at2(a, b, p) * x.at(a, p) * y.at(b, p);
                }
            }
            out[0] = s;
        })
    }

    /// Full contraction `g^{ac} g^{bd} S_ab T_cd` of two covariant 2-tensors.
    pub fn dot_2tensors(&self, s: &Field, t: &Field) -> Result<Field, GeometryError> {
        self.check_compatible(s)?;
        self.check_compatible(t)?;
        if s.rank() != 2 || t.rank() != 2 {
            return Err(GeometryError::Kind {
                expected: "2-tensor",
                found: if s.rank() != 2 { s.kind().name() } else { t.kind().name() },
            });
        }
        let d = self.dim();
        Ok(Field::from_fn(self.grid(), Kind::Scalar, 0, |p, out| {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    // (g^{-1} S g^{-1})^{ab}
                    let mut up = 0.0;
                    for c in 0..d {
                        let gac = self.inv.at2(a, c, p);
                        if gac == 0.0 {
                            continue;
                        }
                        for e in 0..d {
                            up += gac * self.inv.at2(b, e, p) * s.at2(c, e, p);
                        }
                    }
                    acc += up * t.at2(a, b, p);
                }
            }
            out[0] = acc;
        }))
    }

    /// Gradient vector `g^{ab} ∂_b f`.
    pub fn gradient(&self, f: &Field) -> Result<Field, GeometryError> {
        self.expect(f, Kind::Scalar)?;
        let df = exterior_d_scalar(f, self.lead())?;
        self.raise(&df)
    }

    /// Divergence `∇_a X^a = ∂_a X^a + Γ^a_ab X^b`.
    pub fn div_vector(&self, x: &Field) -> Result<Field, GeometryError> {
        self.expect(x, Kind::Vector)?;
        let nx = self.covariant_derivative(x)?;
        Ok(trace_mixed(&nx))
    }

    /// Analyst's Laplacian `div grad f` (non-positive spectrum).
    pub fn laplacian(&self, f: &Field) -> Result<Field, GeometryError> {
        self.div_vector(&self.gradient(f)?)
    }

    /// Covariant derivative of a scalar, vector, covector or covariant
    /// 2-tensor. Output rank is one higher with the derivative index first.
    pub fn covariant_derivative(&self, t: &Field) -> Result<Field, GeometryError> {
        self.check_compatible(t)?;
        let d = self.dim();
        let lead = self.lead();
        let grid = self.grid();
        let (out_kind, contravariant) = match t.kind() {
            Kind::Scalar => (Kind::Covector, false),
            Kind::Vector => (Kind::Tensor2, true),
            Kind::Covector => (Kind::Tensor2, false),
            Kind::Sym2 | Kind::Tensor2 | Kind::TwoForm => (Kind::Tensor3, false),
            other => {
                return Err(GeometryError::Kind {
                    expected: "tensor of rank at most 2",
                    found: other.name(),
                })
            }
        };
        let r = t.rank();
        let rank_dim = d.pow(r as u32);
        let partials: Vec<Field> = (0..d)
            .map(|a| partial_index(t, a))
            .collect::<Result<_, _>>()?;
        let mut out = Field::zeros_ext(grid, out_kind, lead);
        let gam = &self.gamma;
        let n = grid.len();
        let mut digits = vec![0usize; r];
        for a in 0..d {
            for c in 0..rank_dim {
                // Decompose c into tensor indices.
                let mut rem = c;
                for k in (0..r).rev() {
                    digits[k] = rem % d;
                    rem /= d;
                }
                let oc = a * rank_dim + c;
                let base = partials[a].comp(c);
                let mut acc: Vec<f64> = base.to_vec();
                for k in 0..r {
                    let place = d.pow((r - 1 - k) as u32);
                    let ik = digits[k];
                    for m in 0..d {
                        let cm = c - ik * place + m * place;
                        let tm = t.comp(cm);
                        if contravariant {
                            // + Γ^{i_k}_{a m} T^m
                            let gi = gam.idx3(ik, a, m);
                            let gc = gam.comp(gi);
                            for p in 0..n {
                                acc[p] += gc[p] * tm[p];
                            }
                        } else {
                            // − Γ^m_{a i_k} T_{..m..}
                            let gi = gam.idx3(m, a, ik);
                            let gc = gam.comp(gi);
                            for p in 0..n {
                                acc[p] -= gc[p] * tm[p];
                            }
                        }
                    }
                }
                out.comp_mut(oc).copy_from_slice(&acc);
            }
        }
        Ok(out)
    }

    /// Riemann, Ricci and scalar curvature.
    ///
    /// Uses the lowered form
    /// `R_abcd = ½(∂_b∂_c g_ad + ∂_a∂_d g_bc − ∂_a∂_c g_bd − ∂_b∂_d g_ac)
    ///         + g_ef (Γ^e_bc Γ^f_ad − Γ^e_bd Γ^f_ac)`,
    /// equivalent to the mixed formula in the module docs. Discrete partials
    /// along different axes commute, so the pair symmetries and the first
    /// Bianchi identity hold to round-off at any resolution.
    pub fn riemann(&self) -> Result<CurvatureBundle, GeometryError> {
        let d = self.dim();
        let lead = self.lead();
        let grid = self.grid();
        let gam = &self.gamma;
        let dg: Vec<Field> = (0..d)
            .map(|e| partial_index(&self.g, e))
            .collect::<Result<_, _>>()?;
        // ddg[e * d + f] = ∂_f ∂_e g, filled for f >= e and mirrored.
        let mut ddg: Vec<Option<Field>> = vec![None; d * d];
        for e in 0..d {
            for f in e..d {
                ddg[e * d + f] = Some(partial_index(&dg[e], f)?);
            }
        }
        let dd = |e: usize, f: usize| ddg[e.min(f) * d + e.max(f)].as_ref().expect("filled");
        let g = &self.g;
        let down = Field::from_fn(grid, Kind::Tensor4, lead, |p, out| {
            let gm = |a: usize, b: usize, c: usize| gam.at((a * d + b) * d + c, p);
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            let mut v = 0.5
                                * (dd(b, c).at2(a, e, p) + dd(a, e).at2(b, c, p)
                                    - dd(a, c).at2(b, e, p)
                                    - dd(b, e).at2(a, c, p));
                            for m in 0..d {
                                for q in 0..d {
                                    let gmq = g.at2(m, q, p);
                                    if gmq != 0.0 {
                                        v += gmq * (gm(m, b, c) * gm(q, a, e) - gm(m, b, e) * gm(q, a, c));
                                    }
                                }
                            }
                            out[((a * d + b) * d + c) * d + e] = v;
                        }
                    }
                }
            }
        });
        let inv = &self.inv;
        let ricci = Field::from_fn(grid, Kind::Sym2, lead, |p, out| {
            for b in 0..d {
                for e in b..d {
                    let mut s = 0.0;
                    for a in 0..d {
                        for c in 0..d {
                            s += inv.at2(a, c, p) * down.at(((a * d + b) * d + c) * d + e, p);
                        }
                    }
                    out[b * d + e] = s;
                    out[e * d + b] = s;
                }
            }
        });
        let scal = self.trace2(&ricci);
        Ok(CurvatureBundle {
            riemann: down,
            ricci,
            scal,
        })
    }

    /// `(L_W g)_ab = ∇_a W_b + ∇_b W_a`.
    pub fn lie_metric(&self, w: &Field) -> Result<Field, GeometryError> {
        let wf = self.lower(w)?;
        let nw = self.covariant_derivative(&wf)?;
        Ok(symmetrize(&nw))
    }

    /// `(div T)_b = g^{ac} ∇_a T_cb`.
    pub fn div_sym2(&self, t: &Field) -> Result<Field, GeometryError> {
        self.expect_sym(t)?;
        let nt = self.covariant_derivative(t)?;
        let d = self.dim();
        Ok(Field::from_fn(self.grid(), Kind::Covector, self.lead(), |p, out| {
            for b in 0..d {
                let mut s = 0.0;
                for a in 0..d {
                    for c in 0..d {
                        s += self.inv.at2(a, c, p) * nt.at(nt.idx3(a, c, b), p);
                    }
                }
                out[b] = s;
            }
        }))
    }

    /// `tr T = g^{ab} T_ab`.
    pub fn trace_sym2(&self, t: &Field) -> Result<Field, GeometryError> {
        self.expect_sym(t)?;
        Ok(self.trace2(t))
    }

    /// Trace of any covariant 2-tensor.
    pub fn trace2(&self, t: &Field) -> Field {
        let d = self.dim();
        Field::from_fn(self.grid(), Kind::Scalar, 0, |p, out| {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += self.inv.at2(a, b, p) * t.at2(a, b, p);
                }
            }
            out[0] = s;
        })
    }

    fn expect_sym(&self, t: &Field) -> Result<(), GeometryError> {
        self.check_compatible(t)?;
        if t.kind() != Kind::Sym2 {
            return Err(GeometryError::Kind {
                expected: "symmetric 2-tensor",
                found: t.kind().name(),
            });
        }
        Ok(())
    }

    /// Max over nodes of `|∇g|`, the metric-compatibility residual.
    pub fn compatibility_residual(&self) -> Result<f64, GeometryError> {
        Ok(self.covariant_derivative(&self.g)?.max_abs())
    }
}

fn christoffels_of(g: &Field, inv: &Field) -> Result<Field, GeometryError> {
    let d = g.dim();
    let grid = g.grid();
    let dg: Vec<Field> = (0..d)
        .map(|e| partial_index(g, e))
        .collect::<Result<_, _>>()?;
    let mut low = vec![0.0; d * d * d];
    Ok(Field::from_fn(grid, Kind::Tensor3, g.lead(), |p, out| {
        // Γ_dbc = ½(∂_b g_dc + ∂_c g_bd − ∂_d g_bc)
        for e in 0..d {
            for b in 0..d {
                for c in b..d {
                    let v = 0.5
                        * (dg[b].at2(e, c, p) + dg[c].at2(b, e, p) - dg[e].at2(b, c, p));
                    low[(e * d + b) * d + c] = v;
                    low[(e * d + c) * d + b] = v;
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut s = 0.0;
                    for e in 0..d {
                        s += inv.at2(a, e, p) * low[(e * d + b) * d + c];
                    }
                    out[(a * d + b) * d + c] = s;
                }
            }
        }
    }))
}

fn exterior_d_scalar(f: &Field, lead: usize) -> Result<Field, GeometryError> {
    let grid = f.grid();
    let d = grid.dim() + lead;
    let mut out = Field::zeros_ext(grid, Kind::Covector, lead);
    let mut fx = f.clone();
    // Give the scalar the same lead so partial_index maps indices correctly.
    if lead > 0 {
        fx = Field::from_fn(grid, Kind::Scalar, lead, |p, o| o[0] = f.at(0, p));
    }
    for a in 0..d {
        let da = partial_index(&fx, a)?;
        out.comp_mut(a).copy_from_slice(da.comp(0));
    }
    Ok(out)
}

/// `(∇X)_a^a` of a mixed rank-2 field.
fn trace_mixed(t: &Field) -> Field {
    let d = t.dim();
    Field::from_fn(t.grid(), Kind::Scalar, 0, |p, out| {
        out[0] = (0..d).map(|a| t.at2(a, a, p)).sum();
    })
}

/// `T_ab + T_ba` as a symmetric field.
pub fn symmetrize(t: &Field) -> Field {
    let d = t.dim();
    Field::from_fn(t.grid(), Kind::Sym2, t.lead(), |p, out| {
        for a in 0..d {
            for b in 0..d {
                out[a * d + b] = t.at2(a, b, p) + t.at2(b, a, p);
            }
        }
    })
}

/// Riemann (all indices down), Ricci and scalar curvature.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub riemann: Field,
    pub ricci: Field,
    pub scal: Field,
}

impl CurvatureBundle {
    /// Max of `|R_abcd|`, floored at 1, used to scale symmetry tolerances.
    pub fn scale(&self) -> f64 {
        self.riemann.max_abs().max(1.0)
    }

    /// Max defect of `R_abcd = −R_bacd = −R_abdc = R_cdab`.
    pub fn symmetry_defect(&self) -> f64 {
        let r = &self.riemann;
        let d = r.dim();
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let x = r.comp(r.idx4(a, b, c, e));
                        let y1 = r.comp(r.idx4(b, a, c, e));
                        let y2 = r.comp(r.idx4(a, b, e, c));
                        let y3 = r.comp(r.idx4(c, e, a, b));
                        for p in 0..x.len() {
                            worst = worst
                                .max((x[p] + y1[p]).abs())
                                .max((x[p] + y2[p]).abs())
                                .max((x[p] - y3[p]).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Max of `|R_abcd + R_acdb + R_adbc|`.
    pub fn bianchi_defect(&self) -> f64 {
        let r = &self.riemann;
        let d = r.dim();
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let x = r.comp(r.idx4(a, b, c, e));
                        let y = r.comp(r.idx4(a, c, e, b));
                        let z = r.comp(r.idx4(a, e, b, c));
                        for p in 0..x.len() {
                            worst = worst.max((x[p] + y[p] + z[p]).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Einstein tensor `Ric − ½ scal g`.
    pub fn einstein(&self, g: &MetricField) -> Field {
        let d = g.dim();
        Field::from_fn(g.grid(), Kind::Sym2, g.lead(), |p, out| {
            let s = self.scal.at(0, p);
            for a in 0..d {
                for b in 0..d {
                    out[a * d + b] = self.ricci.at2(a, b, p) - 0.5 * s * g.g().at2(a, b, p);
                }
            }
        })
    }
}

#[cfg(test)]
mod tests;
