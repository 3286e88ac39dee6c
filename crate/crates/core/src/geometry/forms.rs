//! Exterior calculus of 0-, 1-, 2- and 3-forms in coordinates.
//!
//! A p-form is stored with all its antisymmetric components
//! (`Kind::Covector`, `Kind::TwoForm`, `Kind::Tensor3`). The pointwise inner
//! product carries the factor `1/p!`, which makes the codifferential
//! `δ = −∇^a ω_{a…}` the formal L² adjoint of `d`.

use crate::mesh::{integrate, partial_index, Field, Kind};

use super::{GeometryError, MetricField};

/// `d` on scalars, 1-forms and 2-forms.
pub fn exterior_d(w: &Field) -> Result<Field, GeometryError> {
    let d = w.dim();
    let lead = w.lead();
    let grid = w.grid();
    let partials: Vec<Field> = (0..d)
        .map(|a| partial_index(w, a))
        .collect::<Result<_, _>>()?;
    match w.kind() {
        Kind::Scalar => Ok(Field::from_fn(grid, Kind::Covector, lead, |p, out| {
            for a in 0..d {
                out[a] = partials[a].at(0, p);
            }
        })),
        Kind::Covector => Ok(Field::from_fn(grid, Kind::TwoForm, lead, |p, out| {
            for a in 0..d {
                for b in 0..d {
                    out[a * d + b] = partials[a].at(b, p) - partials[b].at(a, p);
                }
            }
        })),
        Kind::TwoForm => Ok(Field::from_fn(grid, Kind::Tensor3, lead, |p, out| {
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        out[(a * d + b) * d + c] = partials[a].at(b * d + c, p)
                            + partials[b].at(c * d + a, p)
                            + partials[c].at(a * d + b, p);
                    }
                }
            }
        })),
        other => Err(GeometryError::Rank(other.rank())),
    }
}

/// Codifferential `δ`, the formal adjoint of `d`. Zero on functions.
pub fn codifferential(w: &Field, g: &MetricField) -> Result<Field, GeometryError> {
    let d = g.dim();
    let inv = g.inverse();
    match w.kind() {
        Kind::Scalar => Ok(Field::zeros(w.grid(), Kind::Scalar)),
        Kind::Covector => {
            let nw = g.covariant_derivative(w)?;
            Ok(Field::from_fn(w.grid(), Kind::Scalar, 0, |p, out| {
                let mut s = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        s += inv.at2(a, b, p) * nw.at2(a, b, p);
                    }
                }
                out[0] = -s;
            }))
        }
        Kind::TwoForm => {
            let nw = g.covariant_derivative(w)?;
            Ok(Field::from_fn(w.grid(), Kind::Covector, g.lead(), |p, out| {
                for b in 0..d {
                    let mut s = 0.0;
                    for a in 0..d {
                        for c in 0..d {
                            s += inv.at2(a, c, p) * nw.at(nw.idx3(a, c, b), p);
                        }
                    }
                    out[b] = -s;
                }
            }))
        }
        Kind::Tensor3 => {
            // (δγ)_bc = −g^{ae} ∇_a γ_ebc, with ∇ expanded by hand since
            // covariant_derivative stops at rank 2.
            let gam = g.christoffels();
            let partials: Vec<Field> = (0..d)
                .map(|a| partial_index(w, a))
                .collect::<Result<_, _>>()?;
            Ok(Field::from_fn(w.grid(), Kind::TwoForm, g.lead(), |p, out| {
                let t = |a: usize, b: usize, c: usize| w.at((a * d + b) * d + c, p);
                let gm = |a: usize, b: usize, c: usize| gam.at((a * d + b) * d + c, p);
                for b in 0..d {
                    for c in 0..d {
                        let mut s = 0.0;
                        for a in 0..d {
                            for e in 0..d {
                                let gae = inv.at2(a, e, p);
                                if gae == 0.0 {
                                    continue;
                                }
                                let mut nab = partials[a].at((e * d + b) * d + c, p);
                                for m in 0..d {
                                    nab -= gm(m, a, e) * t(m, b, c)
                                        + gm(m, a, b) * t(e, m, c)
                                        + gm(m, a, c) * t(e, b, m);
                                }
                                s += gae * nab;
                            }
                        }
                        out[b * d + c] = -s;
                    }
                }
            }))
        }
        other => Err(GeometryError::Rank(other.rank())),
    }
}

/// Hodge Laplacian `dδ + δd` (non-negative) on 0-, 1- and 2-forms.
pub fn hodge_laplacian(w: &Field, g: &MetricField) -> Result<Field, GeometryError> {
    let dw = exterior_d(w)?;
    let ddw = codifferential(&dw, g)?;
    if w.kind() == Kind::Scalar {
        return Ok(ddw);
    }
    let cw = codifferential(w, g)?;
    let dcw = exterior_d(&cw)?;
    Ok(ddw.add(&dcw)?.retag(w.kind()))
}

/// `(α ∧ β)_ab = α_a β_b − α_b β_a`.
pub fn wedge_11(a: &Field, b: &Field) -> Field {
    let d = a.dim();
    Field::from_fn(a.grid(), Kind::TwoForm, a.lead(), |p, out| {
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = a.at(i, p) * b.at(j, p) - a.at(j, p) * b.at(i, p);
            }
        }
    })
}

/// `∫ ⟨a, b⟩_g dμ_g` for fields of the same kind (forms with the `1/p!`
/// factor, general 2-tensors with the full contraction).
pub fn l2_inner(a: &Field, b: &Field, g: &MetricField) -> Result<f64, GeometryError> {
    if a.kind() != b.kind() {
        return Err(GeometryError::Kind {
            expected: a.kind().name(),
            found: b.kind().name(),
        });
    }
    let pointwise = match a.kind() {
        Kind::Scalar => a.mul_scalar(b)?,
        Kind::Vector => g.dot_vectors(a, b)?,
        Kind::Covector => g.dot_covectors(a, b)?,
        Kind::Sym2 | Kind::Tensor2 => g.dot_2tensors(a, b)?,
        Kind::TwoForm => g.dot_2tensors(a, b)?.scale(0.5),
        Kind::Tensor3 => dot_3tensors(a, b, g).scale(1.0 / 6.0),
        Kind::Tensor4 => return Err(GeometryError::Rank(4)),
    };
    Ok(integrate(&pointwise, Some(g.density()))?)
}

fn dot_3tensors(a: &Field, b: &Field, g: &MetricField) -> Field {
    let d = g.dim();
    let inv = g.inverse();
    Field::from_fn(a.grid(), Kind::Scalar, 0, |p, out| {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let av = a.at((i * d + j) * d + k, p);
                    if av == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        for m in 0..d {
                            for q in 0..d {
                                s += av
                                    * inv.at2(i, l, p)
                                    * inv.at2(j, m, p)
                                    * inv.at2(k, q, p)
                                    * b.at((l * d + m) * d + q, p);
                            }
                        }
                    }
                }
            }
        }
        out[0] = s;
    })
}
