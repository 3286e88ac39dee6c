//! Sections `a e₀ + X` of `R ⊕ TM`, the connection
//! `∇̄_Y (x e₀ + X) = (∂_Y x + k(Y, X)) e₀ + (x k(Y,·)♯ + ∇_Y X)`
//! and its curvature.

use crate::geometry::MetricField;
use crate::mesh::{partial_index, Field, Kind, MeshError};

use super::{DataError, InitialDataSet};

/// `a e₀ + X` with `ḡ(V, V) = −a² + |X|²_g`.
#[derive(Debug, Clone)]
pub struct AmbientVector {
    pub a: Field,
    pub x: Field,
}

impl AmbientVector {
    pub fn new(a: Field, x: Field) -> Result<AmbientVector, DataError> {
        if !a.grid().same_as(x.grid()) {
            return Err(MeshError::GridMismatch.into());
        }
        if a.kind() != Kind::Scalar || x.kind() != Kind::Vector {
            return Err(MeshError::KindMismatch("ambient vector needs (scalar, vector)".into()).into());
        }
        Ok(AmbientVector { a, x })
    }

    /// The constant section `e₀`.
    pub fn e0(ids: &InitialDataSet) -> AmbientVector {
        AmbientVector {
            a: Field::constant(ids.grid(), 1.0),
            x: Field::zeros(ids.grid(), Kind::Vector),
        }
    }

    /// `ḡ(V, W)` pointwise.
    pub fn dot(&self, other: &AmbientVector, g: &MetricField) -> Result<Field, DataError> {
        let gx = g.dot_vectors(&self.x, &other.x)?;
        Ok(Field::from_fn(g.grid(), Kind::Scalar, 0, |p, out| {
            out[0] = -self.a.at(0, p) * other.a.at(0, p) + gx.at(0, p);
        }))
    }

    /// `ḡ(V, V)`.
    pub fn norm_sq(&self, g: &MetricField) -> Result<Field, DataError> {
        self.dot(self, g)
    }

    /// Pointwise lightlike test `|ḡ(V,V)| < tol (a² + |X|²)`.
    pub fn is_lightlike(&self, g: &MetricField, tol: f64) -> Result<bool, DataError> {
        let xx = g.dot_vectors(&self.x, &self.x)?;
        Ok((0..g.grid().len()).all(|p| {
            let a2 = self.a.at(0, p).powi(2);
            let x2 = xx.at(0, p);
            (x2 - a2).abs() < tol * (a2 + x2)
        }))
    }

    pub fn is_future(&self) -> bool {
        self.a.comp(0).iter().all(|&a| a > 0.0)
    }

    pub fn sub(&self, other: &AmbientVector) -> Result<AmbientVector, DataError> {
        Ok(AmbientVector {
            a: self.a.sub(&other.a)?,
            x: self.x.sub(&other.x)?,
        })
    }

    /// Max over nodes of the coordinate magnitude `sqrt(a² + Σ (X^b)²)`.
    pub fn max_abs(&self) -> f64 {
        let xm = self.x.magnitude();
        (0..self.a.nodes())
            .map(|p| self.a.at(0, p).hypot(xm.at(0, p)))
            .fold(0.0, f64::max)
    }

    /// Magnitude field `sqrt(a² + Σ (X^b)²)`.
    pub fn magnitude(&self) -> Field {
        let xm = self.x.magnitude();
        Field::from_fn(self.a.grid(), Kind::Scalar, 0, |p, out| {
            out[0] = self.a.at(0, p).hypot(xm.at(0, p));
        })
    }
}

/// `∇̄_{∂_c} V` for every coordinate direction `c`.
pub fn ambient_gradient(
    ids: &InitialDataSet,
    v: &AmbientVector,
) -> Result<Vec<AmbientVector>, DataError> {
    let g = ids.metric();
    let n = ids.n();
    let k = ids.k();
    let inv = g.inverse();
    let gam = g.christoffels();
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let da = partial_index(&v.a, c)?;
        let dx = partial_index(&v.x, c)?;
        let a = Field::from_fn(ids.grid(), Kind::Scalar, 0, |p, o| {
            o[0] = da.at(0, p) + (0..n).map(|b| k.at2(c, b, p) * v.x.at(b, p)).sum::<f64>();
        });
        let x = Field::from_fn(ids.grid(), Kind::Vector, 0, |p, o| {
            let av = v.a.at(0, p);
            for b in 0..n {
                let mut s = dx.at(b, p);
                for m in 0..n {
                    s += av * inv.at2(b, m, p) * k.at2(c, m, p)
                        + gam.at((b * n + c) * n + m, p) * v.x.at(m, p);
                }
                o[b] = s;
            }
        });
        out.push(AmbientVector { a, x });
    }
    Ok(out)
}

/// `∇̄_Y V` for a vector field `Y`.
pub fn ambient_connection(
    ids: &InitialDataSet,
    y: &Field,
    v: &AmbientVector,
) -> Result<AmbientVector, DataError> {
    if !y.grid().same_as(ids.grid()) || !v.a.grid().same_as(ids.grid()) {
        return Err(MeshError::GridMismatch.into());
    }
    let grads = ambient_gradient(ids, v)?;
    Ok(contract_direction(ids, y, &grads))
}

fn contract_direction(ids: &InitialDataSet, y: &Field, grads: &[AmbientVector]) -> AmbientVector {
    let n = ids.n();
    let a = Field::from_fn(ids.grid(), Kind::Scalar, 0, |p, o| {
        o[0] = (0..n).map(|c| y.at(c, p) * grads[c].a.at(0, p)).sum();
    });
    let x = Field::from_fn(ids.grid(), Kind::Vector, 0, |p, o| {
        for b in 0..n {
            o[b] = (0..n).map(|c| y.at(c, p) * grads[c].x.at(b, p)).sum();
        }
    });
    AmbientVector { a, x }
}

/// Max of `|∂_Y ḡ(V,W) − ḡ(∇̄_Y V, W) − ḡ(V, ∇̄_Y W)|` over nodes.
pub fn metricity_residual(
    ids: &InitialDataSet,
    y: &Field,
    v: &AmbientVector,
    w: &AmbientVector,
) -> Result<f64, DataError> {
    let g = ids.metric();
    let vw = v.dot(w, g)?;
    let n = ids.n();
    let dvw: Vec<Field> = (0..n).map(|c| partial_index(&vw, c)).collect::<Result<_, _>>()?;
    let ny_v = ambient_connection(ids, y, v)?;
    let ny_w = ambient_connection(ids, y, w)?;
    let t1 = ny_v.dot(w, g)?;
    let t2 = v.dot(&ny_w, g)?;
    let mut worst = 0.0f64;
    for p in 0..ids.grid().len() {
        let dy: f64 = (0..n).map(|c| y.at(c, p) * dvw[c].at(0, p)).sum();
        worst = worst.max((dy - t1.at(0, p) - t2.at(0, p)).abs());
    }
    Ok(worst)
}

/// `R̄(∂_c, ∂_d) V` on coordinate pairs. `a` has component `(c, d)`,
/// `x` has component `(c, d, b)`.
#[derive(Debug, Clone)]
pub struct AmbientCurvature {
    pub a: Field,
    pub x: Field,
}

impl AmbientCurvature {
    /// `R̄(∂_c, ∂_d) V` as an ambient vector field.
    pub fn pair(&self, c: usize, d: usize) -> AmbientVector {
        let n = self.a.dim();
        let a = self.a.component(c * n + d);
        let x = Field::from_fn(self.a.grid(), Kind::Vector, 0, |p, o| {
            for (b, ob) in o.iter_mut().enumerate().take(n) {
                *ob = self.x.at((c * n + d) * n + b, p);
            }
        });
        AmbientVector { a, x }
    }

    /// `R̄(Z, W) V` for vector fields `Z`, `W`.
    pub fn apply(&self, z: &Field, w: &Field) -> AmbientVector {
        let n = self.a.dim();
        let grid = self.a.grid();
        let a = Field::from_fn(grid, Kind::Scalar, 0, |p, o| {
            let mut s = 0.0;
            for c in 0..n {
                for d in 0..n {
                    s += z.at(c, p) * w.at(d, p) * self.a.at(c * n + d, p);
                }
            }
            o[0] = s;
        });
        let x = Field::from_fn(grid, Kind::Vector, 0, |p, o| {
            for b in 0..n {
                let mut s = 0.0;
                for c in 0..n {
                    for d in 0..n {
                        s += z.at(c, p) * w.at(d, p) * self.x.at((c * n + d) * n + b, p);
                    }
                }
                o[b] = s;
            }
        });
        AmbientVector { a, x }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.max_abs().max(self.x.max_abs())
    }
}

/// `R̄(∂_c, ∂_d) V = ∇̄_c ∇̄_d V − ∇̄_d ∇̄_c V` by a discrete commutator.
pub fn ambient_curvature(
    ids: &InitialDataSet,
    v: &AmbientVector,
) -> Result<AmbientCurvature, DataError> {
    let n = ids.n();
    let first = ambient_gradient(ids, v)?;
    // second[d][c] = ∇̄_c ∇̄_d V
    let second: Vec<Vec<AmbientVector>> = first
        .iter()
        .map(|w| ambient_gradient(ids, w))
        .collect::<Result<_, _>>()?;
    let mut a = Field::zeros(ids.grid(), Kind::Tensor2);
    let mut x = Field::zeros(ids.grid(), Kind::Tensor3);
    for c in 0..n {
        for d in 0..n {
            let cd = &second[d][c];
            let dc = &second[c][d];
            let ra = cd.a.sub(&dc.a)?;
            a.comp_mut(c * n + d).copy_from_slice(ra.comp(0));
            for b in 0..n {
                let rb: Vec<f64> = cd
                    .x
                    .comp(b)
                    .iter()
                    .zip(dc.x.comp(b))
                    .map(|(u, w)| u - w)
                    .collect();
                x.comp_mut((c * n + d) * n + b).copy_from_slice(&rb);
            }
        }
    }
    Ok(AmbientCurvature { a, x })
}
