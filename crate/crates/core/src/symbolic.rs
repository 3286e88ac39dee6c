//! Pointwise tensor calculus from closed-form metric components.
//!
//! Derivatives come from [`Expr::diff`], so the results carry no
//! discretization error. This is the oracle the grid operators are tested
//! against. Coordinates below `lead` are analytic directions (the Killing
//! coordinate `v`) on which nothing depends.

use crate::exprlang::{Expr, ExprError, Point, Var};
use crate::geometry::invert_small;

/// Metric given by `dim × dim` row-major component expressions.
#[derive(Debug, Clone)]
pub struct SymMetric {
    dim: usize,
    lead: usize,
    g: Vec<Expr>,
    dg: Vec<Vec<Expr>>,
    ddg: Vec<Vec<Vec<Expr>>>,
}

/// Exact partial of `e` with respect to tensor coordinate `a`.
pub fn coord_diff(e: &Expr, a: usize, lead: usize) -> Expr {
    match a.checked_sub(lead).and_then(Var::from_index) {
        Some(v) => e.diff(v),
        None => Expr::constant(0.0),
    }
}

/// Curvature data at one point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub dim: usize,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    /// `Γ^a_bc` at `(a * d + b) * d + c`.
    pub gamma: Vec<f64>,
    /// `∂_e Γ^a_bc` at `((e * d + a) * d + b) * d + c`.
    pub dgamma: Vec<f64>,
    /// `R_abcd` (all down).
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scal: f64,
}

impl SymMetric {
    pub fn new(dim: usize, lead: usize, g: Vec<Expr>) -> SymMetric {
        assert_eq!(g.len(), dim * dim, "metric needs dim² components");
        let dg: Vec<Vec<Expr>> = (0..dim)
            .map(|e| g.iter().map(|c| coord_diff(c, e, lead)).collect())
            .collect();
        let ddg = (0..dim)
            .map(|f| {
                dg.iter()
                    .map(|row| row.iter().map(|c| coord_diff(c, f, lead)).collect())
                    .collect()
            })
            .collect();
        SymMetric {
            dim,
            lead,
            g,
            dg,
            ddg,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lead(&self) -> usize {
        self.lead
    }

    pub fn components(&self) -> &[Expr] {
        &self.g
    }

    pub fn at(&self, p: &Point) -> Result<PointGeometry, ExprError> {
        let d = self.dim;
        let ev = |es: &[Expr]| es.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>, _>>();
        let g = ev(&self.g)?;
        let dg: Vec<Vec<f64>> = self.dg.iter().map(|r| ev(r)).collect::<Result<_, _>>()?;
        // ddg[f][e][c] = ∂_f ∂_e g_c
        let ddg: Vec<Vec<Vec<f64>>> = self
            .ddg
            .iter()
            .map(|rows| rows.iter().map(|r| ev(r)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let (ginv, _) = invert_small(&g, d)
            .ok_or_else(|| ExprError::Domain("singular metric".into()))?;
        let gi = |a: usize, b: usize| ginv[a * d + b];
        // Γ_ebc (first index lowered) and its derivatives.
        let low = |e: usize, b: usize, c: usize| {
            0.5 * (dg[b][e * d + c] + dg[c][b * d + e] - dg[e][b * d + c])
        };
        let dlow = |f: usize, e: usize, b: usize, c: usize| {
            0.5 * (ddg[f][b][e * d + c] + ddg[f][c][b * d + e] - ddg[f][e][b * d + c])
        };
        let mut gamma = vec![0.0; d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    gamma[(a * d + b) * d + c] = (0..d).map(|e| gi(a, e) * low(e, b, c)).sum();
                }
            }
        }
        // ∂_f g^{ae} = −g^{am} ∂_f g_mn g^{ne}
        let mut dginv = vec![0.0; d * d * d];
        for f in 0..d {
            for a in 0..d {
                for e in 0..d {
                    let mut s = 0.0;
                    for m in 0..d {
                        for n in 0..d {
                            s -= gi(a, m) * dg[f][m * d + n] * gi(n, e);
                        }
                    }
                    dginv[(f * d + a) * d + e] = s;
                }
            }
        }
        let mut dgamma = vec![0.0; d * d * d * d];
        for f in 0..d {
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let mut s = 0.0;
                        for e in 0..d {
                            s += dginv[(f * d + a) * d + e] * low(e, b, c)
                                + gi(a, e) * dlow(f, e, b, c);
                        }
                        dgamma[((f * d + a) * d + b) * d + c] = s;
                    }
                }
            }
        }
        let gm = |a: usize, b: usize, c: usize| gamma[(a * d + b) * d + c];
        let dgm = |f: usize, a: usize, b: usize, c: usize| dgamma[((f * d + a) * d + b) * d + c];
        let mut up = vec![0.0; d * d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut s = dgm(c, a, e, b) - dgm(e, a, c, b);
                        for m in 0..d {
                            s += gm(a, c, m) * gm(m, e, b) - gm(a, e, m) * gm(m, c, b);
                        }
                        up[((a * d + b) * d + c) * d + e] = s;
                    }
                }
            }
        }
        let mut riemann = vec![0.0; d * d * d * d];
        for a in 0..d {
            for rest in 0..d * d * d {
                riemann[a * d * d * d + rest] =
                    (0..d).map(|e| g[a * d + e] * up[e * d * d * d + rest]).sum();
            }
        }
        let mut ricci = vec![0.0; d * d];
        for b in 0..d {
            for e in 0..d {
                ricci[b * d + e] = (0..d).map(|a| up[((a * d + b) * d + a) * d + e]).sum();
            }
        }
        let scal = (0..d * d).map(|i| ginv[i] * ricci[i]).sum();
        Ok(PointGeometry {
            dim: d,
            g,
            ginv,
            gamma,
            dgamma,
            riemann,
            ricci,
            scal,
        })
    }
}

impl PointGeometry {
    pub fn einstein(&self) -> Vec<f64> {
        self.ricci
            .iter()
            .zip(&self.g)
            .map(|(r, g)| r - 0.5 * self.scal * g)
            .collect()
    }

    /// Exact `∇_a T_{b…}` of a covariant tensor of rank ≤ 2 given by
    /// expressions; output row-major with the derivative index first.
    pub fn covariant_derivative(
        &self,
        t: &[Expr],
        rank: usize,
        lead: usize,
        p: &Point,
    ) -> Result<Vec<f64>, ExprError> {
        let d = self.dim;
        let nc = d.pow(rank as u32);
        assert_eq!(t.len(), nc);
        let tv: Vec<f64> = t.iter().map(|e| e.eval(p)).collect::<Result<_, _>>()?;
        let mut out = vec![0.0; d * nc];
        for a in 0..d {
            for c in 0..nc {
                let mut s = coord_diff(&t[c], a, lead).eval(p)?;
                let mut digits = vec![0; rank];
                let mut rem = c;
                for k in (0..rank).rev() {
                    digits[k] = rem % d;
                    rem /= d;
                }
                for k in 0..rank {
                    let place = d.pow((rank - 1 - k) as u32);
                    for m in 0..d {
                        let cm = c - digits[k] * place + m * place;
                        s -= self.gamma[(m * d + a) * d + digits[k]] * tv[cm];
                    }
                }
                out[a * nc + c] = s;
            }
        }
        Ok(out)
    }
}

/// Closed-form initial data `(g, k)` on `M`.
#[derive(Debug, Clone)]
pub struct SymData {
    pub metric: SymMetric,
    pub k: Vec<Expr>,
}

/// Exact constraint values at a point.
#[derive(Debug, Clone)]
pub struct PointConstraints {
    pub rho: f64,
    pub j: Vec<f64>,
}

impl SymData {
    pub fn new(g: Vec<Expr>, k: Vec<Expr>) -> SymData {
        let n = (g.len() as f64).sqrt().round() as usize;
        assert_eq!(k.len(), n * n, "k needs n² components");
        SymData {
            metric: SymMetric::new(n, 0, g),
            k,
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `ρ = ½(scal + tr(k)² − |k|²)`, `j = div k − d tr k`.
    pub fn constraints_at(&self, p: &Point) -> Result<PointConstraints, ExprError> {
        let d = self.dim();
        let pg = self.metric.at(p)?;
        let kv: Vec<f64> = self.k.iter().map(|e| e.eval(p)).collect::<Result<_, _>>()?;
        let gi = |a: usize, b: usize| pg.ginv[a * d + b];
        let tr: f64 = (0..d * d).map(|i| pg.ginv[i] * kv[i]).sum();
        let mut norm = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        norm += gi(a, c) * gi(b, e) * kv[a * d + b] * kv[c * d + e];
                    }
                }
            }
        }
        let rho = 0.5 * (pg.scal + tr * tr - norm);
        let nk = pg.covariant_derivative(&self.k, 2, 0, p)?;
        // d tr k = g^{ab} ∇_c k_ab since ∇g = 0.
        let mut j = vec![0.0; d];
        for (b, jb) in j.iter_mut().enumerate() {
            let mut div = 0.0;
            let mut dtr = 0.0;
            for a in 0..d {
                for c in 0..d {
                    div += gi(a, c) * nk[(a * d + c) * d + b];
                    dtr += gi(a, c) * nk[(b * d + a) * d + c];
                }
            }
            *jb = div - dtr;
        }
        Ok(PointConstraints { rho, j })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;

    fn metric(entries: &[&str], dim: usize, lead: usize) -> SymMetric {
        SymMetric::new(dim, lead, entries.iter().map(|e| parse(e).unwrap()).collect())
    }

    #[test]
    fn round_sphere_curvature() {
        // g = ds² + sin(s)² dx1² has Gauss curvature 1, scal 2.
        let m = metric(&["1", "0", "0", "sin(s)^2"], 2, 0);
        let mut p = [0.0; 10];
        p[0] = 0.7;
        p[1] = 0.3;
        let pg = m.at(&p).unwrap();
        assert!((pg.scal - 2.0).abs() < 1e-12);
        // R_0101 = K det g = sin²s
        assert!((pg.riemann[5] - 0.7f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn exponential_lapse_christoffel() {
        let m = metric(&["exp(2*s)", "0", "0", "1"], 2, 0);
        let mut p = [0.0; 10];
        p[0] = 0.4;
        let pg = m.at(&p).unwrap();
        assert!((pg.gamma[0] - 1.0).abs() < 1e-14);
        assert!(pg.gamma[1..].iter().all(|v| v.abs() < 1e-14));
        assert!(pg.scal.abs() < 1e-14);
    }

    #[test]
    fn metric_is_parallel() {
        let m = metric(&["1 + 0.3*s^2", "0.1*sin(x1)", "0.1*sin(x1)", "2 + cos(s)"], 2, 0);
        let mut p = [0.0; 10];
        p[0] = 0.2;
        p[1] = 1.1;
        let pg = m.at(&p).unwrap();
        let ng = pg.covariant_derivative(m.components(), 2, 0, &p).unwrap();
        assert!(ng.iter().all(|v| v.abs() < 1e-13), "{ng:?}");
    }
}
