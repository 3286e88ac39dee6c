//! Quadrature and residual norms.

use super::{Field, Kind, MeshError};

/// Max and L² norms of the pointwise coordinate magnitude of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub max: f64,
    pub l2: f64,
}

impl Norms {
    pub fn of(f: &Field) -> Norms {
        let mag = f.magnitude();
        let grid = f.grid();
        let mut max = 0.0f64;
        let mut sq = 0.0;
        for (p, &m) in mag.comp(0).iter().enumerate() {
            max = max.max(m);
            sq += grid.weight(p) * m * m;
        }
        Norms { max, l2: sq.sqrt() }
    }

    pub fn zero() -> Norms {
        Norms { max: 0.0, l2: 0.0 }
    }

    /// Componentwise max, used when aggregating over leaves.
    pub fn combine(self, other: Norms) -> Norms {
        Norms {
            max: self.max.max(other.max),
            l2: self.l2.hypot(other.l2),
        }
    }
}

/// Integral of a scalar over the whole grid (trapezoid in `s`, rectangle
/// rule on periodic axes), optionally against a positive density.
pub fn integrate(f: &Field, density: Option<&Field>) -> Result<f64, MeshError> {
    if f.kind() != Kind::Scalar {
        return Err(MeshError::KindMismatch("integrand must be scalar".into()));
    }
    if let Some(d) = density {
        if !d.grid().same_as(f.grid()) {
            return Err(MeshError::GridMismatch);
        }
        if let Some(p) = d.comp(0).iter().position(|&v| !(v > 0.0)) {
            return Err(MeshError::NonPositiveDensity(p));
        }
    }
    let grid = f.grid();
    let mut sum = 0.0;
    for (p, &v) in f.comp(0).iter().enumerate() {
        let w = density.map(|d| d.at(0, p)).unwrap_or(1.0);
        sum += grid.weight(p) * v * w;
    }
    Ok(sum)
}

/// `∫_{F_τ} f dμ` where `f` and `density` live on the full grid.
pub fn integrate_leaf(f: &Field, tau: usize, density: &Field) -> Result<f64, MeshError> {
    let fl = f.leaf_slice(tau)?;
    let dl = density.leaf_slice(tau)?;
    integrate(&fl, Some(&dl))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exprlang::parse;
    use crate::mesh::{sample_scalar, Grid};

    #[test]
    fn torus_integrals() {
        let g = Arc::new(Grid::product(3, 1.0, 9, &[16, 16], &[1.0, 1.0]).unwrap());
        let one = Field::constant(&g, 1.0);
        assert!((integrate_leaf(&one, 3, &one).unwrap() - 1.0).abs() < 1e-14);
        let s = sample_scalar(&parse("sin(2*pi*x1)").unwrap(), &g).unwrap();
        assert!(integrate_leaf(&s, 3, &one).unwrap().abs() < 1e-14);
        let zero = Field::constant(&g, 0.0);
        assert!(matches!(
            integrate_leaf(&one, 0, &zero),
            Err(MeshError::NonPositiveDensity(0))
        ));
    }

    #[test]
    fn whole_grid_trapezoid() {
        let g = Arc::new(Grid::product(2, 2.0, 9, &[8], &[3.0]).unwrap());
        let s = sample_scalar(&parse("s").unwrap(), &g).unwrap();
        // ∫_0^2 s ds · 3 = 6, exact for the trapezoid rule.
        assert!((integrate(&s, None).unwrap() - 6.0).abs() < 1e-13);
    }
}
