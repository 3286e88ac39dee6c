//! Uniform grids on `[0, ℓ] × T^{n-1}` and tensor fields sampled on them.
//!
//! The interval axis includes both end points; leaf axes are periodic with
//! point `N_i` identified with point `0`. Nodes are stored row-major (the
//! interval axis varies slowest). Leaf slices are themselves grids with only
//! periodic axes and a fixed `s` value.

mod deriv;
mod dump;
mod quad;
mod spectral;

use std::sync::Arc;

use thiserror::Error;

use crate::exprlang::{Expr, ExprError, Point, Var};

pub use deriv::{partial, partial_index};
pub use dump::write_csv;
pub use quad::{integrate, integrate_leaf, Norms};
pub use spectral::Spectral;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("spectral differentiation requested on non-periodic axis {0}")]
    SpectralOnInterval(usize),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("expression evaluation failed at node {node:?} (coordinates {coords:?}): {source}")]
    Eval {
        node: Vec<usize>,
        coords: Vec<f64>,
        #[source]
        source: ExprError,
    },
    #[error("expected {expected} component expressions, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field kind mismatch: {0}")]
    KindMismatch(String),
    #[error("non-finite value in component {comp} at node {node}")]
    NonFinite { comp: usize, node: usize },
    #[error("density is not positive at node {0}")]
    NonPositiveDensity(usize),
    #[error("leaf index {tau} out of range (N_s = {ns})")]
    LeafOutOfRange { tau: usize, ns: usize },
    #[error("{kind} field is not {expected} (max defect {defect:e})")]
    Symmetry {
        kind: &'static str,
        expected: &'static str,
        defect: f64,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Interval,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Fd2,
    Fd4,
    Spectral,
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fd2" => Ok(Scheme::Fd2),
            "fd4" => Ok(Scheme::Fd4),
            "spectral" => Ok(Scheme::Spectral),
            other => Err(format!("unknown scheme '{other}' (expected fd2, fd4 or spectral)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub var: Var,
    pub kind: AxisKind,
    pub length: f64,
    pub points: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        match self.kind {
            AxisKind::Interval => self.length / (self.points - 1) as f64,
            AxisKind::Periodic => self.length / self.points as f64,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

/// A tensor-product grid. `base` supplies coordinates not represented by an
/// axis (the `s` value of a leaf slice).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
    schemes: Vec<Scheme>,
    base: Point,
    leaf_of: Option<usize>,
}

impl Grid {
    /// The product grid `[0, ℓ] × T^{n-1}` with default schemes (fd4 on the
    /// interval, spectral on the leaves).
    pub fn product(
        n: usize,
        ell: f64,
        ns: usize,
        leaf_points: &[usize],
        circumferences: &[f64],
    ) -> Result<Grid, MeshError> {
        if !(2..=4).contains(&n) {
            return Err(MeshError::InvalidGrid(format!("dimension n = {n} not in 2..=4")));
        }
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(MeshError::InvalidGrid(format!("interval length {ell} must be positive")));
        }
        if ns < 8 {
            return Err(MeshError::InvalidGrid(format!("N_s = {ns} must be at least 8")));
        }
        let mut axes = vec![Axis {
            var: Var::S,
            kind: AxisKind::Interval,
            length: ell,
            points: ns,
        }];
        axes.extend(Self::leaf_axes(n - 1, leaf_points, circumferences)?);
        let schemes = axes
            .iter()
            .map(|a| match a.kind {
                AxisKind::Interval => Scheme::Fd4,
                AxisKind::Periodic => Scheme::Spectral,
            })
            .collect();
        Ok(Grid {
            axes,
            schemes,
            base: [0.0; 10],
            leaf_of: None,
        })
    }

    /// A standalone flat torus `T^d` at fixed `s`.
    pub fn torus(leaf_points: &[usize], circumferences: &[f64], s: f64) -> Result<Grid, MeshError> {
        let d = leaf_points.len();
        if !(1..=3).contains(&d) {
            return Err(MeshError::InvalidGrid(format!("torus dimension {d} not in 1..=3")));
        }
        let axes = Self::leaf_axes(d, leaf_points, circumferences)?;
        let mut base = [0.0; 10];
        base[0] = s;
        Ok(Grid {
            schemes: vec![Scheme::Spectral; d],
            axes,
            base,
            leaf_of: None,
        })
    }

    fn leaf_axes(d: usize, pts: &[usize], circ: &[f64]) -> Result<Vec<Axis>, MeshError> {
        if pts.len() != d || circ.len() != d {
            return Err(MeshError::InvalidGrid(format!(
                "expected {d} leaf point counts and circumferences, got {} and {}",
                pts.len(),
                circ.len()
            )));
        }
        let mut axes = Vec::with_capacity(d);
        for (i, (&np, &len)) in pts.iter().zip(circ).enumerate() {
            if np < 8 || np % 2 != 0 {
                return Err(MeshError::InvalidGrid(format!(
                    "leaf point count N_{} = {np} must be even and at least 8",
                    i + 1
                )));
            }
            if !(len > 0.0 && len.is_finite()) {
                return Err(MeshError::InvalidGrid(format!(
                    "circumference L_{} = {len} must be positive",
                    i + 1
                )));
            }
            axes.push(Axis {
                var: Var::leaf(i + 1).expect("at most 9 leaf axes"),
                kind: AxisKind::Periodic,
                length: len,
                points: np,
            });
        }
        Ok(axes)
    }

    /// Overrides the derivative scheme of one axis.
    pub fn with_scheme(mut self, axis: usize, scheme: Scheme) -> Result<Grid, MeshError> {
        let a = self.axes.get(axis).ok_or(MeshError::AxisOutOfRange {
            axis,
            dim: self.axes.len(),
        })?;
        if scheme == Scheme::Spectral && a.kind == AxisKind::Interval {
            return Err(MeshError::SpectralOnInterval(axis));
        }
        self.schemes[axis] = scheme;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn scheme(&self, axis: usize) -> Scheme {
        self.schemes[axis]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True for `[0, ℓ] × T^{n-1}` grids (first axis is the interval).
    pub fn has_interval(&self) -> bool {
        self.axes.first().map(|a| a.kind == AxisKind::Interval).unwrap_or(false)
    }

    /// Number of interval points, or 1 for pure tori.
    pub fn interval_points(&self) -> usize {
        if self.has_interval() {
            self.axes[0].points
        } else {
            1
        }
    }

    /// Index of the slice this grid was cut from, if any.
    pub fn leaf_index(&self) -> Option<usize> {
        self.leaf_of
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.points).product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % a.points;
            flat /= a.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.points + i)
    }

    /// Coordinates of a node as an expression evaluation point.
    pub fn point(&self, flat: usize) -> Point {
        let mut p = self.base;
        let idx = self.multi_index(flat);
        for (a, i) in self.axes.iter().zip(idx) {
            p[a.var.index()] = a.coord(i);
        }
        p
    }

    /// Coordinates of a node in axis order.
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let idx = self.multi_index(flat);
        self.axes.iter().zip(idx).map(|(a, i)| a.coord(i)).collect()
    }

    /// `s` value of the interval node `tau` (or the fixed `s` of a torus).
    pub fn s_value(&self, tau: usize) -> f64 {
        if self.has_interval() {
            self.axes[0].coord(tau)
        } else {
            self.base[0]
        }
    }

    /// The leaf `{s = s_tau}` as a torus grid, keeping the leaf schemes.
    pub fn leaf(&self, tau: usize) -> Result<Grid, MeshError> {
        if !self.has_interval() {
            return Err(MeshError::InvalidGrid("grid has no interval axis".into()));
        }
        let ns = self.axes[0].points;
        if tau >= ns {
            return Err(MeshError::LeafOutOfRange { tau, ns });
        }
        let mut base = self.base;
        base[0] = self.axes[0].coord(tau);
        Ok(Grid {
            axes: self.axes[1..].to_vec(),
            schemes: self.schemes[1..].to_vec(),
            base,
            leaf_of: Some(tau),
        })
    }

    /// Same geometry with every axis resolution multiplied by `factor`
    /// (interval: `(N_s - 1) * factor + 1` points so old nodes are kept).
    pub fn refined(&self, factor: usize) -> Grid {
        let mut g = self.clone();
        for a in g.axes.iter_mut() {
            a.points = match a.kind {
                AxisKind::Interval => (a.points - 1) * factor + 1,
                AxisKind::Periodic => a.points * factor,
            };
        }
        g
    }

    /// Same geometry with a new interval resolution.
    pub fn with_interval_points(&self, ns: usize) -> Grid {
        let mut g = self.clone();
        if g.has_interval() {
            g.axes[0].points = ns;
        }
        g
    }

    /// Quadrature weight of a node: rectangle rule on periodic axes,
    /// trapezoid on the interval.
    pub fn weight(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        self.axes
            .iter()
            .zip(idx)
            .map(|(a, i)| {
                let h = a.spacing();
                match a.kind {
                    AxisKind::Periodic => h,
                    AxisKind::Interval if i == 0 || i + 1 == a.points => 0.5 * h,
                    AxisKind::Interval => h,
                }
            })
            .product()
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.axes == other.axes && self.base == other.base
    }
}

/// Tensor type of a field. All covariant slots unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    /// Contravariant vector.
    Vector,
    Covector,
    /// Symmetric covariant 2-tensor.
    Sym2,
    /// General covariant 2-tensor. Also used for mixed `(∇X)_a^b`.
    Tensor2,
    /// Antisymmetric covariant 2-tensor.
    TwoForm,
    /// Rank-3 array; Christoffel symbols use the layout `Γ^a_bc -> (a, b, c)`.
    Tensor3,
    Tensor4,
}

impl Kind {
    pub fn rank(self) -> usize {
        match self {
            Kind::Scalar => 0,
            Kind::Vector | Kind::Covector => 1,
            Kind::Sym2 | Kind::Tensor2 | Kind::TwoForm => 2,
            Kind::Tensor3 => 3,
            Kind::Tensor4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
            Kind::Covector => "covector",
            Kind::Sym2 => "symmetric 2-tensor",
            Kind::Tensor2 => "2-tensor",
            Kind::TwoForm => "2-form",
            Kind::Tensor3 => "rank-3 tensor",
            Kind::Tensor4 => "rank-4 tensor",
        }
    }
}

/// Component arrays of a tensor field. Component `c` (row-major over the
/// tensor indices) occupies `data[c * nodes .. (c + 1) * nodes]`.
///
/// `dim` is the number of values each tensor index takes. Normally it equals
/// the grid dimension; spacetime fields carry `lead` extra leading
/// coordinates (the Killing coordinate `v`) along which every derivative
/// vanishes identically.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    kind: Kind,
    dim: usize,
    lead: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>, kind: Kind) -> Field {
        Self::zeros_ext(grid, kind, 0)
    }

    /// Zero field whose indices range over `lead` analytic coordinates
    /// followed by the grid axes.
    pub fn zeros_ext(grid: &Arc<Grid>, kind: Kind, lead: usize) -> Field {
        let dim = grid.dim() + lead;
        let ncomp = dim.pow(kind.rank() as u32);
        Field {
            grid: Arc::clone(grid),
            kind,
            dim,
            lead,
            data: vec![0.0; ncomp * grid.len()],
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Field {
        let mut f = Field::zeros(grid, Kind::Scalar);
        f.data.fill(value);
        f
    }

    /// Scalar field from nodal values.
    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Field, MeshError> {
        if values.len() != grid.len() {
            return Err(MeshError::ComponentCount {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let f = Field {
            grid: Arc::clone(grid),
            kind: Kind::Scalar,
            dim: grid.dim(),
            lead: 0,
            data: values,
        };
        f.check_finite()?;
        Ok(f)
    }

    /// Builds a field pointwise from a closure returning component values.
    pub fn from_fn(
        grid: &Arc<Grid>,
        kind: Kind,
        lead: usize,
        mut f: impl FnMut(usize, &mut [f64]),
    ) -> Field {
        let mut out = Field::zeros_ext(grid, kind, lead);
        let n = grid.len();
        let nc = out.ncomp();
        let mut buf = vec![0.0; nc];
        for p in 0..n {
            buf.fill(0.0);
            f(p, &mut buf);
            for (c, v) in buf.iter().enumerate() {
                out.data[c * n + p] = *v;
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.kind.rank()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lead(&self) -> usize {
        self.lead
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn ncomp(&self) -> usize {
        self.dim.pow(self.kind.rank() as u32)
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.nodes();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.nodes();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, c: usize, p: usize) -> f64 {
        self.data[c * self.grid.len() + p]
    }

    #[inline]
    pub fn set(&mut self, c: usize, p: usize, v: f64) {
        let n = self.grid.len();
        self.data[c * n + p] = v;
    }

    #[inline]
    pub fn idx2(&self, a: usize, b: usize) -> usize {
        a * self.dim + b
    }

    #[inline]
    pub fn idx3(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim + b) * self.dim + c
    }

    #[inline]
    pub fn idx4(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    /// Component `(a, b)` at node `p`.
    #[inline]
    pub fn at2(&self, a: usize, b: usize, p: usize) -> f64 {
        self.at(self.idx2(a, b), p)
    }

    /// Re-tags the field without touching its data (ranks must agree).
    pub fn retag(mut self, kind: Kind) -> Field {
        assert_eq!(kind.rank(), self.kind.rank(), "retag must preserve rank");
        self.kind = kind;
        self
    }

    pub fn check_finite(&self) -> Result<(), MeshError> {
        let n = self.nodes();
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(MeshError::NonFinite {
                comp: i / n,
                node: i % n,
            }),
            None => Ok(()),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Pointwise coordinate-Euclidean magnitude `sqrt(sum_c |T_c|^2)`.
    pub fn magnitude(&self) -> Field {
        let n = self.nodes();
        let mut out = vec![0.0; n];
        for c in 0..self.ncomp() {
            for (o, v) in out.iter_mut().zip(self.comp(c)) {
                *o += v * v;
            }
        }
        for o in out.iter_mut() {
            *o = o.sqrt();
        }
        Field {
            grid: Arc::clone(&self.grid),
            kind: Kind::Scalar,
            dim: self.grid.dim(),
            lead: 0,
            data: out,
        }
    }

    pub fn norms(&self) -> Norms {
        Norms::of(self)
    }

    fn same_shape(&self, other: &Field) -> Result<(), MeshError> {
        if !self.grid.same_as(&other.grid) {
            return Err(MeshError::GridMismatch);
        }
        if self.kind.rank() != other.kind.rank() || self.dim != other.dim {
            return Err(MeshError::KindMismatch(format!(
                "{} vs {}",
                self.kind.name(),
                other.kind.name()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Field) -> Result<Field, MeshError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += v;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field, MeshError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o -= v;
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> Field {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= k);
        out
    }

    /// Multiplies every component by a scalar field.
    pub fn mul_scalar(&self, f: &Field) -> Result<Field, MeshError> {
        if !self.grid.same_as(&f.grid) {
            return Err(MeshError::GridMismatch);
        }
        if f.kind != Kind::Scalar {
            return Err(MeshError::KindMismatch("expected a scalar multiplier".into()));
        }
        let n = self.nodes();
        let mut out = self.clone();
        for c in 0..self.ncomp() {
            for (o, m) in out.data[c * n..(c + 1) * n].iter_mut().zip(&f.data) {
                *o *= m;
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    /// Extracts one component as a scalar field.
    pub fn component(&self, c: usize) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            kind: Kind::Scalar,
            dim: self.grid.dim(),
            lead: 0,
            data: self.comp(c).to_vec(),
        }
    }

    /// Max asymmetry `|T_ab - T_ba|` (for `TwoForm`: `|T_ab + T_ba|`).
    pub fn symmetry_defect(&self) -> f64 {
        if self.rank() != 2 {
            return 0.0;
        }
        let sign = if self.kind == Kind::TwoForm { -1.0 } else { 1.0 };
        let mut worst = 0.0f64;
        for a in 0..self.dim {
            for b in a..self.dim {
                let x = self.comp(self.idx2(a, b));
                let y = self.comp(self.idx2(b, a));
                for (u, v) in x.iter().zip(y) {
                    worst = worst.max((u - sign * v).abs());
                }
            }
        }
        worst
    }

    /// Verifies the symmetry flag of rank-2 fields within `tol`.
    pub fn check_symmetry(&self, tol: f64) -> Result<(), MeshError> {
        let defect = self.symmetry_defect();
        let expected = match self.kind {
            Kind::Sym2 => "symmetric",
            Kind::TwoForm => "antisymmetric",
            _ => return Ok(()),
        };
        if defect > tol {
            return Err(MeshError::Symmetry {
                kind: self.kind.name(),
                expected,
                defect,
            });
        }
        Ok(())
    }

    /// Restriction to the leaf `{s = s_tau}`: the interval index is dropped
    /// from every tensor slot and the field moves to the torus grid.
    pub fn leaf_slice(&self, tau: usize) -> Result<Field, MeshError> {
        if self.lead != 0 {
            return Err(MeshError::KindMismatch("cannot slice a spacetime field".into()));
        }
        let leaf = Arc::new(self.grid.leaf(tau)?);
        let stride = self.grid.stride(0);
        let offset = tau * stride;
        let rank = self.rank();
        let mut out = Field::zeros(&leaf, self.kind);
        let ld = out.dim;
        for c in 0..out.ncomp() {
            // Map leaf multi-index to the full multi-index (+1 per slot).
            let mut rem = c;
            let mut full = 0;
            let mut mult = 1;
            for _ in 0..rank {
                let i = rem % ld;
                rem /= ld;
                full += (i + 1) * mult;
                mult *= self.dim;
            }
            let src = &self.comp(full)[offset..offset + stride];
            out.comp_mut(c).copy_from_slice(src);
        }
        Ok(out)
    }
}

impl Field {
    /// Inverse of [`Field::leaf_slice`]: embeds per-leaf tensors (one per
    /// interval node, in order) into the leaf slots of a field on `grid`.
    /// Components with an `s` slot are zero.
    pub fn from_leaves(grid: &Arc<Grid>, leaves: &[Field]) -> Result<Field, MeshError> {
        let ns = grid.interval_points();
        if leaves.len() != ns || !grid.has_interval() {
            return Err(MeshError::InvalidGrid(format!(
                "expected {ns} leaf fields, got {}",
                leaves.len()
            )));
        }
        let kind = leaves[0].kind();
        let rank = kind.rank();
        let mut out = Field::zeros(grid, kind);
        let stride = grid.stride(0);
        let dim = out.dim;
        for (tau, leaf) in leaves.iter().enumerate() {
            if leaf.kind() != kind || leaf.nodes() != stride || leaf.dim() + 1 != dim {
                return Err(MeshError::KindMismatch(format!("leaf {tau} has the wrong shape")));
            }
            let ld = leaf.dim();
            for c in 0..leaf.ncomp() {
                let mut rem = c;
                let mut full = 0;
                let mut mult = 1;
                for _ in 0..rank {
                    let i = rem % ld;
                    rem /= ld;
                    full += (i + 1) * mult;
                    mult *= dim;
                }
                out.comp_mut(full)[tau * stride..(tau + 1) * stride].copy_from_slice(leaf.comp(c));
            }
        }
        Ok(out)
    }
}

/// Samples expressions at the grid nodes. `exprs` holds one expression per
/// component in row-major index order (`dim^rank` entries).
pub fn sample(exprs: &[Expr], grid: &Arc<Grid>, kind: Kind) -> Result<Field, MeshError> {
    let dim = grid.dim();
    let expected = dim.pow(kind.rank() as u32);
    if exprs.len() != expected {
        return Err(MeshError::ComponentCount {
            expected,
            found: exprs.len(),
        });
    }
    let mut out = Field::zeros(grid, kind);
    let n = grid.len();
    for p in 0..n {
        let pt = grid.point(p);
        for (c, e) in exprs.iter().enumerate() {
            let v = e.eval(&pt).map_err(|source| MeshError::Eval {
                node: grid.multi_index(p),
                coords: grid.coords(p),
                source,
            })?;
            if !v.is_finite() {
                return Err(MeshError::Eval {
                    node: grid.multi_index(p),
                    coords: grid.coords(p),
                    source: ExprError::Domain(format!("non-finite value {v}")),
                });
            }
            out.data[c * n + p] = v;
        }
    }
    out.check_symmetry(0.0)?;
    Ok(out)
}

pub fn sample_scalar(e: &Expr, grid: &Arc<Grid>) -> Result<Field, MeshError> {
    sample(std::slice::from_ref(e), grid, Kind::Scalar)
}
