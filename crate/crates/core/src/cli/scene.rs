//! Scene files: a TOML document with `[grid]`, `[data]`, `[tolerances]`
//! and `[scheme]` tables.
//!
//! ```toml
//! [grid]
//! n = 3                 # dim M, 2..=4
//! length = 1.0          # ℓ, the s-interval is [0, ℓ]
//! s_points = 33         # N_s, endpoints included
//! leaf_points = 32      # N_i, one value for all leaf axes or a list
//! circumference = 1.0   # L_i, one value or a list
//!
//! [data]
//! phi = "1 + 0.2*s"
//! leaf_metric = [[1, 0], [0, 1]]   # optional, numbers or expressions
//! k = "recipe"                     # or an n×n array of entries
//!
//! [tolerances]
//! default = 1e-8
//! "rigidity.leaf_parallel" = 1e-6  # per-verdict override
//!
//! [scheme]
//! s = "fd4"
//! leaves = "spectral"   # or x1 = "...", x2 = "..." per axis
//! ```
//!
//! A pp-wave scene replaces `phi`, `leaf_metric` and `k` with
//! `ppwave = { f = "..." }` and an optional `hypersurface = "..."` (the
//! graph `v = w(s, x)`, default `0`).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::exprlang::{parse, Expr};
use crate::initial_data::{AmbientVector, InitialDataSet};
use crate::killing_dev::{induce_from_ppwave, PpWaveSpec};
use crate::mesh::{Grid, Scheme};
use crate::rigidity::{build_parallel_candidate, rigid_recipe_with_leaf};

use super::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn expand(&self, m: usize, what: &str) -> Result<Vec<T>, CliError> {
        match self {
            OneOrMany::One(v) => Ok(vec![v.clone(); m]),
            OneOrMany::Many(v) if v.len() == m => Ok(v.clone()),
            OneOrMany::Many(v) => Err(CliError::Scene(format!(
                "{what}: expected {m} values, found {}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Text(String),
}

impl Entry {
    fn expr(&self, what: &str) -> Result<Expr, CliError> {
        match self {
            Entry::Number(v) => Ok(Expr::constant(*v)),
            Entry::Text(t) => parse(t).map_err(|e| CliError::Scene(format!("{what}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum KSpec {
    Named(String),
    Entries(Vec<Vec<Entry>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridBlock {
    n: usize,
    #[serde(default = "one")]
    length: f64,
    s_points: usize,
    leaf_points: OneOrMany<usize>,
    #[serde(default = "one_circ")]
    circumference: OneOrMany<f64>,
}

fn one() -> f64 {
    1.0
}

fn one_circ() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PpWaveBlock {
    f: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataBlock {
    phi: Option<String>,
    leaf_metric: Option<Vec<Vec<Entry>>>,
    k: Option<KSpec>,
    ppwave: Option<PpWaveBlock>,
    hypersurface: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    grid: GridBlock,
    data: DataBlock,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    scheme: BTreeMap<String, String>,
}

/// Where the initial data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// `g = φ² ds² + g_F` with `k` from the rigid recipe or given entries.
    Product {
        phi: Expr,
        leaf_metric: Vec<Expr>,
        /// `None` selects the rigid recipe.
        k: Option<Vec<Expr>>,
    },
    /// Data induced on the graph `v = w` in a pp-wave.
    PpWave { spec: PpWaveSpec, hypersurface: Expr },
}

/// A validated scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub grid: Arc<Grid>,
    pub data: DataSource,
    pub tolerances: BTreeMap<String, f64>,
}

/// Default for any verdict without an explicit tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

impl Scene {
    pub fn parse(text: &str) -> Result<Scene, CliError> {
        let file: SceneFile = toml::from_str(text).map_err(|e| CliError::Scene(e.to_string()))?;
        let gb = &file.grid;
        let m = gb.n.checked_sub(1).filter(|m| *m >= 1).ok_or_else(|| {
            CliError::Scene(format!("grid.n = {} must be at least 2", gb.n))
        })?;
        let leaf_points = gb.leaf_points.expand(m, "grid.leaf_points")?;
        let circ = gb.circumference.expand(m, "grid.circumference")?;
        let mut grid = Grid::product(gb.n, gb.length, gb.s_points, &leaf_points, &circ)
            .map_err(|e| CliError::Scene(e.to_string()))?;
        let mut leaves_default = None;
        for (key, value) in &file.scheme {
            let scheme: Scheme = value.parse().map_err(CliError::Scene)?;
            let axis = match key.as_str() {
                "s" => 0,
                "leaves" => {
                    leaves_default = Some(scheme);
                    continue;
                }
                other => match other.strip_prefix('x').and_then(|i| i.parse::<usize>().ok()) {
                    Some(i) if (1..=m).contains(&i) => i,
                    _ => return Err(CliError::Scene(format!("scheme: unknown axis '{key}'"))),
                },
            };
            grid = grid.with_scheme(axis, scheme).map_err(|e| CliError::Scene(e.to_string()))?;
        }
        if let Some(s) = leaves_default {
            for axis in 1..=m {
                if !file.scheme.contains_key(&format!("x{axis}")) {
                    grid = grid.with_scheme(axis, s).map_err(|e| CliError::Scene(e.to_string()))?;
                }
            }
        }
        let data = Self::data_source(&file.data, gb.n)?;
        Ok(Scene {
            grid: Arc::new(grid),
            data,
            tolerances: file.tolerances,
        })
    }

    fn data_source(d: &DataBlock, n: usize) -> Result<DataSource, CliError> {
        let m = n - 1;
        match (&d.phi, &d.ppwave) {
            (Some(_), Some(_)) | (None, None) => Err(CliError::Scene(
                "data: give exactly one of `phi` or `ppwave`".into(),
            )),
            (Some(phi), None) => {
                if d.hypersurface.is_some() {
                    return Err(CliError::Scene("data.hypersurface needs `ppwave`".into()));
                }
                let phi = parse(phi).map_err(|e| CliError::Scene(format!("data.phi: {e}")))?;
                let leaf_metric = match &d.leaf_metric {
                    None => (0..m * m)
                        .map(|c| Expr::constant(if c / m == c % m { 1.0 } else { 0.0 }))
                        .collect(),
                    Some(rows) => matrix(rows, m, "data.leaf_metric")?,
                };
                let k = match &d.k {
                    None => None,
                    Some(KSpec::Named(s)) if s == "recipe" => None,
                    Some(KSpec::Named(s)) => {
                        return Err(CliError::Scene(format!(
                            "data.k: unknown preset '{s}' (expected \"recipe\" or a matrix)"
                        )))
                    }
                    Some(KSpec::Entries(rows)) => Some(matrix(rows, n, "data.k")?),
                };
                Ok(DataSource::Product {
                    phi,
                    leaf_metric,
                    k,
                })
            }
            (None, Some(pp)) => {
                if d.leaf_metric.is_some() || d.k.is_some() {
                    return Err(CliError::Scene(
                        "data: `leaf_metric` and `k` do not apply to pp-wave scenes".into(),
                    ));
                }
                let f = parse(&pp.f).map_err(|e| CliError::Scene(format!("data.ppwave.f: {e}")))?;
                let w = match &d.hypersurface {
                    Some(w) => {
                        parse(w).map_err(|e| CliError::Scene(format!("data.hypersurface: {e}")))?
                    }
                    None => Expr::constant(0.0),
                };
                Ok(DataSource::PpWave {
                    spec: PpWaveSpec::new(n, f),
                    hypersurface: w,
                })
            }
        }
    }

    /// Tolerance for a verdict: explicit entry, else `default`, else 1e-8.
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .or_else(|| self.tolerances.get("default"))
            .copied()
            .unwrap_or(DEFAULT_TOL)
    }

    /// Same scene on a different grid.
    pub fn with_grid(&self, grid: Grid) -> Scene {
        Scene {
            grid: Arc::new(grid),
            ..self.clone()
        }
    }

    /// Builds the initial data and the lightlike field used by the
    /// rigidity and development checks.
    pub fn build(&self) -> Result<(InitialDataSet, AmbientVector), CliError> {
        match &self.data {
            DataSource::Product {
                phi,
                leaf_metric,
                k: None,
            } => {
                let ids = rigid_recipe_with_leaf(phi, leaf_metric, &self.grid)?;
                let v = build_parallel_candidate(&ids)?;
                Ok((ids, v))
            }
            DataSource::Product {
                phi,
                leaf_metric,
                k: Some(k),
            } => {
                let ids = InitialDataSet::from_exprs(&self.grid, phi, leaf_metric, k)?;
                let v = build_parallel_candidate(&ids)?;
                Ok((ids, v))
            }
            DataSource::PpWave { spec, hypersurface } => {
                let ind = induce_from_ppwave(spec, &self.grid, hypersurface)?;
                Ok((ind.ids, ind.v))
            }
        }
    }
}

fn matrix(rows: &[Vec<Entry>], m: usize, what: &str) -> Result<Vec<Expr>, CliError> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(CliError::Scene(format!("{what}: expected a {m}×{m} matrix")));
    }
    let mut out = Vec::with_capacity(m * m);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out.push(e.expr(&format!("{what}[{i}][{j}]"))?);
        }
    }
    for i in 0..m {
        for j in 0..i {
            if out[i * m + j] != out[j * m + i] {
                return Err(CliError::Scene(format!("{what}: matrix is not symmetric")));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_recipe_and_ppwave_scenes() {
        let s = Scene::parse(
            "[grid]\nn = 3\ns_points = 9\nleaf_points = [8, 16]\n\
             [data]\nphi = \"1 + 0.1*s\"\nk = \"recipe\"\n\
             [scheme]\ns = \"fd2\"\n[tolerances]\ndefault = 1e-6\n\"kd.dec\" = 1e-9\n",
        )
        .unwrap();
        assert_eq!(s.grid.shape(), vec![9, 8, 16]);
        assert_eq!(s.grid.scheme(0), Scheme::Fd2);
        assert_eq!(s.tol("kd.dec"), 1e-9);
        assert_eq!(s.tol("other"), 1e-6);
        assert!(matches!(s.data, DataSource::Product { k: None, .. }));

        let s = Scene::parse(
            "[grid]\nn = 2\ns_points = 9\nleaf_points = 8\n\
             [data]\nppwave = { f = \"2 + sin(2*pi*x1)\" }\n",
        )
        .unwrap();
        assert!(matches!(s.data, DataSource::PpWave { .. }));
        assert_eq!(s.tol("x"), DEFAULT_TOL);
    }

    #[test]
    fn rejects_invalid_scenes() {
        let bad = [
            "[grid]\nn = 3\ns_points = 9\nleaf_points = 8\n[data]\n",
            "[grid]\nn = 3\ns_points = 9\nleaf_points = [8]\n[data]\nphi = \"1\"\n",
            "[grid]\nn = 2\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1 +\"\n",
            "[grid]\nn = 2\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1\"\nk = \"bogus\"\n",
            "[grid]\nn = 2\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1\"\n[scheme]\ns = \"spectral\"\n",
            "[grid]\nn = 2\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1\"\nppwave = { f = \"1\" }\n",
            "[grid]\nn = 2\ns_points = 9\nleaf_points = 8\ncolour = 1\n[data]\nphi = \"1\"\n",
        ];
        for text in bad {
            assert!(matches!(Scene::parse(text), Err(CliError::Scene(_))), "{text}");
        }
    }
}
