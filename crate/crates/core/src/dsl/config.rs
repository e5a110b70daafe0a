//! TOML structure definitions.
//!
//! ```toml
//! name = "heisenberg"
//! coordinates = ["x", "y", "z"]
//!
//! [domain]
//! lower = [-1, -1, -1]
//! upper = [1, 1, 1]
//! # optional sub-box used for sampling
//! sample_lower = [-0.5, -0.5, -0.5]
//! sample_upper = [0.5, 0.5, 0.5]
//!
//! [parameters]          # optional; usable by name in every expression
//! a = 0.25
//!
//! [tensors]
//! metric = [["a + y^2/4", "0", "-y/4"], ["0", "a", "0"], ["-y/4", "0", "1/4"]]
//! xi = ["0", "0", "2"]
//! phi = [["0", "1", "0"], ["-1", "0", "0"], ["0", "y", "0"]]
//!
//! [fd]                  # optional overrides
//! step = 1e-4
//! order = 2
//! ```
//!
//! η is not given; it is derived as g(ξ, ·). Matrices are row-major with the
//! row as the contravariant index, so `phi[i][j]` is φ^i_j.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use super::eval::Compiled;
use super::parser::parse_expression;
use crate::almost_contact::{validate_structure, AlmostContactStructure};
use crate::chart_geometry::{Chart, Domain, FdConfig, FdOrder, TensorField};
use crate::error::{Error, Result};

/// Points used by the load-time axiom gate.
pub const LOAD_GATE_POINTS: usize = 8;
const LOAD_GATE_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    pub name: String,
    #[serde(default)]
    pub dim: Option<usize>,
    pub coordinates: Vec<String>,
    pub domain: DomainConfig,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    pub tensors: TensorsConfig,
    #[serde(default)]
    pub fd: FdOverrides,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default)]
    pub sample_lower: Option<Vec<f64>>,
    #[serde(default)]
    pub sample_upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorsConfig {
    pub metric: Vec<Vec<String>>,
    pub xi: Vec<String>,
    pub phi: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdOverrides {
    pub step: Option<f64>,
    pub order: Option<u32>,
}

/// A loaded structure plus the finite-difference settings its file asked for.
#[derive(Debug, Clone)]
pub struct LoadedStructure {
    pub structure: AlmostContactStructure,
    pub fd: FdConfig,
}

impl StructureConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn fd_config(&self) -> Result<FdConfig> {
        let mut fd = FdConfig::default();
        if let Some(step) = self.fd.step {
            fd = fd.with_step(step)?;
        }
        if let Some(order) = self.fd.order {
            fd = fd.with_order(FdOrder::from_int(order)?);
        }
        Ok(fd)
    }

    fn dim(&self) -> usize {
        self.coordinates.len()
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.dim();
        let bad = |what: &str| Err(Error::Config(format!("{what} does not match {n} coordinates")));
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::Config(format!("an almost contact chart needs odd dimension, got {n}")));
        }
        if self.dim.is_some_and(|d| d != n) {
            return bad("dim");
        }
        let mut seen = self.coordinates.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::Config("coordinate names must be distinct".into()));
        }
        if let Some(clash) = self.coordinates.iter().find(|c| self.parameters.contains_key(*c)) {
            return Err(Error::Config(format!("`{clash}` is both a coordinate and a parameter")));
        }
        let d = &self.domain;
        if d.lower.len() != n || d.upper.len() != n {
            return bad("domain bounds");
        }
        if d.lower.iter().zip(&d.upper).any(|(a, b)| !(a < b)) {
            return Err(Error::Config("domain needs lower < upper in every coordinate".into()));
        }
        if d.sample_lower.as_ref().is_some_and(|v| v.len() != n)
            || d.sample_upper.as_ref().is_some_and(|v| v.len() != n)
        {
            return bad("sample box");
        }
        let t = &self.tensors;
        if t.metric.len() != n || t.metric.iter().any(|r| r.len() != n) {
            return bad("metric");
        }
        if t.phi.len() != n || t.phi.iter().any(|r| r.len() != n) {
            return bad("phi");
        }
        if t.xi.len() != n {
            return bad("xi");
        }
        Ok(())
    }

    /// Compiles every expression; the structure is not yet validated.
    pub fn build(&self) -> Result<AlmostContactStructure> {
        self.check_shapes()?;
        let n = self.dim();
        let params: HashMap<String, f64> = self.parameters.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let compile = |what: String, src: &str| -> Result<Compiled> {
            let e = parse_expression(src).map_err(|e| Error::Config(format!("{what}: {e}")))?;
            Compiled::new(&e, &self.coordinates, &params).map_err(|e| Error::Config(format!("{what}: {e}")))
        };
        let matrix = |name: &str, rows: &[Vec<String>]| -> Result<Arc<Vec<Compiled>>> {
            let mut out = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                for (j, src) in row.iter().enumerate() {
                    out.push(compile(format!("{name}[{i}][{j}]"), src)?);
                }
            }
            Ok(Arc::new(out))
        };
        let metric = matrix("metric", &self.tensors.metric)?;
        let phi = matrix("phi", &self.tensors.phi)?;
        let xi: Vec<Compiled> = self
            .tensors
            .xi
            .iter()
            .enumerate()
            .map(|(i, src)| compile(format!("xi[{i}]"), src))
            .collect::<Result<_>>()?;
        let xi = Arc::new(xi);

        let d = &self.domain;
        let mut domain = Domain::boxed(d.lower.clone(), d.upper.clone());
        if d.sample_lower.is_some() || d.sample_upper.is_some() {
            domain = domain.with_sample_box(
                d.sample_lower.clone().unwrap_or_else(|| d.lower.clone()),
                d.sample_upper.clone().unwrap_or_else(|| d.upper.clone()),
            );
        }
        let chart = Chart::new(self.name.clone(), domain, move |p: &[f64]| {
            DMatrix::from_row_iterator(n, n, metric.iter().map(|c| c.eval_or_nan(p)))
        });
        let xi_field = TensorField::vector(n, move |p| DVector::from_iterator(n, xi.iter().map(|c| c.eval_or_nan(p))));
        let phi_field = TensorField::endomorphism(n, move |p| {
            DMatrix::from_row_iterator(n, n, phi.iter().map(|c| c.eval_or_nan(p)))
        });
        Ok(AlmostContactStructure::from_xi_phi(self.name.clone(), chart, xi_field, phi_field))
    }

    /// Builds, then runs the symmetry and axiom gates at seeded points.
    pub fn load(&self) -> Result<LoadedStructure> {
        let fd = self.fd_config()?;
        let structure = self.build()?;
        let points = structure.chart().sample_points(LOAD_GATE_POINTS, LOAD_GATE_SEED, &fd);
        if points.is_empty() {
            return Err(Error::Config("domain leaves no room for finite-difference stencils".into()));
        }
        for p in &points {
            let g = structure.chart().metric(p);
            let asym = (&g - g.transpose()).amax();
            if !(asym <= fd.tol_algebraic) {
                return Err(Error::Config(format!(
                    "metric is not symmetric at {p:?} (defect {asym:e})"
                )));
            }
        }
        validate_structure(&structure, &points, &fd)?;
        Ok(LoadedStructure { structure, fd })
    }
}

pub fn load_structure_str(text: &str) -> Result<LoadedStructure> {
    StructureConfig::from_toml(text)?.load()
}

pub fn load_structure(path: impl AsRef<Path>) -> Result<LoadedStructure> {
    let text = std::fs::read_to_string(path)?;
    load_structure_str(&text)
}
