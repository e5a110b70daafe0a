use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chart_geometry::chart::{inverse_of, metric_inverse_unchecked};
use crate::chart_geometry::connection::covariant_derivative_field;
use crate::chart_geometry::forms::lie_derivative_11_unchecked;
use crate::chart_geometry::{Chart, FdConfig, TensorField};
use crate::error::{Error, Result};

/// (φ, ξ, η, g) on a chart; g is the chart metric.
#[derive(Clone, Debug)]
pub struct AlmostContactStructure {
    name: String,
    chart: Chart,
    xi: TensorField,
    eta: TensorField,
    phi: TensorField,
}

/// Pointwise algebra of a structure: everything that needs no derivatives.
#[derive(Debug, Clone)]
pub struct PointAlgebra {
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    pub phi: DMatrix<f64>,
    /// Orthogonal projector onto 𝒟, P = I − ξ⊗η.
    pub proj: DMatrix<f64>,
}

impl PointAlgebra {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.g * v))
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// g^{ij} restricted to 𝒟: Σ F_i ⊗ F_i over an orthonormal frame of 𝒟.
    pub fn d_inverse_metric(&self) -> DMatrix<f64> {
        &self.proj * &self.ginv * self.proj.transpose()
    }
}

impl AlmostContactStructure {
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        xi: TensorField,
        eta: TensorField,
        phi: TensorField,
    ) -> Self {
        AlmostContactStructure {
            name: name.into(),
            chart,
            xi,
            eta,
            phi,
        }
    }

    /// Builds η as the metric dual of ξ.
    pub fn from_xi_phi(name: impl Into<String>, chart: Chart, xi: TensorField, phi: TensorField) -> Self {
        let metric = chart.metric_fn();
        let xi_for_eta = xi.clone();
        let eta = TensorField::covector(chart.dim(), move |p| metric(p) * xi_for_eta.eval_vector(p));
        AlmostContactStructure::new(name, chart, xi, eta, phi)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn xi(&self) -> &TensorField {
        &self.xi
    }

    pub fn eta(&self) -> &TensorField {
        &self.eta
    }

    pub fn phi(&self) -> &TensorField {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// n in dim = 2n + 1.
    pub fn half_rank(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn algebra(&self, p: &[f64]) -> PointAlgebra {
        let g = self.chart.metric(p);
        let ginv = metric_inverse_unchecked(&self.chart, p);
        let xi = self.xi.eval_vector(p);
        let eta = self.eta.eval_vector(p);
        let phi = self.phi.eval_matrix(p);
        let n = self.dim();
        let proj = DMatrix::identity(n, n) - &xi * eta.transpose();
        PointAlgebra {
            g,
            ginv,
            xi,
            eta,
            phi,
            proj,
        }
    }

    /// Projector field P = I − ξ⊗η.
    pub fn projector_field(&self) -> TensorField {
        let s = self.clone();
        TensorField::endomorphism(self.dim(), move |p| {
            let xi = s.xi.eval_vector(p);
            let eta = s.eta.eval_vector(p);
            DMatrix::identity(xi.len(), xi.len()) - xi * eta.transpose()
        })
    }

    /// ∇ξ as a (1,1) field: `(∇ξ)·X = ∇_X ξ`.
    pub fn nabla_xi_field(&self, fd: &FdConfig) -> TensorField {
        covariant_derivative_field(&self.chart, &self.xi, fd)
    }

    /// ∇φ with layout `[i][j][k] = (∇_{∂_k} φ)^i_j`.
    pub fn nabla_phi_field(&self, fd: &FdConfig) -> TensorField {
        covariant_derivative_field(&self.chart, &self.phi, fd)
    }

    /// h = ½ L_ξ φ.
    pub fn h_field(&self, fd: &FdConfig) -> TensorField {
        let s = self.clone();
        let fd = *fd;
        let n = self.dim();
        TensorField::endomorphism(n, move |p| {
            lie_derivative_11_unchecked(n, &s.xi, &s.phi, p, &fd) * 0.5
        })
    }

    /// Fundamental 2-form Φ(X,Y) = g(X, φY) as a (0,2) field.
    pub fn fundamental_form_field(&self) -> TensorField {
        let s = self.clone();
        TensorField::bilinear(self.dim(), move |p| s.chart.metric(p) * s.phi.eval_matrix(p))
    }
}

/// Max residual of each algebraic axiom over the sampled points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub residuals: BTreeMap<String, f64>,
    pub samples: usize,
}

impl AxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().cloned().fold(0.0, f64::max)
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| if v.is_nan() { f64::INFINITY } else { acc.max(v.abs()) })
}

/// Checks φ² = −I + η⊗ξ, η(ξ) = 1, η = g(ξ,·), g(φ·,φ·) = g − η⊗η and the
/// metric itself at every point, failing on the first axiom above `tol_algebraic`.
pub fn validate_structure(
    s: &AlmostContactStructure,
    points: &[Vec<f64>],
    fd: &FdConfig,
) -> Result<AxiomReport> {
    let report = axiom_residuals(s, points)?;
    let tol = fd.tol_algebraic;
    for (point, residuals) in points.iter().zip(per_point_axioms(s, points)) {
        for (axiom, r) in residuals {
            if !(r < tol) {
                return Err(Error::AxiomViolation {
                    axiom,
                    point: point.clone(),
                    residual: r,
                });
            }
        }
    }
    Ok(report)
}

/// Axiom residuals without failing.
pub fn axiom_residuals(s: &AlmostContactStructure, points: &[Vec<f64>]) -> Result<AxiomReport> {
    let mut report = AxiomReport {
        residuals: BTreeMap::new(),
        samples: points.len(),
    };
    for residuals in per_point_axioms(s, points) {
        for (axiom, r) in residuals {
            let slot = report.residuals.entry(axiom.to_string()).or_insert(0.0);
            *slot = if r.is_nan() { f64::INFINITY } else { slot.max(r) };
        }
    }
    Ok(report)
}

fn per_point_axioms(
    s: &AlmostContactStructure,
    points: &[Vec<f64>],
) -> Vec<Vec<(&'static str, f64)>> {
    points
        .iter()
        .map(|p| {
            let n = s.dim();
            let g = s.chart.metric(p);
            let metric_ok = inverse_of(&g).is_some();
            let xi = s.xi.eval_vector(p);
            let eta = s.eta.eval_vector(p);
            let phi = s.phi.eval_matrix(p);
            let id = DMatrix::identity(n, n);
            let phi_sq = &phi * &phi + &id - &xi * eta.transpose();
            let compat = phi.transpose() * &g * &phi - (&g - &eta * eta.transpose());
            vec![
                ("metric_symmetric", max_abs(&(&g - g.transpose()))),
                ("metric_positive", if metric_ok { 0.0 } else { f64::INFINITY }),
                ("phi_squared", max_abs(&phi_sq)),
                ("eta_xi", (eta.dot(&xi) - 1.0).abs()),
                ("eta_dual", max_abs(&DMatrix::from_column_slice(n, 1, (&g * &xi - &eta).as_slice()))),
                ("compatibility", max_abs(&compat)),
            ]
        })
        .collect()
}

/// 𝒟-projection X ↦ X − η(X)ξ.
pub fn d_project(s: &AlmostContactStructure, x: &DVector<f64>, p: &[f64]) -> DVector<f64> {
    let xi = s.xi.eval_vector(p);
    let eta = s.eta.eval_vector(p);
    x - xi * eta.dot(x)
}

/// Φ(X,Y) = g(X, φY) at a point.
pub fn fundamental_two_form(s: &AlmostContactStructure, p: &[f64]) -> DMatrix<f64> {
    s.chart.metric(p) * s.phi.eval_matrix(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_block() -> AlmostContactStructure {
        let chart = Chart::euclidean("flat", vec![-1.0; 3], vec![1.0; 3]);
        let xi = TensorField::vector(3, |_| DVector::from_vec(vec![0.0, 0.0, 1.0]));
        let phi = TensorField::endomorphism(3, |_| {
            DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        });
        AlmostContactStructure::from_xi_phi("flat", chart, xi, phi)
    }

    #[test]
    fn flat_block_passes_axioms() {
        let s = flat_block();
        let fd = FdConfig::default();
        let pts = s.chart().sample_points(5, 1, &fd);
        let report = validate_structure(&s, &pts, &fd).unwrap();
        assert!(report.max_residual() < 1e-15);
    }

    #[test]
    fn doubled_phi_violates_phi_squared() {
        let s = flat_block();
        let phi = s.phi().clone();
        let doubled = TensorField::endomorphism(3, move |p| phi.eval_matrix(p) * 2.0);
        let bad = AlmostContactStructure::new("bad", s.chart().clone(), s.xi().clone(), s.eta().clone(), doubled);
        let fd = FdConfig::default();
        let pts = bad.chart().sample_points(3, 1, &fd);
        match validate_structure(&bad, &pts, &fd) {
            Err(Error::AxiomViolation { axiom, .. }) => assert_eq!(axiom, "phi_squared"),
            other => panic!("expected axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn projection_properties() {
        let s = flat_block();
        let p = [0.0; 3];
        let xi = s.xi().eval_vector(&p);
        assert!(d_project(&s, &xi, &p).norm() < 1e-15);
        let f = DVector::from_vec(vec![0.3, -0.2, 0.0]);
        assert_eq!(d_project(&s, &f, &p), f);
        assert!((d_project(&s, &(&f + &xi), &p) - &f).norm() < 1e-15);
        let once = d_project(&s, &DVector::from_vec(vec![1.0, 2.0, 3.0]), &p);
        assert_eq!(d_project(&s, &once, &p), once);
    }

    #[test]
    fn fundamental_form_is_the_block_symplectic_form() {
        let s = flat_block();
        let phi_form = fundamental_two_form(&s, &[0.0; 3]);
        assert_eq!(phi_form[(0, 1)], -1.0);
        assert_eq!(phi_form[(1, 0)], 1.0);
        assert!((phi_form.clone() + phi_form.transpose()).norm() < 1e-15);
        assert_eq!(phi_form.column(2).norm(), 0.0);
    }
}
