use nalgebra::{DMatrix, DVector};

use crate::chart_geometry::chart::metric_inverse_unchecked;
use crate::chart_geometry::connection::{covariant_derivative_unchecked, gradient_with, rough_laplacian_unchecked};
use crate::chart_geometry::curvature::riemann_unchecked;
use crate::chart_geometry::tensor::endomorphism_norm;
use crate::chart_geometry::{Chart, FdConfig, TensorField};
use crate::error::{Error, Result};

/// (M^{2n}, g, J) on one chart.
#[derive(Clone)]
pub struct AlmostHermitianStructure {
    name: String,
    chart: Chart,
    j: TensorField,
}

impl std::fmt::Debug for AlmostHermitianStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlmostHermitianStructure").field("name", &self.name).finish_non_exhaustive()
    }
}

impl AlmostHermitianStructure {
    pub fn new(name: impl Into<String>, chart: Chart, j: TensorField) -> Self {
        assert_eq!(chart.dim() % 2, 0, "almost Hermitian charts are even-dimensional");
        assert_eq!(j.dim(), chart.dim());
        AlmostHermitianStructure { name: name.into(), chart, j }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn j(&self) -> &TensorField {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// max over points of |J² + I| and |JᵀgJ − g| (entrywise).
    pub fn axiom_residual(&self, points: &[Vec<f64>]) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for p in points {
            let g = self.chart.metric(p);
            let j = self.j.eval_matrix(p);
            let a = (&j * &j + DMatrix::identity(n, n)).abs().max();
            let b = (j.transpose() * &g * &j - &g).abs().max();
            for v in [a, b] {
                worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
            }
        }
        worst
    }

    /// Errors with `AxiomViolation` on the first failing point.
    pub fn validate(&self, points: &[Vec<f64>], fd: &FdConfig) -> Result<()> {
        for p in points {
            let residual = self.axiom_residual(std::slice::from_ref(p));
            if !(residual < fd.tol_algebraic) {
                return Err(Error::AxiomViolation { axiom: "hermitian", point: p.clone(), residual });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianResidual {
    /// [∇*∇J, J].
    pub tension: DMatrix<f64>,
    /// δJ = −g^{ij}(∇_{∂_i}J)(∂_j); zero iff the Kähler form is co-closed.
    pub delta_j: DVector<f64>,
    /// Metric norms of the two.
    pub tension_norm: f64,
    pub delta_j_norm: f64,
}

pub fn hermitian_harmonic_residual(h: &AlmostHermitianStructure, p: &[f64], fd: &FdConfig) -> Result<HermitianResidual> {
    h.chart.check_point(p, fd)?;
    Ok(hermitian_residual_scaled(h, p, fd, 1.0))
}

/// As [`hermitian_harmonic_residual`] but for the metric λ²g (same
/// connection, traces scaled by λ⁻²).
pub(crate) fn hermitian_residual_scaled(h: &AlmostHermitianStructure, p: &[f64], fd: &FdConfig, lambda: f64) -> HermitianResidual {
    let n = h.dim();
    let g = h.chart.metric(p) * (lambda * lambda);
    let ginv = metric_inverse_unchecked(&h.chart, p) / (lambda * lambda);
    let j = h.j.eval_matrix(p);
    let lap = DMatrix::from_row_slice(n, n, &rough_laplacian_unchecked(&h.chart, &h.j, p, fd)) / (lambda * lambda);
    let tension = &lap * &j - &j * &lap;
    let dj = covariant_derivative_unchecked(&h.chart, &h.j, p, fd);
    let delta_j = DVector::from_fn(n, |c, _| {
        let mut v = 0.0;
        for i in 0..n {
            for k in 0..n {
                v -= ginv[(i, k)] * dj[(c * n + k) * n + i];
            }
        }
        v
    });
    HermitianResidual {
        tension_norm: endomorphism_norm(&g, &ginv, &tension),
        delta_j_norm: delta_j.dot(&(&g * &delta_j)).max(0.0).sqrt(),
        tension,
        delta_j,
    }
}

/// ∇_XJ as a matrix.
pub(crate) fn nabla_j_along(h: &AlmostHermitianStructure, x: &DVector<f64>, p: &[f64], fd: &FdConfig) -> DMatrix<f64> {
    let n = h.dim();
    let d = covariant_derivative_unchecked(&h.chart, &h.j, p, fd);
    DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| d[(i * n + j) * n + k] * x[k]).sum())
}

/// ∇²J with layout `[c][d][a][b]` = (∇²_{∂_b,∂_a}J)^c_d.
pub(crate) fn second_derivative_j(h: &AlmostHermitianStructure, p: &[f64], fd: &FdConfig) -> Vec<f64> {
    crate::chart_geometry::connection::second_derivative_unchecked(&h.chart, &h.j, p, fd)
}

/// ‖∇_{∇f}J‖ at p. Vanishing of this is how "∇f is Kähler null" is read here.
pub fn kahler_null_check(base: &AlmostHermitianStructure, f: &TensorField, p: &[f64], fd: &FdConfig) -> Result<f64> {
    base.chart.check_point(p, fd)?;
    let g = base.chart.metric(p);
    let ginv = metric_inverse_unchecked(&base.chart, p);
    let grad = gradient_with(&ginv, f, p, fd);
    Ok(endomorphism_norm(&g, &ginv, &nabla_j_along(base, &grad, p, fd)))
}

/// ρ̂*(X,Y) = g^{ij} g(R(X,∂_i)J∂_j, JY) as a coordinate matrix.
pub fn hermitian_star_ricci_matrix(h: &AlmostHermitianStructure, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    h.chart.check_point(p, fd)?;
    let n = h.dim();
    let g = h.chart.metric(p);
    let ginv = metric_inverse_unchecked(&h.chart, p);
    let j = h.j.eval_matrix(p);
    let r = riemann_unchecked(&h.chart, p, fd);
    let jginv = &j * &ginv;
    let gj = &g * &j;
    let mut b = DMatrix::zeros(n, n);
    for x in 0..n {
        let mut w = DVector::zeros(n);
        for i in 0..n {
            for l in 0..n {
                w[l] += (0..n).map(|k| r.get(l, k, x, i) * jginv[(k, i)]).sum::<f64>();
            }
        }
        b.row_mut(x).copy_from(&(w.transpose() * &gj));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::hermitian::{flat_kahler, perturbed_hermitian_r4};

    #[test]
    fn flat_kahler_is_harmonic_and_cosymplectic() {
        let h = flat_kahler(1.0);
        let fd = FdConfig::default();
        let pts = h.chart().sample_points(4, 1, &fd);
        h.validate(&pts, &fd).unwrap();
        for p in &pts {
            let r = hermitian_harmonic_residual(&h, p, &fd).unwrap();
            assert!(r.tension_norm < 1e-12 && r.delta_j_norm < 1e-12);
            let f = TensorField::scalar(2, |q| 1.0 + q[0] * q[0]);
            assert!(kahler_null_check(&h, &f, p, &fd).unwrap() < 1e-12);
        }
    }

    #[test]
    fn perturbed_hermitian_is_neither() {
        let h = perturbed_hermitian_r4();
        let fd = FdConfig::default();
        let pts = h.chart().sample_points(4, 1, &fd);
        h.validate(&pts, &fd).unwrap();
        let worst = pts
            .iter()
            .map(|p| hermitian_harmonic_residual(&h, p, &fd).unwrap())
            .fold((0.0f64, 0.0f64), |acc, r| (acc.0.max(r.tension_norm), acc.1.max(r.delta_j_norm)));
        assert!(worst.0 > 1e-4 && worst.1 > 1e-4, "{worst:?}");
    }
}
