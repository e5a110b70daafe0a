use nalgebra::{DMatrix, DVector};

use super::chart::{metric_inverse, Chart};
use super::connection::christoffel_unchecked;
use super::fd::{jacobian, FdConfig};
use crate::error::Result;

/// Riemann tensor with R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y].
///
/// Stored as `R^l_{kij}` where R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l.
#[derive(Debug, Clone)]
pub struct Riemann {
    dim: usize,
    data: Vec<f64>,
}

impl Riemann {
    #[inline]
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        self.data[((l * n + k) * n + i) * n + j]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// R(X,Y)Z.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.operator(x, y) * z
    }

    /// The endomorphism R(X,Y).
    pub fn operator(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |l, k| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += self.get(l, k, i, j) * x[i] * y[j];
                }
            }
            s
        })
    }

    /// Ricci tensor ρ(X,Y) = trace(Z ↦ R(Z,X)Y), as a matrix ρ_xy.
    pub fn ricci_tensor(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |x, y| (0..n).map(|l| self.get(l, y, l, x)).sum())
    }
}

pub fn riemann(chart: &Chart, p: &[f64], fd: &FdConfig) -> Result<Riemann> {
    chart.check_point(p, fd)?;
    metric_inverse(chart, p)?;
    Ok(riemann_unchecked(chart, p, fd))
}

pub fn riemann_unchecked(chart: &Chart, p: &[f64], fd: &FdConfig) -> Riemann {
    let n = chart.dim();
    let gamma = christoffel_unchecked(chart, p, fd);
    // dgamma[i] = ∂_i Γ, flat over (l, j, k)
    let dgamma = jacobian(|q| christoffel_unchecked(chart, q, fd).data, p, fd);
    let dg = |i: usize, l: usize, j: usize, k: usize| dgamma[i][(l * n + j) * n + k];
    let mut data = vec![0.0; n * n * n * n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dg(i, l, j, k) - dg(j, l, i, k);
                    for m in 0..n {
                        v += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    data[((l * n + k) * n + i) * n + j] = v;
                }
            }
        }
    }
    Riemann { dim: n, data }
}

/// Ricci operator Ric = g^{-1}ρ, sign fixed so that round spheres have Ric > 0.
pub fn ricci_operator(chart: &Chart, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    let r = riemann(chart, p, fd)?;
    let ginv = metric_inverse(chart, p)?;
    Ok(ginv * r.ricci_tensor())
}

/// Sectional curvature of the plane spanned by X, Y.
pub fn sectional_curvature(
    g: &DMatrix<f64>,
    r: &Riemann,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let ryy = r.apply(x, y, y);
    let num = x.dot(&(g * ryy));
    let gxx = x.dot(&(g * x));
    let gyy = y.dot(&(g * y));
    let gxy = x.dot(&(g * y));
    num / (gxx * gyy - gxy * gxy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart_geometry::chart::Domain;

    fn sphere() -> Chart {
        Chart::new(
            "sphere",
            Domain::boxed(vec![0.2, -3.0], vec![2.9, 3.0]),
            |p: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, p[0].sin().powi(2)])),
        )
    }

    #[test]
    fn flat_curvature_vanishes() {
        let chart = Chart::euclidean("flat", vec![-1.0; 3], vec![1.0; 3]);
        let r = riemann(&chart, &[0.0, 0.5, -0.5], &FdConfig::default()).unwrap();
        assert!(r.data.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn sphere_has_unit_curvature_and_ricci() {
        let chart = sphere();
        let fd = FdConfig::default();
        let p = [0.9, 0.1];
        let r = riemann(&chart, &p, &fd).unwrap();
        let g = chart.metric(&p);
        let e0 = DVector::from_vec(vec![1.0, 0.0]);
        let e1 = DVector::from_vec(vec![0.3, 1.0]);
        assert!((sectional_curvature(&g, &r, &e0, &e1) - 1.0).abs() < fd.tol_d2);
        let ric = ricci_operator(&chart, &p, &fd).unwrap();
        assert!((ric - DMatrix::identity(2, 2)).norm() < fd.tol_d2);
    }

    #[test]
    fn riemann_antisymmetry() {
        let chart = sphere();
        let fd = FdConfig::default();
        let r = riemann(&chart, &[1.3, 0.0], &fd).unwrap();
        let x = DVector::from_vec(vec![0.4, -1.0]);
        let y = DVector::from_vec(vec![1.0, 0.7]);
        let z = DVector::from_vec(vec![0.2, 0.3]);
        assert!((r.apply(&x, &y, &z) + r.apply(&y, &x, &z)).norm() < fd.tol_d2);
    }
}
