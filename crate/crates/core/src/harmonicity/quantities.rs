//! Tension fields and ✻-Ricci curvatures.
//!
//! Orthonormal-frame traces are written as g^{ij}-weighted coordinate traces;
//! traces over 𝒟 use G = P g⁻¹ Pᵀ instead.

use nalgebra::{DMatrix, DVector};

use crate::almost_contact::bar::{bar_curvature_at, bar_nabla_j_field, require_in_d};
use crate::almost_contact::{contact_metric_defect, AlmostContactStructure};
use crate::chart_geometry::connection::{
    covariant_derivative_unchecked, rough_laplacian_unchecked,
};
use crate::chart_geometry::curvature::riemann_unchecked;
use crate::chart_geometry::tensor::endomorphism_norm;
use crate::chart_geometry::FdConfig;
use crate::error::{Error, Result};

/// ∇ξ as a matrix, `A·X = ∇_Xξ`.
pub(crate) fn nabla_xi_matrix(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DMatrix<f64> {
    let n = s.dim();
    DMatrix::from_row_slice(n, n, &covariant_derivative_unchecked(s.chart(), s.xi(), p, fd))
}

/// ∇*∇ξ.
pub fn rough_laplacian_xi(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(DVector::from_vec(rough_laplacian_unchecked(s.chart(), s.xi(), p, fd)))
}

/// τ(ξ) = ∇*∇ξ − |∇ξ|²ξ.
pub fn tau_xi(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(tau_xi_unchecked(s, p, fd))
}

pub(crate) fn tau_xi_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DVector<f64> {
    let alg = s.algebra(p);
    let lap = DVector::from_vec(rough_laplacian_unchecked(s.chart(), s.xi(), p, fd));
    let a = nabla_xi_matrix(s, p, fd);
    let energy = endomorphism_norm(&alg.g, &alg.ginv, &a).powi(2);
    lap - &alg.xi * energy
}

/// T(φ) = tr(∇̄J ⊗ ∇ξ) = g^{ij} ∇̄_{∂_i}J(P∇_{∂_j}ξ).
pub fn t_phi(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(t_phi_unchecked(s, p, fd))
}

pub(crate) fn t_phi_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DVector<f64> {
    let n = s.dim();
    let alg = s.algebra(p);
    let pa = &alg.proj * nabla_xi_matrix(s, p, fd);
    let q = crate::almost_contact::bar::bar_nabla_j_at(s, p, fd);
    DVector::from_fn(n, |c, _| {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                let gij = alg.ginv[(i, j)];
                for d in 0..n {
                    v += gij * q.get(c, d, i) * pa[(d, j)];
                }
            }
        }
        v
    })
}

/// δh = −g^{ij}(∇_{∂_i}h)(∂_j). Contact metric structures only.
pub fn delta_h(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    if !(contact_metric_defect(s, p, fd) < fd.tol_d1) {
        return Err(Error::NotContactMetric(s.name().to_string()));
    }
    Ok(delta_h_unchecked(s, p, fd))
}

/// ∇h with layout `[c][j][i] = (∇_{∂_i}h)^c_j`.
pub(crate) fn nabla_h(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Vec<f64> {
    covariant_derivative_unchecked(s.chart(), &s.h_field(fd), p, fd)
}

pub(crate) fn delta_h_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DVector<f64> {
    let n = s.dim();
    let ginv = s.algebra(p).ginv;
    let dh = nabla_h(s, p, fd);
    DVector::from_fn(n, |c, _| {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v -= ginv[(i, j)] * dh[(c * n + j) * n + i];
            }
        }
        v
    })
}

/// ∇̄*∇̄J = −g^{ab}∇̄²_{∂_a,∂_b}J as an endomorphism of 𝒟 (zero on ξ).
pub fn bar_rough_laplacian_j(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(bar_rough_laplacian_j_unchecked(s, p, fd))
}

/// ∇̄²J with layout `[c][d][a][b]` = (∇̄²_{∂_b,∂_a}J)(P∂_d), already projected.
pub(crate) fn bar_second_derivative_j(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Vec<f64> {
    let n = s.dim();
    let proj = s.algebra(p).proj;
    let dq = covariant_derivative_unchecked(s.chart(), &bar_nabla_j_field(s, fd), p, fd);
    let idx = |c: usize, d: usize, a: usize, b: usize| ((c * n + d) * n + a) * n + b;
    let mut out = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            let m = DMatrix::from_fn(n, n, |c, d| dq[idx(c, d, a, b)]);
            let pm = &proj * m * &proj;
            for c in 0..n {
                for d in 0..n {
                    out[idx(c, d, a, b)] = pm[(c, d)];
                }
            }
        }
    }
    out
}

/// ∇̄²_{X,Y}J as a matrix on 𝒟.
pub(crate) fn bar_second_j_along(dd: &[f64], n: usize, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |c, d| {
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                v += dd[((c * n + d) * n + a) * n + b] * y[a] * x[b];
            }
        }
        v
    })
}

pub(crate) fn bar_rough_laplacian_j_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DMatrix<f64> {
    let n = s.dim();
    let ginv = s.algebra(p).ginv;
    let dd = bar_second_derivative_j(s, p, fd);
    DMatrix::from_fn(n, n, |c, d| {
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                v -= ginv[(a, b)] * dd[((c * n + d) * n + a) * n + b];
            }
        }
        v
    })
}

/// τ(J) = [∇̄*∇̄J, J] on 𝒟.
pub fn tau_j(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(tau_j_unchecked(s, p, fd))
}

pub(crate) fn tau_j_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DMatrix<f64> {
    let alg = s.algebra(p);
    let l = bar_rough_laplacian_j_unchecked(s, p, fd);
    (&l * &alg.phi - &alg.phi * &l) * &alg.proj
}

/// ρ* as a matrix: ρ*(X,Y) = Xᵀ B Y with B_xy = g^{ij} g(R(∂_x,∂_i)φ∂_j, φ∂_y).
pub fn star_ricci_matrix(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(star_ricci_matrix_unchecked(s, p, fd))
}

pub(crate) fn star_ricci_matrix_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DMatrix<f64> {
    let n = s.dim();
    let alg = s.algebra(p);
    let r = riemann_unchecked(s.chart(), p, fd);
    let phi_ginv = &alg.phi * &alg.ginv;
    let gphi = &alg.g * &alg.phi;
    // w_x = Σ_i R(∂_x, ∂_i)(φ g⁻¹)_{·i}
    let mut b = DMatrix::zeros(n, n);
    for x in 0..n {
        let mut w = DVector::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += r.get(l, k, x, i) * phi_ginv[(k, i)];
                }
                w[l] += acc;
            }
        }
        let row = w.transpose() * &gphi;
        b.row_mut(x).copy_from(&row);
    }
    b
}

pub fn star_ricci(
    s: &AlmostContactStructure,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &[f64],
    fd: &FdConfig,
) -> Result<f64> {
    Ok((x.transpose() * star_ricci_matrix(s, p, fd)? * y)[(0, 0)])
}

/// ρ̄* as a matrix on coordinate vectors, valid for arguments in 𝒟:
/// B_xy = G^{ij} g(R̄(∂_x, ∂_i)φ∂_j, φ∂_y).
pub fn star_ricci_bar_matrix(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(star_ricci_bar_matrix_unchecked(s, p, fd))
}

pub(crate) fn star_ricci_bar_matrix_unchecked(
    s: &AlmostContactStructure,
    p: &[f64],
    fd: &FdConfig,
) -> DMatrix<f64> {
    let n = s.dim();
    let alg = s.algebra(p);
    let rb = bar_curvature_at(s, p, fd);
    let big_g = alg.d_inverse_metric();
    let phi_g = &alg.phi * &big_g;
    let gphi = &alg.g * &alg.phi;
    let mut b = DMatrix::zeros(n, n);
    for x in 0..n {
        let mut w = DVector::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    acc += rb.get(l, c, x, i) * phi_g[(c, i)];
                }
                w[l] += acc;
            }
        }
        let row = w.transpose() * &gphi;
        b.row_mut(x).copy_from(&row);
    }
    b
}

pub fn star_ricci_bar(
    s: &AlmostContactStructure,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &[f64],
    fd: &FdConfig,
) -> Result<f64> {
    s.chart().check_point(p, fd)?;
    let alg = s.algebra(p);
    require_in_d(&alg, x, fd)?;
    require_in_d(&alg, y, fd)?;
    Ok((x.transpose() * star_ricci_bar_matrix_unchecked(s, p, fd) * y)[(0, 0)])
}
