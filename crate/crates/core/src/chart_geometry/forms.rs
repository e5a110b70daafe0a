use nalgebra::DMatrix;

use super::chart::Chart;
use super::fd::{jacobian, FdConfig};
use super::tensor::{TensorField, Valence};
use crate::error::{Error, Result};

/// Exterior derivative of a 1-form or 2-form, unnormalized:
/// dω(X,Y) = X ω(Y) − Y ω(X) − ω([X,Y]) and dΦ as the plain cyclic sum.
///
/// Output is the full antisymmetric component array (`dim²` or `dim³`).
pub fn exterior_derivative(
    chart: &Chart,
    form: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Result<Vec<f64>> {
    chart.check_point(p, fd)?;
    exterior_derivative_unchecked(chart.dim(), form, p, fd)
}

pub(crate) fn exterior_derivative_unchecked(
    n: usize,
    form: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Result<Vec<f64>> {
    let d = jacobian(|q| form.eval(q), p, fd);
    match form.valence() {
        Valence { up: 0, down: 1 } => {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = d[i][j] - d[j][i];
                }
            }
            Ok(out)
        }
        Valence { up: 0, down: 2 } => {
            let c = |k: usize, i: usize, j: usize| d[k][i * n + j];
            let mut out = vec![0.0; n * n * n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out[(i * n + j) * n + k] = c(i, j, k) + c(j, k, i) + c(k, i, j);
                    }
                }
            }
            Ok(out)
        }
        other => Err(Error::Config(format!(
            "exterior derivative needs a 1-form or 2-form, got valence {other:?}"
        ))),
    }
}

/// (L_X T)(Y) = [X, TY] − T[X, Y] for a (1,1) field T, as a matrix.
pub fn lie_derivative_11(
    chart: &Chart,
    x: &TensorField,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Result<DMatrix<f64>> {
    chart.check_point(p, fd)?;
    Ok(lie_derivative_11_unchecked(chart.dim(), x, t, p, fd))
}

pub(crate) fn lie_derivative_11_unchecked(
    n: usize,
    x: &TensorField,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> DMatrix<f64> {
    let xv = x.eval(p);
    let tv = t.eval_matrix(p);
    let dx = jacobian(|q| x.eval(q), p, fd);
    let dt = jacobian(|q| t.eval(q), p, fd);
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = 0.0;
        for k in 0..n {
            v += xv[k] * dt[k][i * n + j];
            v -= tv[(k, j)] * dx[k][i];
            v += tv[(i, k)] * dx[j][k];
        }
        v
    })
}
