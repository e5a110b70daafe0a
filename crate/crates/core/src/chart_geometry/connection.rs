//! Levi-Civita connection by nested central differences.
//!
//! Every operation comes in two flavours: a checked public one that validates
//! the point against the domain margin, and an `_unchecked` one used inside
//! field closures (where the outer call already validated the point).

use nalgebra::{DMatrix, DVector};

use super::chart::{metric_inverse, metric_inverse_unchecked, Chart};
use super::fd::{jacobian, FdConfig};
use super::tensor::{matrix_to_row_major, Array3, TensorField, Valence};
use crate::error::Result;

/// Γ^k_ij stored as `get(k, i, j)`.
pub fn christoffel(chart: &Chart, p: &[f64], fd: &FdConfig) -> Result<Array3> {
    chart.check_point(p, fd)?;
    metric_inverse(chart, p)?;
    Ok(christoffel_unchecked(chart, p, fd))
}

pub fn christoffel_unchecked(chart: &Chart, p: &[f64], fd: &FdConfig) -> Array3 {
    let n = chart.dim();
    let metric = chart.metric_fn();
    let dg = jacobian(|q| matrix_to_row_major(&metric(q)), p, fd);
    let ginv = metric_inverse_unchecked(chart, p);
    let d = |l: usize, i: usize, j: usize| dg[l][i * n + j];
    let mut gamma = Array3::zeros(n);
    for i in 0..n {
        for j in i..n {
            // lowered Γ_{l,ij}
            let lowered: Vec<f64> = (0..n)
                .map(|l| 0.5 * (d(i, j, l) + d(j, i, l) - d(l, i, j)))
                .collect();
            for k in 0..n {
                let v: f64 = (0..n).map(|l| ginv[(k, l)] * lowered[l]).sum();
                gamma.set(k, i, j, v);
                gamma.set(k, j, i, v);
            }
        }
    }
    gamma
}

/// Strides of a rank-`rank` flat array over `n` values per index.
fn strides(n: usize, rank: usize) -> Vec<usize> {
    (0..rank).map(|a| n.pow((rank - 1 - a) as u32)).collect()
}

/// Components of ∇T with the derivative index appended last.
pub fn covariant_derivative(
    chart: &Chart,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Result<Vec<f64>> {
    chart.check_point(p, fd)?;
    metric_inverse(chart, p)?;
    Ok(covariant_derivative_unchecked(chart, t, p, fd))
}

pub fn covariant_derivative_unchecked(
    chart: &Chart,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Vec<f64> {
    let n = chart.dim();
    let valence = t.valence();
    let rank = valence.rank();
    let comps = t.eval(p);
    let partials = jacobian(|q| t.eval(q), p, fd);
    let gamma = christoffel_unchecked(chart, p, fd);
    let stride = strides(n, rank);
    let len = valence.len(n);
    let mut out = vec![0.0; len * n];
    let mut digits = vec![0usize; rank];
    for idx in 0..len {
        for (a, s) in stride.iter().enumerate() {
            digits[a] = (idx / s) % n;
        }
        for k in 0..n {
            let mut v = partials[k][idx];
            for a in 0..rank {
                let base = idx - digits[a] * stride[a];
                if a < valence.up {
                    for m in 0..n {
                        v += gamma.get(digits[a], k, m) * comps[base + m * stride[a]];
                    }
                } else {
                    for m in 0..n {
                        v -= gamma.get(m, k, digits[a]) * comps[base + m * stride[a]];
                    }
                }
            }
            out[idx * n + k] = v;
        }
    }
    out
}

/// ∇T as a field of valence (r, s+1), evaluated lazily at each point.
pub fn covariant_derivative_field(chart: &Chart, t: &TensorField, fd: &FdConfig) -> TensorField {
    let chart = chart.clone();
    let inner = t.clone();
    let fd = *fd;
    let v = t.valence();
    TensorField::new(chart.dim(), Valence::new(v.up, v.down + 1), move |p| {
        covariant_derivative_unchecked(&chart, &inner, p, &fd)
    })
}

/// ∇²_{X,Y}T = ∇_X∇_Y T − ∇_{∇_X Y}T, for X, Y given by coordinate components at p.
pub fn second_covariant_derivative(
    chart: &Chart,
    t: &TensorField,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &[f64],
    fd: &FdConfig,
) -> Result<Vec<f64>> {
    chart.check_point(p, fd)?;
    metric_inverse(chart, p)?;
    let n = chart.dim();
    let dd = second_derivative_unchecked(chart, t, p, fd);
    let len = t.valence().len(n);
    Ok((0..len)
        .map(|idx| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += dd[(idx * n + a) * n + b] * y[a] * x[b];
                }
            }
            s
        })
        .collect())
}

/// ∇∇T with layout `[I][a][b]` = ∇²_{∂_b, ∂_a} T.
pub fn second_derivative_unchecked(
    chart: &Chart,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Vec<f64> {
    let first = covariant_derivative_field(chart, t, fd);
    covariant_derivative_unchecked(chart, &first, p, fd)
}

/// Rough Laplacian ∇*∇T = −g^{ab} ∇²_{∂_a,∂_b} T.
pub fn rough_laplacian(
    chart: &Chart,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Result<Vec<f64>> {
    chart.check_point(p, fd)?;
    metric_inverse(chart, p)?;
    Ok(rough_laplacian_unchecked(chart, t, p, fd))
}

pub fn rough_laplacian_unchecked(
    chart: &Chart,
    t: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> Vec<f64> {
    let n = chart.dim();
    let ginv = metric_inverse_unchecked(chart, p);
    let dd = second_derivative_unchecked(chart, t, p, fd);
    let len = t.valence().len(n);
    (0..len)
        .map(|idx| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s -= ginv[(a, b)] * dd[(idx * n + a) * n + b];
                }
            }
            s
        })
        .collect()
}

/// ∇f = g^{ij} ∂_j f ∂_i for a scalar field.
pub fn gradient(chart: &Chart, f: &TensorField, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    chart.check_point(p, fd)?;
    let ginv = metric_inverse(chart, p)?;
    Ok(gradient_with(&ginv, f, p, fd))
}

pub(crate) fn gradient_with(
    ginv: &DMatrix<f64>,
    f: &TensorField,
    p: &[f64],
    fd: &FdConfig,
) -> DVector<f64> {
    let df = jacobian(|q| f.eval(q), p, fd);
    let df = DVector::from_iterator(p.len(), df.iter().map(|d| d[0]));
    ginv * df
}

/// Covariant derivatives of a labelled family of vector fields.
///
/// `family(q)` returns `count` vectors concatenated; the result `out[c]` is
/// the matrix `(∇_{∂_k} V_c)^i` with rows `i` and columns `k`. The labels are
/// not tensor indices, so only the vector index picks up Christoffel terms.
pub fn nabla_vector_family<F>(
    chart: &Chart,
    family: F,
    count: usize,
    p: &[f64],
    fd: &FdConfig,
) -> Vec<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = chart.dim();
    let values = family(p);
    let partials = jacobian(&family, p, fd);
    let gamma = christoffel_unchecked(chart, p, fd);
    (0..count)
        .map(|c| {
            DMatrix::from_fn(n, n, |i, k| {
                let mut v = partials[k][c * n + i];
                for m in 0..n {
                    v += gamma.get(i, k, m) * values[c * n + m];
                }
                v
            })
        })
        .collect()
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
    fn flat_christoffels_vanish() {
        let chart = Chart::euclidean("flat", vec![-1.0; 3], vec![1.0; 3]);
        let g = christoffel(&chart, &[0.1, 0.2, 0.3], &FdConfig::default()).unwrap();
        assert!(g.data.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn sphere_christoffel_matches_closed_form() {
        let fd = FdConfig::default();
        let theta = std::f64::consts::FRAC_PI_4;
        let g = christoffel(&sphere(), &[theta, 0.3], &fd).unwrap();
        // Γ^θ_φφ = −sinθ cosθ, Γ^φ_θφ = cotθ
        assert!((g.get(0, 1, 1) + 0.5).abs() < fd.tol_d1);
        assert!((g.get(1, 0, 1) - 1.0).abs() < fd.tol_d1);
        assert_eq!(g.get(1, 0, 1), g.get(1, 1, 0));
    }

    #[test]
    fn exponential_line_christoffel() {
        let chart = Chart::new("line", Domain::boxed(vec![-1.0], vec![1.0]), |p: &[f64]| {
            DMatrix::from_element(1, 1, (2.0 * p[0]).exp())
        });
        let fd = FdConfig::default();
        let g = christoffel(&chart, &[0.0], &fd).unwrap();
        assert!((g.get(0, 0, 0) - 1.0).abs() < fd.tol_d1);
    }

    #[test]
    fn metric_is_parallel() {
        let chart = sphere();
        let fd = FdConfig::default();
        let metric = chart.metric_fn();
        let g = TensorField::bilinear(2, move |p| metric(p));
        let dg = covariant_derivative(&chart, &g, &[1.1, 0.4], &fd).unwrap();
        assert!(dg.iter().all(|v| v.abs() < fd.tol_d1), "{dg:?}");
    }

    #[test]
    fn hessian_of_quadratic() {
        let chart = Chart::euclidean("flat", vec![-1.0; 2], vec![1.0; 2]);
        let fd = FdConfig::default();
        let f = TensorField::scalar(2, |p| p[0] * p[0]);
        let ex = DVector::from_vec(vec![1.0, 0.0]);
        let h = second_covariant_derivative(&chart, &f, &ex, &ex, &[0.3, 0.1], &fd).unwrap();
        assert!((h[0] - 2.0).abs() < fd.tol_d2);
    }

    #[test]
    fn constant_field_has_zero_laplacian_on_flat_chart() {
        let chart = Chart::euclidean("flat", vec![-1.0; 3], vec![1.0; 3]);
        let v = TensorField::vector(3, |_| DVector::from_vec(vec![1.0, -2.0, 0.5]));
        let lap = rough_laplacian(&chart, &v, &[0.0, 0.1, 0.2], &FdConfig::default()).unwrap();
        assert!(lap.iter().all(|x| x.abs() < 1e-9));
        let dv = covariant_derivative(&chart, &v, &[0.0, 0.1, 0.2], &FdConfig::default()).unwrap();
        assert!(dv.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn gradient_of_coordinate() {
        let chart = Chart::euclidean("flat", vec![-1.0; 3], vec![1.0; 3]);
        let f = TensorField::scalar(3, |p| p[0]);
        let grad = gradient(&chart, &f, &[0.2, 0.0, 0.0], &FdConfig::default()).unwrap();
        assert!((grad - DVector::from_vec(vec![1.0, 0.0, 0.0])).norm() < 1e-10);
        let c = TensorField::scalar(3, |_| 3.0);
        let grad = gradient(&chart, &c, &[0.2, 0.0, 0.0], &FdConfig::default()).unwrap();
        assert!(grad.norm() < 1e-12);
    }

    #[test]
    fn stencil_outside_domain_is_rejected() {
        let chart = sphere();
        let v = TensorField::vector(2, |_| DVector::from_vec(vec![1.0, 0.0]));
        assert!(covariant_derivative(&chart, &v, &[0.2, 0.0], &FdConfig::default()).is_err());
    }
}
