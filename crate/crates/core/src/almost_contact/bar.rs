//! The Hermitian bundle (𝒟, ∇̄, J): ∇̄ = P∇ on sections of 𝒟, J = φ|_𝒟.

use nalgebra::{DMatrix, DVector};

use super::structure::{AlmostContactStructure, PointAlgebra};
use crate::chart_geometry::connection::{covariant_derivative_unchecked, nabla_vector_family};
use crate::chart_geometry::{Array3, FdConfig, TensorField, Valence};
use crate::error::{Error, Result};

/// Errors with `NotInD` unless |η(v)| is within `tol_algebraic` (relative to |v|).
pub fn require_in_d(alg: &PointAlgebra, v: &DVector<f64>, fd: &FdConfig) -> Result<()> {
    let residual = alg.eta.dot(v).abs();
    if residual <= fd.tol_algebraic * alg.norm(v).max(1.0) {
        Ok(())
    } else {
        Err(Error::NotInD { residual })
    }
}

/// r(u,v)w = ⟨v,w⟩u − ⟨u,w⟩v.
pub fn r_tensor(u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>, g: &DMatrix<f64>) -> DVector<f64> {
    let gw = g * w;
    u * v.dot(&gw) - v * u.dot(&gw)
}

/// The endomorphism r(u,v) = u⊗⟨v,·⟩ − v⊗⟨u,·⟩.
pub fn r_operator(u: &DVector<f64>, v: &DVector<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    u * (g * v).transpose() - v * (g * u).transpose()
}

/// ∇̄J extended to TM by Q(X,Y) = P(∇_Xφ)(PY).
///
/// Layout `[i][j][k]`: j is the Y slot, k the X slot, so `contract(Y, X)`
/// gives ∇̄_XJ(Y).
pub fn bar_nabla_j_at(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Array3 {
    let n = s.dim();
    let alg = s.algebra(p);
    let dphi = covariant_derivative_unchecked(s.chart(), s.phi(), p, fd);
    let mut q = Array3::zeros(n);
    for k in 0..n {
        let m = DMatrix::from_fn(n, n, |i, j| dphi[(i * n + j) * n + k]);
        let pm = &alg.proj * m * &alg.proj;
        for i in 0..n {
            for j in 0..n {
                q.set(i, j, k, pm[(i, j)]);
            }
        }
    }
    q
}

pub fn bar_nabla_j_field(s: &AlmostContactStructure, fd: &FdConfig) -> TensorField {
    let s = s.clone();
    let fd = *fd;
    TensorField::new(s.dim(), Valence::new(1, 2), move |p| bar_nabla_j_at(&s, p, &fd).data)
}

/// ∇̄_XJ(Y) for Y ∈ 𝒟, via ∇̄J = ∇φ − ⟨∇φ, ξ⟩ξ.
pub fn bar_derivative_of_j(
    s: &AlmostContactStructure,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &[f64],
    fd: &FdConfig,
) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    require_in_d(&s.algebra(p), y, fd)?;
    Ok(bar_nabla_j_at(s, p, fd).contract(y, x))
}

/// ∇̄_XJ(Y) computed as ∇̄_X(Jσ) − J∇̄_Xσ for the section σ = P·Y (constant
/// coefficients), with ∇̄ the projected Levi-Civita connection.
pub fn bar_derivative_of_j_direct(
    s: &AlmostContactStructure,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &[f64],
    fd: &FdConfig,
) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    let alg = s.algebra(p);
    require_in_d(&alg, y, fd)?;
    let n = s.dim();
    let family = |q: &[f64]| {
        let a = s.algebra(q);
        let sigma = &a.proj * y;
        let j_sigma = &a.phi * &sigma;
        let mut out = sigma.as_slice().to_vec();
        out.extend_from_slice(j_sigma.as_slice());
        out
    };
    let d = nabla_vector_family(s.chart(), family, 2, p, fd);
    debug_assert_eq!(d[0].nrows(), n);
    let nabla_sigma = &d[0] * x;
    let nabla_j_sigma = &d[1] * x;
    Ok(&alg.proj * nabla_j_sigma - &alg.phi * (&alg.proj * nabla_sigma))
}

/// Curvature of ∇̄ on 𝒟: `get(i, c, a, b)` is the i-th component of
/// R̄(∂_a, ∂_b)(P∂_c).
#[derive(Debug, Clone)]
pub struct BarCurvature {
    dim: usize,
    data: Vec<f64>,
}

impl BarCurvature {
    #[inline]
    pub fn get(&self, i: usize, c: usize, a: usize, b: usize) -> f64 {
        let n = self.dim;
        self.data[((i * n + c) * n + a) * n + b]
    }

    /// R̄(X,Y) as a matrix; acting on Z ∈ 𝒟 gives R̄(X,Y)Z.
    pub fn operator(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, c| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += self.get(i, c, a, b) * x[a] * y[b];
                }
            }
            s
        })
    }

    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.operator(x, y) * z
    }
}

/// R̄(∂_a,∂_b)(P∂_c) = P∇_a S_cb − P∇_b S_ca with S_ca = P∇_a(P∂_c).
pub fn bar_curvature_at(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> BarCurvature {
    let n = s.dim();
    let chart = s.chart();
    // S_ca at q, flattened with label c * n + a.
    let connection_family = |q: &[f64]| {
        let proj = s.algebra(q).proj;
        // column-major storage: the slice is P∂_0, P∂_1, ... back to back
        let columns = |r: &[f64]| s.algebra(r).proj.as_slice().to_vec();
        let d = nabla_vector_family(chart, columns, n, q, fd);
        let mut out = Vec::with_capacity(n * n * n);
        for dc in &d {
            let pd = &proj * dc;
            for a in 0..n {
                out.extend(pd.column(a).iter());
            }
        }
        out
    };
    let ds = nabla_vector_family(chart, connection_family, n * n, p, fd);
    let proj = s.algebra(p).proj;
    let mut data = vec![0.0; n * n * n * n];
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                let diff = ds[c * n + b].column(a) - ds[c * n + a].column(b);
                let v = &proj * diff;
                for i in 0..n {
                    data[((i * n + c) * n + a) * n + b] = v[i];
                }
            }
        }
    }
    BarCurvature { dim: n, data }
}

/// R̄(X,Y)Z for X, Y, Z ∈ 𝒟.
pub fn bar_curvature(
    s: &AlmostContactStructure,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    p: &[f64],
    fd: &FdConfig,
) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    let alg = s.algebra(p);
    for v in [x, y, z] {
        require_in_d(&alg, v, fd)?;
    }
    Ok(bar_curvature_at(s, p, fd).apply(x, y, z))
}

/// δ̄J = −Σ ∇̄_{F_i}J(F_i), traced over 𝒟 with G = P g⁻¹ Pᵀ.
pub fn bar_delta_j(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(bar_delta_j_unchecked(s, p, fd))
}

pub(crate) fn bar_delta_j_unchecked(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> DVector<f64> {
    let n = s.dim();
    let big_g = s.algebra(p).d_inverse_metric();
    let q = bar_nabla_j_at(s, p, fd);
    DVector::from_fn(n, |c, _| {
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                v -= big_g[(a, b)] * q.get(c, b, a);
            }
        }
        v
    })
}
