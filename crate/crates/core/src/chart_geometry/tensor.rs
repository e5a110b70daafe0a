//! Tensor fields given by coordinate-frame components.
//!
//! Components are stored flat in row-major order with all contravariant
//! indices first, then covariant ones. A (1,1) field `T` is therefore laid out
//! as `T^i_j` at `i * dim + j`, and acting on a vector means `(T v)^i = T^i_j v^j`.
//! Derivative indices produced by covariant differentiation are appended last.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub type FieldFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// (contravariant, covariant) rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Valence {
    pub up: usize,
    pub down: usize,
}

impl Valence {
    pub const SCALAR: Valence = Valence { up: 0, down: 0 };
    pub const VECTOR: Valence = Valence { up: 1, down: 0 };
    pub const COVECTOR: Valence = Valence { up: 0, down: 1 };
    pub const ENDOMORPHISM: Valence = Valence { up: 1, down: 1 };
    pub const BILINEAR: Valence = Valence { up: 0, down: 2 };

    pub const fn new(up: usize, down: usize) -> Self {
        Valence { up, down }
    }

    pub fn rank(self) -> usize {
        self.up + self.down
    }

    pub fn len(self, dim: usize) -> usize {
        dim.pow(self.rank() as u32)
    }
}

#[derive(Clone)]
pub struct TensorField {
    dim: usize,
    valence: Valence,
    eval: Arc<FieldFn>,
}

impl TensorField {
    pub fn new<F>(dim: usize, valence: Valence, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        TensorField {
            dim,
            valence,
            eval: Arc::new(f),
        }
    }

    pub fn scalar<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        TensorField::new(dim, Valence::SCALAR, move |p| vec![f(p)])
    }

    pub fn vector<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        TensorField::new(dim, Valence::VECTOR, move |p| f(p).as_slice().to_vec())
    }

    pub fn covector<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        TensorField::new(dim, Valence::COVECTOR, move |p| f(p).as_slice().to_vec())
    }

    /// (1,1) field from a matrix-valued function, rows = contravariant index.
    pub fn endomorphism<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        TensorField::new(dim, Valence::ENDOMORPHISM, move |p| matrix_to_row_major(&f(p)))
    }

    /// (0,2) field from a matrix-valued function.
    pub fn bilinear<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        TensorField::new(dim, Valence::BILINEAR, move |p| matrix_to_row_major(&f(p)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        (self.eval)(p)
    }

    pub fn eval_scalar(&self, p: &[f64]) -> f64 {
        self.eval(p)[0]
    }

    pub fn eval_vector(&self, p: &[f64]) -> DVector<f64> {
        DVector::from_vec(self.eval(p))
    }

    /// Rank-2 components as a matrix (first index = row).
    pub fn eval_matrix(&self, p: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.eval(p))
    }
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorField")
            .field("dim", &self.dim)
            .field("valence", &self.valence)
            .finish()
    }
}

pub fn matrix_to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Flat rank-3 array `a[i][j][k]` over a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Array3 {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Array3 {
    pub fn zeros(dim: usize) -> Self {
        Array3 {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim * dim);
        Array3 { dim, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    /// `out^i = a[i][j][k] y^j x^k`.
    pub fn contract(&self, y: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |i, _| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += self.get(i, j, k) * y[j] * x[k];
                }
            }
            s
        })
    }

    /// Matrix `m[i][j] = a[i][j][k] x^k`.
    pub fn contract_last(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| self.get(i, j, k) * x[k]).sum())
    }
}

/// Metric norm of a vector, √(g(v, v)).
pub fn vector_norm(g: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    g.dot(&(v * v.transpose())).max(0.0).sqrt()
}

/// Metric norm of a (1,1) tensor, √(g_ij g^kl A^i_k A^j_l).
pub fn endomorphism_norm(g: &DMatrix<f64>, ginv: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    (a.transpose() * g * a * ginv).trace().max(0.0).sqrt()
}
