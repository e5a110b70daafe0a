//! Per-point cache of the derived tensors the checks share.

use std::cell::OnceCell;

use nalgebra::{DMatrix, DVector};

use super::frame::full_frame;
use super::quantities::{
    bar_second_derivative_j, delta_h_unchecked, nabla_h, nabla_xi_matrix, star_ricci_bar_matrix_unchecked,
    star_ricci_matrix_unchecked, t_phi_unchecked, tau_j_unchecked, tau_xi_unchecked,
};
use crate::almost_contact::bar::{bar_curvature_at, bar_delta_j_unchecked, bar_nabla_j_at};
use crate::almost_contact::{AlmostContactStructure, BarCurvature, PointAlgebra};
use crate::chart_geometry::connection::{covariant_derivative_unchecked, rough_laplacian_unchecked};
use crate::chart_geometry::curvature::riemann_unchecked;
use crate::chart_geometry::forms::exterior_derivative_unchecked;
use crate::chart_geometry::{Array3, FdConfig, Riemann};

/// Lazily evaluated quantities at one sample point. Not shared across threads;
/// each worker builds its own.
pub struct PointData<'a> {
    pub s: &'a AlmostContactStructure,
    pub p: &'a [f64],
    pub fd: &'a FdConfig,
    pub alg: PointAlgebra,
    /// ξ, then an orthonormal frame of 𝒟.
    pub frame: Vec<DVector<f64>>,
    riemann: OnceCell<Riemann>,
    bar_curvature: OnceCell<BarCurvature>,
    q: OnceCell<Array3>,
    nabla_xi: OnceCell<DMatrix<f64>>,
    nabla_phi: OnceCell<Vec<f64>>,
    h: OnceCell<DMatrix<f64>>,
    nabla_h: OnceCell<Vec<f64>>,
    lap_xi: OnceCell<DVector<f64>>,
    tau_xi: OnceCell<DVector<f64>>,
    t_phi: OnceCell<DVector<f64>>,
    delta_h: OnceCell<DVector<f64>>,
    bar_delta_j: OnceCell<DVector<f64>>,
    tau_j: OnceCell<DMatrix<f64>>,
    bar_second: OnceCell<Vec<f64>>,
    rho_star: OnceCell<DMatrix<f64>>,
    rho_bar_star: OnceCell<DMatrix<f64>>,
    d_phi_form: OnceCell<Vec<f64>>,
}

impl<'a> PointData<'a> {
    pub fn new(s: &'a AlmostContactStructure, p: &'a [f64], fd: &'a FdConfig) -> Self {
        let alg = s.algebra(p);
        let frame = full_frame(&alg);
        PointData {
            s,
            p,
            fd,
            alg,
            frame,
            riemann: OnceCell::new(),
            bar_curvature: OnceCell::new(),
            q: OnceCell::new(),
            nabla_xi: OnceCell::new(),
            nabla_phi: OnceCell::new(),
            h: OnceCell::new(),
            nabla_h: OnceCell::new(),
            lap_xi: OnceCell::new(),
            tau_xi: OnceCell::new(),
            t_phi: OnceCell::new(),
            delta_h: OnceCell::new(),
            bar_delta_j: OnceCell::new(),
            tau_j: OnceCell::new(),
            bar_second: OnceCell::new(),
            rho_star: OnceCell::new(),
            rho_bar_star: OnceCell::new(),
            d_phi_form: OnceCell::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// Half the rank of 𝒟.
    pub fn n(&self) -> usize {
        self.s.half_rank()
    }

    pub fn d_frame(&self) -> &[DVector<f64>] {
        &self.frame[1..]
    }

    /// Frame vectors as columns.
    pub fn frame_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.frame)
    }

    pub fn d_frame_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(self.d_frame())
    }

    /// Components of a vector in the orthonormal frame.
    pub fn vector_components(&self, v: &DVector<f64>) -> Vec<f64> {
        (self.frame_matrix().transpose() * &self.alg.g * v).as_slice().to_vec()
    }

    /// Components ⟨e_a, M e_b⟩ of an endomorphism in the full frame.
    pub fn endomorphism_components(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let e = self.frame_matrix();
        matrix_entries(&(e.transpose() * &self.alg.g * m * e))
    }

    /// Components ⟨F_a, M F_b⟩ over the 𝒟-frame.
    pub fn d_endomorphism_components(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let f = self.d_frame_matrix();
        matrix_entries(&(f.transpose() * &self.alg.g * m * f))
    }

    /// Components B(F_a, F_b) of a coordinate bilinear form over the 𝒟-frame.
    pub fn d_bilinear_components(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let f = self.d_frame_matrix();
        f.transpose() * b * f
    }

    pub fn riemann(&self) -> &Riemann {
        self.riemann.get_or_init(|| riemann_unchecked(self.s.chart(), self.p, self.fd))
    }

    pub fn bar_curvature(&self) -> &BarCurvature {
        self.bar_curvature.get_or_init(|| bar_curvature_at(self.s, self.p, self.fd))
    }

    /// ∇̄J, layout as in [`bar_nabla_j_at`].
    pub fn bar_nabla_j(&self) -> &Array3 {
        self.q.get_or_init(|| bar_nabla_j_at(self.s, self.p, self.fd))
    }

    /// ∇̄_XJ as a matrix.
    pub fn bar_nabla_j_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.bar_nabla_j().contract_last(x)
    }

    /// A with A·X = ∇_Xξ.
    pub fn nabla_xi(&self) -> &DMatrix<f64> {
        self.nabla_xi.get_or_init(|| nabla_xi_matrix(self.s, self.p, self.fd))
    }

    /// ∇_Xφ as a matrix.
    pub fn nabla_phi_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let d = self
            .nabla_phi
            .get_or_init(|| covariant_derivative_unchecked(self.s.chart(), self.s.phi(), self.p, self.fd));
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| d[(i * n + j) * n + k] * x[k]).sum())
    }

    pub fn h(&self) -> &DMatrix<f64> {
        self.h.get_or_init(|| self.s.h_field(self.fd).eval_matrix(self.p))
    }

    /// ∇_Xh as a matrix.
    pub fn nabla_h_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let d = self.nabla_h.get_or_init(|| nabla_h(self.s, self.p, self.fd));
        DMatrix::from_fn(n, n, |c, j| (0..n).map(|i| d[(c * n + j) * n + i] * x[i]).sum())
    }

    /// ∇*∇ξ.
    pub fn rough_laplacian_xi(&self) -> &DVector<f64> {
        self.lap_xi.get_or_init(|| {
            DVector::from_vec(rough_laplacian_unchecked(self.s.chart(), self.s.xi(), self.p, self.fd))
        })
    }

    pub fn tau_xi(&self) -> &DVector<f64> {
        self.tau_xi.get_or_init(|| tau_xi_unchecked(self.s, self.p, self.fd))
    }

    pub fn t_phi(&self) -> &DVector<f64> {
        self.t_phi.get_or_init(|| t_phi_unchecked(self.s, self.p, self.fd))
    }

    pub fn delta_h(&self) -> &DVector<f64> {
        self.delta_h.get_or_init(|| delta_h_unchecked(self.s, self.p, self.fd))
    }

    pub fn bar_delta_j(&self) -> &DVector<f64> {
        self.bar_delta_j.get_or_init(|| bar_delta_j_unchecked(self.s, self.p, self.fd))
    }

    /// τ(J) = [∇̄*∇̄J, J].
    pub fn tau_j(&self) -> &DMatrix<f64> {
        self.tau_j.get_or_init(|| tau_j_unchecked(self.s, self.p, self.fd))
    }

    /// ∇̄²_{X,Y}J on 𝒟.
    pub fn bar_second_j(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let dd = self.bar_second.get_or_init(|| bar_second_derivative_j(self.s, self.p, self.fd));
        super::quantities::bar_second_j_along(dd, self.dim(), x, y)
    }

    /// ρ* as a coordinate bilinear form.
    pub fn rho_star(&self) -> &DMatrix<f64> {
        self.rho_star.get_or_init(|| star_ricci_matrix_unchecked(self.s, self.p, self.fd))
    }

    /// ρ̄* as a coordinate bilinear form (meaningful on 𝒟).
    pub fn rho_bar_star(&self) -> &DMatrix<f64> {
        self.rho_bar_star.get_or_init(|| star_ricci_bar_matrix_unchecked(self.s, self.p, self.fd))
    }

    /// dΦ(X,Y,Z), cyclic-sum convention.
    pub fn d_phi_form(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let n = self.dim();
        let d = self.d_phi_form.get_or_init(|| {
            exterior_derivative_unchecked(n, &self.s.fundamental_form_field(), self.p, self.fd)
                .expect("fundamental form is a 2-form")
        });
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    v += d[(i * n + j) * n + k] * x[i] * y[j] * z[k];
                }
            }
        }
        v
    }

    /// Sum over the 𝒟-frame of R̄(F_i, JF_i), as an endomorphism of 𝒟.
    pub fn bar_curvature_trace(&self) -> DMatrix<f64> {
        let n = self.dim();
        let rb = self.bar_curvature();
        let mut m = DMatrix::zeros(n, n);
        for f in self.d_frame() {
            m += rb.operator(f, &(&self.alg.phi * f));
        }
        m * &self.alg.proj
    }
}

/// Row-major entries.
pub fn matrix_entries(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// max |M − Mᵀ| entrywise.
pub fn antisymmetric_part_max(m: &DMatrix<f64>) -> f64 {
    let mut out: f64 = 0.0;
    for a in 0..m.nrows() {
        for b in 0..a {
            let d = (m[(a, b)] - m[(b, a)]).abs();
            if d.is_nan() {
                return f64::INFINITY;
            }
            out = out.max(d);
        }
    }
    out
}
