//! Identities for the two warped products, checked against the Hermitian
//! factor evaluated independently on its own chart.

use nalgebra::{DMatrix, DVector};

use super::hermitian::{
    hermitian_harmonic_residual, hermitian_residual_scaled, nabla_j_along, second_derivative_j, AlmostHermitianStructure,
};
use super::suite::{run_suite, SuiteReport, SuiteRow};
use super::warped::{Orientation, WarpedProductSpec};
use crate::chart_geometry::chart::metric_inverse_unchecked;
use crate::chart_geometry::connection::{christoffel_unchecked, rough_laplacian_unchecked};
use crate::chart_geometry::fd::jacobian;
use crate::chart_geometry::{FdConfig, TensorField, TolClass};
use crate::error::Result;
use crate::exec::Execution;
use crate::harmonicity::point::PointData;
use crate::harmonicity::quantities::bar_rough_laplacian_j_unchecked;
use crate::harmonicity::registry::Sides;
use crate::harmonicity::report::point_residuals;

/// Where the Hermitian factor sits among the coordinates of M.
#[derive(Clone, Copy)]
struct Layout {
    offset: usize,
    m: usize,
}

impl Layout {
    fn of(spec: &WarpedProductSpec) -> Self {
        let m = spec.base_or_fiber.dim();
        match spec.orientation {
            Orientation::BaseTimesLine => Layout { offset: 0, m },
            Orientation::LineTimesFiber => Layout { offset: 1, m },
        }
    }

    fn line(self) -> usize {
        if self.offset == 0 {
            self.m
        } else {
            0
        }
    }

    fn vector(self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m + 1);
        out.rows_mut(self.offset, self.m).copy_from(v);
        out
    }

    fn matrix(self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m + 1, self.m + 1);
        out.view_mut((self.offset, self.offset), (self.m, self.m)).copy_from(a);
        out
    }

    fn restrict(self, v: &DVector<f64>) -> DVector<f64> {
        v.rows(self.offset, self.m).into_owned()
    }
}

/// f and its coordinate differential at the warp's argument.
fn warp_jet(f: &TensorField, w: &[f64], fd: &FdConfig) -> (f64, DVector<f64>) {
    let value = f.eval_scalar(w);
    let jac = jacobian(|q| vec![f.eval_scalar(q)], w, fd);
    (value, DVector::from_iterator(w.len(), jac.iter().map(|c| c[0])))
}

struct Ctx<'a> {
    spec: &'a WarpedProductSpec,
    factor: &'a AlmostHermitianStructure,
    layout: Layout,
}

impl Ctx<'_> {
    fn factor_point(&self, d: &PointData) -> Vec<f64> {
        self.spec.factor_point(d.p)
    }

    fn jet(&self, d: &PointData) -> (f64, DVector<f64>) {
        warp_jet(&self.spec.warp, &self.spec.warp_point(d.p), d.fd)
    }

    /// ∇f on M for a warp defined on the base.
    fn base_gradient(&self, d: &PointData) -> (f64, DVector<f64>) {
        let (f, df) = self.jet(d);
        let ginv = metric_inverse_unchecked(self.factor.chart(), &self.factor_point(d));
        (f, self.layout.vector(&(ginv * df)))
    }
}

// ---- M̂ ×_f ℝ --------------------------------------------------------------

fn reeb_tension(d: &PointData) -> Sides {
    Sides::zero(d.vector_components(d.tau_xi()))
}

fn t_phi_zero(d: &PointData) -> Sides {
    Sides::zero(d.vector_components(d.t_phi()))
}

fn reeb_laplacian_base(c: &Ctx, d: &PointData) -> Sides {
    let (f, grad) = c.base_gradient(d);
    let rhs = &d.alg.xi * (d.alg.inner(&grad, &grad) / (f * f));
    Sides::new(d.vector_components(d.rough_laplacian_xi()), d.vector_components(&rhs))
}

fn reeb_parallel_on_basic(d: &PointData) -> Sides {
    Sides::zero(d.endomorphism_components(&(d.nabla_xi() * &d.alg.proj)))
}

fn reeb_acceleration(c: &Ctx, d: &PointData) -> Sides {
    let (f, grad) = c.base_gradient(d);
    Sides::new(d.vector_components(&(d.nabla_xi() * &d.alg.xi)), d.vector_components(&(-grad / f)))
}

fn bar_j_along_reeb(d: &PointData) -> Sides {
    Sides::zero(d.d_endomorphism_components(&d.bar_nabla_j_along(&d.alg.xi)))
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

fn christoffel_column(gamma: &crate::chart_geometry::Array3, i: usize, j: usize) -> DVector<f64> {
    DVector::from_fn(gamma.dim, |k, _| gamma.get(k, i, j))
}

fn mixed_connection(c: &Ctx, d: &PointData) -> Sides {
    let (f, df) = c.jet(d);
    let gamma = christoffel_unchecked(d.s.chart(), d.p, d.fd);
    let t = c.layout.line();
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for i in 0..c.layout.m {
        let v = unit(d.dim(), t) * (df[i] / f);
        lhs.extend(d.vector_components(&christoffel_column(&gamma, i, t)));
        rhs.extend(d.vector_components(&v));
        lhs.extend(d.vector_components(&christoffel_column(&gamma, t, i)));
        rhs.extend(d.vector_components(&v));
    }
    Sides::new(lhs, rhs)
}

fn vertical_connection(c: &Ctx, d: &PointData) -> Sides {
    let (f, grad) = c.base_gradient(d);
    let gamma = christoffel_unchecked(d.s.chart(), d.p, d.fd);
    let t = c.layout.line();
    // |∂_t|² = f², and the line itself is flat.
    let rhs = -grad * f;
    Sides::new(d.vector_components(&christoffel_column(&gamma, t, t)), d.vector_components(&rhs))
}

fn factor_connection(c: &Ctx, d: &PointData) -> Sides {
    let gamma = christoffel_unchecked(d.s.chart(), d.p, d.fd);
    let hat = christoffel_unchecked(c.factor.chart(), &c.factor_point(d), d.fd);
    let o = c.layout.offset;
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for i in 0..c.layout.m {
        for j in 0..c.layout.m {
            lhs.extend(d.vector_components(&christoffel_column(&gamma, i + o, j + o)));
            rhs.extend(d.vector_components(&c.layout.vector(&christoffel_column(&hat, i, j))));
        }
    }
    Sides::new(lhs, rhs)
}

fn second_derivative_pushforward(c: &Ctx, d: &PointData) -> Sides {
    let m = c.layout.m;
    let q = c.factor_point(d);
    let dd = second_derivative_j(c.factor, &q, d.fd);
    let hat_second = |x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>| {
        DVector::from_fn(m, |cc, _| {
            let mut v = 0.0;
            for dk in 0..m {
                for a in 0..m {
                    for b in 0..m {
                        v += dd[((cc * m + dk) * m + a) * m + b] * z[dk] * y[a] * x[b];
                    }
                }
            }
            v
        })
    };
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for x in d.d_frame() {
        for y in d.d_frame() {
            let second = d.bar_second_j(x, y);
            for z in d.d_frame() {
                let pushed = c.layout.vector(&c.layout.restrict(&(&second * z)));
                lhs.extend(d.vector_components(&pushed));
                let r = hat_second(&c.layout.restrict(x), &c.layout.restrict(y), &c.layout.restrict(z));
                rhs.extend(d.vector_components(&c.layout.vector(&r)));
            }
        }
    }
    Sides::new(lhs, rhs)
}

/// [∇̂*∇̂J, J] + 2f⁻¹J∇̂_{∇f}J on the base.
fn base_equation(c: &Ctx, d: &PointData) -> DMatrix<f64> {
    let q = c.factor_point(d);
    let (f, df) = c.jet(d);
    let ginv = metric_inverse_unchecked(c.factor.chart(), &q);
    let grad = ginv * df;
    let tension = hermitian_harmonic_residual(c.factor, &q, d.fd)
        .map(|r| r.tension)
        .unwrap_or_else(|_| DMatrix::from_element(c.layout.m, c.layout.m, f64::NAN));
    let j = c.factor.j().eval_matrix(&q);
    tension + j * nabla_j_along(c.factor, &grad, &q, d.fd) * (2.0 / f)
}

fn projected_tension(c: &Ctx, d: &PointData) -> Sides {
    let p = &d.alg.proj;
    let lhs = p * d.tau_j() * p;
    let rhs = c.layout.matrix(&base_equation(c, d));
    Sides::new(d.d_endomorphism_components(&lhs), d.d_endomorphism_components(&rhs))
}

fn harmonic_at(d: &PointData) -> bool {
    let r = point_residuals(d);
    r.first < d.fd.tol_d2 && r.second < d.fd.tol_d2
}

fn base_equation_verdicts(c: &Ctx, d: &PointData) -> Sides {
    let eq = c.layout.matrix(&base_equation(c, d));
    let norm = d.d_endomorphism_components(&eq).iter().map(|v| v * v).sum::<f64>().sqrt();
    Sides::verdicts(harmonic_at(d), norm < d.fd.tol_d2)
}

fn kahler_null_verdicts(c: &Ctx, d: &PointData) -> Sides {
    let q = c.factor_point(d);
    let null = super::hermitian::kahler_null_check(c.factor, &c.spec.warp, &q, d.fd).is_ok_and(|v| v < d.fd.tol_d1);
    Sides::verdicts(harmonic_at(d), null)
}

// ---- ℝ ×_f M̌ ----------------------------------------------------------------

/// f(t) and f′(t).
fn line_jet(c: &Ctx, d: &PointData) -> (f64, f64) {
    let (f, df) = c.jet(d);
    (f, df[0])
}

fn reeb_laplacian_line(c: &Ctx, d: &PointData) -> Sides {
    let (f, fp) = line_jet(c, d);
    let rhs = &d.alg.xi * (2.0 * d.n() as f64 * (fp / f).powi(2));
    Sides::new(d.vector_components(d.rough_laplacian_xi()), d.vector_components(&rhs))
}

fn umbilic_fibers(c: &Ctx, d: &PointData) -> Sides {
    let (f, fp) = line_jet(c, d);
    let p = &d.alg.proj;
    let mut lhs = d.endomorphism_components(&(d.nabla_xi() * p));
    let mut rhs = d.endomorphism_components(&(p * (fp / f)));
    // ∇_{∂_i}∂_j = ∇̌_{∂_i}∂_j − f f′ ǧ_ij ∂_t
    let q = c.factor_point(d);
    let gamma = christoffel_unchecked(d.s.chart(), d.p, d.fd);
    let check = christoffel_unchecked(c.factor.chart(), &q, d.fd);
    let gc = c.factor.chart().metric(&q);
    for i in 0..c.layout.m {
        for j in 0..c.layout.m {
            lhs.extend(d.vector_components(&christoffel_column(&gamma, i + 1, j + 1)));
            let mut v = c.layout.vector(&christoffel_column(&check, i, j));
            v[0] -= f * fp * gc[(i, j)];
            rhs.extend(d.vector_components(&v));
        }
    }
    Sides::new(lhs, rhs)
}

fn fiber_derivative_of_j(c: &Ctx, d: &PointData) -> Sides {
    let q = c.factor_point(d);
    let mut lhs = d.endomorphism_components(&d.nabla_phi_along(&d.alg.xi));
    let mut rhs = vec![0.0; lhs.len()];
    for x in d.d_frame() {
        let bar = d.bar_nabla_j_along(x);
        let check = nabla_j_along(c.factor, &c.layout.restrict(x), &q, d.fd);
        for y in d.d_frame() {
            lhs.extend(d.vector_components(&(&bar * y)));
            rhs.extend(d.vector_components(&c.layout.vector(&(&check * c.layout.restrict(y)))));
        }
    }
    Sides::new(lhs, rhs)
}

/// δJ of the fiber for the slice metric f(t)²ǧ.
fn slice_codifferential(c: &Ctx, d: &PointData) -> DVector<f64> {
    let (f, _) = line_jet(c, d);
    hermitian_residual_scaled(c.factor, &c.factor_point(d), d.fd, f).delta_j
}

fn t_phi_through_fiber(c: &Ctx, d: &PointData) -> Sides {
    let (f, fp) = line_jet(c, d);
    let rhs = c.layout.vector(&slice_codifferential(c, d)) * (-fp / f);
    Sides::new(d.vector_components(d.t_phi()), d.vector_components(&rhs))
}

fn rough_laplacian_of_j(c: &Ctx, d: &PointData) -> Sides {
    let (f, _) = line_jet(c, d);
    let q = c.factor_point(d);
    let m = c.layout.m;
    let lap = DMatrix::from_row_slice(m, m, &rough_laplacian_unchecked(c.factor.chart(), c.factor.j(), &q, d.fd));
    let p = &d.alg.proj;
    let lhs = p * bar_rough_laplacian_j_unchecked(d.s, d.p, d.fd) * p;
    let rhs = c.layout.matrix(&(lap / (f * f)));
    Sides::new(d.d_endomorphism_components(&lhs), d.d_endomorphism_components(&rhs))
}

fn fiber_harmonic_verdicts(c: &Ctx, d: &PointData) -> Sides {
    let (f, _) = line_jet(c, d);
    let r = hermitian_residual_scaled(c.factor, &c.factor_point(d), d.fd, f);
    Sides::verdicts(harmonic_at(d), r.tension_norm < d.fd.tol_d2)
}

/// Identities for the warped product described by `spec`, at points of its
/// chart. Verdict rows whose hypotheses fail on the sample are reported
/// inapplicable.
pub fn warp_theorem_suite(spec: &WarpedProductSpec, points: &[Vec<f64>], fd: &FdConfig) -> Result<SuiteReport> {
    warp_theorem_suite_with(spec, points, fd, Execution::available())
}

pub fn warp_theorem_suite_with(
    spec: &WarpedProductSpec,
    points: &[Vec<f64>],
    fd: &FdConfig,
    exec: Execution,
) -> Result<SuiteReport> {
    let total = spec.build()?;
    for p in points {
        total.chart().check_point(p, fd)?;
    }
    let c = Ctx { spec, factor: &spec.base_or_fiber, layout: Layout::of(spec) };
    let c = &c;
    let factor_residuals: Vec<_> = points
        .iter()
        .map(|p| hermitian_harmonic_residual(c.factor, &spec.factor_point(p), fd))
        .collect::<Result<_>>()?;
    let rows = match spec.orientation {
        Orientation::BaseTimesLine => {
            let base_harmonic = factor_residuals.iter().all(|r| r.tension_norm < fd.tol_d2);
            vec![
                SuiteRow::new("P3.1", "tau(xi) = 0", TolClass::D2, reeb_tension),
                SuiteRow::new("T_phi", "T(phi) = 0", TolClass::D2, t_phi_zero),
                SuiteRow::new("3.3", "rough_laplacian(xi) = f^-2 |grad f|^2 xi", TolClass::D2, move |d| {
                    reeb_laplacian_base(c, d)
                }),
                SuiteRow::new("3.4", "nabla_X xi = 0, X basic", TolClass::D1, reeb_parallel_on_basic),
                SuiteRow::new("3.5", "nabla_xi xi = -f^-1 grad f", TolClass::D1, move |d| reeb_acceleration(c, d)),
                SuiteRow::new("3.7", "nabla_bar_xi J = 0", TolClass::D1, bar_j_along_reeb),
                SuiteRow::new("L3.3.1", "nabla_X V = nabla_V X = <X, f^-1 grad f> V", TolClass::D1, move |d| {
                    mixed_connection(c, d)
                }),
                SuiteRow::new("L3.3.2", "H(nabla_V W) = -<V,W> f^-1 grad f, V(nabla_V W) = 0", TolClass::D1, move |d| {
                    vertical_connection(c, d)
                }),
                SuiteRow::new("L3.3.3", "nabla_X Y = nabla^_X Y", TolClass::D1, move |d| factor_connection(c, d)),
                SuiteRow::new("3.9", "pi_* nabla_bar^2_{X,Y} J(Z) = nabla^^2_{X^,Y^} J(Z^)", TolClass::D2, move |d| {
                    second_derivative_pushforward(c, d)
                }),
                SuiteRow::new(
                    "P3.2",
                    "pi_* [nabla_bar* nabla_bar J, J] = [nabla^* nabla^ J, J] + 2 f^-1 J nabla^_{grad f} J",
                    TolClass::D2,
                    move |d| projected_tension(c, d),
                ),
                SuiteRow::new(
                    "T3.2",
                    "[harmonic] <=> [nabla^* nabla^ J, J] + 2 f^-1 J nabla^_{grad f} J = 0 (verdict agreement)",
                    TolClass::D2,
                    move |d| base_equation_verdicts(c, d),
                ),
                SuiteRow::new(
                    "T3.2_kahler_null",
                    "harmonic base: [harmonic] <=> [nabla^_{grad f} J = 0] (verdict agreement)",
                    TolClass::D2,
                    move |d| kahler_null_verdicts(c, d),
                )
                .when(base_harmonic),
            ]
        }
        Orientation::LineTimesFiber => {
            let cosymplectic = factor_residuals.iter().all(|r| r.delta_j_norm < fd.tol_d1);
            let constant = points.iter().all(|p| warp_jet(&spec.warp, &spec.warp_point(p), fd).1[0].abs() < fd.tol_d1);
            vec![
                SuiteRow::new("P3.3", "tau(xi) = 0", TolClass::D2, reeb_tension),
                SuiteRow::new("lap_xi", "rough_laplacian(xi) = 2n f^-2 (f')^2 xi", TolClass::D2, move |d| {
                    reeb_laplacian_line(c, d)
                }),
                SuiteRow::new(
                    "3.10",
                    "nabla_X xi = f^-1 f' X, nabla_X Y = nabla_check_X Y - f^-1 f' <X,Y> xi",
                    TolClass::D1,
                    move |d| umbilic_fibers(c, d),
                ),
                SuiteRow::new("L3.5", "nabla_xi phi = 0, nabla_bar_X J(Y) = nabla_check_X J(Y)", TolClass::D1, move |d| {
                    fiber_derivative_of_j(c, d)
                }),
                SuiteRow::new("3.11", "nabla_bar_xi J = 0", TolClass::D1, bar_j_along_reeb),
                SuiteRow::new("T_phi", "T(phi) = -f^-1 f' delta_check J (slice metric)", TolClass::D2, move |d| {
                    t_phi_through_fiber(c, d)
                }),
                SuiteRow::new(
                    "rough_J",
                    "nabla_bar* nabla_bar J = nabla_check* nabla_check J (slice metric)",
                    TolClass::D2,
                    move |d| rough_laplacian_of_j(c, d),
                ),
                SuiteRow::new(
                    "T3.3",
                    "fiber cosymplectic or f constant: [harmonic] <=> [fiber J harmonic] (verdict agreement)",
                    TolClass::D2,
                    move |d| fiber_harmonic_verdicts(c, d),
                )
                .when(cosymplectic || constant),
            ]
        }
    };
    run_suite(&total, &rows, points, fd, exec)
}
