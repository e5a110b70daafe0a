//! Riemannian submersions π: M^{2n+1} → M̂^{2n} whose fibers are the Reeb
//! orbits, and O'Neill's integrability tensor A.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use super::hermitian::{hermitian_harmonic_residual, hermitian_star_ricci_matrix, nabla_j_along, AlmostHermitianStructure};
use super::suite::{run_suite, SuiteReport, SuiteRow};
use crate::almost_contact::{contact_metric_defect, AlmostContactStructure};
use crate::chart_geometry::connection::nabla_vector_family;
use crate::chart_geometry::curvature::riemann_unchecked;
use crate::chart_geometry::fd::jacobian;
use crate::chart_geometry::tensor::vector_norm;
use crate::chart_geometry::{FdConfig, TolClass};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harmonicity::frame::random_unit;
use crate::harmonicity::point::{antisymmetric_part_max, PointData};
use crate::harmonicity::registry::Sides;
use crate::harmonicity::report::point_residuals;

pub type ProjectionFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
/// dπ at a point of M applied to a tangent vector.
pub type DifferentialFn = dyn Fn(&[f64], &DVector<f64>) -> DVector<f64> + Send + Sync;

/// Random horizontal tuples per point in the curvature check.
const TUPLES: usize = 3;

#[derive(Clone)]
pub struct SubmersionSetup {
    pub total: AlmostContactStructure,
    pub base: AlmostHermitianStructure,
    projection: Arc<ProjectionFn>,
    differential: Arc<DifferentialFn>,
}

impl std::fmt::Debug for SubmersionSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubmersionSetup")
            .field("total", &self.total.name())
            .field("base", &self.base.name())
            .finish_non_exhaustive()
    }
}

impl SubmersionSetup {
    /// Gates the setup at `points`: dπξ = 0, dπ is an isometry on 𝒟, and
    /// dπ(JZ) = Ĵdπ(Z) for Z ∈ 𝒟, all within tol_algebraic.
    pub fn new(
        total: AlmostContactStructure,
        base: AlmostHermitianStructure,
        projection: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        differential: impl Fn(&[f64], &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        points: &[Vec<f64>],
        fd: &FdConfig,
    ) -> Result<Self> {
        assert_eq!(total.dim(), base.dim() + 1, "fibers are one-dimensional");
        let setup = SubmersionSetup { total, base, projection: Arc::new(projection), differential: Arc::new(differential) };
        for p in points {
            setup.total.chart().check_point(p, fd)?;
            let residual = setup.compatibility_residual(p);
            if !(residual < fd.tol_algebraic) {
                return Err(Error::NotSubmersive { point: p.clone(), residual });
            }
        }
        Ok(setup)
    }

    pub fn project(&self, p: &[f64]) -> Vec<f64> {
        (self.projection)(p)
    }

    pub fn push(&self, p: &[f64], v: &DVector<f64>) -> DVector<f64> {
        (self.differential)(p, v)
    }

    /// Largest violation of the submersion and compatibility conditions at p.
    pub fn compatibility_residual(&self, p: &[f64]) -> f64 {
        let alg = self.total.algebra(p);
        let q = self.project(p);
        let gb = self.base.chart().metric(&q);
        let jb = self.base.j().eval_matrix(&q);
        let frame = crate::harmonicity::frame::d_frame(&alg);
        let pushed: Vec<DVector<f64>> = frame.iter().map(|f| self.push(p, f)).collect();
        let mut worst = vector_norm(&gb, &self.push(p, &alg.xi));
        for (a, fa) in frame.iter().enumerate() {
            for (b, pb) in pushed.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((pushed[a].dot(&(&gb * pb)) - target).abs());
            }
            let defect = self.push(p, &(&alg.phi * fa)) - &jb * &pushed[a];
            worst = worst.max(vector_norm(&gb, &defect));
        }
        if worst.is_nan() {
            f64::INFINITY
        } else {
            worst
        }
    }
}

/// A as a bilinear map: `A_XY = Σ_k Y^k · mats[k] · X`.
struct OneillA {
    mats: Vec<DMatrix<f64>>,
}

impl OneillA {
    fn at(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Self {
        let n = s.dim();
        let alg = s.algebra(p);
        // Constant-coefficient extensions of ∂_k, split into H and V parts.
        let family = |q: &[f64]| {
            let a = s.algebra(q);
            let mut out = Vec::with_capacity(2 * n * n);
            for k in 0..n {
                out.extend(a.proj.column(k).iter());
                out.extend((&a.xi * a.eta[k]).iter());
            }
            out
        };
        let nabla = nabla_vector_family(s.chart(), family, 2 * n, p, fd);
        let vert = &alg.xi * alg.eta.transpose();
        let mats = (0..n)
            .map(|k| (&vert * &nabla[2 * k] + &alg.proj * &nabla[2 * k + 1]) * &alg.proj)
            .collect();
        OneillA { mats }
    }

    fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = x.len();
        let mut out = DVector::zeros(n);
        for (k, m) in self.mats.iter().enumerate() {
            if y[k] != 0.0 {
                out += m * x * y[k];
            }
        }
        out
    }
}

/// O'Neill's A_XY = 𝒱(∇_{𝓗X}𝓗Y) + 𝓗(∇_{𝓗X}𝒱Y) at p.
pub fn oneill_a(setup: &SubmersionSetup, x: &DVector<f64>, y: &DVector<f64>, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>> {
    setup.total.chart().check_point(p, fd)?;
    Ok(OneillA::at(&setup.total, p, fd).apply(x, y))
}

/// Per-point view of the base at π(p), in the frame dπ(F_a).
struct BasePoint {
    q: Vec<f64>,
    /// Columns dπ(F_a): an orthonormal frame of T_{π(p)}M̂.
    frame: DMatrix<f64>,
    g: DMatrix<f64>,
}

impl BasePoint {
    fn new(setup: &SubmersionSetup, d: &PointData) -> Self {
        let q = setup.project(d.p);
        let cols: Vec<DVector<f64>> = d.d_frame().iter().map(|f| setup.push(d.p, f)).collect();
        let g = setup.base.chart().metric(&q);
        BasePoint { q, frame: DMatrix::from_columns(&cols), g }
    }

    fn components(&self, v: &DVector<f64>) -> Vec<f64> {
        (self.frame.transpose() * &self.g * v).iter().copied().collect()
    }
}

fn seeded(p: &[f64], salt: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let h = p.iter().fold(salt ^ 0x9e37_79b9_7f4a_7c15, |h, x| (h ^ x.to_bits()).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(h)
}

fn lie_bracket_lemma(d: &PointData) -> Sides {
    let s = d.s;
    let n = d.dim();
    let frame = d.d_frame().to_vec();
    let k = frame.len();
    let fields = |q: &[f64]| {
        let proj = s.algebra(q).proj;
        frame.iter().flat_map(|f| (&proj * f).iter().copied().collect::<Vec<_>>()).collect::<Vec<f64>>()
    };
    let jac = jacobian(fields, d.p, d.fd);
    let values: Vec<DVector<f64>> = frame.iter().map(|f| &d.alg.proj * f).collect();
    // ∂_j of field a, component i
    let partial = |a: usize, i: usize, j: usize| jac[j][a * n + i];
    let a_tensor = OneillA::at(s, d.p, d.fd);
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for a in 0..k {
        for b in 0..k {
            let bracket = DVector::from_fn(n, |i, _| {
                (0..n).map(|j| values[a][j] * partial(b, i, j) - values[b][j] * partial(a, i, j)).sum()
            });
            let expected = &d.alg.xi * (0.5 * d.alg.eta.dot(&bracket));
            lhs.extend(d.vector_components(&a_tensor.apply(&frame[a], &frame[b])));
            rhs.extend(d.vector_components(&expected));
        }
    }
    Sides::new(lhs, rhs)
}

fn vertical_arguments(d: &PointData) -> Sides {
    let a = OneillA::at(d.s, d.p, d.fd);
    let xi = &d.alg.xi;
    let mut lhs = d.vector_components(&a.apply(xi, xi));
    let mut rhs = vec![0.0; lhs.len()];
    for f in d.d_frame() {
        lhs.extend(d.vector_components(&a.apply(xi, f)));
        rhs.extend(vec![0.0; d.dim()]);
        // A_X is skew: ⟨A_Xξ, F⟩ = −⟨A_XF, ξ⟩.
        for e in d.d_frame() {
            lhs.push(d.alg.inner(&a.apply(f, xi), e));
            rhs.push(-d.alg.inner(&a.apply(f, e), xi));
        }
    }
    Sides::new(lhs, rhs)
}

fn contact_form_of_a(d: &PointData) -> Sides {
    let a = OneillA::at(d.s, d.p, d.fd);
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for z in d.d_frame() {
        for w in d.d_frame() {
            lhs.extend(d.vector_components(&a.apply(z, w)));
            let jz = &d.alg.phi * z;
            rhs.extend(d.vector_components(&(&d.alg.xi * d.alg.inner(&jz, w))));
        }
    }
    Sides::new(lhs, rhs)
}

/// Sign of the A-terms in the horizontal curvature relation when R, R̂ and
/// R̄ all use R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]:
/// ⟨R(X,Y)Z,H⟩ = ⟨R̂(X̂,Ŷ)Ẑ,Ĥ⟩ + s(2⟨A_XY,A_ZH⟩ − ⟨A_YZ,A_XH⟩ − ⟨A_ZX,A_YH⟩), s = 1.
pub const ONEILL_SIGN: f64 = 1.0;

/// Shift c in ρ̄*(X,Y) = ρ̂*(X̂,Ŷ) + c⟨X,Y⟩ for a submersive contact metric
/// structure, with the curvature convention of [`ONEILL_SIGN`].
pub const STAR_RICCI_SHIFT: f64 = -2.0;

fn horizontal_curvature_sides(setup: &SubmersionSetup, d: &PointData, sign: f64) -> Sides {
    let a = OneillA::at(d.s, d.p, d.fd);
    let base = BasePoint::new(setup, d);
    let rb = riemann_unchecked(setup.base.chart(), &base.q, d.fd);
    let mut rng = seeded(d.p, 0x32);
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for _ in 0..TUPLES {
        let [x, y, z, h] = std::array::from_fn(|_| random_unit(d.d_frame(), &d.alg, &mut rng));
        lhs.push(d.alg.inner(&d.riemann().apply(&x, &y, &z), &h));
        let push = |v: &DVector<f64>| setup.push(d.p, v);
        let hat = rb.apply(&push(&x), &push(&y), &push(&z)).dot(&(&base.g * push(&h)));
        let ga = |u: &DVector<f64>, v: &DVector<f64>, s: &DVector<f64>, t: &DVector<f64>| {
            d.alg.inner(&a.apply(u, v), &a.apply(s, t))
        };
        rhs.push(hat + sign * (2.0 * ga(&x, &y, &z, &h) - ga(&y, &z, &x, &h) - ga(&z, &x, &y, &h)));
    }
    Sides::new(lhs, rhs)
}

/// Residual of the horizontal curvature relation at p with the A-terms
/// weighted by `sign` ([`ONEILL_SIGN`] is the consistent choice).
pub fn horizontal_curvature_defect(setup: &SubmersionSetup, p: &[f64], fd: &FdConfig, sign: f64) -> Result<f64> {
    setup.total.chart().check_point(p, fd)?;
    Ok(horizontal_curvature_sides(setup, &PointData::new(&setup.total, p, fd), sign).residual())
}

fn h_vanishes(d: &PointData) -> Sides {
    Sides::zero(d.endomorphism_components(d.h()))
}

fn pushed_derivative_of_j(setup: &SubmersionSetup, d: &PointData) -> Sides {
    let base = BasePoint::new(setup, d);
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for x in d.d_frame() {
        let qx = d.bar_nabla_j_along(x);
        let xb = setup.push(d.p, x);
        let hx = nabla_j_along(&setup.base, &xb, &base.q, d.fd);
        for y in d.d_frame() {
            lhs.extend(base.components(&setup.push(d.p, &(&qx * y))));
            rhs.extend(base.components(&(&hx * setup.push(d.p, y))));
        }
    }
    Sides::new(lhs, rhs)
}

fn base_star_ricci(setup: &SubmersionSetup, d: &PointData) -> DMatrix<f64> {
    let base = BasePoint::new(setup, d);
    let rho = hermitian_star_ricci_matrix(&setup.base, &base.q, d.fd).unwrap_or_else(|_| {
        let m = setup.base.dim();
        DMatrix::from_element(m, m, f64::NAN)
    });
    base.frame.transpose() * rho * &base.frame
}

fn star_ricci_shift_sides(setup: &SubmersionSetup, d: &PointData, shift: f64) -> Sides {
    let lhs = d.d_bilinear_components(d.rho_bar_star());
    let k = lhs.nrows();
    let rhs = base_star_ricci(setup, d) + DMatrix::identity(k, k) * shift;
    Sides::new(lhs.iter().copied().collect(), rhs.iter().copied().collect())
}

/// ‖ρ̄* − ρ̂* − c⟨·,·⟩‖ over the 𝒟-frame at p.
pub fn star_ricci_shift_defect(setup: &SubmersionSetup, p: &[f64], fd: &FdConfig, shift: f64) -> Result<f64> {
    setup.total.chart().check_point(p, fd)?;
    Ok(star_ricci_shift_sides(setup, &PointData::new(&setup.total, p, fd), shift).residual())
}

fn symmetry_verdicts(setup: &SubmersionSetup, d: &PointData) -> Sides {
    let tol = d.fd.tol_d2;
    let total = antisymmetric_part_max(&d.d_bilinear_components(d.rho_bar_star())) < tol;
    let base = antisymmetric_part_max(&base_star_ricci(setup, d)) < tol;
    Sides::verdicts(total, base)
}

fn harmonic_verdicts(setup: &SubmersionSetup, d: &PointData) -> Sides {
    let tol = d.fd.tol_d2;
    let r = point_residuals(d);
    let q = setup.project(d.p);
    let base = hermitian_harmonic_residual(&setup.base, &q, d.fd).is_ok_and(|h| h.tension_norm < tol);
    Sides::verdicts(r.first < tol && r.second < tol, base)
}

/// The submersion identities at `points`. Rows needing a contact metric
/// total are reported inapplicable otherwise.
pub fn submersion_suite(setup: &SubmersionSetup, points: &[Vec<f64>], fd: &FdConfig) -> Result<SuiteReport> {
    submersion_suite_with(setup, points, fd, Execution::available())
}

pub fn submersion_suite_with(
    setup: &SubmersionSetup,
    points: &[Vec<f64>],
    fd: &FdConfig,
    exec: Execution,
) -> Result<SuiteReport> {
    for p in points {
        let residual = setup.compatibility_residual(p);
        if !(residual < fd.tol_algebraic) {
            return Err(Error::NotSubmersive { point: p.clone(), residual });
        }
        setup.base.chart().check_point(&setup.project(p), fd)?;
    }
    let cm = points.iter().all(|p| contact_metric_defect(&setup.total, p, fd) < fd.tol_d1);
    let rows = vec![
        SuiteRow::new("L3.1", "A_X Y = 1/2 eta([X,Y]) xi, X, Y in D", TolClass::D1, lie_bracket_lemma),
        SuiteRow::new("A_vertical", "A_xi = 0 and <A_X xi, Y> = -<A_X Y, xi>", TolClass::D1, vertical_arguments),
        SuiteRow::new("3.2", "A_Z W = <JZ,W> xi, Z, W in D", TolClass::D1, contact_form_of_a).when(cm),
        SuiteRow::new(
            "L3.2",
            "<R(X,Y)Z,H> = <R^(X,Y)Z,H>^ + 2<A_X Y, A_Z H> - <A_Y Z, A_X H> - <A_Z X, A_Y H>",
            TolClass::D2,
            move |d| horizontal_curvature_sides(setup, d, ONEILL_SIGN),
        ),
        SuiteRow::new("h0", "h = 0", TolClass::D1, h_vanishes).when(cm),
        SuiteRow::new(
            "L3.4",
            "pi_* nabla_bar_X J(Y) = nabla^_X^ J(Y^)",
            TolClass::D1,
            move |d| pushed_derivative_of_j(setup, d),
        ),
        SuiteRow::new("T3.1", "rho_bar*(X,Y) = rho^*(X^,Y^) - 2<X,Y>", TolClass::D2, move |d| {
            star_ricci_shift_sides(setup, d, STAR_RICCI_SHIFT)
        })
            .when(cm),
        SuiteRow::new(
            "T3.1_symmetry",
            "[rho_bar* symmetric] <=> [rho^* symmetric] (verdict agreement)",
            TolClass::D2,
            move |d| symmetry_verdicts(setup, d),
        )
        .when(cm),
        SuiteRow::new(
            "T3.1_harmonic",
            "[total harmonic] <=> [base J harmonic] (verdict agreement)",
            TolClass::D2,
            move |d| harmonic_verdicts(setup, d),
        )
        .when(cm),
    ];
    run_suite(&setup.total, &rows, points, fd, exec)
}
