//! Closed-form contact metric examples.

use nalgebra::{DMatrix, DVector};

use crate::almost_contact::AlmostContactStructure;
use crate::chart_geometry::{Chart, Domain, TensorField};

/// Flat ℝ³ with ξ = ∂_z and φ rotating the (x, y) plane. Not contact metric.
pub fn euclidean() -> AlmostContactStructure {
    let domain = Domain::boxed(vec![-2.0; 3], vec![2.0; 3]).with_sample_box(vec![-1.0; 3], vec![1.0; 3]);
    let chart = Chart::new("euclidean", domain, |_: &[f64]| DMatrix::identity(3, 3));
    let xi = TensorField::vector(3, |_| DVector::from_vec(vec![0.0, 0.0, 1.0]));
    let phi = TensorField::endomorphism(3, |_| {
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    });
    AlmostContactStructure::from_xi_phi("euclidean", chart, xi, phi)
}

/// Heisenberg structure on ℝ^{2n+1}, coordinates (x_1, y_1, …, x_n, y_n, z):
/// η = ½(dz − Σ y_i dx_i), ξ = 2∂_z, g = η⊗η + ¼Σ(dx_i² + dy_i²),
/// φ∂_{y_i} = ∂_{x_i} + y_i∂_z, φ∂_{x_i} = −∂_{y_i}.
///
/// With these constants g(X, φY) = ½dη(X, Y) in the unnormalized dη.
pub fn sasakian(n: usize) -> AlmostContactStructure {
    assert!(n >= 1);
    let dim = 2 * n + 1;
    let z = dim - 1;
    let eta_at = move |p: &[f64]| {
        let mut eta = DVector::zeros(dim);
        for i in 0..n {
            eta[2 * i] = -0.5 * p[2 * i + 1];
        }
        eta[z] = 0.5;
        eta
    };
    let metric = move |p: &[f64]| {
        let eta = eta_at(p);
        let mut g = &eta * eta.transpose();
        for k in 0..z {
            g[(k, k)] += 0.25;
        }
        g
    };
    let name = if n == 1 { "sasakian_R3".to_string() } else { format!("sasakian_R{}", dim) };
    let domain = Domain::boxed(vec![-2.0; dim], vec![2.0; dim]).with_sample_box(vec![-1.0; dim], vec![1.0; dim]);
    let chart = Chart::new(name.clone(), domain, metric);
    let xi = TensorField::vector(dim, move |_| {
        let mut v = DVector::zeros(dim);
        v[z] = 2.0;
        v
    });
    let eta = TensorField::covector(dim, eta_at);
    let phi = TensorField::endomorphism(dim, move |p| {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..n {
            let (x, y) = (2 * i, 2 * i + 1);
            m[(y, x)] = -1.0;
            m[(x, y)] = 1.0;
            m[(z, y)] = p[y];
        }
        m
    });
    AlmostContactStructure::new(name, chart, xi, eta, phi)
}

/// Pieces of the unit tangent bundle of the surface e^{2σ}(dx² + dy²),
/// e^σ = 1/(1 + c r²/4), curvature c. Chart coordinates are (u, v, θ) with
/// x = u/k, y = v/k: stretching by k = max(1, √|c|) keeps the nested
/// difference quotients equally accurate for every c.
#[derive(Debug, Clone, Copy)]
struct UnitTangent {
    c: f64,
    k: f64,
}

struct UnitTangentPoint {
    g: DMatrix<f64>,
    xi: DVector<f64>,
    eta: DVector<f64>,
    /// Horizontal lift of u⊥ scaled to unit length, and the unit vertical.
    e1: DVector<f64>,
    e2: DVector<f64>,
}

impl UnitTangent {
    fn new(c: f64) -> Self {
        UnitTangent { c, k: c.abs().sqrt().max(1.0) }
    }

    fn at(self, p: &[f64]) -> UnitTangentPoint {
        let k = self.k;
        let (x, y, th) = (p[0] / k, p[1] / k, p[2]);
        let q = 1.0 + 0.25 * self.c * (x * x + y * y);
        let es = 1.0 / q;
        let sx = -0.5 * self.c * x / q;
        let sy = -0.5 * self.c * y / q;
        // connection form ω = −σ_y dx + σ_x dy of the frame e^{−σ}∂_x, e^{−σ}∂_y
        let omega = DVector::from_vec(vec![-sy, sx, 0.0]);
        let dtheta_plus_omega = DVector::from_vec(vec![-sy, sx, 1.0]);
        let mut sasaki = &dtheta_plus_omega * dtheta_plus_omega.transpose();
        sasaki[(0, 0)] += es * es;
        sasaki[(1, 1)] += es * es;
        let lift = |a: f64, b: f64| {
            let v = DVector::from_vec(vec![a / es, b / es, 0.0]);
            let w = omega.dot(&v);
            DVector::from_vec(vec![v[0], v[1], -w])
        };
        let (s, co) = th.sin_cos();
        // everything above is in (x, y, θ); pull back to (u, v, θ)
        let jac = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / k, 1.0 / k, 1.0]));
        let push = DMatrix::from_diagonal(&DVector::from_vec(vec![k, k, 1.0]));
        let g = &jac * sasaki * &jac * 0.25;
        let xi = &push * lift(co, s) * 2.0;
        let e1 = &push * lift(-s, co) * 2.0;
        let e2 = DVector::from_vec(vec![0.0, 0.0, 2.0]);
        let eta = &jac * DVector::from_vec(vec![0.5 * es * co, 0.5 * es * s, 0.0]);
        UnitTangentPoint { g, xi, eta, e1, e2 }
    }
}

/// Contact metric structure on T₁S for the constant-curvature-c surface:
/// g = ¼ Sasaki metric, ξ = 2·(horizontal lift of u), φE₁ = E₂, φE₂ = −E₁ for
/// E₁ = 2·hor(u⊥), E₂ = 2∂_θ. This orientation of φ is the one for which
/// g(X, φY) = ½dη; the opposite one gives Φ = −½dη.
pub fn unit_tangent_surface(c: f64) -> AlmostContactStructure {
    let ut = UnitTangent::new(c);
    // Keep 1 + c r²/4 ≥ 0.5 on the whole box so the conformal factor stays tame.
    let half = if c < 0.0 { (2.0 / (-c)).sqrt().min(1.2) } else { 1.2 };
    let (outer, sample) = (half * ut.k, 0.6 * half);
    let domain = Domain::boxed(vec![-outer, -outer, -4.0], vec![outer, outer, 4.0])
        .with_sample_box(vec![-sample, -sample, -3.0], vec![sample, sample, 3.0]);
    let name = format!("unit_tangent_surface(c={c})");
    let chart = Chart::new(name.clone(), domain, move |p: &[f64]| ut.at(p).g);
    let xi = TensorField::vector(3, move |p| ut.at(p).xi);
    let eta = TensorField::covector(3, move |p| ut.at(p).eta);
    let phi = TensorField::endomorphism(3, move |p| {
        let a = ut.at(p);
        let e1_flat = &a.g * &a.e1;
        let e2_flat = &a.g * &a.e2;
        &a.e2 * e1_flat.transpose() - &a.e1 * e2_flat.transpose()
    });
    AlmostContactStructure::new(name, chart, xi, eta, phi)
}

/// (κ, μ) = (c(2 − c), −2c) for the unit tangent bundle of curvature c, as
/// known in closed form for this normalization; used as an independent oracle
/// for the numerical fit.
pub fn unit_tangent_kappa_mu(c: f64) -> (f64, f64) {
    (c * (2.0 - c), -2.0 * c)
}
