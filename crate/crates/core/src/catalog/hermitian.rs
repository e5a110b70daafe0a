//! Almost Hermitian bases and fibers.

use nalgebra::DMatrix;

use crate::chart_geometry::{Chart, Domain, TensorField};
use crate::submersion_warp::AlmostHermitianStructure;

/// J∂_x = −∂_y, J∂_y = ∂_x: the orientation compatible with the Heisenberg
/// structure under (x, y, z) ↦ (x, y).
fn standard_j(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for i in (0..dim).step_by(2) {
        j[(i + 1, i)] = -1.0;
        j[(i, i + 1)] = 1.0;
    }
    j
}

/// ℝ² with metric s·(dx² + dy²) and constant J.
pub fn flat_kahler(s: f64) -> AlmostHermitianStructure {
    flat_kahler_space(1, s)
}

/// ℝ^{2n} with metric s·Σdx_i² and constant J.
pub fn flat_kahler_space(n: usize, s: f64) -> AlmostHermitianStructure {
    assert!(s > 0.0 && n >= 1);
    let dim = 2 * n;
    let name = if n == 1 { "flat_kahler_R2".to_string() } else { format!("flat_kahler_R{dim}") };
    let domain = Domain::boxed(vec![-2.0; dim], vec![2.0; dim]).with_sample_box(vec![-1.0; dim], vec![1.0; dim]);
    let chart = Chart::new(name.clone(), domain, move |_: &[f64]| DMatrix::identity(dim, dim) * s);
    AlmostHermitianStructure::new(name, chart, TensorField::endomorphism(dim, move |_| standard_j(dim)))
}

/// Flat ℝ⁴ with J = Q J₀ Qᵀ, Q the rotation by θ = 0.3·x₂ + 0.2·x₁² in the
/// (x₁, x₃) plane. Q does not commute with J₀, so J is not cosymplectic; θ is
/// not a harmonic function, which keeps [∇*∇J, J] away from zero.
pub fn perturbed_hermitian_r4() -> AlmostHermitianStructure {
    let domain = Domain::boxed(vec![-2.0; 4], vec![2.0; 4]).with_sample_box(vec![-1.0; 4], vec![1.0; 4]);
    let chart = Chart::new("perturbed_hermitian_R4", domain, |_: &[f64]| DMatrix::identity(4, 4));
    let j = TensorField::endomorphism(4, |p| {
        let theta = 0.3 * p[1] + 0.2 * p[0] * p[0];
        let (s, c) = theta.sin_cos();
        let mut q = DMatrix::identity(4, 4);
        q[(0, 0)] = c;
        q[(0, 2)] = -s;
        q[(2, 0)] = s;
        q[(2, 2)] = c;
        &q * standard_j(4) * q.transpose()
    });
    AlmostHermitianStructure::new("perturbed_hermitian_R4", chart, j)
}
