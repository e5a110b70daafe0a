//! Where two readings of a formula disagree, both are evaluated: the one the
//! checks implement must pass, the other must fail by the predicted amount.

use harmonic_contact::almost_contact::{h_tensor, AlmostContactStructure};
use harmonic_contact::catalog::contact::unit_tangent_surface;
use harmonic_contact::catalog::heisenberg_submersion;
use harmonic_contact::chart_geometry::FdConfig;
use harmonic_contact::harmonicity::{check_identity, star_ricci_bar_matrix, star_ricci_matrix};
use harmonic_contact::submersion_warp::{
    horizontal_curvature_defect, star_ricci_shift_defect, ONEILL_SIGN, STAR_RICCI_SHIFT,
};
use nalgebra::{DMatrix, DVector};

/// g-orthonormal basis of ker η by Gram–Schmidt on the projected coordinate vectors.
fn d_frame(s: &AlmostContactStructure, p: &[f64]) -> DMatrix<f64> {
    let alg = s.algebra(p);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for k in 0..s.dim() {
        let mut v = alg.proj.column(k).into_owned();
        for b in &basis {
            v -= b * alg.inner(b, &v);
        }
        let norm = alg.norm(&v);
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    assert_eq!(basis.len(), s.dim() - 1);
    DMatrix::from_columns(&basis)
}

/// Residual of ρ̄* = ρ* + (2n−1)g + 2(n−1)g(h·,·) + c·g(h·,h·) on 𝒟, and λ² = |h²| on 𝒟.
fn star_ricci_gap(s: &AlmostContactStructure, p: &[f64], c: f64) -> (f64, f64) {
    let fd = FdConfig::default();
    let n = (s.dim() - 1) as f64 / 2.0;
    let g = s.chart().metric(p);
    let f = d_frame(s, p);
    let h = h_tensor(s, p, &fd).unwrap();
    let hf = &h * &f;
    let k = f.ncols();
    let lhs = f.transpose() * star_ricci_bar_matrix(s, p, &fd).unwrap() * &f;
    let rhs = f.transpose() * star_ricci_matrix(s, p, &fd).unwrap() * &f
        + DMatrix::identity(k, k) * (2.0 * n - 1.0)
        + f.transpose() * &g * &hf * (2.0 * (n - 1.0))
        + hf.transpose() * &g * &hf * c;
    let lambda2 = (hf.transpose() * &g * &hf)[(0, 0)];
    ((lhs - rhs).norm(), lambda2)
}

#[test]
fn hh_coefficient_of_the_star_ricci_relation() {
    for c in [4.0, -1.0, 0.5] {
        let s = unit_tangent_surface(c);
        let fd = FdConfig::default();
        let pts = s.chart().sample_points(5, 9, &fd);
        for p in &pts {
            let (implemented, lambda2) = star_ricci_gap(&s, p, -1.0);
            assert!(implemented < fd.tol_d2, "c = {c}: {implemented:e}");
            let (alternative, _) = star_ricci_gap(&s, p, -2.0);
            let predicted = 2f64.sqrt() * lambda2;
            assert!(lambda2 > 0.1);
            assert!((alternative - predicted).abs() < 1e-5, "c = {c}: {alternative} vs {predicted}");
        }
        assert!(check_identity("2.20", &s, &pts, &fd).unwrap().pass);
    }
}

#[test]
fn oneill_sign_on_the_heisenberg_submersion() {
    let setup = heisenberg_submersion().unwrap();
    let fd = FdConfig::default();
    for p in setup.total.chart().sample_points(5, 4, &fd) {
        assert!(horizontal_curvature_defect(&setup, &p, &fd, ONEILL_SIGN).unwrap() < fd.tol_d2);
        assert!(horizontal_curvature_defect(&setup, &p, &fd, -ONEILL_SIGN).unwrap() > 1.0);
    }
}

#[test]
fn star_ricci_shift_on_the_heisenberg_submersion() {
    let setup = heisenberg_submersion().unwrap();
    let fd = FdConfig::default();
    let n = 1.0;
    for p in setup.total.chart().sample_points(5, 4, &fd) {
        assert!(star_ricci_shift_defect(&setup, &p, &fd, STAR_RICCI_SHIFT).unwrap() < fd.tol_d2);
        // ρ̄* = −2g on 𝒟 here, so a shift of +4n misses by 6 on each of two
        // diagonal entries of an orthonormal frame.
        let off = star_ricci_shift_defect(&setup, &p, &fd, 4.0 * n).unwrap();
        assert!((off - 6.0 * 2f64.sqrt()).abs() < 1e-5, "{off}");
    }
}
