use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::structure::{axiom_residuals, AlmostContactStructure, AxiomReport};
use crate::chart_geometry::curvature::riemann_unchecked;
use crate::chart_geometry::forms::exterior_derivative_unchecked;
use crate::chart_geometry::tensor::{endomorphism_norm, vector_norm};
use crate::chart_geometry::FdConfig;
use crate::error::Result;
use crate::exec::{max_mean, Execution};
use crate::harmonicity::quantities::tau_xi_unchecked;

/// Metric norm of a (0,2) tensor, √(g^{ik} g^{jl} B_ij B_kl).
pub fn bilinear_norm(ginv: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (ginv * b * ginv * b.transpose()).trace().max(0.0).sqrt()
}

/// |Φ − ½dη|, with dη in the unnormalized convention dη(X,Y) = Xη(Y) − Yη(X) − η([X,Y]).
///
/// The factor ½ is what makes ∇_Xξ = −φX − φhX hold; see the notes on
/// normalization in the README.
pub fn contact_metric_defect(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> f64 {
    let n = s.dim();
    let alg = s.algebra(p);
    let d_eta = match exterior_derivative_unchecked(n, s.eta(), p, fd) {
        Ok(v) => DMatrix::from_row_slice(n, n, &v),
        Err(_) => return f64::INFINITY,
    };
    let phi_form = &alg.g * &alg.phi;
    bilinear_norm(&alg.ginv, &(phi_form - d_eta * 0.5))
}

/// |Ric(ξ) − ⟨Ric(ξ), ξ⟩ξ|: zero iff ξ is a Ricci eigenvector.
pub fn ricci_eigen_defect(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> f64 {
    let alg = s.algebra(p);
    let r = riemann_unchecked(s.chart(), p, fd);
    let ric_xi = &alg.ginv * r.ricci_tensor() * &alg.xi;
    let along = alg.inner(&ric_xi, &alg.xi);
    vector_norm(&alg.g, &(ric_xi - &alg.xi * along))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureClassification {
    pub is_contact_metric: bool,
    pub is_k_contact: bool,
    pub is_h_contact: bool,
    /// ξ is a Ricci eigenvector; reported alongside H-contact, not used to define it.
    pub xi_ricci_eigenvector: bool,
    /// Max residual per flag: `contact_metric`, `k_contact`, `h_contact`, `ricci_eigenvector`.
    pub residuals: BTreeMap<String, f64>,
    pub axioms: AxiomReport,
}

pub fn classify(s: &AlmostContactStructure, points: &[Vec<f64>], fd: &FdConfig) -> Result<StructureClassification> {
    classify_with(s, points, fd, Execution::available())
}

pub fn classify_with(
    s: &AlmostContactStructure,
    points: &[Vec<f64>],
    fd: &FdConfig,
    exec: Execution,
) -> Result<StructureClassification> {
    for p in points {
        s.chart().check_point(p, fd)?;
    }
    let axioms = axiom_residuals(s, points)?;
    let rows = exec.map(points, |_, p| {
        let alg = s.algebra(p);
        let h = s.h_field(fd).eval_matrix(p);
        [
            contact_metric_defect(s, p, fd),
            endomorphism_norm(&alg.g, &alg.ginv, &h),
            vector_norm(&alg.g, &tau_xi_unchecked(s, p, fd)),
            ricci_eigen_defect(s, p, fd),
        ]
    });
    let column = |k: usize| max_mean(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()).0;
    let (cm, k, h, ric) = (column(0), column(1), column(2), column(3));
    let residuals = BTreeMap::from([
        ("contact_metric".to_string(), cm),
        ("k_contact".to_string(), k),
        ("h_contact".to_string(), h),
        ("ricci_eigenvector".to_string(), ric),
    ]);
    Ok(StructureClassification {
        is_contact_metric: cm < fd.tol_d1,
        is_k_contact: k < fd.tol_d1,
        is_h_contact: h < fd.tol_d2,
        xi_ricci_eigenvector: ric < fd.tol_d2,
        residuals,
        axioms,
    })
}
