//! Almost contact metric structures, the bundle 𝒟 and its connection.

pub mod bar;
pub mod classify;
pub mod structure;

pub use bar::{
    bar_curvature, bar_delta_j, bar_derivative_of_j, bar_derivative_of_j_direct, r_tensor,
    BarCurvature,
};
pub use classify::{classify, classify_with, contact_metric_defect, ricci_eigen_defect, StructureClassification};
pub use structure::{
    axiom_residuals, d_project, fundamental_two_form, validate_structure, AlmostContactStructure,
    AxiomReport, PointAlgebra,
};

use nalgebra::DMatrix;

use crate::chart_geometry::FdConfig;
use crate::error::Result;

/// h = ½L_ξφ at a point.
pub fn h_tensor(s: &AlmostContactStructure, p: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    s.chart().check_point(p, fd)?;
    Ok(s.h_field(fd).eval_matrix(p))
}
