//! Submersions onto almost Hermitian manifolds and the two warped products
//! with a line.

pub mod hermitian;
pub mod submersion;
pub mod suite;
pub mod warp_suite;
pub mod warped;

pub use hermitian::{
    hermitian_harmonic_residual, hermitian_star_ricci_matrix, kahler_null_check, AlmostHermitianStructure,
    HermitianResidual,
};
pub use submersion::{
    horizontal_curvature_defect, oneill_a, star_ricci_shift_defect, submersion_suite, submersion_suite_with,
    SubmersionSetup, ONEILL_SIGN, STAR_RICCI_SHIFT,
};
pub use suite::{SuiteEntry, SuiteReport};
pub use warp_suite::{warp_theorem_suite, warp_theorem_suite_with};
pub use warped::{build_warped_base_times_line, build_warped_line_times_fiber, Orientation, WarpedProductSpec};
