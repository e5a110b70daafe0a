//! Tension fields, ✻-Ricci curvatures, the harmonic section equations and
//! the registry of pointwise identities checked against them.

pub mod frame;
pub mod kappa_mu;
pub mod point;
pub mod quantities;
pub mod registry;
pub mod report;

pub use kappa_mu::{kappa_mu_fit, kappa_mu_fit_with, KappaMuFit};
pub use quantities::{
    bar_rough_laplacian_j, delta_h, rough_laplacian_xi, star_ricci, star_ricci_bar, star_ricci_bar_matrix,
    star_ricci_matrix, t_phi, tau_j, tau_xi,
};
pub use registry::{
    check_identity, find_check, profile, registry, run_checks, Applicability, CheckStats, IdentityCheck, Profile,
};
pub use report::{harmonic_report, harmonic_report_with, HarmonicityReport};
