//! The two harmonic-section equations, and for contact metric structures the
//! alternative characterization through δh and ρ̄*.

use serde::{Deserialize, Serialize};

use super::point::{antisymmetric_part_max, PointData};
use crate::almost_contact::{contact_metric_defect, AlmostContactStructure};
use crate::chart_geometry::tensor::{endomorphism_norm, vector_norm};
use crate::chart_geometry::FdConfig;
use crate::error::Result;
use crate::exec::{max_mean, Execution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    /// max |τ(ξ) + ½JT(φ)|.
    pub first_eq_residual: f64,
    /// max |[∇̄*∇̄J, J]|.
    pub second_eq_residual: f64,
    /// ½·max |τ(ξ) − φδh|, contact metric only. Halved because
    /// τ(ξ) + ½JT(φ) = ½(τ(ξ) − φδh) there, so this is directly comparable
    /// with `first_eq_residual`.
    pub alt_first_eq_residual: Option<f64>,
    /// max |ρ*(e_a,e_b) − ρ*(e_b,e_a)| over an orthonormal frame of TM.
    pub rho_star_symmetry_defect: f64,
    /// Same for ρ̄* over an orthonormal frame of 𝒟.
    pub rho_bar_star_symmetry_defect: f64,
    /// max |ρ̄*(JF_a,JF_b) − ρ̄*(F_a,F_b)|.
    pub rho_bar_star_j_invariance_defect: f64,
    pub first_eq: bool,
    pub second_eq: bool,
    /// Contact metric only: the verdict reached through τ(ξ) = φδh and ρ̄*
    /// symmetry agrees with (first_eq ∧ second_eq).
    pub routes_agree: Option<bool>,
    pub is_contact_metric: bool,
    pub samples: usize,
}

impl HarmonicityReport {
    pub fn harmonic(&self) -> bool {
        self.first_eq && self.second_eq
    }
}

/// Per-point residuals, in the order of the report fields.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointResiduals {
    pub first: f64,
    pub second: f64,
    pub alt_first: f64,
    pub rho_star_sym: f64,
    pub rho_bar_sym: f64,
    pub rho_bar_j: f64,
}

pub(crate) fn point_residuals(d: &PointData) -> PointResiduals {
    let alg = &d.alg;
    let first = vector_norm(&alg.g, &(d.tau_xi() + &alg.phi * d.t_phi() * 0.5));
    let second = endomorphism_norm(&alg.g, &alg.ginv, d.tau_j());
    let alt_first = 0.5 * vector_norm(&alg.g, &(d.tau_xi() - &alg.phi * d.delta_h()));
    let e = d.frame_matrix();
    let rho_star_sym = antisymmetric_part_max(&(e.transpose() * d.rho_star() * &e));
    let rb = d.d_bilinear_components(d.rho_bar_star());
    let rho_bar_sym = antisymmetric_part_max(&rb);
    let jf = &alg.phi * d.d_frame_matrix();
    let rb_j = jf.transpose() * d.rho_bar_star() * &jf;
    let rho_bar_j = (rb_j - &rb).abs().max();
    PointResiduals { first, second, alt_first, rho_star_sym, rho_bar_sym, rho_bar_j }
}

pub fn harmonic_report(s: &AlmostContactStructure, points: &[Vec<f64>], fd: &FdConfig) -> Result<HarmonicityReport> {
    harmonic_report_with(s, points, fd, Execution::available())
}

pub fn harmonic_report_with(
    s: &AlmostContactStructure,
    points: &[Vec<f64>],
    fd: &FdConfig,
    exec: Execution,
) -> Result<HarmonicityReport> {
    for p in points {
        s.chart().check_point(p, fd)?;
    }
    let rows = exec.map(points, |_, p| {
        let d = PointData::new(s, p, fd);
        (point_residuals(&d), contact_metric_defect(s, p, fd))
    });
    let col = |f: fn(&PointResiduals) -> f64| max_mean(&rows.iter().map(|(r, _)| f(r)).collect::<Vec<_>>()).0;
    let is_contact_metric = max_mean(&rows.iter().map(|(_, c)| *c).collect::<Vec<_>>()).0 < fd.tol_d1;
    let first_eq_residual = col(|r| r.first);
    let second_eq_residual = col(|r| r.second);
    let rho_bar_star_symmetry_defect = col(|r| r.rho_bar_sym);
    let first_eq = first_eq_residual < fd.tol_d2;
    let second_eq = second_eq_residual < fd.tol_d2;
    let alt_first_eq_residual = is_contact_metric.then(|| col(|r| r.alt_first));
    let routes_agree = alt_first_eq_residual.map(|alt| {
        let alt_verdict = alt < fd.tol_d2 && rho_bar_star_symmetry_defect < fd.tol_d2;
        alt_verdict == (first_eq && second_eq)
    });
    Ok(HarmonicityReport {
        first_eq_residual,
        second_eq_residual,
        alt_first_eq_residual,
        rho_star_symmetry_defect: col(|r| r.rho_star_sym),
        rho_bar_star_symmetry_defect,
        rho_bar_star_j_invariance_defect: col(|r| r.rho_bar_j),
        first_eq,
        second_eq,
        routes_agree,
        is_contact_metric,
        samples: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::contact::{euclidean, sasakian};

    #[test]
    fn heisenberg_is_harmonic_by_both_routes() {
        let s = sasakian(1);
        let fd = FdConfig::default();
        let pts = s.chart().sample_points(3, 7, &fd);
        let r = harmonic_report(&s, &pts, &fd).unwrap();
        assert!(r.harmonic(), "{r:?}");
        assert_eq!(r.routes_agree, Some(true));
    }

    #[test]
    fn flat_is_harmonic_and_not_contact_metric() {
        let s = euclidean();
        let fd = FdConfig::default();
        let pts = s.chart().sample_points(3, 7, &fd);
        let r = harmonic_report(&s, &pts, &fd).unwrap();
        assert!(r.harmonic());
        assert!(r.alt_first_eq_residual.is_none());
    }
}
