//! Resolving a target and evaluating every applicable check on it.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{CheckRow, ResidualReport, StructureFlags, Summary};
use crate::almost_contact::{axiom_residuals, classify_with, AlmostContactStructure};
use crate::catalog::{perturb, resolve_target, BuiltEntry, BuiltObject};
use crate::chart_geometry::{FdConfig, FdOrder};
use crate::dsl::{load_structure, LoadedStructure};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harmonicity::registry::run_with_profile;
use crate::harmonicity::{find_check, harmonic_report_with, profile, registry, run_checks, CheckStats};
use crate::submersion_warp::warp_suite::warp_theorem_suite_with;
use crate::submersion_warp::{
    hermitian_harmonic_residual, submersion_suite_with, AlmostHermitianStructure, SuiteReport,
};

/// What to verify and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    /// Catalog key with optional parameters, or a path to a TOML structure.
    pub target: String,
    /// Restrict to these ids; `None` runs everything applicable.
    pub checks: Option<Vec<String>>,
    pub points: usize,
    pub seed: u64,
    pub step: Option<f64>,
    pub order: Option<u32>,
    pub perturb: Option<f64>,
    pub tol_scale: f64,
    pub timing: bool,
}

impl RunSpec {
    pub const DEFAULT_POINTS: usize = 20;
    pub const DEFAULT_SEED: u64 = 42;

    pub fn new(target: impl Into<String>) -> Self {
        RunSpec {
            target: target.into(),
            checks: None,
            points: Self::DEFAULT_POINTS,
            seed: Self::DEFAULT_SEED,
            step: None,
            order: None,
            perturb: None,
            tol_scale: 1.0,
            timing: false,
        }
    }
}

/// Built once per run, so the size of the variants does not matter.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ResolvedTarget {
    Entry(BuiltEntry),
    Config(LoadedStructure),
}

fn looks_like_path(target: &str) -> bool {
    target.ends_with(".toml") || Path::new(target).is_file()
}

/// Catalog entry or config file, plus the finite-difference settings after
/// applying this run's overrides on top of the target's own.
pub fn resolve(spec: &RunSpec) -> Result<(ResolvedTarget, FdConfig)> {
    let (target, base_fd) = if looks_like_path(&spec.target) {
        let loaded = load_structure(&spec.target)?;
        let fd = loaded.fd;
        (ResolvedTarget::Config(loaded), fd)
    } else {
        (ResolvedTarget::Entry(resolve_target(&spec.target)?), FdConfig::default())
    };
    let mut fd = base_fd;
    if let Some(step) = spec.step {
        fd = fd.with_step(step)?;
    }
    if let Some(order) = spec.order {
        fd = fd.with_order(FdOrder::from_int(order)?);
    }
    fd = fd.with_tol_scale(spec.tol_scale)?;
    if spec.points == 0 {
        return Err(Error::Config("at least one sample point is required".into()));
    }
    Ok((target, fd))
}

fn row(stats: &CheckStats, statement: &str) -> CheckRow {
    CheckRow {
        id: stats.id.clone(),
        statement: statement.to_string(),
        applicable: stats.applicable,
        samples: stats.samples,
        max_residual: stats.max_residual,
        mean_residual: stats.mean_residual,
        tolerance: stats.tolerance,
        pass: stats.pass,
    }
}

fn suite_rows(report: &SuiteReport) -> Vec<CheckRow> {
    report.entries.iter().map(|e| row(&e.stats, &e.statement)).collect()
}

const AXIOM_STATEMENT: &str = "phi^2 = -I + eta(x)xi, eta(xi) = 1, phi xi = 0, g(phi X, phi Y) = g(X,Y) - eta(X)eta(Y)";

fn contact_rows(s: &AlmostContactStructure, points: &[Vec<f64>], fd: &FdConfig, seed: u64) -> Result<Vec<CheckRow>> {
    let axioms = axiom_residuals(s, points)?;
    let max = axioms.max_residual();
    let mut rows = vec![CheckRow {
        id: "axioms".into(),
        statement: AXIOM_STATEMENT.into(),
        applicable: true,
        samples: points.len(),
        max_residual: max,
        mean_residual: max,
        tolerance: fd.tol_algebraic,
        pass: max < fd.tol_algebraic,
    }];
    let ids: Vec<&str> = registry().iter().map(|c| c.id).collect();
    let stats = run_checks(&ids, s, points, fd, seed, Execution::available())?;
    rows.extend(stats.iter().zip(registry()).map(|(st, c)| row(st, c.statement)));
    Ok(rows)
}

fn hermitian_rows(h: &AlmostHermitianStructure, points: &[Vec<f64>], fd: &FdConfig) -> Result<(Vec<CheckRow>, f64)> {
    let residuals: Vec<_> = points.iter().map(|p| hermitian_harmonic_residual(h, p, fd)).collect::<Result<_>>()?;
    let tension: Vec<f64> = residuals.iter().map(|r| r.tension_norm).collect();
    let delta: Vec<f64> = residuals.iter().map(|r| r.delta_j_norm).collect();
    let axioms = vec![h.axiom_residual(points)];
    let rows = vec![
        row(&CheckStats::from_residuals("hermitian_axioms", &axioms, fd.tol_algebraic), "J^2 = -I, g(JX,JY) = g(X,Y)"),
        row(&CheckStats::from_residuals("J_harmonic", &tension, fd.tol_d2), "[nabla* nabla J, J] = 0"),
        row(&CheckStats::from_residuals("cosymplectic", &delta, fd.tol_d1), "delta J = 0"),
    ];
    let worst = crate::exec::max_mean(&tension).0;
    Ok((rows, worst))
}

/// Runs every applicable check on the spec's target.
pub fn verify(spec: &RunSpec) -> Result<ResidualReport> {
    let started = Instant::now();
    let (target, fd) = resolve(spec)?;
    let exec = Execution::available();

    let hermitian = match &target {
        ResolvedTarget::Entry(e) => match &e.object {
            BuiltObject::Hermitian(h) => Some(h),
            _ => None,
        },
        ResolvedTarget::Config(_) => None,
    };
    let (structure_name, mut rows, summary_core) = match hermitian {
        Some(h) => {
            if spec.perturb.is_some() {
                return Err(Error::Config("--perturb applies to almost contact targets only".into()));
            }
            let points = h.chart().sample_points(spec.points, spec.seed, &fd);
            let (rows, worst) = hermitian_rows(h, &points, &fd)?;
            (h.name().to_string(), rows, (None, 0.0, worst, worst < fd.tol_d2))
        }
        None => {
            let s = contact_structure(spec, &target)?.expect("non-Hermitian targets carry a structure");
            let points = s.chart().sample_points(spec.points, spec.seed, &fd);
            if points.is_empty() {
                return Err(Error::Config("domain leaves no room for finite-difference stencils".into()));
            }
            let mut rows = contact_rows(&s, &points, &fd, spec.seed)?;
            // Suites describe the unperturbed product or submersion.
            if spec.perturb.is_none() {
                if let ResolvedTarget::Entry(e) = &target {
                    match &e.object {
                        BuiltObject::Warped { spec: w, .. } => {
                            rows.extend(suite_rows(&warp_theorem_suite_with(w, &points, &fd, exec)?))
                        }
                        BuiltObject::Submersion(setup) => {
                            rows.extend(suite_rows(&submersion_suite_with(setup, &points, &fd, exec)?))
                        }
                        _ => {}
                    }
                }
            }
            let class = classify_with(&s, &points, &fd, exec)?;
            let harm = harmonic_report_with(&s, &points, &fd, exec)?;
            let flags = StructureFlags {
                contact_metric: class.is_contact_metric,
                k_contact: class.is_k_contact,
                h_contact: class.is_h_contact,
                xi_ricci_eigenvector: class.xi_ricci_eigenvector,
            };
            (s.name().to_string(), rows, (Some(flags), harm.first_eq_residual, harm.second_eq_residual, harm.harmonic()))
        }
    };

    if let Some(ids) = &spec.checks {
        for id in ids {
            if !rows.iter().any(|r| &r.id == id) {
                return Err(Error::UnknownCheck(id.clone()));
            }
        }
        rows.retain(|r| ids.contains(&r.id));
    }
    let (flags, first, second, harmonic) = summary_core;
    let all_pass = rows.iter().all(|r| r.pass);
    let fd_step = fd.step;
    Ok(ResidualReport {
        target: spec.target.clone(),
        structure: structure_name,
        points: spec.points,
        seed: spec.seed,
        step: fd_step,
        order: fd.order.as_int(),
        perturb: spec.perturb,
        checks: rows,
        summary: Summary {
            flags,
            first_eq_residual: first,
            second_eq_residual: second,
            harmonic,
            all_pass,
            runtime_ms: spec.timing.then(|| started.elapsed().as_secs_f64() * 1e3),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(with = "super::float")]
    pub step: f64,
    #[serde(with = "super::float")]
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub target: String,
    pub check: String,
    pub order: u32,
    pub rows: Vec<ConvergenceRow>,
    /// residual(h_i) / residual(h_{i+1}).
    #[serde(with = "super::float::vec")]
    pub ratios: Vec<f64>,
    /// log(ratio) / log(h_i / h_{i+1}).
    #[serde(with = "super::float::vec")]
    pub observed_orders: Vec<f64>,
}

impl ConvergenceReport {
    /// Relative band around the ideal ratio (h_i/h_{i+1})^order; for step
    /// halving at order 2 this is [3.5, 4.5].
    pub const BAND: f64 = 0.125;

    /// Every consecutive ratio lies within the band of the scheme's order.
    pub fn within_band(&self) -> bool {
        self.rows.windows(2).zip(&self.ratios).all(|(w, r)| {
            let ideal = (w[0].step / w[1].step).powi(self.order as i32);
            (r / ideal - 1.0).abs() <= Self::BAND
        })
    }
}

fn contact_structure(spec: &RunSpec, target: &ResolvedTarget) -> Result<Option<AlmostContactStructure>> {
    let base = match target {
        ResolvedTarget::Entry(e) => match e.contact() {
            Some(s) => s.clone(),
            None => return Ok(None),
        },
        ResolvedTarget::Config(c) => c.structure.clone(),
    };
    Ok(Some(match spec.perturb {
        Some(eps) => perturb(&base, eps, spec.seed)?,
        None => base,
    }))
}

/// Max residual of one check at each step size.
///
/// For registry checks the structure's class (which decides applicability)
/// is settled once, at the target's own step; only the residuals are
/// re-evaluated per step. Otherwise a coarse step could push a gate such as
/// |Φ − dη| over its tolerance and make the study meaningless.
pub fn convergence(spec: &RunSpec, check: &str, steps: &[f64]) -> Result<ConvergenceReport> {
    if steps.len() < 2 {
        return Err(Error::Config("convergence needs at least two step sizes".into()));
    }
    let (target, fd) = resolve(&RunSpec { step: None, ..spec.clone() })?;
    let registry_check = find_check(check).ok();
    let structure = contact_structure(spec, &target)?;
    let mut rows = Vec::with_capacity(steps.len());
    match (registry_check, structure) {
        (Some(c), Some(s)) => {
            let exec = Execution::available();
            let coarsest = steps.iter().fold(fd, |acc, &h| match fd.with_step(h) {
                Ok(f) if f.margin() > acc.margin() => f,
                _ => acc,
            });
            let points = s.chart().sample_points(spec.points, spec.seed, &coarsest);
            let prof = profile(&s, &points, &fd, exec)?;
            if !c.applicability.admits(&prof) {
                return Err(Error::NotApplicable { id: check.to_string(), target: s.name().to_string() });
            }
            for &h in steps {
                let step_fd = fd.with_step(h)?;
                let stats = run_with_profile(&[c], &prof, &s, &points, &step_fd, spec.seed, exec)?.remove(0);
                rows.push(ConvergenceRow { step: h, max_residual: stats.max_residual });
            }
        }
        _ => {
            for &h in steps {
                let run = RunSpec { step: Some(h), checks: Some(vec![check.to_string()]), timing: false, ..spec.clone() };
                let report = verify(&run)?;
                let r = &report.checks[0];
                if !r.applicable {
                    return Err(Error::NotApplicable { id: check.to_string(), target: report.structure });
                }
                rows.push(ConvergenceRow { step: h, max_residual: r.max_residual });
            }
        }
    }
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[0].max_residual / w[1].max_residual).collect();
    let observed_orders = rows
        .windows(2)
        .zip(&ratios)
        .map(|(w, r)| r.ln() / (w[0].step / w[1].step).ln())
        .collect();
    Ok(ConvergenceReport {
        target: spec.target.clone(),
        check: check.to_string(),
        order: fd.order.as_int(),
        rows,
        ratios,
        observed_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(target: &str) -> RunSpec {
        RunSpec { points: 4, ..RunSpec::new(target) }
    }

    #[test]
    fn heisenberg_passes_and_is_harmonic() {
        let r = verify(&quick("sasakian_R3")).unwrap();
        assert!(r.all_pass(), "{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!(r.summary.harmonic && r.summary.all_pass);
        assert!(r.summary.flags.as_ref().unwrap().contact_metric);
        assert_eq!(r.checks[0].id, "axioms");
    }

    #[test]
    fn perturbation_breaks_a_check() {
        let r = verify(&RunSpec { perturb: Some(1e-2), ..quick("sasakian_R3") }).unwrap();
        assert!(!r.all_pass());
        assert!(!r.summary.harmonic);
        assert!(r.check("axioms").unwrap().pass);
    }

    #[test]
    fn check_filter_and_unknown_ids() {
        let spec = RunSpec { checks: Some(vec!["2.1".into(), "axioms".into()]), ..quick("sasakian_R3") };
        let r = verify(&spec).unwrap();
        assert_eq!(r.checks.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["axioms", "2.1"]);
        let bad = RunSpec { checks: Some(vec!["9.99".into()]), ..quick("sasakian_R3") };
        assert!(matches!(verify(&bad), Err(Error::UnknownCheck(_))));
        assert!(matches!(verify(&quick("nosuch")), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn suites_are_appended_for_products() {
        let r = verify(&quick("warped_base_line")).unwrap();
        assert!(r.check("P3.1").is_some() && r.all_pass());
        let r = verify(&quick("flat_kahler")).unwrap();
        assert!(r.summary.flags.is_none() && r.summary.harmonic);
        assert!(r.check("J_harmonic").unwrap().pass);
    }

    #[test]
    fn convergence_is_second_order() {
        let steps = [1e-3, 5e-4, 2.5e-4];
        for t in ["unit_tangent_surface", "unit_tangent_surface(c=-1)"] {
            let c = convergence(&RunSpec { points: 5, ..RunSpec::new(t) }, "2.16", &steps).unwrap();
            assert_eq!(c.order, 2);
            assert!(c.within_band());
            for r in &c.ratios {
                assert!((3.5..=4.5).contains(r), "{c:?}");
            }
        }
    }

    #[test]
    fn heisenberg_chart_has_no_truncation_error() {
        // The metric is quadratic in the coordinates, so central differences
        // are exact and only rounding is left: there is no h² term whose
        // decay a ratio could measure.
        let c = convergence(&quick("sasakian_R3"), "2.16", &[1e-3, 5e-4, 2.5e-4]).unwrap();
        assert!(c.rows.iter().all(|r| r.max_residual < 1e-12), "{c:?}");
    }

    #[test]
    fn convergence_needs_two_steps() {
        assert!(convergence(&quick("sasakian_R3"), "2.16", &[1e-3]).is_err());
    }
}
