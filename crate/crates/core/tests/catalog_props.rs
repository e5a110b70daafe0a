//! Catalog entries against their documented flags, and the perturbation
//! used as a negative control.

use harmonic_contact::almost_contact::{axiom_residuals, classify, validate_structure};
use harmonic_contact::catalog::contact::sasakian;
use harmonic_contact::catalog::{entries, perturb, resolve_target, BuiltObject, EPSILON_MAX};
use harmonic_contact::chart_geometry::FdConfig;
use harmonic_contact::harmonicity::harmonic_report;
use harmonic_contact::submersion_warp::hermitian_harmonic_residual;
use harmonic_contact::Error;
use proptest::prelude::*;

const TARGETS: &[&str] = &[
    "unit_tangent_surface(c=4)",
    "unit_tangent_surface(c=-1)",
    "unit_tangent_surface(c=0.25)",
    "warped_base_line(f=1+x^2/4)",
    "warped_base_line(f=exp(x/3))",
    "warped_line_fiber(fiber=perturbed_hermitian)",
    "warped_line_fiber(f=1, fiber=perturbed_hermitian)",
    "sasakian_R2n1(n=1)",
];

fn all_targets() -> Vec<String> {
    entries().iter().map(|e| e.key.to_string()).chain(TARGETS.iter().map(|t| t.to_string())).collect()
}

#[test]
fn every_entry_satisfies_its_axioms_at_twenty_points() {
    let fd = FdConfig::default();
    for target in all_targets() {
        let built = resolve_target(&target).unwrap();
        match &built.object {
            BuiltObject::Hermitian(h) => {
                let pts = h.chart().sample_points(20, 42, &fd);
                assert_eq!(pts.len(), 20);
                assert!(h.axiom_residual(&pts) < 1e-12, "{target}");
            }
            _ => {
                let s = built.contact().unwrap();
                let pts = s.chart().sample_points(20, 42, &fd);
                assert_eq!(pts.len(), 20);
                let report = validate_structure(s, &pts, &fd).unwrap();
                assert!(report.max_residual() < 1e-12, "{target}: {:?}", report.residuals);
            }
        }
    }
}

#[test]
fn every_documented_flag_is_confirmed() {
    let fd = FdConfig::default();
    for target in all_targets() {
        let built = resolve_target(&target).unwrap();
        let e = built.expected;
        match &built.object {
            BuiltObject::Hermitian(h) => {
                let pts = h.chart().sample_points(20, 42, &fd);
                let worst = pts
                    .iter()
                    .map(|p| hermitian_harmonic_residual(h, p, &fd).unwrap().tension_norm)
                    .fold(0.0f64, f64::max);
                assert_eq!(Some(worst < fd.tol_d2), e.harmonic, "{target}");
            }
            _ => {
                let s = built.contact().unwrap();
                let pts = s.chart().sample_points(20, 42, &fd);
                let c = classify(s, &pts, &fd).unwrap();
                let h = harmonic_report(s, &pts, &fd).unwrap();
                let check = |want: Option<bool>, got: bool, what: &str| {
                    if let Some(want) = want {
                        assert_eq!(want, got, "{target}: {what}");
                    }
                };
                check(e.contact_metric, c.is_contact_metric, "contact metric");
                check(e.k_contact, c.is_k_contact, "K-contact");
                check(e.h_contact, c.is_h_contact, "H-contact");
                check(e.harmonic, h.harmonic(), "harmonic");
            }
        }
    }
}

#[test]
fn perturbation_is_deterministic() {
    let s = sasakian(1);
    let fd = FdConfig::default();
    let pts = s.chart().sample_points(5, 1, &fd);
    let a = perturb(&s, 1e-2, 42).unwrap();
    let b = perturb(&s, 1e-2, 42).unwrap();
    let c = perturb(&s, 1e-2, 43).unwrap();
    let mut differs = false;
    for p in &pts {
        assert_eq!(a.phi().eval(p), b.phi().eval(p));
        assert_eq!(a.xi().eval(p), b.xi().eval(p));
        differs |= a.phi().eval(p) != c.phi().eval(p);
    }
    assert!(differs, "seed has no effect");
}

#[test]
fn perturbation_rejects_out_of_range_epsilon() {
    let s = sasakian(1);
    for eps in [-1e-3, EPSILON_MAX, 0.5, f64::NAN] {
        assert!(matches!(perturb(&s, eps, 1), Err(Error::EpsilonOutOfRange(_))), "{eps}");
    }
    let same = perturb(&s, 0.0, 1).unwrap();
    assert_eq!(same.phi().eval(&[0.1, 0.2, 0.3]), s.phi().eval(&[0.1, 0.2, 0.3]));
}

#[test]
fn first_equation_residual_grows_with_epsilon() {
    let s = sasakian(1);
    let fd = FdConfig::default();
    let pts = s.chart().sample_points(6, 42, &fd);
    let residual = |eps: f64| harmonic_report(&perturb(&s, eps, 42).unwrap(), &pts, &fd).unwrap().first_eq_residual;
    let r: Vec<f64> = [1e-3, 1e-2, 5e-2].iter().map(|&e| residual(e)).collect();
    assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
    // Roughly linear in ε for small ε.
    assert!((r[1] / r[0] - 10.0).abs() < 1.0, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbation_keeps_the_axioms(eps in 1e-4..0.099f64, seed in any::<u64>()) {
        let s = sasakian(1);
        let fd = FdConfig::default();
        let pts = s.chart().sample_points(8, seed, &fd);
        let t = perturb(&s, eps, seed).unwrap();
        prop_assert!(axiom_residuals(&t, &pts).unwrap().max_residual() < 1e-12);
        for p in &pts {
            prop_assert_eq!(t.chart().metric(p), s.chart().metric(p));
        }
    }
}
