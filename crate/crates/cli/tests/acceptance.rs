//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria are driven through the `hcm` binary where they concern its
//! behaviour (exit codes, reports, determinism) and through the library
//! where they need quantities the reports do not carry. Tolerances are the
//! ones the criteria state; nothing here is loosened to make a line pass.
//! Criterion 8 cannot hold as stated (see `criterion_8`); the test asserts
//! that it fails by exactly the predicted amount and that everything else
//! in it holds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::Command;

use harmonic_contact::almost_contact::validate_structure;
use harmonic_contact::catalog::contact::unit_tangent_kappa_mu;
use harmonic_contact::catalog::{entries, resolve_target, BuiltObject};
use harmonic_contact::chart_geometry::{christoffel, riemann, sectional_curvature, Chart, FdConfig};
use harmonic_contact::dsl::load_structure;
use harmonic_contact::harmonicity::{
    harmonic_report, kappa_mu_fit, rough_laplacian_xi, t_phi, tau_j, tau_xi,
};
use harmonic_contact::submersion_warp::star_ricci_shift_defect;
use nalgebra::DVector;
use serde_json::Value;

const POINTS: usize = 20;
const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, notes: Vec::new() }
    }

    /// Records one sub-check; any failing sub-check fails the criterion.
    fn expect(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        if !ok {
            self.pass = false;
            self.notes.push(format!("FAILED {note}"));
        } else {
            self.notes.push(note);
        }
    }
}

fn hcm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hcm"))
        .args(args)
        .env_remove("HCM_SEED")
        .output()
        .expect("hcm runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn verify_json(target: &str, extra: &[&str]) -> (i32, Value) {
    let mut args = vec!["verify", target, "--format", "json"];
    args.extend_from_slice(extra);
    let (code, out, err) = hcm(&args);
    assert!(code == 0 || code == 1, "hcm {args:?} exited {code}: {err}");
    (code, serde_json::from_str(&out).expect("report is JSON"))
}

fn num(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "inf" => f64::INFINITY,
        _ => f64::NAN,
    }
}

fn row<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap_or_else(|| panic!("no row {id}"))
}

fn max_of(report: &Value, id: &str) -> f64 {
    num(&row(report, id)["max_residual"])
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn all_targets() -> Vec<String> {
    let mut t: Vec<String> = entries().iter().map(|e| e.key.to_string()).collect();
    t.extend(
        ["unit_tangent_surface(c=4)", "unit_tangent_surface(c=-1)", "warped_base_line(f=1+x^2/4)", "warped_base_line(f=exp(x/3))"]
            .map(String::from),
    );
    t
}

const CONTACT_METRIC: &[&str] = &[
    "sasakian_R3",
    "sasakian_R2n1",
    "unit_tangent_surface(c=1)",
    "unit_tangent_surface(c=4)",
    "unit_tangent_surface(c=-1)",
    "heisenberg_submersion",
];

const UNIT_TANGENT: &[(f64, &str)] =
    &[(1.0, "unit_tangent_surface(c=1)"), (4.0, "unit_tangent_surface(c=4)"), (-1.0, "unit_tangent_surface(c=-1)")];

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let fd = FdConfig::default();
    let mut worst = 0.0f64;
    for target in all_targets() {
        let built = resolve_target(&target).unwrap();
        let r = match &built.object {
            BuiltObject::Hermitian(h) => h.axiom_residual(&h.chart().sample_points(POINTS, SEED, &fd)),
            _ => {
                let s = built.contact().unwrap();
                match validate_structure(s, &s.chart().sample_points(POINTS, SEED, &fd), &fd) {
                    Ok(report) => report.max_residual(),
                    Err(e) => {
                        o.expect(false, format!("{target}: {e}"));
                        continue;
                    }
                }
            }
        };
        worst = worst.max(r);
        o.expect(r < 1e-12, format!("{target} {r:.1e}"));
    }
    o.notes = vec![format!("max axiom residual {worst:.1e} over {} targets", all_targets().len())]
        .into_iter()
        .chain(o.notes.iter().filter(|n| n.starts_with("FAILED")).cloned())
        .collect();
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let s = resolve_target("euclidean").unwrap().contact().unwrap().clone();
    let fd = FdConfig::default();
    let mut worst = 0.0f64;
    for p in s.chart().sample_points(POINTS, SEED, &fd) {
        let gamma = christoffel(s.chart(), &p, &fd).unwrap();
        let r = riemann(s.chart(), &p, &fd).unwrap();
        let n = s.dim();
        let mut rmax = 0.0f64;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        rmax = rmax.max(r.get(l, k, i, j).abs());
                    }
                }
            }
        }
        let values = [
            gamma.data.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            rmax,
            r.ricci_tensor().abs().max(),
            tau_xi(&s, &p, &fd).unwrap().amax(),
            t_phi(&s, &p, &fd).unwrap().amax(),
            tau_j(&s, &p, &fd).unwrap().amax(),
            rough_laplacian_xi(&s, &p, &fd).unwrap().amax(),
        ];
        worst = values.iter().fold(worst, |m, v| m.max(*v));
    }
    o.expect(worst < 1e-9, format!("max |Γ|, |R|, |Ric|, |τ(ξ)|, |T(φ)|, |τ(J)|, |∇*∇ξ| = {worst:.1e}"));
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let chart = Chart::round_sphere(1.0);
    let x = DVector::from_vec(vec![1.0, 0.0]);
    let y = DVector::from_vec(vec![0.3, 1.0]);
    let base = FdConfig::default();
    let points = chart.sample_points(POINTS, SEED, &base);
    let err = |fd: &FdConfig| {
        points
            .iter()
            .map(|p| (sectional_curvature(&chart.metric(p), &riemann(&chart, p, fd).unwrap(), &x, &y) - 1.0).abs())
            .fold(0.0f64, f64::max)
    };
    let e0 = err(&base);
    o.expect(e0 < 1e-6, format!("|K − 1| = {e0:.1e} at step 1e-4"));
    let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&h| err(&base.with_step(h).unwrap())).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        o.expect((3.5..=4.5).contains(&ratio), format!("halving ratio {ratio:.4}"));
    }
    o
}

const SUITE_2: &str = "2.1,2.2,2.3,2.7,L2.1,2.9,dbarJ,2.21,remarkable";

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let targets = ["sasakian_R3"].into_iter().chain(UNIT_TANGENT.iter().map(|(_, t)| *t));
    for target in targets {
        let (code, report) = verify_json(target, &["--checks", SUITE_2]);
        let rows = report["checks"].as_array().unwrap();
        if !(code == 0 && rows.len() == 9) {
            o.expect(false, format!("{target} exit {code}, {} rows", rows.len()));
        }
        let (mut one, mut curv) = (0.0f64, 0.0f64);
        for c in rows {
            let (max, tol) = (num(&c["max_residual"]), num(&c["tolerance"]));
            let limit = if tol <= 1e-7 { 1e-7 } else { 1e-5 };
            if c["applicable"] != true || !(max < limit) {
                o.expect(false, format!("{target} {} {max:.1e}", c["id"]));
            }
            if tol <= 1e-7 {
                one = one.max(max);
            } else {
                curv = curv.max(max);
            }
        }
        o.notes.push(format!("{target}: one-derivative {one:.1e}, curvature-level {curv:.1e}"));
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let fd = FdConfig::default();
    for target in CONTACT_METRIC {
        let (_, report) = verify_json(target, &["--checks", "2.4"]);
        let r24 = max_of(&report, "2.4");
        o.expect(r24 < 1e-5, format!("{target} (2.4) {r24:.1e}"));
        let s = resolve_target(target).unwrap().contact().unwrap().clone();
        let h = harmonic_report(&s, &s.chart().sample_points(POINTS, SEED, &fd), &fd).unwrap();
        let alt = h.alt_first_eq_residual.expect("contact metric");
        let gap = (h.first_eq_residual - alt).abs();
        o.expect(gap < 1e-5, format!("{target} first-eq vs ½|τ(ξ) − φδh| gap {gap:.1e}"));
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    for target in CONTACT_METRIC {
        let (_, report) = verify_json(target, &["--checks", "2.16,2.18,2.19,2.20,L2.2,L2.3"]);
        let worst = report["checks"].as_array().unwrap().iter().map(|c| num(&c["max_residual"])).fold(0.0, f64::max);
        o.expect(worst < 1e-5, format!("{target} {worst:.1e}"));
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let fd = FdConfig::default();
    for &(c, target) in UNIT_TANGENT {
        let s = resolve_target(target).unwrap().contact().unwrap().clone();
        let pts = s.chart().sample_points(POINTS, SEED, &fd);
        let fit = kappa_mu_fit(&s, &pts, &fd).unwrap();
        o.expect(fit.residual < 1e-5, format!("{target} fit residual {:.1e}", fit.residual));
        let (kappa, mu) = unit_tangent_kappa_mu(c);
        o.expect((fit.kappa - kappa).abs() < 1e-5, format!("κ = {:.6} (closed form {kappa})", fit.kappa));
        if let Some(m) = fit.mu {
            o.expect((m - mu).abs() < 1e-5, format!("μ = {m:.6} (closed form {mu})"));
        }
        let h = harmonic_report(&s, &pts, &fd).unwrap();
        o.expect(h.rho_star_symmetry_defect < 1e-5, format!("ρ* asymmetry {:.1e}", h.rho_star_symmetry_defect));
        o.expect(h.harmonic(), format!("harmonic {}", h.harmonic()));
    }
    let s = resolve_target("sasakian_R3").unwrap().contact().unwrap().clone();
    let fit = kappa_mu_fit(&s, &s.chart().sample_points(POINTS, SEED, &fd), &fd).unwrap();
    o.expect((fit.kappa - 1.0).abs() < 1e-5, format!("sasakian_R3 κ = {:.8}", fit.kappa));
    o
}

/// The literal shift +4n⟨X,Y⟩, measured; see the module docs.
fn literal_shift_residual() -> f64 {
    let built = resolve_target("heisenberg_submersion").unwrap();
    let BuiltObject::Submersion(setup) = &built.object else { unreachable!() };
    let fd = FdConfig::default();
    let n = 1.0;
    setup
        .total
        .chart()
        .sample_points(POINTS, SEED, &fd)
        .iter()
        .map(|p| star_ricci_shift_defect(setup, p, &fd, 4.0 * n).unwrap())
        .fold(0.0, f64::max)
}

/// Everything in criterion 8 except the literal 4n shift.
fn criterion_8_remainder() -> Outcome {
    let mut o = Outcome::new();
    let (code, report) = verify_json("heisenberg_submersion", &[]);
    o.expect(code == 0, format!("verify exit {code}"));
    let agree = row(&report, "T3.1_harmonic")["pass"] == true;
    o.expect(agree, "total and base harmonic verdicts agree");
    for id in ["L3.1", "L3.2", "L3.4", "3.2", "T3.1"] {
        let r = max_of(&report, id);
        o.expect(r < 1e-5, format!("{id} {r:.1e}"));
    }
    o
}

fn criterion_8() -> (Outcome, f64) {
    let mut o = criterion_8_remainder();
    let literal = literal_shift_residual();
    // ρ̂* = 0 on the flat base and ρ̄* = −2⟨·,·⟩ on 𝒟, so the literal shift
    // misses by 6 on both diagonal entries: 6√2 in Frobenius norm.
    o.expect(literal < 1e-5, format!("ρ̄* − ρ̂* − 4n⟨·,·⟩ residual {literal:.6} (consistent shift −2 passes as T3.1)"));
    (o, literal)
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let fd = FdConfig::default();
    for f in ["1", "1+x^2/4", "exp(x/3)"] {
        let target = format!("warped_base_line(f={f})");
        let s = resolve_target(&target).unwrap().contact().unwrap().clone();
        let pts = s.chart().sample_points(POINTS, SEED, &fd);
        let tau = pts.iter().map(|p| tau_xi(&s, p, &fd).unwrap().amax()).fold(0.0, f64::max);
        let tphi = pts.iter().map(|p| t_phi(&s, p, &fd).unwrap().amax()).fold(0.0, f64::max);
        o.expect(tau < 1e-6 && tphi < 1e-6, format!("f = {f}: τ(ξ) {tau:.1e}, T(φ) {tphi:.1e}"));
        let (_, report) = verify_json(&target, &[]);
        let (r33, r35) = (max_of(&report, "3.3"), max_of(&report, "3.5"));
        o.expect(r33 < 1e-5 && r35 < 1e-5, format!("f = {f}: (3.3) {r33:.1e}, (3.5) {r35:.1e}"));
        o.expect(report["summary"]["harmonic"] == true, format!("f = {f}: harmonic"));
    }
    let (_, report) = verify_json("kenmotsu", &[]);
    let (r310, r311, rj) = (max_of(&report, "3.10"), max_of(&report, "3.11"), max_of(&report, "rough_J"));
    o.expect(r310 < 1e-6 && r311 < 1e-6, format!("kenmotsu: (3.10) {r310:.1e}, (3.11) {r311:.1e}"));
    o.expect(rj < 1e-5, format!("kenmotsu: rough Laplacians of J {rj:.1e}"));
    o.expect(report["summary"]["harmonic"] == true, "kenmotsu harmonic");
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let (code, report) = verify_json("sasakian_R3", &["--perturb", "1e-2", "--seed", "42"]);
    o.expect(code == 1, format!("perturbed verify exit {code}"));
    let axioms = max_of(&report, "axioms");
    o.expect(axioms < 1e-12, format!("axioms {axioms:.1e}"));
    let worst_factor = ["1.1", "1.2"]
        .iter()
        .map(|id| max_of(&report, id) / num(&row(&report, id)["tolerance"]))
        .fold(0.0, f64::max);
    o.expect(worst_factor >= 10.0, format!("harmonic-section residual at {worst_factor:.0}× tolerance"));
    let (code, report) = verify_json("warped_line_fiber(f=exp(t), fiber=perturbed_hermitian)", &[]);
    let first = row(&report, "1.1");
    o.expect(
        code == 1 && first["pass"] == false,
        format!("perturbed fiber: first equation {:.1e}", num(&first["max_residual"])),
    );
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let a = hcm(&["verify", "sasakian_R3", "--format", "json"]);
    let b = hcm(&["verify", "sasakian_R3", "--format", "json"]);
    o.expect(a.0 == 0 && a == b, format!("{} bytes, identical: {}", a.1.len(), a == b));
    o
}

const MALFORMED: &[(&str, &str)] = &[
    ("missing tensors", "name = \"x\"\ncoordinates = [\"x\", \"y\", \"z\"]\n[domain]\nlower = [-1, -1, -1]\nupper = [1, 1, 1]\n"),
    ("syntax error", "name = \"x\"\ncoordinates = [\"x\"\n"),
    ("bad expression", include_str!("../../../configs/sasakian_R3.toml")),
    ("non-square metric", include_str!("../../../configs/sasakian_R3.toml")),
    ("axiom violation", include_str!("../../../configs/sasakian_R3.toml")),
    ("unknown field", include_str!("../../../configs/sasakian_R3.toml")),
];

fn malformed(kind: &str, text: &str) -> String {
    match kind {
        "bad expression" => text.replace("\"1/4 + y^2/4\"", "\"1/4 + y^^2\""),
        "non-square metric" => text.replace("[\"0\", \"1/4\", \"0\"],", "[\"0\", \"1/4\"],"),
        "axiom violation" => text.replace("xi = [\"0\", \"0\", \"2\"]", "xi = [\"0\", \"0\", \"1\"]"),
        "unknown field" => format!("colour = \"red\"\n{text}"),
        _ => text.to_string(),
    }
}

fn criterion_12() -> Outcome {
    let mut o = Outcome::new();
    let path = repo_root().join("configs/sasakian_R3.toml");
    let loaded = load_structure(&path).unwrap().structure;
    let builtin = resolve_target("sasakian_R3").unwrap().contact().unwrap().clone();
    let fd = FdConfig::default();
    let mut worst = 0.0f64;
    for p in builtin.chart().sample_points(POINTS, SEED, &fd) {
        let diff = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst
            .max((loaded.chart().metric(&p) - builtin.chart().metric(&p)).abs().max())
            .max(diff(loaded.xi().eval(&p), builtin.xi().eval(&p)))
            .max(diff(loaded.eta().eval(&p), builtin.eta().eval(&p)))
            .max(diff(loaded.phi().eval(&p), builtin.phi().eval(&p)));
    }
    o.expect(worst < 1e-12, format!("config vs built-in, max componentwise gap {worst:.1e}"));
    let dir = tempfile::tempdir().unwrap();
    for (kind, text) in MALFORMED {
        let file = dir.path().join(format!("{}.toml", kind.replace(' ', "_")));
        std::fs::write(&file, malformed(kind, text)).unwrap();
        let (code, _, err) = hcm(&["verify", file.to_str().unwrap()]);
        o.expect(code == 2 && !err.is_empty(), format!("{kind}: exit {code}"));
    }
    o
}

fn report(n: usize, o: &Outcome) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {n:>2}: {verdict}  {}", o.notes.join("; "));
}

#[test]
fn acceptance_criteria() {
    let mut outcomes: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
    ];
    let (c8, literal) = criterion_8();
    outcomes.push((8, c8));
    outcomes.extend([(9, criterion_9()), (10, criterion_10()), (11, criterion_11()), (12, criterion_12())]);
    for (n, o) in &outcomes {
        report(*n, o);
    }

    let failing: Vec<usize> = outcomes.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert_eq!(failing, vec![8], "unexpected failures");
    // Criterion 8 fails only through the literal shift, and by the predicted amount.
    assert!(criterion_8_remainder().pass);
    assert!((literal - 6.0 * 2f64.sqrt()).abs() < 1e-5, "literal shift residual {literal}");
}
