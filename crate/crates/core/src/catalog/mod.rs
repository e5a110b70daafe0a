//! Built-in structures, addressed by stable keys with optional parameters,
//! e.g. `unit_tangent_surface(c=4)` or `warped_base_line(f=1+x^2/4)`.

pub mod contact;
pub mod hermitian;
pub mod perturb;

use std::collections::{BTreeMap, HashMap};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::almost_contact::AlmostContactStructure;
use crate::chart_geometry::{FdConfig, TensorField};
use crate::dsl::{parse_expression, Compiled};
use crate::error::{Error, Result};
use crate::submersion_warp::{AlmostHermitianStructure, Orientation, SubmersionSetup, WarpedProductSpec};

pub use perturb::{perturb, EPSILON_MAX};

/// Points at which build-time gates (submersion compatibility) run.
const GATE_POINTS: usize = 20;
const GATE_SEED: u64 = 0xca7a;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Contact,
    Warped,
    Submersion,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    build: fn(&BTreeMap<String, String>) -> Result<BuiltEntry>,
}

/// Flags and verdicts an entry is expected to produce; `None` where the
/// outcome is not asserted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub contact_metric: Option<bool>,
    pub k_contact: Option<bool>,
    pub h_contact: Option<bool>,
    pub harmonic: Option<bool>,
}

impl Expected {
    fn contact(k_contact: bool, harmonic: bool) -> Self {
        Expected { contact_metric: Some(true), k_contact: Some(k_contact), h_contact: Some(true), harmonic: Some(harmonic) }
    }

    fn non_contact(harmonic: bool) -> Self {
        Expected { contact_metric: Some(false), k_contact: None, h_contact: None, harmonic: Some(harmonic) }
    }
}

#[derive(Debug, Clone)]
pub enum BuiltObject {
    Contact(AlmostContactStructure),
    Warped { spec: WarpedProductSpec, structure: AlmostContactStructure },
    Submersion(SubmersionSetup),
    Hermitian(AlmostHermitianStructure),
}

#[derive(Debug, Clone)]
pub struct BuiltEntry {
    pub key: String,
    pub params: BTreeMap<String, String>,
    pub object: BuiltObject,
    pub expected: Expected,
}

impl BuiltEntry {
    /// The almost contact metric structure, if the entry has one (the total
    /// space for submersions and warped products).
    pub fn contact(&self) -> Option<&AlmostContactStructure> {
        match &self.object {
            BuiltObject::Contact(s) => Some(s),
            BuiltObject::Warped { structure, .. } => Some(structure),
            BuiltObject::Submersion(setup) => Some(&setup.total),
            BuiltObject::Hermitian(_) => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.object {
            BuiltObject::Hermitian(h) => h.name().to_string(),
            _ => self.contact().map(|s| s.name().to_string()).unwrap_or_default(),
        }
    }
}

// ---- parameters -------------------------------------------------------------

fn out_of_range(name: &str, reason: impl Into<String>) -> Error {
    Error::ParamOutOfRange { name: name.to_string(), reason: reason.into() }
}

fn number(params: &BTreeMap<String, String>, name: &str) -> Result<f64> {
    let raw = &params[name];
    raw.trim().parse::<f64>().map_err(|_| out_of_range(name, format!("`{raw}` is not a number")))
}

fn warp_field(src: &str, vars: &[&str]) -> Result<TensorField> {
    let e = parse_expression(src)?;
    let slots: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    let compiled = Compiled::new(&e, &slots, &HashMap::new())?;
    Ok(TensorField::scalar(vars.len(), move |p| compiled.eval_or_nan(p)))
}

fn hermitian_by_name(name: &str) -> Result<AlmostHermitianStructure> {
    match name {
        "flat_kahler" | "flat_kahler_R2" => Ok(hermitian::flat_kahler(1.0)),
        "perturbed_hermitian" | "perturbed_hermitian_R4" => Ok(hermitian::perturbed_hermitian_r4()),
        other => Err(out_of_range("fiber", format!("`{other}` is not one of flat_kahler, perturbed_hermitian"))),
    }
}

// ---- builders ---------------------------------------------------------------

fn built(params: &BTreeMap<String, String>, key: &str, object: BuiltObject, expected: Expected) -> BuiltEntry {
    BuiltEntry { key: key.to_string(), params: params.clone(), object, expected }
}

fn build_euclidean(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    Ok(built(p, "euclidean", BuiltObject::Contact(contact::euclidean()), Expected::non_contact(true)))
}

fn build_sasakian_r3(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    Ok(built(p, "sasakian_R3", BuiltObject::Contact(contact::sasakian(1)), Expected::contact(true, true)))
}

fn build_sasakian(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let n = number(p, "n")?;
    if !(n.fract() == 0.0 && (1.0..=3.0).contains(&n)) {
        return Err(out_of_range("n", "must be 1, 2 or 3"));
    }
    let s = contact::sasakian(n as usize);
    Ok(built(p, "sasakian_R2n1", BuiltObject::Contact(s), Expected::contact(true, true)))
}

fn build_unit_tangent(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let c = number(p, "c")?;
    if !(c.abs() <= 4.0 && c.abs() >= 0.25) {
        return Err(out_of_range("c", "must satisfy 0.25 <= |c| <= 4"));
    }
    let s = contact::unit_tangent_surface(c);
    Ok(built(p, "unit_tangent_surface", BuiltObject::Contact(s), Expected::contact(c == 1.0, true)))
}

fn build_warped_base_line(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let warp = warp_field(&p["f"], &["x", "y"])?;
    let spec = WarpedProductSpec { orientation: Orientation::BaseTimesLine, base_or_fiber: hermitian::flat_kahler(1.0), warp };
    let structure = spec.build()?;
    Ok(built(p, "warped_base_line", BuiltObject::Warped { spec, structure }, Expected::non_contact(true)))
}

fn build_line_fiber(p: &BTreeMap<String, String>, key: &str, fiber: AlmostHermitianStructure, f: &str) -> Result<BuiltEntry> {
    // A Kähler fiber gives a harmonic structure for every f; the perturbed
    // fiber is neither cosymplectic nor harmonic, so it fails for every f.
    let harmonic = fiber.name() == "flat_kahler_R2";
    let spec = WarpedProductSpec { orientation: Orientation::LineTimesFiber, base_or_fiber: fiber, warp: warp_field(f, &["t"])? };
    let structure = spec.build()?;
    Ok(built(p, key, BuiltObject::Warped { spec, structure }, Expected::non_contact(harmonic)))
}

fn build_kenmotsu(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let mut entry = build_line_fiber(p, "kenmotsu", hermitian::flat_kahler(1.0), "exp(t)")?;
    if let BuiltObject::Warped { structure, .. } = &mut entry.object {
        *structure = structure.clone().renamed("kenmotsu");
    }
    Ok(entry)
}

fn build_warped_line_fiber(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let fiber = hermitian_by_name(p["fiber"].trim())?;
    build_line_fiber(p, "warped_line_fiber", fiber, &p["f"])
}

/// π(x, y, z) = (x, y) from the Heisenberg structure onto ℝ² with ¼(dx² + dy²).
pub fn heisenberg_submersion() -> Result<SubmersionSetup> {
    let fd = FdConfig::default();
    let total = contact::sasakian(1);
    let points = total.chart().sample_points(GATE_POINTS, GATE_SEED, &fd);
    SubmersionSetup::new(
        total,
        hermitian::flat_kahler(0.25),
        |p| p[..2].to_vec(),
        |_, v| DVector::from_column_slice(&v.as_slice()[..2]),
        &points,
        &fd,
    )
}

fn build_heisenberg_submersion(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let setup = heisenberg_submersion()?;
    Ok(built(p, "heisenberg_submersion", BuiltObject::Submersion(setup), Expected::contact(true, true)))
}

fn build_flat_kahler(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let expected = Expected { harmonic: Some(true), ..Expected::default() };
    Ok(built(p, "flat_kahler", BuiltObject::Hermitian(hermitian::flat_kahler(1.0)), expected))
}

fn build_perturbed_hermitian(p: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let expected = Expected { harmonic: Some(false), ..Expected::default() };
    Ok(built(p, "perturbed_hermitian", BuiltObject::Hermitian(hermitian::perturbed_hermitian_r4()), expected))
}

static ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        key: "euclidean",
        kind: EntryKind::Contact,
        description: "flat R^3 with xi = d/dz and a constant phi; not contact metric",
        params: &[],
        build: build_euclidean,
    },
    CatalogEntry {
        key: "sasakian_R3",
        kind: EntryKind::Contact,
        description: "Heisenberg Sasakian structure, eta = (dz - y dx)/2, g = eta^2 + (dx^2 + dy^2)/4",
        params: &[],
        build: build_sasakian_r3,
    },
    CatalogEntry {
        key: "sasakian_R2n1",
        kind: EntryKind::Contact,
        description: "Sasakian structure on R^{2n+1}, eta = (dz - sum y_i dx_i)/2",
        params: &[ParamSpec { name: "n", default: "2", doc: "half the rank of D, 1 to 3" }],
        build: build_sasakian,
    },
    CatalogEntry {
        key: "unit_tangent_surface",
        kind: EntryKind::Contact,
        description: "unit tangent bundle of the constant-curvature-c surface, standard contact metric structure",
        params: &[ParamSpec { name: "c", default: "1", doc: "curvature, 0.25 <= |c| <= 4" }],
        build: build_unit_tangent,
    },
    CatalogEntry {
        key: "warped_base_line",
        kind: EntryKind::Warped,
        description: "flat Kaehler R^2 x_f R with xi = f^-1 d/dt",
        params: &[ParamSpec { name: "f", default: "1", doc: "positive expression in x, y" }],
        build: build_warped_base_line,
    },
    CatalogEntry {
        key: "kenmotsu",
        kind: EntryKind::Warped,
        description: "R x_{e^t} flat Kaehler R^2",
        params: &[],
        build: build_kenmotsu,
    },
    CatalogEntry {
        key: "warped_line_fiber",
        kind: EntryKind::Warped,
        description: "R x_f M with xi = d/dt over an almost Hermitian fiber",
        params: &[
            ParamSpec { name: "f", default: "exp(t)", doc: "positive expression in t" },
            ParamSpec { name: "fiber", default: "flat_kahler", doc: "flat_kahler or perturbed_hermitian" },
        ],
        build: build_warped_line_fiber,
    },
    CatalogEntry {
        key: "heisenberg_submersion",
        kind: EntryKind::Submersion,
        description: "sasakian_R3 over flat Kaehler R^2 with metric (dx^2 + dy^2)/4, (x,y,z) -> (x,y)",
        params: &[],
        build: build_heisenberg_submersion,
    },
    CatalogEntry {
        key: "flat_kahler",
        kind: EntryKind::Hermitian,
        description: "flat Kaehler R^2",
        params: &[],
        build: build_flat_kahler,
    },
    CatalogEntry {
        key: "perturbed_hermitian",
        kind: EntryKind::Hermitian,
        description: "flat R^4 with a rotated, non-cosymplectic, non-harmonic J",
        params: &[],
        build: build_perturbed_hermitian,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn find_entry(key: &str) -> Result<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.key == key).ok_or_else(|| Error::UnknownEntry(key.to_string()))
}

/// Builds `key` with `params` (missing ones take their defaults).
pub fn get_entry(key: &str, params: &BTreeMap<String, String>) -> Result<BuiltEntry> {
    let entry = find_entry(key)?;
    if let Some(unknown) = params.keys().find(|k| !entry.params.iter().any(|p| p.name == k.as_str())) {
        return Err(out_of_range(unknown, format!("`{key}` has no such parameter")));
    }
    let mut full = params.clone();
    for p in entry.params {
        full.entry(p.name.to_string()).or_insert_with(|| p.default.to_string());
    }
    (entry.build)(&full)
}

/// Splits `key(a=1, b=exp(t))` into the key and its parameters. A single
/// unnamed argument binds to the entry's first parameter.
pub fn parse_target(target: &str) -> Result<(String, BTreeMap<String, String>)> {
    let target = target.trim();
    let Some(open) = target.find('(') else {
        return Ok((target.to_string(), BTreeMap::new()));
    };
    let key = target[..open].trim().to_string();
    let inner = target[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{target}`")))?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Config(format!("unbalanced parentheses in `{target}`")));
        }
    }
    if depth != 0 {
        return Err(Error::Config(format!("unbalanced parentheses in `{target}`")));
    }
    args.push(&inner[start..]);
    let mut params = BTreeMap::new();
    for arg in args.into_iter().map(str::trim).filter(|a| !a.is_empty()) {
        let (name, value) = match split_assignment(arg) {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let first = find_entry(&key)?
                    .params
                    .first()
                    .ok_or_else(|| out_of_range(arg, format!("`{key}` takes no parameters")))?;
                (first.name.to_string(), arg.to_string())
            }
        };
        if params.insert(name.clone(), value).is_some() {
            return Err(out_of_range(&name, "given twice"));
        }
    }
    Ok((key, params))
}

/// `name=value` with an identifier on the left; expressions never contain '='.
fn split_assignment(arg: &str) -> Option<(&str, &str)> {
    let (name, value) = arg.split_once('=')?;
    let name = name.trim();
    let ident = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    ident.then(|| (name, value.trim()))
}

/// [`parse_target`] followed by [`get_entry`].
pub fn resolve_target(target: &str) -> Result<BuiltEntry> {
    let (key, params) = parse_target(target)?;
    get_entry(&key, &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn targets_parse() {
        let (k, p) = parse_target("unit_tangent_surface(c=4)").unwrap();
        assert_eq!((k.as_str(), p["c"].as_str()), ("unit_tangent_surface", "4"));
        let (_, p) = parse_target("warped_line_fiber(f = exp(t/2), fiber=perturbed_hermitian)").unwrap();
        assert_eq!(p["f"], "exp(t/2)");
        assert_eq!(p["fiber"], "perturbed_hermitian");
        let (_, p) = parse_target("warped_base_line(1 + x^2/4)").unwrap();
        assert_eq!(p["f"], "1 + x^2/4");
        assert!(parse_target("kenmotsu(").is_err());
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(get_entry("nope", &BTreeMap::new()), Err(Error::UnknownEntry(_))));
        let bad = params(&[("c", "9")]);
        assert!(matches!(get_entry("unit_tangent_surface", &bad), Err(Error::ParamOutOfRange { .. })));
        let bad = params(&[("q", "1")]);
        assert!(matches!(get_entry("sasakian_R3", &bad), Err(Error::ParamOutOfRange { .. })));
        let bad = params(&[("f", "x")]);
        assert!(matches!(get_entry("warped_base_line", &bad), Err(Error::NonPositiveWarp { .. })));
    }

    #[test]
    fn every_entry_builds_with_defaults() {
        for e in entries() {
            let b = get_entry(e.key, &BTreeMap::new()).unwrap();
            assert_eq!(b.contact().is_some(), e.kind != EntryKind::Hermitian);
        }
    }
}
