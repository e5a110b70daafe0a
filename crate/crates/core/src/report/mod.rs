//! Run specifications, residual reports and their JSON/CSV/text forms.

pub mod emit;
pub mod run;

use serde::{Deserialize, Serialize};

pub use emit::{emit_convergence, emit_report, parse_report_json, render_convergence, render_report, Format};
pub use run::{convergence, resolve, verify, ConvergenceReport, ConvergenceRow, ResolvedTarget, RunSpec};

/// Serializes non-finite floats as strings ("inf", "-inf", "nan"), which
/// plain JSON cannot represent, and accepts either form back.
pub(crate) mod float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&super::emit::non_finite_label(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a float: {other}"))),
            },
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            struct One(f64);
            impl serde::Serialize for One {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(&self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&One(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

/// One identity evaluated over the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    /// The identity as asserted, LHS = RHS.
    pub statement: String,
    pub applicable: bool,
    pub samples: usize,
    #[serde(with = "float")]
    pub max_residual: f64,
    #[serde(with = "float")]
    pub mean_residual: f64,
    #[serde(with = "float")]
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub contact_metric: bool,
    pub k_contact: bool,
    pub h_contact: bool,
    pub xi_ricci_eigenvector: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Absent for almost Hermitian targets.
    pub flags: Option<StructureFlags>,
    #[serde(with = "float")]
    pub first_eq_residual: f64,
    #[serde(with = "float")]
    pub second_eq_residual: f64,
    /// Both harmonic section equations hold (for an almost Hermitian target:
    /// [∇*∇J, J] = 0).
    pub harmonic: bool,
    pub all_pass: bool,
    /// Wall-clock milliseconds; only recorded on request, so that reports
    /// stay byte-identical across runs.
    #[serde(with = "float::option", default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub target: String,
    pub structure: String,
    pub points: usize,
    pub seed: u64,
    #[serde(with = "float")]
    pub step: f64,
    pub order: u32,
    #[serde(with = "float::option", default)]
    pub perturb: Option<f64>,
    pub checks: Vec<CheckRow>,
    pub summary: Summary,
}

impl ResidualReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, id: &str) -> Option<&CheckRow> {
        self.checks.iter().find(|c| c.id == id)
    }
}
