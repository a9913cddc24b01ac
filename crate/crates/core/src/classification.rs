//! Static classification data: divisorial contraction types, Fano threefolds with
//! E5 contractions or non-free anticanonical systems, and singularity tables.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::models::EType;
use crate::rational::Rational;

const EMBEDDED: &str = include_str!("../data/classification_db.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Center {
    Curve,
    SmoothPoint,
    ODP,
    #[serde(rename = "cA2Point")]
    CA2Point,
    QuotientPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table {
    T1,
    T2,
    T3,
}

/// An integer, or the marker string of an impossible table cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Value(i64),
    Marker(String),
}

impl Cell {
    pub fn value(&self) -> Option<i64> {
        match self {
            Cell::Value(v) => Some(*v),
            Cell::Marker(_) => None,
        }
    }
}

/// `d(i, j) = value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub i: i64,
    pub j: i64,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionTypeRecord {
    pub etype: EType,
    pub center: Center,
    pub exceptional_surface: String,
    pub anticanonical_restriction: String,
    pub local_model: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E5ThreefoldRecord {
    pub index: u32,
    pub description: String,
    pub picard_rank: u32,
    pub e5_contraction_count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linked_model: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonBpfRecord {
    pub index: u32,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularityTableRow {
    pub table: Table,
    pub sing_type: String,
    /// For T1: which column ("a=1" or "a>1") the row comes from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_condition: Option<String>,
    pub a: Cell,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_values: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection_value: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SingularityTableRow {
    pub fn is_possible(&self) -> bool {
        self.a.value().is_some()
    }
}

/// A case ruled out (or settled directly) outside the tables, with its stated reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExclusionRecord {
    pub sing_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_condition: Option<String>,
    pub a: i64,
    pub n: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection_value: Option<Rational>,
    pub exclusion_note: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkedModelRecord {
    pub model: String,
    pub link: String,
    pub description: String,
    pub picard_rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataNote {
    pub subject: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    ContractionType(ContractionTypeRecord),
    E5Threefold(E5ThreefoldRecord),
    NonBpfThreefold(NonBpfRecord),
    SingularityRow(SingularityTableRow),
    Exclusion(ExclusionRecord),
    LinkedModel(LinkedModelRecord),
    DataNote(DataNote),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DbFile {
    version: u32,
    records: Vec<Record>,
}

/// One `field=value` conjunct of a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub field: String,
    pub value: String,
}

impl std::str::FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (f, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Query(format!("predicate {s:?} is not of the form field=value")))?;
        let field = f.trim();
        if field.is_empty() {
            return Err(Error::Query(format!("predicate {s:?} has an empty field name")));
        }
        Ok(Predicate { field: field.to_string(), value: v.trim().to_string() })
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationDb {
    records: Vec<Record>,
    flat: Vec<serde_json::Map<String, Value>>,
}

impl ClassificationDb {
    /// The copy compiled into the library.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded classification data parses")
    }

    /// Source text of the embedded copy.
    pub fn embedded_text() -> &'static str {
        EMBEDDED
    }

    fn parse(text: &str) -> Result<Self> {
        let file: DbFile = serde_json::from_str(text)?;
        let flat = file
            .records
            .iter()
            .map(|r| match serde_json::to_value(r).expect("records serialize") {
                Value::Object(m) => m,
                _ => unreachable!("records serialize to objects"),
            })
            .collect();
        Ok(ClassificationDb { records: file.records, flat })
    }

    /// Loads a shipped copy, which must agree byte for byte with the embedded one.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes != EMBEDDED.as_bytes() {
            return Err(Error::TableInconsistency(format!(
                "{} differs from the embedded classification data",
                path.display()
            )));
        }
        Self::parse(EMBEDDED)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn dump(&self) -> String {
        EMBEDDED.to_string()
    }

    fn known_fields(&self) -> BTreeSet<&str> {
        self.flat.iter().flat_map(|m| m.keys().map(String::as_str)).collect()
    }

    /// Records matching every predicate, in source order. Values compare as text;
    /// a record lacking a named field does not match.
    pub fn query(&self, predicates: &[Predicate]) -> Result<Vec<&Record>> {
        let known = self.known_fields();
        if let Some(p) = predicates.iter().find(|p| !known.contains(p.field.as_str())) {
            return Err(Error::Query(format!("unknown field {:?}", p.field)));
        }
        Ok(self
            .records
            .iter()
            .zip(&self.flat)
            .filter(|(_, m)| {
                predicates.iter().all(|p| m.get(&p.field).is_some_and(|v| render(v) == p.value))
            })
            .map(|(r, _)| r)
            .collect())
    }

    pub fn contraction_types(&self) -> impl Iterator<Item = &ContractionTypeRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::ContractionType(c) => Some(c),
            _ => None,
        })
    }

    pub fn e5_threefolds(&self) -> impl Iterator<Item = &E5ThreefoldRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::E5Threefold(c) => Some(c),
            _ => None,
        })
    }

    pub fn non_bpf_threefolds(&self) -> impl Iterator<Item = &NonBpfRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::NonBpfThreefold(c) => Some(c),
            _ => None,
        })
    }

    pub fn singularity_rows(&self) -> impl Iterator<Item = &SingularityTableRow> {
        self.records.iter().filter_map(|r| match r {
            Record::SingularityRow(c) => Some(c),
            _ => None,
        })
    }

    pub fn exclusions(&self) -> impl Iterator<Item = &ExclusionRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Exclusion(c) => Some(c),
            _ => None,
        })
    }

    pub fn linked_models(&self) -> impl Iterator<Item = &LinkedModelRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::LinkedModel(c) => Some(c),
            _ => None,
        })
    }

    /// The linked-model record for a model name.
    pub fn link_for(&self, model: &str) -> Option<&LinkedModelRecord> {
        self.linked_models().find(|l| l.model == model)
    }
}

/// Recovers `E³` from a row's witness `d(i, j)` and its curve degree `−(i·a/n + j)·(a/n)·E³`.
pub fn derive_e_cubed(row: &SingularityTableRow) -> Result<Rational> {
    let (Some(w), Some(value), Some(a), Some(n)) = (&row.witness, &row.intersection_value, row.a.value(), row.n)
    else {
        return Err(Error::TableInconsistency(format!(
            "{:?} {} row lacks a witness, intersection value, a or n",
            row.table, row.sing_type
        )));
    };
    let an = Rational::new(a, n).map_err(|_| Error::TableInconsistency("n = 0".into()))?;
    let factor = -((Rational::integer(w.i) * &an + Rational::integer(w.j)) * &an);
    if factor.is_zero() {
        return Err(Error::TableInconsistency(format!("zero degree factor in {:?} {} row", row.table, row.sing_type)));
    }
    let e3 = value / &factor;
    if !e3.is_positive() {
        return Err(Error::TableInconsistency(format!("E^3 = {e3} is not positive")));
    }
    Ok(e3)
}
