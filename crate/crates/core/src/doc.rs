//! JSON documents.
//!
//! Every document carries a `"kind"` tag and rejects fields it does not know.
//! Indices are 0-based; actions store `phi` flat, row-major over
//! `(x, b, x', b')`.
//!
//! ```
//! use unimagma::doc::{from_json, to_json};
//! use unimagma::FiniteMagma;
//!
//! let z2 = FiniteMagma::cyclic(2);
//! let text = to_json(&z2);
//! assert_eq!(text, r#"{"kind":"magma","size":2,"unit":0,"table":[[0,1],[1,0]]}"#);
//! assert_eq!(from_json::<FiniteMagma>(&text).unwrap(), z2);
//! ```

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::action::Action;
use crate::classify::EquivalenceClass;
use crate::error::{Error, Result};
use crate::magma::{ElementMap, FiniteMagma};
use crate::point::RetractionPoint;

/// A value with a JSON form.
pub trait Documented: Sized {
    const KIND: &'static str;
    type Doc: Serialize + DeserializeOwned;

    fn to_doc(&self) -> Self::Doc;
    fn from_doc(doc: Self::Doc) -> Result<Self>;
}

pub fn to_json<T: Documented>(value: &T) -> String {
    serde_json::to_string(&value.to_doc()).expect("documents serialize")
}

pub fn to_json_pretty<T: Documented>(value: &T) -> String {
    serde_json::to_string_pretty(&value.to_doc()).expect("documents serialize")
}

pub fn from_json<T: Documented>(text: &str) -> Result<T> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    from_value(value)
}

pub fn from_value<T: Documented>(value: Value) -> Result<T> {
    let kind = kind_of(&value)?;
    if kind != T::KIND {
        return Err(Error::Document(format!(
            "expected a {} document, found kind {kind:?}",
            T::KIND
        )));
    }
    let doc = serde_json::from_value(value).map_err(|e| Error::Document(e.to_string()))?;
    T::from_doc(doc)
}

fn kind_of(value: &Value) -> Result<&str> {
    value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Document("missing string field \"kind\"".into()))
}

/// Any of the four structure documents.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Magma(FiniteMagma),
    Map(ElementMap),
    Point(RetractionPoint),
    Action(Action),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Magma(_) => FiniteMagma::KIND,
            Document::Map(_) => ElementMap::KIND,
            Document::Point(_) => RetractionPoint::KIND,
            Document::Action(_) => Action::KIND,
        }
    }
}

/// Reads `"kind"` first, then parses the matching document.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    match kind_of(&value)? {
        "magma" => from_value(value).map(Document::Magma),
        "map" => from_value(value).map(Document::Map),
        "point" => from_value(value).map(Document::Point),
        "action" => from_value(value).map(Document::Action),
        other => Err(Error::Document(format!("unknown kind {other:?}"))),
    }
}

macro_rules! kind_tag {
    ($name:ident, $tag:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
        pub enum $name {
            #[serde(rename = $tag)]
            Tag,
        }
    };
}

kind_tag!(MagmaKind, "magma");
kind_tag!(MapKind, "map");
kind_tag!(PointKind, "point");
kind_tag!(ActionKind, "action");
kind_tag!(QuotientKind, "quotient-report");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagmaDoc {
    pub kind: MagmaKind,
    pub size: usize,
    pub unit: usize,
    pub table: Vec<Vec<usize>>,
}

impl Documented for FiniteMagma {
    const KIND: &'static str = "magma";
    type Doc = MagmaDoc;

    fn to_doc(&self) -> MagmaDoc {
        MagmaDoc {
            kind: MagmaKind::Tag,
            size: self.size(),
            unit: self.unit(),
            table: self.rows(),
        }
    }

    fn from_doc(doc: MagmaDoc) -> Result<Self> {
        if doc.table.len() != doc.size {
            return Err(Error::structural(format!(
                "size is {} but the table has {} rows",
                doc.size,
                doc.table.len()
            )));
        }
        FiniteMagma::new(doc.unit, doc.table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub kind: MapKind,
    pub dom: usize,
    pub cod: usize,
    pub values: Vec<usize>,
}

impl Documented for ElementMap {
    const KIND: &'static str = "map";
    type Doc = MapDoc;

    fn to_doc(&self) -> MapDoc {
        MapDoc {
            kind: MapKind::Tag,
            dom: self.dom(),
            cod: self.cod(),
            values: self.values().to_vec(),
        }
    }

    fn from_doc(doc: MapDoc) -> Result<Self> {
        if doc.values.len() != doc.dom {
            return Err(Error::structural(format!(
                "dom is {} but there are {} values",
                doc.dom,
                doc.values.len()
            )));
        }
        ElementMap::new(doc.cod, doc.values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub kind: PointKind,
    #[serde(rename = "A")]
    pub a: MagmaDoc,
    #[serde(rename = "B")]
    pub b: MagmaDoc,
    pub x_size: usize,
    pub k: Vec<usize>,
    pub q: Vec<usize>,
    pub s: Vec<usize>,
    pub p: Vec<usize>,
}

impl Documented for RetractionPoint {
    const KIND: &'static str = "point";
    type Doc = PointDoc;

    fn to_doc(&self) -> PointDoc {
        PointDoc {
            kind: PointKind::Tag,
            a: self.a().to_doc(),
            b: self.b().to_doc(),
            x_size: self.x_size(),
            k: self.k().values().to_vec(),
            q: self.q().values().to_vec(),
            s: self.s().values().to_vec(),
            p: self.p().values().to_vec(),
        }
    }

    fn from_doc(doc: PointDoc) -> Result<Self> {
        let a = FiniteMagma::from_doc(doc.a)?;
        let b = FiniteMagma::from_doc(doc.b)?;
        let (na, nb) = (a.size(), b.size());
        RetractionPoint::new(
            a,
            b,
            doc.x_size,
            ElementMap::new(na, doc.k)?,
            ElementMap::new(doc.x_size, doc.q)?,
            ElementMap::new(na, doc.s)?,
            ElementMap::new(nb, doc.p)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub kind: ActionKind,
    #[serde(rename = "B")]
    pub b: MagmaDoc,
    pub x_size: usize,
    pub zero: usize,
    pub phi: Vec<usize>,
}

impl Documented for Action {
    const KIND: &'static str = "action";
    type Doc = ActionDoc;

    fn to_doc(&self) -> ActionDoc {
        ActionDoc {
            kind: ActionKind::Tag,
            b: self.b().to_doc(),
            x_size: self.x_size(),
            zero: self.zero(),
            phi: self.table().to_vec(),
        }
    }

    fn from_doc(doc: ActionDoc) -> Result<Self> {
        Action::new(FiniteMagma::from_doc(doc.b)?, doc.x_size, doc.zero, doc.phi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub action: ActionDoc,
    pub class_size: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Totals {
    pub points: usize,
    pub classes: usize,
    pub actions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
}

/// Classes of enumerated points against an independent action count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientReport {
    pub kind: QuotientKind,
    pub classes: Vec<ClassDoc>,
    pub totals: Totals,
    pub checks: Vec<NamedCheck>,
}

impl QuotientReport {
    /// `actions` is counted independently of the points.
    pub fn new(points: usize, classes: &[EquivalenceClass], actions: usize) -> Self {
        QuotientReport {
            kind: QuotientKind::Tag,
            classes: classes
                .iter()
                .map(|c| ClassDoc {
                    action: c.classifying_action.to_doc(),
                    class_size: c.members.len(),
                    members: c.members.clone(),
                })
                .collect(),
            totals: Totals {
                points,
                classes: classes.len(),
                actions,
            },
            checks: vec![NamedCheck {
                name: "classes-equal-actions".into(),
                passed: classes.len() == actions,
            }],
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}
