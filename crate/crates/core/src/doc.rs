//! JSON documents for groupoids, cocycles, cochains and elements.
//!
//! Arrows and units are referred to by name. Serialization is canonical:
//! units and arrows keep their index order, `compose` is sorted by the
//! indices of its pair, `inverse` lists every arrow in index order, and
//! cocycle entries are sorted by pair. Parsing then serializing a canonical
//! document reproduces it byte for byte.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, TwistedAlgebra};
use crate::circle::{Angle, CircleScalar};
use crate::cocycle::{OneCochain, TwoCocycle};
use crate::error::{Error, Result};
use crate::extension::{CircleExtension, LaurentElement};
use crate::groupoid::{FiniteGroupoid, GroupoidParts};
use crate::validation::ValidationReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub id: String,
    pub range: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDoc {
    pub units: Vec<String>,
    pub arrows: Vec<ArrowDoc>,
    #[serde(default)]
    pub compose: Vec<(String, String, String)>,
    #[serde(default)]
    pub inverse: Vec<(String, String)>,
}

/// A circle value: `"p/q"` for an exact angle, or a float number of turns in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleDoc {
    Exact(String),
    Turns(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleDoc {
    #[serde(default)]
    pub entries: Vec<((String, String), AngleDoc)>,
}

/// Sparse complex coefficients keyed by arrow (or unit) name, as `[re, im]`.
pub type CoefficientDoc = BTreeMap<String, [f64; 2]>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Mode window written `a..b` (inclusive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Cocycle power for the `algebra` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<CoefficientDoc>,
    /// Laurent element as `{mode: coefficients}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laurent: Option<BTreeMap<String, CoefficientDoc>>,
    /// Bimodule element: coefficients keyed by unit name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bimodule: Option<CoefficientDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    groupoid: GroupoidDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cocycle: Option<CocycleDoc>,
    #[serde(default, skip_serializing_if = "is_default")]
    params: Params,
}

fn is_default(p: &Params) -> bool {
    *p == Params::default()
}

/// A parsed document. The groupoid is assembled and checked, but a broken
/// table is not an error: its violations are kept in `groupoid_report`, and
/// the cocycle is then left unparsed in `unchecked_cocycle`.
#[derive(Clone, Debug)]
pub struct Document {
    pub groupoid: Arc<FiniteGroupoid>,
    pub groupoid_report: ValidationReport,
    pub cocycle: Option<Arc<TwoCocycle>>,
    pub unchecked_cocycle: Option<CocycleDoc>,
    pub params: Params,
}

impl Document {
    pub fn new(groupoid: Arc<FiniteGroupoid>, cocycle: Option<Arc<TwoCocycle>>, params: Params) -> Self {
        Document {
            groupoid_report: groupoid.validate(),
            groupoid,
            cocycle,
            unchecked_cocycle: None,
            params,
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn lookup(index: &HashMap<&str, usize>, name: &str, field: String, what: &str) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::parse(field, format!("unknown {what} {name:?}")))
}

fn name_index<'a>(names: impl Iterator<Item = &'a String>, field: &str, what: &str) -> Result<HashMap<&'a str, usize>> {
    let mut index = HashMap::new();
    for (i, n) in names.enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(Error::parse(format!("{field}[{i}]"), format!("duplicate {what} {n:?}")));
        }
    }
    Ok(index)
}

fn groupoid_from_doc(doc: &GroupoidDoc) -> Result<FiniteGroupoid> {
    let units = name_index(doc.units.iter(), "groupoid.units", "unit")?;
    let arrows = name_index(doc.arrows.iter().map(|a| &a.id), "groupoid.arrows", "arrow")?;
    let mut range = Vec::with_capacity(doc.arrows.len());
    let mut source = Vec::with_capacity(doc.arrows.len());
    for (i, a) in doc.arrows.iter().enumerate() {
        range.push(lookup(&units, &a.range, format!("groupoid.arrows[{i}].range"), "unit")?);
        source.push(lookup(&units, &a.source, format!("groupoid.arrows[{i}].source"), "unit")?);
    }
    let mut compose = HashMap::new();
    for (i, (a, b, c)) in doc.compose.iter().enumerate() {
        let field = || format!("groupoid.compose[{i}]");
        let key = (
            lookup(&arrows, a, field(), "arrow")?,
            lookup(&arrows, b, field(), "arrow")?,
        );
        let c = lookup(&arrows, c, field(), "arrow")?;
        if compose.insert(key, c).is_some() {
            return Err(Error::parse(field(), format!("pair ({a}, {b}) listed twice")));
        }
    }
    let mut inverse = vec![None; doc.arrows.len()];
    for (i, (a, b)) in doc.inverse.iter().enumerate() {
        let field = || format!("groupoid.inverse[{i}]");
        let a_idx = lookup(&arrows, a, field(), "arrow")?;
        let b_idx = lookup(&arrows, b, field(), "arrow")?;
        if inverse[a_idx].replace(b_idx).is_some() {
            return Err(Error::parse(field(), format!("inverse of {a} listed twice")));
        }
    }
    let inverse = inverse
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or_else(|| {
                Error::parse("groupoid.inverse", format!("no inverse given for arrow {:?}", doc.arrows[i].id))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteGroupoid::unchecked(GroupoidParts {
        unit_names: doc.units.clone(),
        arrow_names: doc.arrows.iter().map(|a| a.id.clone()).collect(),
        range,
        source,
        compose,
        inverse,
    })
}

pub fn groupoid_doc(g: &FiniteGroupoid) -> GroupoidDoc {
    let name = |a: usize| g.arrow_name(a).to_string();
    let mut compose: Vec<(usize, usize, usize)> = g
        .parts()
        .compose
        .into_iter()
        .map(|((a, b), c)| (a, b, c))
        .collect();
    compose.sort_unstable();
    GroupoidDoc {
        units: g.unit_names().to_vec(),
        arrows: g
            .arrows()
            .map(|a| ArrowDoc {
                id: name(a),
                range: g.unit_name(g.range(a)).to_string(),
                source: g.unit_name(g.source(a)).to_string(),
            })
            .collect(),
        compose: compose.into_iter().map(|(a, b, c)| (name(a), name(b), name(c))).collect(),
        inverse: g.arrows().map(|a| (name(a), name(g.inverse(a)))).collect(),
    }
}

fn angle_doc(w: CircleScalar) -> AngleDoc {
    match w.angle() {
        Some(a) => AngleDoc::Exact(a.to_string()),
        None => AngleDoc::Turns(w.turns()),
    }
}

fn angle_from_doc(doc: &AngleDoc, field: &str) -> Result<CircleScalar> {
    match doc {
        AngleDoc::Exact(text) => Angle::parse(text)
            .map(CircleScalar::Exact)
            .map_err(|e| Error::parse(field, e.to_string())),
        AngleDoc::Turns(t) if (0.0..1.0).contains(t) => Ok(CircleScalar::from_turns(*t)),
        AngleDoc::Turns(t) => Err(Error::parse(field, format!("angle {t} is not in [0, 1)"))),
    }
}

pub fn cocycle_doc(w: &TwoCocycle) -> CocycleDoc {
    let g = w.base();
    CocycleDoc {
        entries: w
            .entries()
            .map(|((a, b), v)| {
                (
                    (g.arrow_name(a).to_string(), g.arrow_name(b).to_string()),
                    angle_doc(v),
                )
            })
            .collect(),
    }
}

fn cocycle_from_doc(g: &Arc<FiniteGroupoid>, doc: &CocycleDoc) -> Result<TwoCocycle> {
    let arrows = name_index(g.arrow_names().iter(), "groupoid.arrows", "arrow")?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    let mut seen = std::collections::HashSet::new();
    for (i, ((a, b), angle)) in doc.entries.iter().enumerate() {
        let field = format!("cocycle.entries[{i}]");
        let a_idx = lookup(&arrows, a, field.clone(), "arrow")?;
        let b_idx = lookup(&arrows, b, field.clone(), "arrow")?;
        if !g.is_composable(a_idx, b_idx) {
            return Err(Error::parse(field, format!("({a}, {b}) is not a composable pair")));
        }
        if !seen.insert((a_idx, b_idx)) {
            return Err(Error::parse(field, format!("pair ({a}, {b}) listed twice")));
        }
        entries.push(((a_idx, b_idx), angle_from_doc(angle, &field)?));
    }
    TwoCocycle::from_entries(g.clone(), entries)
}

/// Parses a groupoid document, optionally wrapped with a cocycle and parameters.
pub fn parse_document(text: &str) -> Result<Document> {
    let doc: RawDocument = serde_json::from_str(text).map_err(json_error)?;
    let groupoid = Arc::new(groupoid_from_doc(&doc.groupoid)?);
    let groupoid_report = groupoid.validate();
    let (cocycle, unchecked_cocycle) = match doc.cocycle {
        Some(c) if groupoid_report.is_empty() => (Some(Arc::new(cocycle_from_doc(&groupoid, &c)?)), None),
        other => (None, other),
    };
    if let Some(m) = &doc.params.modes {
        parse_modes(m).map_err(|e| Error::parse("params.modes", e.to_string()))?;
    }
    Ok(Document {
        groupoid,
        groupoid_report,
        cocycle,
        unchecked_cocycle,
        params: doc.params,
    })
}

/// Canonical text of a document.
pub fn to_canonical(doc: &Document) -> String {
    let raw = RawDocument {
        groupoid: groupoid_doc(&doc.groupoid),
        cocycle: doc
            .cocycle
            .as_deref()
            .map(cocycle_doc)
            .or_else(|| doc.unchecked_cocycle.clone()),
        params: doc.params.clone(),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("documents serialize");
    text.push('\n');
    text
}

/// Parses `a..b` into an inclusive range.
pub fn parse_modes(text: &str) -> Result<RangeInclusive<i64>> {
    let bad = || Error::InvalidArgument(format!("mode window {text:?} is not of the form a..b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(Error::InvalidArgument(format!("mode window {text:?} is empty")));
    }
    Ok(a..=b)
}

fn coefficients(names: &[String], doc: &CoefficientDoc, field: &str) -> Result<Vec<Complex64>> {
    let index = name_index(names.iter(), field, "name")?;
    let mut out = vec![Complex64::new(0.0, 0.0); names.len()];
    for (name, [re, im]) in doc {
        out[lookup(&index, name, format!("{field}.{name}"), "name")?] = Complex64::new(*re, *im);
    }
    Ok(out)
}

pub fn coefficient_doc(names: &[String], coeffs: &[Complex64]) -> CoefficientDoc {
    names
        .iter()
        .zip(coeffs)
        .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
        .map(|(n, z)| (n.clone(), [z.re, z.im]))
        .collect()
}

pub fn element_from_doc(alg: &TwistedAlgebra, doc: &CoefficientDoc) -> Result<AlgebraElement> {
    alg.element(coefficients(alg.groupoid().arrow_names(), doc, "params.element")?)
}

pub fn bimodule_from_doc(g: &FiniteGroupoid, doc: &CoefficientDoc) -> Result<Vec<Complex64>> {
    coefficients(g.unit_names(), doc, "params.bimodule")
}

pub fn laurent_from_doc(ext: &CircleExtension, doc: &BTreeMap<String, CoefficientDoc>) -> Result<LaurentElement> {
    let names = ext.groupoid().arrow_names();
    let mut modes = BTreeMap::new();
    for (mode, coeffs) in doc {
        let n: i64 = mode
            .parse()
            .map_err(|_| Error::parse("params.laurent", format!("mode {mode:?} is not an integer")))?;
        modes.insert(n, coefficients(names, coeffs, &format!("params.laurent.{mode}"))?);
    }
    ext.element(modes)
}

pub fn laurent_doc(ext: &CircleExtension, f: &LaurentElement) -> BTreeMap<String, CoefficientDoc> {
    let names = ext.groupoid().arrow_names();
    f.modes()
        .map(|(n, c)| (n.to_string(), coefficient_doc(names, c.coeffs())))
        .collect()
}

/// A one-cochain as `{arrow: angle}`.
pub fn cochain_doc(g: &FiniteGroupoid, b: &OneCochain) -> BTreeMap<String, AngleDoc> {
    g.arrows()
        .map(|a| (g.arrow_name(a).to_string(), angle_doc(b.get(a))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::turn;
    use crate::groupoid::{abelian_group, pair_groupoid};

    const PAIR2: &str = r#"{
      "groupoid": {
        "units": ["1", "2"],
        "arrows": [
          {"id": "(1,1)", "range": "1", "source": "1"},
          {"id": "(1,2)", "range": "1", "source": "2"},
          {"id": "(2,1)", "range": "2", "source": "1"},
          {"id": "(2,2)", "range": "2", "source": "2"}
        ],
        "compose": [
          ["(1,2)", "(2,1)", "(1,1)"], ["(1,1)", "(1,1)", "(1,1)"], ["(1,1)", "(1,2)", "(1,2)"],
          ["(1,2)", "(2,2)", "(1,2)"], ["(2,1)", "(1,1)", "(2,1)"], ["(2,1)", "(1,2)", "(2,2)"],
          ["(2,2)", "(2,1)", "(2,1)"], ["(2,2)", "(2,2)", "(2,2)"]
        ],
        "inverse": [["(1,1)", "(1,1)"], ["(1,2)", "(2,1)"], ["(2,1)", "(1,2)"], ["(2,2)", "(2,2)"]]
      }
    }"#;

    #[test]
    fn parses_the_pair_groupoid() {
        let doc = parse_document(PAIR2).unwrap();
        assert_eq!(*doc.groupoid, pair_groupoid(2).unwrap());
        assert!(doc.groupoid.validate().is_empty());
        assert!(doc.cocycle.is_none());
    }

    #[test]
    fn canonical_round_trip() {
        let doc = parse_document(PAIR2).unwrap();
        let once = to_canonical(&doc);
        let twice = to_canonical(&parse_document(&once).unwrap());
        assert_eq!(once, twice);
        assert_ne!(once, PAIR2);
    }

    #[test]
    fn cocycle_round_trip() {
        let g = Arc::new(abelian_group(&[2, 2]).unwrap());
        let w = TwoCocycle::from_fn(g.clone(), |x, y| {
            if x == 3 && y == 3 {
                CircleScalar::from_turns(0.125)
            } else {
                turn(((x % 2) * (y / 2)) as i64, 2)
            }
        });
        let params = Params {
            modes: Some("-1..1".into()),
            ..Params::default()
        };
        let doc = Document::new(g, Some(Arc::new(w.clone())), params);
        let text = to_canonical(&doc);
        let back = parse_document(&text).unwrap();
        assert!(back.cocycle.as_ref().unwrap().same_values(&w));
        assert_eq!(to_canonical(&back), text);
    }

    #[test]
    fn errors_name_the_location() {
        match parse_document("{\"groupoid\": {\"units\": [\"1\"],\n \"arrows\": 3}}") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("{other:?}"),
        }
        let bad = PAIR2.replace(r#""range": "2", "source": "1""#, r#""range": "9", "source": "1""#);
        match parse_document(&bad) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "groupoid.arrows[2].range"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cocycle_entries_must_be_composable() {
        let g = groupoid_doc(&pair_groupoid(2).unwrap());
        let text = serde_json::json!({
            "groupoid": g,
            "cocycle": {"entries": [[["(1,2)", "(1,2)"], "1/2"]]},
        })
        .to_string();
        match parse_document(&text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "cocycle.entries[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn modes_windows() {
        assert_eq!(parse_modes("-2..3").unwrap(), -2..=3);
        assert!(parse_modes("3..1").is_err());
        assert!(parse_modes("x").is_err());
    }
}
