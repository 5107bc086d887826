//! Bundled example documents.
//!
//! Each fixture is built in code and also shipped as canonical JSON under
//! `fixtures/`; a unit test keeps the two in sync. Setting
//! `GEXT_FIXTURE_DIR` makes [`load`] read `<dir>/<name>.json` instead.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::cocycle::{cech_coboundary, cech_cocycle, coboundary, turn, OneCochain, TwoCocycle};
use crate::doc::{parse_document, Params, Document};
use crate::error::{Error, Result};
use crate::groupoid::{abelian_group, cyclic_group, pair_groupoid, symmetric_group_3, FiniteCover};

pub const FIXTURE_DIR_VAR: &str = "GEXT_FIXTURE_DIR";

pub const NAMES: &[&str] = &["pair2", "pair3_mu4", "z2", "pauli", "cover3", "s3"];

const BUNDLED: &[(&str, &str)] = &[
    ("pair2", include_str!("../fixtures/pair2.json")),
    ("pair3_mu4", include_str!("../fixtures/pair3_mu4.json")),
    ("z2", include_str!("../fixtures/z2.json")),
    ("pauli", include_str!("../fixtures/pauli.json")),
    ("cover3", include_str!("../fixtures/cover3.json")),
    ("s3", include_str!("../fixtures/s3.json")),
];

fn params(k: u32, modes: &str) -> Params {
    Params {
        k: Some(k),
        modes: Some(modes.into()),
        ..Params::default()
    }
}

/// Builds a fixture from its construction.
pub fn build(name: &str) -> Option<Document> {
    let doc = match name {
        "pair2" => {
            let g = Arc::new(pair_groupoid(2).ok()?);
            Document::new(g.clone(), Some(Arc::new(TwoCocycle::trivial(g))), params(2, "-1..1"))
        }
        "pair3_mu4" => {
            let g = Arc::new(pair_groupoid(3).ok()?);
            let b = OneCochain {
                values: g.arrows().map(|a| turn((a * a + 1) as i64, 4)).collect(),
            };
            let (w, _) = coboundary(&g, &b).normalize().ok()?;
            Document::new(g, Some(Arc::new(w)), params(4, "-1..2"))
        }
        "z2" => {
            let g = Arc::new(cyclic_group(2).ok()?);
            Document::new(g.clone(), Some(Arc::new(TwoCocycle::trivial(g))), params(2, "-1..1"))
        }
        "pauli" => {
            let g = Arc::new(abelian_group(&[2, 2]).ok()?);
            let w = TwoCocycle::from_fn(g.clone(), |x, y| turn(((x % 2) * (y / 2)) as i64, 2));
            Document::new(g, Some(Arc::new(w)), params(2, "-1..1"))
        }
        "cover3" => {
            let cover = FiniteCover::new(
                vec!["x".into(), "y".into(), "z".into()],
                vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]],
            )
            .ok()?;
            let w = cech_cocycle(&cover, cech_coboundary(|i, j| turn((i + 2 * j) as i64, 6))).ok()?;
            let (w, _) = w.normalize().ok()?;
            let g = w.base().clone();
            Document::new(g, Some(Arc::new(w)), params(6, "-1..1"))
        }
        "s3" => {
            let g = Arc::new(symmetric_group_3());
            Document::new(g.clone(), Some(Arc::new(TwoCocycle::trivial(g))), params(3, "0..2"))
        }
        _ => return None,
    };
    Some(doc)
}

/// The shipped JSON text of a fixture.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Loads a fixture, from `GEXT_FIXTURE_DIR` when set, else from the bundle.
pub fn load(name: &str) -> Result<Document> {
    load_from(std::env::var_os(FIXTURE_DIR_VAR).map(PathBuf::from).as_deref(), name)
}

/// Loads `<dir>/<name>.json`, or the bundled fixture when `dir` is `None`.
pub fn load_from(dir: Option<&Path>, name: &str) -> Result<Document> {
    if let Some(dir) = dir {
        let path = dir.join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        return parse_document(&text);
    }
    let text = bundled(name).ok_or_else(|| {
        Error::InvalidArgument(format!("unknown fixture {name:?}; known: {}", NAMES.join(", ")))
    })?;
    parse_document(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::to_canonical;

    #[test]
    fn bundled_files_match_their_constructions() {
        let bless = std::env::var_os("GEXT_BLESS").is_some();
        for name in NAMES {
            let text = to_canonical(&build(name).unwrap());
            if bless {
                let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
                std::fs::write(format!("{path}/{name}.json"), &text).unwrap();
                continue;
            }
            assert_eq!(bundled(name).unwrap(), text, "fixture {name} is stale");
        }
    }

    #[test]
    fn fixtures_are_valid() {
        for name in NAMES {
            let doc = parse_document(bundled(name).unwrap()).unwrap();
            assert!(doc.groupoid_report.is_empty(), "{name}");
            let w = doc.cocycle.unwrap();
            assert!(w.identity_checked() && w.is_normalized(), "{name}");
            let k = doc.params.k.unwrap();
            assert!(w.entries().all(|(_, v)| v.root_index(k).is_some()), "{name}");
        }
    }
}
