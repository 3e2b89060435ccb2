//! JSON template files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "polytopes": [{"id": "P", "normals": [[-1, 0], [0, -1], [1, 1]], "offsets": [0, 0, "3/2"]}],
//!   "edges": [{"id": "e", "ends": [{"polytope": "P", "facet": 2}]}]
//! }
//! ```
//!
//! An edge with one end is dangling. The optional `note` key carries free
//! text that is echoed in reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use origami_core::polytope::Halfspace;
use origami_core::template::{RawEdge, RawEnd, RawPolytope, RawTemplate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub polytopes: Vec<PolytopeEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeEntry {
    pub id: String,
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<Offset>,
}

/// An integer, or a rational written `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Offset {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub ends: Vec<EndEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndEntry {
    pub polytope: String,
    pub facet: usize,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at `{field}`{}: {message}", location(*.line, *.column))]
    Schema {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad rational `{text}` at `{field}`")]
    Rational { field: String, text: String },
}

fn location(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" (line {line}, column {column})")
    }
}

impl ParseError {
    fn schema(field: String, message: impl Into<String>) -> Self {
        ParseError::Schema {
            field,
            line: 0,
            column: 0,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::Io { .. } => "io_error",
            ParseError::Schema { .. } => "schema_error",
            ParseError::Rational { .. } => "rational_parse_error",
        }
    }
}

/// A parsed file: the template data and the optional note.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedTemplate {
    pub raw: RawTemplate,
    pub note: Option<String>,
}

pub fn parse_template_file(path: &Path) -> Result<ParsedTemplate, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_template_str(&text)
}

pub fn parse_template_str(text: &str) -> Result<ParsedTemplate, ParseError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: TemplateFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError::Schema {
            field: path,
            line: inner.line(),
            column: inner.column(),
            message: strip_position(&inner.to_string()),
        }
    })?;
    file.to_raw()
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    (!den.is_zero()).then(|| BigRational::new(num, den))
}

impl TemplateFile {
    /// Checks shapes and facet ranges and converts to exact data.
    pub fn to_raw(&self) -> Result<ParsedTemplate, ParseError> {
        let mut facet_counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut polytopes = Vec::new();
        for (i, p) in self.polytopes.iter().enumerate() {
            if p.normals.len() != p.offsets.len() {
                return Err(ParseError::schema(
                    format!("polytopes[{i}].offsets"),
                    format!("{} normals but {} offsets", p.normals.len(), p.offsets.len()),
                ));
            }
            let mut halfspaces = Vec::new();
            for (j, (normal, offset)) in p.normals.iter().zip(&p.offsets).enumerate() {
                let offset = match offset {
                    Offset::Int(c) => BigRational::from_integer((*c).into()),
                    Offset::Text(text) => parse_rational(text).ok_or_else(|| ParseError::Rational {
                        field: format!("polytopes[{i}].offsets[{j}]"),
                        text: text.clone(),
                    })?,
                };
                halfspaces.push(Halfspace::new(normal.iter().map(|&x| x.into()).collect(), offset));
            }
            facet_counts.entry(&p.id).or_insert(halfspaces.len());
            polytopes.push(RawPolytope {
                id: p.id.clone(),
                halfspaces,
            });
        }
        let mut edges = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            for (j, end) in e.ends.iter().enumerate() {
                if let Some(&count) = facet_counts.get(end.polytope.as_str()) {
                    if end.facet >= count {
                        return Err(ParseError::schema(
                            format!("edges[{k}].ends[{j}].facet"),
                            format!("facet {} of `{}`, which has {count} facets", end.facet, end.polytope),
                        ));
                    }
                }
            }
            edges.push(RawEdge {
                id: e.id.clone(),
                ends: e.ends.iter().map(|end| RawEnd::new(end.polytope.clone(), end.facet)).collect(),
            });
        }
        Ok(ParsedTemplate {
            raw: RawTemplate {
                dim: self.dimension,
                polytopes,
                edges,
            },
            note: self.note.clone(),
        })
    }

    /// Inverse of [`TemplateFile::to_raw`]; rationals come out in lowest
    /// terms and integral offsets as plain numbers.
    pub fn from_raw(raw: &RawTemplate, note: Option<String>) -> Self {
        let polytopes = raw
            .polytopes
            .iter()
            .map(|p| PolytopeEntry {
                id: p.id.clone(),
                normals: p
                    .halfspaces
                    .iter()
                    .map(|h| {
                        h.normal
                            .iter()
                            .map(|x| x.to_i64().expect("normal entries fit in 64 bits"))
                            .collect()
                    })
                    .collect(),
                offsets: p.halfspaces.iter().map(|h| offset_entry(&h.offset)).collect(),
            })
            .collect();
        let edges = raw
            .edges
            .iter()
            .map(|e| EdgeEntry {
                id: e.id.clone(),
                ends: e
                    .ends
                    .iter()
                    .map(|end| EndEntry {
                        polytope: end.polytope.clone(),
                        facet: end.facet,
                    })
                    .collect(),
            })
            .collect();
        TemplateFile {
            dimension: raw.dim,
            note,
            polytopes,
            edges,
        }
    }
}

fn offset_entry(c: &BigRational) -> Offset {
    if c.is_integer() {
        if let Some(v) = c.to_integer().to_i64() {
            return Offset::Int(v);
        }
    }
    Offset::Text(c.to_string())
}

pub fn serialize_template(parsed: &ParsedTemplate) -> String {
    let file = TemplateFile::from_raw(&parsed.raw, parsed.note.clone());
    serde_json::to_string_pretty(&file).expect("template files serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6"), Some(BigRational::new(1.into(), 2.into())));
        assert_eq!(parse_rational("-4"), Some(BigRational::from_integer((-4).into())));
        assert_eq!(parse_rational(" 7 / -14 "), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn lowest_terms_on_output() {
        assert_eq!(offset_entry(&BigRational::new(4.into(), 2.into())), Offset::Int(2));
        assert_eq!(offset_entry(&BigRational::new(2.into(), 4.into())), Offset::Text("1/2".into()));
    }

    #[test]
    fn schema_errors_carry_field() {
        let err = parse_template_str(r#"{"dimension": 2, "polytopes": [{"id": "P", "normals": [[1, "x"]], "offsets": [0]}], "edges": []}"#)
            .unwrap_err();
        match err {
            ParseError::Schema { field, line, .. } => {
                assert_eq!(field, "polytopes[0].normals[0][1]");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected {other}"),
        }
        let err = parse_template_str(r#"{"dimension": 2, "polytopes": [], "edges": [], "extra": 1}"#).unwrap_err();
        assert!(matches!(err, ParseError::Schema { .. }));
    }
}
