//! Canonical interchange file: a versioned JSON tree.
//!
//! The document root describes the schema itself (its `type_hint` carries the
//! original source format); every nested node is one element.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Schema, SchemaBuilder, SourceFormat};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalNode {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub documentation: String,
    #[serde(default)]
    pub type_hint: String,
    #[serde(default)]
    pub children: Vec<CanonicalNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalDocument {
    format_version: String,
    id: String,
    name: String,
    #[serde(default)]
    documentation: String,
    #[serde(default)]
    type_hint: String,
    #[serde(default)]
    children: Vec<CanonicalNode>,
}

fn to_nodes(schema: &Schema, indices: &[usize]) -> Vec<CanonicalNode> {
    indices
        .iter()
        .map(|&i| {
            let e = schema.element(i);
            CanonicalNode {
                id: e.id.0.clone(),
                name: e.name.clone(),
                documentation: e.documentation.clone(),
                type_hint: e.type_hint.clone(),
                children: to_nodes(schema, schema.children(i)),
            }
        })
        .collect()
}

pub fn write_canonical(schema: &Schema) -> String {
    let roots: Vec<usize> = schema.roots().collect();
    let doc = CanonicalDocument {
        format_version: FORMAT_VERSION.to_owned(),
        id: schema.id.0.clone(),
        name: schema.name.clone(),
        documentation: String::new(),
        type_hint: schema.source_format.as_str().to_owned(),
        children: to_nodes(schema, &roots),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("canonical document serializes");
    out.push('\n');
    out
}

fn add_nodes(
    b: &mut SchemaBuilder,
    parent: Option<usize>,
    nodes: &[CanonicalNode],
    problems: &mut Vec<String>,
) {
    for n in nodes {
        if n.name.is_empty() {
            problems.push(format!("element `{}` has an empty name", n.id));
        }
        let idx = b.add_with_id(
            parent,
            n.id.clone().into(),
            n.name.clone(),
            n.documentation.clone(),
            n.type_hint.clone(),
        );
        add_nodes(b, Some(idx), &n.children, problems);
    }
}

pub fn read_canonical(text: &str) -> Result<Schema> {
    let doc: CanonicalDocument = serde_json::from_str(text)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Version {
            found: doc.format_version,
            expected: FORMAT_VERSION.to_owned(),
        });
    }
    let mut problems = Vec::new();
    if doc.id.is_empty() {
        problems.push("schema id is empty".to_owned());
    }
    let format = doc.type_hint.parse().unwrap_or(SourceFormat::Canonical);
    let mut b = SchemaBuilder::new(doc.id, doc.name, format);
    add_nodes(&mut b, None, &doc.children, &mut problems);
    match b.build() {
        Ok(schema) if problems.is_empty() => Ok(schema),
        Ok(_) => Err(Error::Structure(problems)),
        Err(Error::Structure(more)) => {
            problems.extend(more);
            Err(Error::Structure(problems))
        }
        Err(e) => Err(e),
    }
}
