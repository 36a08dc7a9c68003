//! XML Schema subset.
//!
//! Global element declarations and named complex types become depth-1
//! elements. Nested elements and attributes follow source nesting. A global
//! element typed by a named complex type gets that type's content expanded
//! once; any further reference to a named complex type is kept as a leaf whose
//! `type_hint` is `ref:<TypeName>`.

use std::collections::HashMap;

use roxmltree::{Document, Node};

use super::{ParseReport, Parsed};
use crate::error::{Error, Result};
use crate::model::{SchemaBuilder, SchemaId, SourceFormat};

pub const REF_MARKER: &str = "ref:";

struct Ctx<'a, 'input> {
    doc: &'a Document<'input>,
    complex_types: HashMap<&'a str, Node<'a, 'input>>,
    builder: SchemaBuilder,
    report: ParseReport,
}

fn local(name: &str) -> &str {
    name.rsplit_once(':').map_or(name, |(_, l)| l)
}

fn documentation(node: Node) -> String {
    let mut parts = Vec::new();
    for ann in node.children().filter(|c| c.tag_name().name() == "annotation") {
        for d in ann.children().filter(|c| c.tag_name().name() == "documentation") {
            let text: String = d
                .descendants()
                .filter(|n| n.is_text())
                .filter_map(|n| n.text())
                .collect::<Vec<_>>()
                .join(" ");
            let norm = text.split_whitespace().collect::<Vec<_>>().join(" ");
            if !norm.is_empty() {
                parts.push(norm);
            }
        }
    }
    parts.join(" ")
}

impl<'a, 'input> Ctx<'a, 'input> {
    fn warn(&mut self, node: Node, message: impl Into<String>) {
        let pos = self.doc.text_pos_at(node.range().start);
        self.report.warn(pos.row as usize, pos.col as usize, message);
    }

    fn named_complex(&self, type_attr: &str) -> Option<Node<'a, 'input>> {
        self.complex_types.get(local(type_attr)).copied()
    }

    /// Walks the content model of a complex type (or of a compositor inside one).
    fn content(&mut self, node: Node<'a, 'input>, parent: usize) {
        for child in node.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "annotation" => {}
                "sequence" | "choice" | "all" | "complexContent" | "simpleContent" | "extension"
                | "restriction" => self.content(child, parent),
                "element" => self.element(child, Some(parent)),
                "attribute" => self.attribute(child, parent),
                "enumeration" | "pattern" | "minLength" | "maxLength" | "length" | "minInclusive"
                | "maxInclusive" | "minExclusive" | "maxExclusive" | "totalDigits"
                | "fractionDigits" | "whiteSpace" | "simpleType" => {}
                other => {
                    self.warn(child, format!("unsupported construct `{other}` skipped"));
                }
            }
        }
    }

    fn attribute(&mut self, node: Node<'a, 'input>, parent: usize) {
        let (name, type_hint) = match (node.attribute("name"), node.attribute("ref")) {
            (Some(n), _) => (n.to_owned(), node.attribute("type").unwrap_or("").to_owned()),
            (None, Some(r)) => (local(r).to_owned(), format!("{REF_MARKER}{}", local(r))),
            (None, None) => {
                self.warn(node, "attribute without name or ref skipped");
                return;
            }
        };
        self.builder
            .add(Some(parent), name, documentation(node), type_hint);
    }

    /// Only a global element (`parent == None`) expands its named complex type.
    fn element(&mut self, node: Node<'a, 'input>, parent: Option<usize>) {
        if node.attribute("substitutionGroup").is_some() {
            self.warn(node, "substitutionGroup ignored");
        }
        let doc = documentation(node);
        let (name, type_attr) = match (node.attribute("name"), node.attribute("ref")) {
            (Some(n), _) => (n.to_owned(), node.attribute("type")),
            (None, Some(r)) => {
                self.builder
                    .add(parent, local(r), doc, format!("{REF_MARKER}{}", local(r)));
                return;
            }
            (None, None) => {
                self.warn(node, "element without name or ref skipped");
                return;
            }
        };

        let inline = node
            .children()
            .find(|c| c.is_element() && c.tag_name().name() == "complexType");
        match (inline, type_attr) {
            (Some(ct), _) => {
                let idx = self.builder.add(parent, name, doc, "");
                self.content(ct, idx);
            }
            (None, Some(t)) => match self.named_complex(t) {
                Some(ct) if parent.is_none() => {
                    let idx = self.builder.add(parent, name, doc, local(t));
                    self.content(ct, idx);
                }
                Some(_) => {
                    self.builder
                        .add(parent, name, doc, format!("{REF_MARKER}{}", local(t)));
                }
                None => {
                    self.builder.add(parent, name, doc, t);
                }
            },
            (None, None) => {
                let hint = node
                    .children()
                    .find(|c| c.is_element() && c.tag_name().name() == "simpleType")
                    .and_then(|st| {
                        st.descendants()
                            .find(|d| d.tag_name().name() == "restriction")
                            .and_then(|r| r.attribute("base"))
                    })
                    .unwrap_or("");
                self.builder.add(parent, name, doc, hint);
            }
        }
    }
}

/// Parses an XML Schema document.
pub fn parse_xsd(text: &str, schema_id: impl Into<SchemaId>, name: impl Into<String>) -> Result<Parsed> {
    let doc = Document::parse(text).map_err(|e| Error::Xml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "schema" {
        let pos = doc.text_pos_at(root.range().start);
        return Err(Error::Xml(format!(
            "root element `{}` is not a schema at {}:{}",
            root.tag_name().name(),
            pos.row,
            pos.col
        )));
    }

    let complex_types = root
        .children()
        .filter(|c| c.is_element() && c.tag_name().name() == "complexType")
        .filter_map(|c| c.attribute("name").map(|n| (n, c)))
        .collect();

    let mut ctx = Ctx {
        doc: &doc,
        complex_types,
        builder: SchemaBuilder::new(schema_id, name, SourceFormat::Xsd),
        report: ParseReport::default(),
    };

    for child in root.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "annotation" | "simpleType" => {}
            "element" => ctx.element(child, None),
            "complexType" => match child.attribute("name") {
                Some(n) => {
                    let idx = ctx.builder.add(None, n, documentation(child), "complexType");
                    ctx.content(child, idx);
                }
                None => ctx.warn(child, "anonymous top-level complexType skipped"),
            },
            "attribute" => {
                if let Some(n) = child.attribute("name") {
                    ctx.builder
                        .add(None, n, documentation(child), child.attribute("type").unwrap_or(""));
                }
            }
            other => ctx.warn(child, format!("unsupported construct `{other}` skipped")),
        }
    }

    Ok(Parsed {
        schema: ctx.builder.build()?,
        report: ctx.report,
    })
}
