//! Canonical in-memory schema tree.
//!
//! A [`Schema`] is an immutable rooted forest of [`SchemaElement`]s stored in
//! document (pre-)order, so the sub-tree of any element occupies a contiguous
//! index range. Every other module addresses elements by their position in
//! [`Schema::elements`] and converts to [`ElementId`] only at the edges.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Set of element positions within one schema.
pub type ElementSet = BTreeSet<usize>;

macro_rules! string_id {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(SchemaId);
string_id!(ElementId);
string_id!(ConceptId);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Ddl,
    Xsd,
    Canonical,
}

impl SourceFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceFormat::Ddl => "ddl",
            SourceFormat::Xsd => "xsd",
            SourceFormat::Canonical => "canonical",
        }
    }
}

impl std::str::FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ddl" => Ok(SourceFormat::Ddl),
            "xsd" => Ok(SourceFormat::Xsd),
            "canonical" => Ok(SourceFormat::Canonical),
            other => Err(Error::InvalidArgument(format!("unknown schema format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaElement {
    pub id: ElementId,
    pub name: String,
    /// Empty when the source carries no documentation.
    pub documentation: String,
    pub type_hint: String,
    pub parent_id: Option<ElementId>,
    /// 1 for roots.
    pub depth: u32,
    /// Slash-joined names from the root down to this element.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub id: SchemaId,
    pub name: String,
    pub source_format: SourceFormat,
    elements: Vec<SchemaElement>,
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    subtree_end: Vec<usize>,
    index: HashMap<ElementId, usize>,
}

impl Schema {
    pub fn empty(id: impl Into<SchemaId>, name: impl Into<String>, format: SourceFormat) -> Self {
        SchemaBuilder::new(id, name, format).build().expect("empty schema is valid")
    }

    pub fn elements(&self) -> &[SchemaElement] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> &SchemaElement {
        &self.elements[idx]
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownElement(id.to_owned()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn parent(&self, idx: usize) -> Option<usize> {
        self.parents[idx]
    }

    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.elements.len()).filter(|&i| self.parents[i].is_none())
    }

    pub fn max_depth(&self) -> u32 {
        self.elements.iter().map(|e| e.depth).max().unwrap_or(0)
    }

    /// Positions covered by the sub-tree rooted at `idx`, root included.
    pub fn subtree_range(&self, idx: usize) -> Range<usize> {
        idx..self.subtree_end[idx]
    }

    /// Number of strict descendants of `idx`.
    pub fn descendant_count(&self, idx: usize) -> usize {
        self.subtree_end[idx] - idx - 1
    }

    pub fn subtree_elements(&self, root_id: &str) -> Result<ElementSet> {
        let root = self.require(root_id)?;
        Ok(self.subtree_range(root).collect())
    }

    pub fn elements_at_depth(&self, lo: u32, hi: u32) -> Result<ElementSet> {
        if lo > hi {
            return Err(Error::Range {
                lo: lo as f64,
                hi: hi as f64,
            });
        }
        if lo < 1 {
            return Err(Error::InvalidArgument(format!("depth must be >= 1, got {lo}")));
        }
        Ok(self
            .elements
            .iter()
            .enumerate()
            .filter(|(_, e)| (lo..=hi).contains(&e.depth))
            .map(|(i, _)| i)
            .collect())
    }

    pub fn ids<'a>(&'a self, set: &'a ElementSet) -> impl Iterator<Item = &'a ElementId> + 'a {
        set.iter().map(move |&i| &self.elements[i].id)
    }
}

/// Builds a [`Schema`] in document order.
///
/// Elements must be added depth-first: a new element's parent is either the
/// most recently added element or one of its ancestors.
#[derive(Debug)]
pub struct SchemaBuilder {
    id: SchemaId,
    name: String,
    format: SourceFormat,
    elements: Vec<SchemaElement>,
    parents: Vec<Option<usize>>,
    open: Vec<usize>,
}

impl SchemaBuilder {
    pub fn new(id: impl Into<SchemaId>, name: impl Into<String>, format: SourceFormat) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            format,
            elements: Vec::new(),
            parents: Vec::new(),
            open: Vec::new(),
        }
    }

    pub fn schema_id(&self) -> &SchemaId {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Adds an element with the ordinal id `"<schema>:<position>"`.
    pub fn add(
        &mut self,
        parent: Option<usize>,
        name: impl Into<String>,
        documentation: impl Into<String>,
        type_hint: impl Into<String>,
    ) -> usize {
        let id = ElementId(format!("{}:{}", self.id, self.elements.len()));
        self.add_with_id(parent, id, name, documentation, type_hint)
    }

    pub fn add_with_id(
        &mut self,
        parent: Option<usize>,
        id: ElementId,
        name: impl Into<String>,
        documentation: impl Into<String>,
        type_hint: impl Into<String>,
    ) -> usize {
        match parent {
            None => self.open.clear(),
            Some(p) => {
                while self.open.last().is_some_and(|&top| top != p) {
                    self.open.pop();
                }
                assert!(
                    self.open.last() == Some(&p),
                    "element added out of document order (parent {p} is not open)"
                );
            }
        }
        let name = name.into();
        let (depth, path, parent_id) = match parent {
            None => (1, name.clone(), None),
            Some(p) => {
                let pe = &self.elements[p];
                (pe.depth + 1, format!("{}/{}", pe.path, name), Some(pe.id.clone()))
            }
        };
        let idx = self.elements.len();
        self.elements.push(SchemaElement {
            id,
            name,
            documentation: documentation.into(),
            type_hint: type_hint.into(),
            parent_id,
            depth,
            path,
        });
        self.parents.push(parent);
        self.open.push(idx);
        idx
    }

    pub fn set_documentation(&mut self, idx: usize, doc: impl Into<String>) {
        self.elements[idx].documentation = doc.into();
    }

    pub fn element(&self, idx: usize) -> &SchemaElement {
        &self.elements[idx]
    }

    pub fn build(self) -> Result<Schema> {
        let n = self.elements.len();
        let mut index = HashMap::with_capacity(n);
        let mut problems = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            if e.id.0.is_empty() {
                problems.push(format!("element at position {i} has an empty id"));
            }
            if index.insert(e.id.clone(), i).is_some() {
                problems.push(format!("duplicate element id `{}`", e.id));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Structure(problems));
        }

        let mut children = vec![Vec::new(); n];
        for (i, p) in self.parents.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(i);
            }
        }
        let mut subtree_end = vec![0; n];
        for i in (0..n).rev() {
            subtree_end[i] = children[i].last().map_or(i + 1, |&c| subtree_end[c]);
        }

        Ok(Schema {
            id: self.id,
            name: self.name,
            source_format: self.format,
            elements: self.elements,
            parents: self.parents,
            children,
            subtree_end,
            index,
        })
    }
}
