//! Session files.
//!
//! A session file references its schemata by path and SHA-256 of their
//! canonical serialisation, stores the event log and the state derived from
//! it. Matrices are not stored; they are recomputed on load. Loading replays
//! the log and refuses the file if the result differs from the stored state.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ConceptLabel, ConceptMatch, Event, MatchDecision, Session};
use crate::engine::MatchConfig;
use crate::error::{Error, Result};
use crate::ingest::{read_canonical, write_canonical};
use crate::model::{Schema, SchemaId};

pub const SESSION_FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaRef {
    pub id: SchemaId,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionFile {
    format_version: String,
    id: String,
    config: MatchConfig,
    schemas: Vec<SchemaRef>,
    pairs: Vec<(SchemaId, SchemaId)>,
    concepts: Vec<ConceptLabel>,
    decisions: Vec<MatchDecision>,
    concept_matches: Vec<ConceptMatch>,
    events: Vec<Event>,
}

/// Hex SHA-256 of the schema's canonical serialisation.
pub fn schema_hash(schema: &Schema) -> String {
    hex::encode(Sha256::digest(write_canonical(schema).as_bytes()))
}

/// Supplies the schemata a session file refers to.
pub trait SchemaResolver {
    fn resolve(&self, reference: &SchemaRef) -> Result<Arc<Schema>>;
}

/// Reads canonical schema files, relative paths taken from `base`.
#[derive(Debug, Clone)]
pub struct FileResolver {
    pub base: PathBuf,
}

impl SchemaResolver for FileResolver {
    fn resolve(&self, reference: &SchemaRef) -> Result<Arc<Schema>> {
        let path = self.base.join(&reference.path);
        let text = fs::read_to_string(&path).map_err(|e| {
            Error::Integrity(format!("schema `{}` at {}: {e}", reference.id, path.display()))
        })?;
        Ok(Arc::new(read_canonical(&text)?))
    }
}

/// Resolves schema references from memory by id.
#[derive(Debug, Clone, Default)]
pub struct MemoryResolver {
    pub schemas: HashMap<SchemaId, Arc<Schema>>,
}

impl MemoryResolver {
    pub fn new(schemas: impl IntoIterator<Item = Arc<Schema>>) -> Self {
        Self {
            schemas: schemas.into_iter().map(|s| (s.id.clone(), s)).collect(),
        }
    }
}

impl SchemaResolver for MemoryResolver {
    fn resolve(&self, reference: &SchemaRef) -> Result<Arc<Schema>> {
        self.schemas
            .get(&reference.id)
            .cloned()
            .ok_or_else(|| Error::UnknownSchema(reference.id.to_string()))
    }
}

impl Session {
    /// Serialises the session to its file form.
    pub fn to_json(&self) -> String {
        let file = SessionFile {
            format_version: SESSION_FORMAT_VERSION.to_owned(),
            id: self.id.clone(),
            config: self.config.clone(),
            schemas: self
                .schemas
                .values()
                .map(|s| SchemaRef {
                    id: s.id.clone(),
                    path: self.sources[&s.id].clone(),
                    sha256: schema_hash(s),
                })
                .collect(),
            pairs: self.matrices.keys().cloned().collect(),
            concepts: self.concepts.values().cloned().collect(),
            decisions: self.decisions.values().cloned().collect(),
            concept_matches: self.derive_concept_matches(),
            events: self.events.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("session serialises");
        s.push('\n');
        s
    }

    /// Rebuilds a session from [`Session::to_json`] output. The event log is
    /// replayed and must reproduce the stored state exactly.
    pub fn from_json(text: &str, resolver: &dyn SchemaResolver) -> Result<Session> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Integrity(format!("malformed session file: {e}")))?;
        match value.get("format_version").and_then(|v| v.as_str()) {
            Some(SESSION_FORMAT_VERSION) => {}
            Some(other) => {
                return Err(Error::Version {
                    found: other.to_owned(),
                    expected: SESSION_FORMAT_VERSION.to_owned(),
                })
            }
            None => return Err(Error::Integrity("session file has no format_version".into())),
        }
        let file: SessionFile = serde_json::from_value(value)
            .map_err(|e| Error::Integrity(format!("malformed session file: {e}")))?;

        let mut schemas = Vec::with_capacity(file.schemas.len());
        for r in &file.schemas {
            let schema = resolver.resolve(r)?;
            if schema.id != r.id {
                return Err(Error::Integrity(format!(
                    "schema file for `{}` declares id `{}`",
                    r.id, schema.id
                )));
            }
            let hash = schema_hash(&schema);
            if hash != r.sha256 {
                return Err(Error::Integrity(format!(
                    "schema `{}` changed since the session was saved (sha256 {hash}, expected {})",
                    r.id, r.sha256
                )));
            }
            schemas.push((schema, r.path.clone()));
        }

        let session = Session::replay(file.id, file.config, schemas, &file.events, &BTreeMap::new())
            .map_err(|e| Error::Integrity(format!("event log does not replay: {e}")))?;

        let mismatch = |what: &str| Error::Integrity(format!("stored {what} disagree with the event log"));
        if !session.matrices.keys().eq(file.pairs.iter()) {
            return Err(mismatch("schema pairs"));
        }
        if !session.concepts.values().eq(file.concepts.iter()) {
            return Err(mismatch("concepts"));
        }
        if !session.decisions.values().eq(file.decisions.iter()) {
            return Err(mismatch("decisions"));
        }
        if session.derive_concept_matches() != file.concept_matches {
            return Err(mismatch("concept matches"));
        }
        Ok(session)
    }
}

/// Writes the session file via a temporary sibling and a rename.
pub fn save_session(session: &Session, path: &Path) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, session.to_json())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads a session file, resolving schema paths against its directory.
pub fn load_session(path: &Path) -> Result<Session> {
    let text = fs::read_to_string(path)?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    Session::from_json(&text, &FileResolver { base })
}
