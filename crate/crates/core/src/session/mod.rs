//! Review session: concept labels over schema elements, incremental
//! concept-by-concept matching, human decisions and the concept-level matches
//! derived from them.
//!
//! Every mutation is appended to an event log. Replaying that log over the
//! same schemata reproduces the session, which is how persisted sessions are
//! verified on load.

mod persist;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use persist::{
    load_session, save_session, schema_hash, FileResolver, MemoryResolver, SchemaRef,
    SchemaResolver, SESSION_FORMAT_VERSION,
};

use crate::engine::{sort_links, Link, MatchConfig, MatchMatrix, Matcher};
use crate::error::{Error, Result};
use crate::model::{ConceptId, ElementId, Schema, SchemaId};

/// Ordered `(left, right)` schema pair of a computed matrix.
pub type PairKey = (SchemaId, SchemaId);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionStatus {
    Candidate,
    Accepted,
    Rejected,
}

impl DecisionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionStatus::Candidate => "candidate",
            DecisionStatus::Accepted => "accepted",
            DecisionStatus::Rejected => "rejected",
        }
    }

    /// Whether a decision currently in `self` may move to `next`. Re-recording
    /// the same status is allowed (annotation or assignee updates); nothing
    /// returns to `candidate` once decided.
    pub fn can_become(self, next: DecisionStatus) -> bool {
        use DecisionStatus::*;
        matches!(
            (self, next),
            (Candidate, _) | (Accepted, Accepted | Rejected) | (Rejected, Accepted | Rejected)
        )
    }
}

impl fmt::Display for DecisionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecisionStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "candidate" => Ok(Self::Candidate),
            "accepted" => Ok(Self::Accepted),
            "rejected" => Ok(Self::Rejected),
            other => Err(Error::InvalidArgument(format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum Annotation {
    #[serde(rename = "equivalent")]
    Equivalent,
    #[serde(rename = "is-a")]
    IsA,
    #[serde(rename = "part-of")]
    PartOf,
    #[serde(rename = "related")]
    Related,
    #[default]
    #[serde(rename = "none")]
    None,
}

impl Annotation {
    pub fn as_str(self) -> &'static str {
        match self {
            Annotation::Equivalent => "equivalent",
            Annotation::IsA => "is-a",
            Annotation::PartOf => "part-of",
            Annotation::Related => "related",
            Annotation::None => "none",
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Annotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equivalent" => Ok(Self::Equivalent),
            "is-a" => Ok(Self::IsA),
            "part-of" => Ok(Self::PartOf),
            "related" => Ok(Self::Related),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidArgument(format!("unknown annotation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub left_id: ElementId,
    pub right_id: ElementId,
    pub status: DecisionStatus,
    pub annotation: Annotation,
    pub author: String,
    pub assignee: String,
    pub timestamp: DateTime<Utc>,
}

/// Input to [`Session::record_decision`]; the pair may be given in either
/// orientation.
#[derive(Debug, Clone)]
pub struct DecisionRequest {
    pub left_id: ElementId,
    pub right_id: ElementId,
    pub status: DecisionStatus,
    pub annotation: Annotation,
    pub author: String,
    pub assignee: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptLabel {
    pub id: ConceptId,
    pub name: String,
    pub schema_id: SchemaId,
    pub members: BTreeSet<ElementId>,
}

/// Concept labels of one schema plus the elements no concept covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub schema_id: SchemaId,
    pub concepts: Vec<ConceptLabel>,
    pub unassigned: Vec<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConceptMatch {
    pub left_concept: ConceptId,
    pub right_concept: ConceptId,
    pub support: usize,
}

/// A proposed concept rooted at a depth-1 container.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptSuggestion {
    pub root_id: ElementId,
    pub name: String,
    pub members: Vec<ElementId>,
    pub descendant_count: usize,
}

/// Result of matching one concept's elements against an opposing schema.
/// Links are oriented concept side first.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementalMatch {
    pub concept_schema: SchemaId,
    pub opposing_schema: SchemaId,
    pub considered: usize,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    SchemaMatched {
        left: SchemaId,
        right: SchemaId,
    },
    ConceptAssigned {
        schema_id: SchemaId,
        concept: String,
        elements: Vec<ElementId>,
    },
    DecisionRecorded {
        decision: MatchDecision,
    },
}

/// Proposes every depth-1 element with descendants as a concept covering
/// its sub-tree, largest first.
pub fn suggest_concepts(schema: &Schema) -> Vec<ConceptSuggestion> {
    let mut out: Vec<(usize, ConceptSuggestion)> = schema
        .roots()
        .filter(|&r| schema.descendant_count(r) > 0)
        .map(|r| {
            let e = schema.element(r);
            (
                r,
                ConceptSuggestion {
                    root_id: e.id.clone(),
                    name: e.name.clone(),
                    members: schema
                        .subtree_range(r)
                        .map(|i| schema.element(i).id.clone())
                        .collect(),
                    descendant_count: schema.descendant_count(r),
                },
            )
        })
        .collect();
    out.sort_by(|a, b| b.1.descendant_count.cmp(&a.1.descendant_count).then(a.0.cmp(&b.0)));
    out.into_iter().map(|(_, s)| s).collect()
}

fn unordered(a: &ElementId, b: &ElementId) -> (ElementId, ElementId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

pub fn concept_id(schema_id: &SchemaId, name: &str) -> ConceptId {
    ConceptId(format!("{schema_id}/{name}"))
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    config: MatchConfig,
    schemas: BTreeMap<SchemaId, Arc<Schema>>,
    sources: BTreeMap<SchemaId, String>,
    owner: HashMap<ElementId, SchemaId>,
    matrices: BTreeMap<PairKey, Arc<MatchMatrix>>,
    concepts: BTreeMap<ConceptId, ConceptLabel>,
    assignment: HashMap<ElementId, ConceptId>,
    decisions: BTreeMap<(ElementId, ElementId), MatchDecision>,
    events: Vec<Event>,
}

impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.config == other.config
            && self.schemas == other.schemas
            && self.sources == other.sources
            && self.matrices.keys().eq(other.matrices.keys())
            && self.concepts == other.concepts
            && self.decisions == other.decisions
            && self.events == other.events
    }
}

impl Session {
    pub fn new(id: impl Into<String>, config: MatchConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            id: id.into(),
            config,
            schemas: BTreeMap::new(),
            sources: BTreeMap::new(),
            owner: HashMap::new(),
            matrices: BTreeMap::new(),
            concepts: BTreeMap::new(),
            assignment: HashMap::new(),
            decisions: BTreeMap::new(),
            events: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &MatchConfig {
        &self.config
    }

    pub fn review_threshold(&self) -> f64 {
        self.config.review_threshold
    }

    /// Registers a schema; `source` is the path recorded when saving.
    pub fn add_schema(&mut self, schema: Arc<Schema>, source: impl Into<String>) -> Result<()> {
        if self.schemas.contains_key(&schema.id) {
            return Err(Error::InvalidArgument(format!("schema `{}` already in session", schema.id)));
        }
        if let Some(clash) = schema.elements().iter().find(|e| self.owner.contains_key(&e.id)) {
            return Err(Error::InvalidArgument(format!(
                "element id `{}` of schema `{}` collides with schema `{}`",
                clash.id, schema.id, self.owner[&clash.id]
            )));
        }
        for e in schema.elements() {
            self.owner.insert(e.id.clone(), schema.id.clone());
        }
        self.sources.insert(schema.id.clone(), source.into());
        self.schemas.insert(schema.id.clone(), schema);
        Ok(())
    }

    pub fn schema(&self, id: &str) -> Result<&Arc<Schema>> {
        self.schemas.get(id).ok_or_else(|| Error::UnknownSchema(id.to_owned()))
    }

    pub fn schemas(&self) -> impl Iterator<Item = &Arc<Schema>> {
        self.schemas.values()
    }

    pub fn source(&self, id: &SchemaId) -> Option<&str> {
        self.sources.get(id).map(String::as_str)
    }

    /// Schema owning `element`, if any.
    pub fn owner_of(&self, element: &str) -> Option<&SchemaId> {
        self.owner.get(element)
    }

    pub fn matrices(&self) -> impl Iterator<Item = (&PairKey, &Arc<MatchMatrix>)> {
        self.matrices.iter()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairKey> {
        self.matrices.keys()
    }

    /// Matrix for the two schemata in either orientation; the flag is true when
    /// the stored matrix has `b` on its left.
    pub fn matrix_between(&self, a: &str, b: &str) -> Option<(&Arc<MatchMatrix>, bool)> {
        let key = (SchemaId::from(a), SchemaId::from(b));
        if let Some(m) = self.matrices.get(&key) {
            return Some((m, false));
        }
        let rev = (key.1, key.0);
        self.matrices.get(&rev).map(|m| (m, true))
    }

    /// Computes and stores the `left × right` matrix.
    pub fn compute_matches(&mut self, left: &str, right: &str) -> Result<Arc<MatchMatrix>> {
        let l = self.schema(left)?.clone();
        let r = self.schema(right)?.clone();
        let m = Arc::new(Matcher::new(self.config.clone())?.run(l, r)?);
        self.insert_matrix(m.clone())?;
        Ok(m)
    }

    /// Stores a matrix computed elsewhere over this session's schemata.
    pub fn insert_matrix(&mut self, matrix: Arc<MatchMatrix>) -> Result<()> {
        let (l, r) = (matrix.left_schema_id().clone(), matrix.right_schema_id().clone());
        for id in [&l, &r] {
            let mine = self.schema(id.as_str())?;
            let theirs = if *id == l { matrix.left() } else { matrix.right() };
            if !Arc::ptr_eq(mine, theirs) && **mine != **theirs {
                return Err(Error::InvalidArgument(format!(
                    "matrix schema `{id}` differs from the session's copy"
                )));
            }
        }
        if *matrix.config() != self.config {
            return Err(Error::InvalidArgument("matrix computed with a different configuration".into()));
        }
        if self.matrix_between(l.as_str(), r.as_str()).is_some() {
            return Err(Error::InvalidArgument(format!("pair ({l}, {r}) already matched")));
        }
        self.matrices.insert((l.clone(), r.clone()), matrix);
        self.events.push(Event::SchemaMatched { left: l, right: r });
        Ok(())
    }

    pub fn concepts(&self) -> impl Iterator<Item = &ConceptLabel> {
        self.concepts.values()
    }

    pub fn concept(&self, id: &str) -> Result<&ConceptLabel> {
        self.concepts
            .get(id)
            .ok_or_else(|| Error::UnknownConcept(id.to_owned()))
    }

    pub fn concept_of(&self, element: &str) -> Option<&ConceptLabel> {
        self.assignment.get(element).map(|c| &self.concepts[c])
    }

    /// Creates the concept `name` in `schema_id`, or extends it, with the
    /// given elements. An element may belong to at most one concept.
    pub fn assign_concept(&mut self, schema_id: &str, name: &str, elements: &[ElementId]) -> Result<ConceptLabel> {
        let schema = self.schema(schema_id)?.clone();
        if name.trim().is_empty() {
            return Err(Error::InvalidArgument("concept name is empty".into()));
        }
        if elements.is_empty() {
            return Err(Error::InvalidArgument("a concept needs at least one element".into()));
        }
        let cid = concept_id(&schema.id, name);
        for e in elements {
            schema.require(e.as_str())?;
            if let Some(existing) = self.assignment.get(e) {
                if *existing != cid {
                    return Err(Error::ConceptConflict {
                        element: e.to_string(),
                        concept: existing.to_string(),
                    });
                }
            }
        }
        let label = self.concepts.entry(cid.clone()).or_insert_with(|| ConceptLabel {
            id: cid.clone(),
            name: name.to_owned(),
            schema_id: schema.id.clone(),
            members: BTreeSet::new(),
        });
        for e in elements {
            label.members.insert(e.clone());
            self.assignment.insert(e.clone(), cid.clone());
        }
        let label = label.clone();
        self.events.push(Event::ConceptAssigned {
            schema_id: schema.id.clone(),
            concept: name.to_owned(),
            elements: elements.to_vec(),
        });
        Ok(label)
    }

    pub fn summary(&self, schema_id: &str) -> Result<Summary> {
        let schema = self.schema(schema_id)?;
        let concepts: Vec<ConceptLabel> = self
            .concepts
            .values()
            .filter(|c| c.schema_id == schema.id)
            .cloned()
            .collect();
        let unassigned = schema
            .elements()
            .iter()
            .filter(|e| !self.assignment.contains_key(&e.id))
            .map(|e| e.id.clone())
            .collect();
        Ok(Summary {
            schema_id: schema.id.clone(),
            concepts,
            unassigned,
        })
    }

    /// Links from every member of `concept` to every element of the opposing
    /// schema with score at least `min_score` (session threshold by default).
    /// `opposing` is required only when the concept's schema takes part in
    /// more than one matrix.
    pub fn incremental_match(
        &self,
        concept: &str,
        opposing: Option<&str>,
        min_score: Option<f64>,
    ) -> Result<IncrementalMatch> {
        let label = self.concept(concept)?;
        let own = &label.schema_id;
        let candidates: Vec<(&PairKey, &Arc<MatchMatrix>)> = self
            .matrices
            .iter()
            .filter(|((l, r), _)| {
                (l == own && opposing.is_none_or(|o| r.as_str() == o))
                    || (r == own && opposing.is_none_or(|o| l.as_str() == o))
            })
            .collect();
        let ((l, r), m) = match candidates.as_slice() {
            [one] => *one,
            [] => {
                return Err(Error::InvalidArgument(format!(
                    "schema `{own}` has no computed matrix{}",
                    opposing.map(|o| format!(" with `{o}`")).unwrap_or_default()
                )))
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "schema `{own}` is matched against several schemata; name the opposing one"
                )))
            }
        };
        let on_left = l == own;
        let own_schema = if on_left { m.left() } else { m.right() };
        let threshold = min_score.unwrap_or(self.config.review_threshold);
        let members: Vec<usize> = label
            .members
            .iter()
            .map(|e| own_schema.require(e.as_str()))
            .collect::<Result<_>>()?;
        let width = if on_left { m.cols() } else { m.rows() };

        let mut links = Vec::new();
        for &i in &members {
            for j in 0..width {
                let score = if on_left { m.score(i, j) } else { m.score(j, i) };
                if score >= threshold {
                    links.push(Link { left: i, right: j, score });
                }
            }
        }
        sort_links(&mut links);
        Ok(IncrementalMatch {
            concept_schema: own.clone(),
            opposing_schema: if on_left { r.clone() } else { l.clone() },
            considered: members.len() * width,
            links,
        })
    }

    /// Records a validation decision. The pair may be named in either
    /// orientation; it is stored once, oriented like its matrix.
    pub fn record_decision(&mut self, req: DecisionRequest) -> Result<MatchDecision> {
        let unknown = || Error::UnknownPair {
            left: req.left_id.to_string(),
            right: req.right_id.to_string(),
        };
        let ls = self.owner.get(&req.left_id).ok_or_else(unknown)?;
        let rs = self.owner.get(&req.right_id).ok_or_else(unknown)?;
        let (_, flipped) = self
            .matrix_between(ls.as_str(), rs.as_str())
            .ok_or_else(unknown)?;
        let (left_id, right_id) = if flipped {
            (req.right_id.clone(), req.left_id.clone())
        } else {
            (req.left_id.clone(), req.right_id.clone())
        };
        let key = unordered(&left_id, &right_id);
        let prev = self
            .decisions
            .get(&key)
            .map_or(DecisionStatus::Candidate, |d| d.status);
        if !prev.can_become(req.status) {
            return Err(Error::IllegalTransition {
                left: left_id.to_string(),
                right: right_id.to_string(),
                from: prev.to_string(),
                to: req.status.to_string(),
            });
        }
        let decision = MatchDecision {
            left_id,
            right_id,
            status: req.status,
            annotation: req.annotation,
            author: req.author,
            assignee: req.assignee,
            timestamp: req.timestamp,
        };
        self.decisions.insert(key, decision.clone());
        self.events.push(Event::DecisionRecorded {
            decision: decision.clone(),
        });
        Ok(decision)
    }

    pub fn decision(&self, a: &str, b: &str) -> Option<&MatchDecision> {
        self.decisions.get(&unordered(&a.into(), &b.into()))
    }

    pub fn decisions(&self) -> impl Iterator<Item = &MatchDecision> {
        self.decisions.values()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Accepted pairs between two schemata as positions, oriented `(a, b)`.
    pub fn accepted_pairs(&self, a: &str, b: &str) -> Result<Vec<(usize, usize)>> {
        let sa = self.schema(a)?;
        let sb = self.schema(b)?;
        if self.matrix_between(a, b).is_none() {
            return Err(Error::UnknownPair {
                left: a.to_owned(),
                right: b.to_owned(),
            });
        }
        let mut out: Vec<(usize, usize)> = self
            .decisions
            .values()
            .filter(|d| d.status == DecisionStatus::Accepted)
            .filter_map(|d| {
                match (sa.index_of(d.left_id.as_str()), sb.index_of(d.right_id.as_str())) {
                    (Some(i), Some(j)) => Some((i, j)),
                    _ => match (sa.index_of(d.right_id.as_str()), sb.index_of(d.left_id.as_str())) {
                        (Some(i), Some(j)) => Some((i, j)),
                        _ => None,
                    },
                }
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Concept-level matches for one matrix pair: left concept `A` matches
    /// right concept `B` when `B` receives a strict plurality of `A`'s
    /// accepted matches into labelled right elements.
    pub fn concept_matches_for(&self, left: &str, right: &str) -> Result<Vec<ConceptMatch>> {
        let pairs = self.accepted_pairs(left, right)?;
        let (sl, sr) = (self.schema(left)?, self.schema(right)?);
        let mut tally: BTreeMap<&ConceptId, BTreeMap<&ConceptId, usize>> = BTreeMap::new();
        for (i, j) in pairs {
            let (Some(a), Some(b)) = (
                self.assignment.get(&sl.element(i).id),
                self.assignment.get(&sr.element(j).id),
            ) else {
                continue;
            };
            *tally.entry(a).or_default().entry(b).or_default() += 1;
        }
        let mut out = Vec::new();
        for (a, counts) in tally {
            let best = counts.values().copied().max().unwrap_or(0);
            let mut winners = counts.iter().filter(|(_, &c)| c == best);
            if let (Some((b, &support)), None) = (winners.next(), winners.next()) {
                if support >= 1 {
                    out.push(ConceptMatch {
                        left_concept: a.clone(),
                        right_concept: (*b).clone(),
                        support,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Concept-level matches over every matrix pair.
    pub fn derive_concept_matches(&self) -> Vec<ConceptMatch> {
        let mut out = Vec::new();
        for (l, r) in self.matrices.keys() {
            out.extend(
                self.concept_matches_for(l.as_str(), r.as_str())
                    .expect("matrix pairs reference registered schemata"),
            );
        }
        out
    }

    /// Rebuilds a session from its schemata and event log. Matrices found in
    /// `cache` are reused instead of recomputed.
    pub fn replay(
        id: impl Into<String>,
        config: MatchConfig,
        schemas: impl IntoIterator<Item = (Arc<Schema>, String)>,
        events: &[Event],
        cache: &BTreeMap<PairKey, Arc<MatchMatrix>>,
    ) -> Result<Session> {
        let mut s = Session::new(id, config)?;
        for (schema, source) in schemas {
            s.add_schema(schema, source)?;
        }
        for ev in events {
            match ev {
                Event::SchemaMatched { left, right } => {
                    match cache.get(&(left.clone(), right.clone())) {
                        Some(m) => s.insert_matrix(m.clone())?,
                        None => {
                            s.compute_matches(left.as_str(), right.as_str())?;
                        }
                    }
                }
                Event::ConceptAssigned {
                    schema_id,
                    concept,
                    elements,
                } => {
                    s.assign_concept(schema_id.as_str(), concept, elements)?;
                }
                Event::DecisionRecorded { decision } => {
                    s.record_decision(DecisionRequest {
                        left_id: decision.left_id.clone(),
                        right_id: decision.right_id.clone(),
                        status: decision.status,
                        annotation: decision.annotation,
                        author: decision.author.clone(),
                        assignee: decision.assignee.clone(),
                        timestamp: decision.timestamp,
                    })?;
                }
            }
        }
        Ok(s)
    }

    /// Replays this session's own log over its schemata.
    pub fn replayed(&self) -> Result<Session> {
        Session::replay(
            self.id.clone(),
            self.config.clone(),
            self.schemas
                .values()
                .map(|s| (s.clone(), self.sources[&s.id].clone())),
            &self.events,
            &self.matrices,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_ddl;

    fn ts(n: i64) -> DateTime<Utc> {
        DateTime::from_timestamp(1_700_000_000 + n, 0).unwrap()
    }

    fn req(l: &str, r: &str, status: DecisionStatus) -> DecisionRequest {
        DecisionRequest {
            left_id: l.into(),
            right_id: r.into(),
            status,
            annotation: Annotation::Equivalent,
            author: "kim".into(),
            assignee: String::new(),
            timestamp: ts(0),
        }
    }

    fn session() -> Session {
        let a = parse_ddl(
            "CREATE TABLE All_Event_Vitals (DATE_BEGIN_156 DATE COMMENT 'begin date of the event', event_place TEXT);\n\
             CREATE TABLE Person (person_name TEXT, born DATE);",
            "a",
            "A",
        )
        .unwrap()
        .schema;
        let b = parse_ddl(
            "CREATE TABLE Event (DATETIME_FIRST_INFO DATE COMMENT 'the begin date of an event', location TEXT);\n\
             CREATE TABLE Individual (full_name TEXT);",
            "b",
            "B",
        )
        .unwrap()
        .schema;
        let mut s = Session::new("s1", MatchConfig::default()).unwrap();
        s.add_schema(Arc::new(a), "a.json").unwrap();
        s.add_schema(Arc::new(b), "b.json").unwrap();
        s.compute_matches("a", "b").unwrap();
        s
    }

    fn ids(v: &[&str]) -> Vec<ElementId> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn assign_and_conflict() {
        let mut s = session();
        let members = s.schema("a").unwrap().subtree_elements("a:0").unwrap();
        let members: Vec<ElementId> = members.iter().map(|&i| format!("a:{i}").into()).collect();
        let c = s.assign_concept("a", "Event", &members).unwrap();
        assert_eq!(c.members.len(), 3);
        assert_eq!(c.id.as_str(), "a/Event");

        let err = s.assign_concept("a", "Person", &ids(&["a:1"])).unwrap_err();
        assert!(matches!(err, Error::ConceptConflict { ref element, ref concept } if element == "a:1" && concept == "a/Event"));

        // extending the same concept is fine
        s.assign_concept("a", "Event", &ids(&["a:1"])).unwrap();
        let sum = s.summary("a").unwrap();
        let assigned: usize = sum.concepts.iter().map(|c| c.members.len()).sum();
        assert_eq!(assigned + sum.unassigned.len(), 6);
        assert!(s.assign_concept("a", "X", &ids(&["b:0"])).is_err());
    }

    #[test]
    fn suggestions() {
        let a = parse_ddl("CREATE TABLE small (x INT, y INT); CREATE TABLE big (a INT, b INT, c INT, d INT, e INT); CREATE TABLE none ();", "t", "T")
            .unwrap()
            .schema;
        let sug = suggest_concepts(&a);
        assert_eq!(sug.len(), 2);
        assert_eq!((sug[0].name.as_str(), sug[0].descendant_count), ("big", 5));
        assert_eq!((sug[1].name.as_str(), sug[1].descendant_count), ("small", 2));
        assert_eq!(sug[0].members.len(), 6);

        let mut b = crate::SchemaBuilder::new("f", "F", crate::SourceFormat::Canonical);
        b.add(None, "x", "", "");
        b.add(None, "y", "", "");
        assert!(suggest_concepts(&b.build().unwrap()).is_empty());
    }

    #[test]
    fn incremental() {
        let mut s = session();
        s.assign_concept("a", "Event", &ids(&["a:0", "a:1", "a:2"])).unwrap();
        let r = s.incremental_match("a/Event", None, Some(-1.0)).unwrap();
        assert_eq!(r.considered, 3 * 5);
        assert_eq!(r.links.len(), 15);
        assert_eq!(r.opposing_schema.as_str(), "b");
        let top = r.links[0].score;
        let strict = s.incremental_match("a/Event", None, Some(top)).unwrap();
        assert!(strict.links.iter().all(|l| l.score >= top));
        assert!(matches!(s.incremental_match("a/Nope", None, None), Err(Error::UnknownConcept(_))));

        // concept on the right side of the matrix
        s.assign_concept("b", "Event", &ids(&["b:0", "b:1"])).unwrap();
        let r = s.incremental_match("b/Event", None, Some(-1.0)).unwrap();
        assert_eq!(r.considered, 2 * 6);
        let m = s.matrix_between("a", "b").unwrap().0;
        for l in &r.links {
            assert_eq!(l.score, m.score(l.right, l.left));
        }
    }

    #[test]
    fn decisions_and_transitions() {
        let mut s = session();
        let d = s.record_decision(req("a:1", "b:1", DecisionStatus::Accepted)).unwrap();
        assert_eq!(d.status, DecisionStatus::Accepted);
        s.record_decision(req("a:1", "b:1", DecisionStatus::Rejected)).unwrap();
        assert_eq!(s.decision("b:1", "a:1").unwrap().status, DecisionStatus::Rejected);
        assert_eq!(s.events().len(), 3);

        let err = s.record_decision(req("a:1", "b:1", DecisionStatus::Candidate)).unwrap_err();
        assert!(matches!(err, Error::IllegalTransition { .. }));
        let err = s.record_decision(req("a:1", "a:2", DecisionStatus::Accepted)).unwrap_err();
        assert!(matches!(err, Error::UnknownPair { .. }));
        let err = s.record_decision(req("a:1", "zz", DecisionStatus::Accepted)).unwrap_err();
        assert!(matches!(err, Error::UnknownPair { .. }));

        // reversed orientation is stored once, oriented like the matrix
        let d = s.record_decision(req("b:2", "a:4", DecisionStatus::Accepted)).unwrap();
        assert_eq!((d.left_id.as_str(), d.right_id.as_str()), ("a:4", "b:2"));
        assert_eq!(s.decisions().count(), 2);
    }

    #[test]
    fn concept_match_plurality() {
        let mut s = session();
        s.assign_concept("a", "Event", &ids(&["a:0", "a:1", "a:2"])).unwrap();
        s.assign_concept("a", "Person", &ids(&["a:3", "a:4", "a:5"])).unwrap();
        s.assign_concept("b", "Event", &ids(&["b:0", "b:1", "b:2"])).unwrap();
        s.assign_concept("b", "Individual", &ids(&["b:3", "b:4"])).unwrap();
        for (l, r) in [("a:0", "b:0"), ("a:1", "b:1"), ("a:2", "b:2"), ("a:2", "b:4")] {
            s.record_decision(req(l, r, DecisionStatus::Accepted)).unwrap();
        }
        // Person splits 1-1 between Event and Individual: tie, no match
        s.record_decision(req("a:4", "b:4", DecisionStatus::Accepted)).unwrap();
        s.record_decision(req("a:5", "b:1", DecisionStatus::Accepted)).unwrap();
        let cm = s.derive_concept_matches();
        assert_eq!(
            cm,
            [ConceptMatch {
                left_concept: "a/Event".into(),
                right_concept: "b/Event".into(),
                support: 3
            }]
        );
        // rejecting breaks the tie
        s.record_decision(req("a:5", "b:1", DecisionStatus::Rejected)).unwrap();
        assert_eq!(s.derive_concept_matches().len(), 2);
    }

    #[test]
    fn replay_reproduces_state() {
        let mut s = session();
        s.assign_concept("a", "Event", &ids(&["a:0", "a:1"])).unwrap();
        s.record_decision(req("a:1", "b:1", DecisionStatus::Accepted)).unwrap();
        s.record_decision(req("a:1", "b:1", DecisionStatus::Rejected)).unwrap();
        assert_eq!(s.replayed().unwrap(), s);
    }
}
