//! Schema matching workbench.
//!
//! The crate covers the whole batch workflow: ingest schemata ([`ingest`]),
//! score every element pair ([`engine`]), narrow the candidates for review
//! ([`filters`]), record concept labels and human decisions ([`session`]),
//! and turn the result into overlap statistics, a cross-schema vocabulary
//! and spreadsheets ([`analysis`], [`export`]).

pub mod analysis;
pub mod engine;
pub mod error;
pub mod export;
pub mod filters;
pub mod ingest;
pub mod linguistics;
pub mod model;
pub mod session;
pub mod synth;

pub use engine::{match_schemas, Link, MatchConfig, MatchLink, MatchMatrix, Matcher, VoterId, VoterScore};
pub use error::{Error, Result};
pub use model::{ElementId, ElementSet, Schema, SchemaBuilder, SchemaElement, SchemaId, SourceFormat};
