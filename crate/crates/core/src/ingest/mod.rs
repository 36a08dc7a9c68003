//! Schema ingestion: relational DDL, a subset of XML Schema, and the
//! canonical nested-object interchange file.

mod canonical;
mod ddl;
mod xsd;

use std::fmt;

pub use canonical::{read_canonical, write_canonical, CanonicalNode, FORMAT_VERSION};
pub use ddl::parse_ddl;
pub use xsd::parse_xsd;

use crate::model::Schema;

/// A schema plus the warnings produced while reading it.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub schema: Schema,
    pub report: ParseReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Unsupported constructs that were skipped during parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub warnings: Vec<Warning>,
}

impl ParseReport {
    pub fn warn(&mut self, line: usize, col: usize, message: impl Into<String>) {
        self.warnings.push(Warning {
            line,
            col,
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.warnings.is_empty()
    }
}

impl fmt::Display for ParseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "WARN {}:{} {}", w.line, w.col, w.message)?;
        }
        Ok(())
    }
}
