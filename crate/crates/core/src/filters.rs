//! Link filters (score range) and node filters (depth, sub-tree).
//!
//! All bounds are inclusive. Every filter is a predicate, so combining them
//! is set intersection: order does not matter and re-applying is a no-op.

use serde::{Deserialize, Serialize};

use crate::engine::{sort_links, Link, MatchMatrix};
use crate::error::{Error, Result};
use crate::model::{ElementId, ElementSet, Schema, SchemaId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FilterSpec {
    Confidence { lo: f64, hi: f64 },
    Depth { lo: u32, hi: u32 },
    Subtree { schema_id: SchemaId, root_element_id: ElementId },
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterSpec::Confidence { lo, hi } if lo > hi || lo.is_nan() || hi.is_nan() => {
                Err(Error::Range { lo, hi })
            }
            FilterSpec::Depth { lo, hi } if lo > hi => Err(Error::Range {
                lo: lo as f64,
                hi: hi as f64,
            }),
            _ => Ok(()),
        }
    }
}

/// Inclusive score range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRange {
    pub lo: f64,
    pub hi: f64,
}

impl ScoreRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::Range { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, score: f64) -> bool {
        self.lo <= score && score <= self.hi
    }
}

/// Links with `lo <= score <= hi`, highest score first.
pub fn confidence_filter(matrix: &MatchMatrix, lo: f64, hi: f64) -> Result<Vec<Link>> {
    let range = ScoreRange::new(lo, hi)?;
    Ok(matrix.links_in_range(range.lo, range.hi))
}

/// Elements of `schema` enabled by a depth or sub-tree spec.
pub fn node_filter(schema: &Schema, spec: &FilterSpec) -> Result<ElementSet> {
    spec.validate()?;
    match spec {
        FilterSpec::Depth { lo, hi } => schema.elements_at_depth(*lo, *hi),
        FilterSpec::Subtree {
            schema_id,
            root_element_id,
        } => {
            if *schema_id != schema.id {
                return Err(Error::UnknownSchema(schema_id.to_string()));
            }
            schema.subtree_elements(root_element_id.as_str())
        }
        FilterSpec::Confidence { .. } => Err(Error::InvalidArgument(
            "confidence is a link filter, not a node filter".into(),
        )),
    }
}

/// Links whose endpoints are enabled on both sides and whose score passes
/// every range. `None` node sets enable the whole schema.
pub fn apply(
    matrix: &MatchMatrix,
    link_filters: &[ScoreRange],
    left: Option<&ElementSet>,
    right: Option<&ElementSet>,
) -> Vec<Link> {
    let passes = |score: f64| link_filters.iter().all(|r| r.contains(score));
    let rows: Box<dyn Iterator<Item = usize>> = match left {
        Some(set) => Box::new(set.iter().copied().filter(|&i| i < matrix.rows())),
        None => Box::new(0..matrix.rows()),
    };
    let right_cols: Option<Vec<usize>> =
        right.map(|set| set.iter().copied().filter(|&j| j < matrix.cols()).collect());

    let mut out = Vec::new();
    for i in rows {
        let row = matrix.row(i);
        match &right_cols {
            Some(cols) => out.extend(
                cols.iter()
                    .filter(|&&j| passes(row[j]))
                    .map(|&j| Link { left: i, right: j, score: row[j] }),
            ),
            None => out.extend(
                row.iter()
                    .enumerate()
                    .filter(|(_, &s)| passes(s))
                    .map(|(j, &score)| Link { left: i, right: j, score }),
            ),
        }
    }
    sort_links(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::engine::{match_schemas, MatchConfig};
    use crate::ingest::parse_ddl;

    fn matrix() -> MatchMatrix {
        let a = parse_ddl(
            "CREATE TABLE All_Event_Vitals (DATE_BEGIN_156 DATE COMMENT 'begin date of the event', place VARCHAR(9));\n\
             CREATE TABLE Person (name VARCHAR(9) COMMENT 'person name', born DATE);",
            "a",
            "A",
        )
        .unwrap()
        .schema;
        let b = parse_ddl(
            "CREATE TABLE Event (DATETIME_FIRST_INFO DATE COMMENT 'the begin date of an event', location TEXT);",
            "b",
            "B",
        )
        .unwrap()
        .schema;
        match_schemas(Arc::new(a), Arc::new(b), &MatchConfig::default()).unwrap()
    }

    #[test]
    fn confidence_range() {
        let m = matrix();
        let all = confidence_filter(&m, -1.0 + 1e-9, 1.0 - 1e-9).unwrap();
        assert_eq!(all.len(), m.pair_count());
        assert!(all.windows(2).all(|w| w[0].score >= w[1].score));
        let top = all[0].score;
        assert!(confidence_filter(&m, top + 1e-9, top + 1e-9).unwrap().is_empty());
        assert!(matches!(confidence_filter(&m, 0.5, 0.1), Err(Error::Range { .. })));
    }

    #[test]
    fn node_filters() {
        let m = matrix();
        let a = m.left();
        let tables = node_filter(a, &FilterSpec::Depth { lo: 1, hi: 1 }).unwrap();
        assert_eq!(tables, ElementSet::from([0, 3]));
        let sub = node_filter(
            a,
            &FilterSpec::Subtree {
                schema_id: "a".into(),
                root_element_id: "a:0".into(),
            },
        )
        .unwrap();
        assert_eq!(sub, ElementSet::from([0, 1, 2]));
        let leaf = FilterSpec::Subtree {
            schema_id: "a".into(),
            root_element_id: "a:2".into(),
        };
        assert_eq!(node_filter(a, &leaf).unwrap(), ElementSet::from([2]));
        let missing = FilterSpec::Subtree {
            schema_id: "a".into(),
            root_element_id: "a:99".into(),
        };
        assert!(matches!(node_filter(a, &missing), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn apply_cases() {
        let m = matrix();
        assert_eq!(apply(&m, &[], None, None).len(), m.pair_count());
        assert!(apply(&m, &[], Some(&ElementSet::new()), None).is_empty());

        let sub = m.left().subtree_elements("a:0").unwrap();
        let all = apply(&m, &[], Some(&sub), None);
        assert_eq!(all.len(), sub.len() * m.cols());
        let tau = ScoreRange::new(all[all.len() / 2].score, 1.0).unwrap();
        let review = apply(&m, &[tau], Some(&sub), None);
        assert!(!review.is_empty() && review.len() < all.len());
        assert!(review.iter().all(|l| sub.contains(&l.left) && tau.contains(l.score)));
    }

    #[test]
    fn toy_scores() {
        let s = |name: &str| {
            let mut b = crate::model::SchemaBuilder::new(name, name, crate::SourceFormat::Canonical);
            b.add(None, "x", "", "");
            Arc::new(b.build().unwrap())
        };
        let mut b = crate::model::SchemaBuilder::new("r", "r", crate::SourceFormat::Canonical);
        for n in ["p", "q", "r"] {
            b.add(None, n, "", "");
        }
        let m = MatchMatrix::with_scores(s("l"), Arc::new(b.build().unwrap()), MatchConfig::default(), vec![0.9, 0.4, 0.1])
            .unwrap();
        let kept = confidence_filter(&m, 0.35, 1.0).unwrap();
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].score, 0.9);
    }
}
