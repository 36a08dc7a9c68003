//! Spreadsheet exports (concept sheet, element sheet, match matrix) and the
//! text rendering of analysis reports.
//!
//! CSV output is comma separated with a header row, minimal quoting and LF
//! line endings. Scores are printed with six decimals. For a given session
//! every export is byte-for-byte reproducible.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::analysis::{MatchMode, PartitionReport, Vocabulary};
use crate::engine::MatchMatrix;
use crate::error::{Error, Result};
use crate::model::SchemaId;
use crate::session::{ConceptLabel, DecisionStatus, Session};

pub const LEFT_ONLY: &str = "LEFT_ONLY";
pub const RIGHT_ONLY: &str = "RIGHT_ONLY";
pub const MATCHED: &str = "MATCHED";

pub const CONCEPT_HEADER: [&str; 6] = [
    "row_type",
    "left_concept",
    "left_member_count",
    "right_concept",
    "right_member_count",
    "support",
];

pub const ELEMENT_HEADER: [&str; 8] = [
    "row_type",
    "left_concept",
    "left_path",
    "right_concept",
    "right_path",
    "score",
    "status",
    "annotation",
];

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 strings"))
}

pub fn format_score(s: f64) -> String {
    format!("{s:.6}")
}

/// The schema pair an export is about: the given one, or the session's only
/// matrix. `None` when the session has no matrix at all.
pub fn resolve_pair(session: &Session, pair: Option<(&str, &str)>) -> Result<Option<(SchemaId, SchemaId)>> {
    if let Some((l, r)) = pair {
        session.schema(l)?;
        session.schema(r)?;
        if session.matrix_between(l, r).is_none() {
            return Err(Error::UnknownPair {
                left: l.to_owned(),
                right: r.to_owned(),
            });
        }
        return Ok(Some((l.into(), r.into())));
    }
    let mut pairs = session.pairs();
    match (pairs.next(), pairs.next()) {
        (None, _) => Ok(None),
        (Some(p), None) => Ok(Some(p.clone())),
        _ => Err(Error::InvalidArgument(
            "session holds several schema pairs; choose one".into(),
        )),
    }
}

/// Outer join of left and right concepts on their concept-level matches.
pub fn export_concept_sheet(session: &Session, pair: Option<(&str, &str)>) -> Result<String> {
    let mut w = writer();
    w.write_record(CONCEPT_HEADER)?;
    let Some((l, r)) = resolve_pair(session, pair)? else {
        return finish(w);
    };
    let concepts_of = |id: &SchemaId| -> Vec<&ConceptLabel> {
        let mut v: Vec<&ConceptLabel> = session.concepts().filter(|c| c.schema_id == *id).collect();
        v.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.id.cmp(&b.id)));
        v
    };
    let (lc, rc) = (concepts_of(&l), concepts_of(&r));

    // concept matches are derived left-to-right over the stored matrix
    let (stored_l, stored_r, flipped) = match session.matrix_between(l.as_str(), r.as_str()) {
        Some((m, f)) => (m.left_schema_id().clone(), m.right_schema_id().clone(), f),
        None => unreachable!("pair resolved above"),
    };
    let mut matched: Vec<(&ConceptLabel, &ConceptLabel, usize)> = session
        .concept_matches_for(stored_l.as_str(), stored_r.as_str())?
        .into_iter()
        .map(|m| {
            let (a, b) = if flipped {
                (&m.right_concept, &m.left_concept)
            } else {
                (&m.left_concept, &m.right_concept)
            };
            (
                session.concept(a.as_str()).expect("derived from labels"),
                session.concept(b.as_str()).expect("derived from labels"),
                m.support,
            )
        })
        .collect();
    matched.sort_by(|x, y| (&x.0.name, &x.1.name, &x.0.id, &x.1.id).cmp(&(&y.0.name, &y.1.name, &y.0.id, &y.1.id)));
    let used_l: BTreeSet<_> = matched.iter().map(|m| &m.0.id).collect();
    let used_r: BTreeSet<_> = matched.iter().map(|m| &m.1.id).collect();

    for (a, b, support) in &matched {
        w.write_record([
            MATCHED,
            &a.name,
            &a.members.len().to_string(),
            &b.name,
            &b.members.len().to_string(),
            &support.to_string(),
        ])?;
    }
    for c in lc.iter().filter(|c| !used_l.contains(&c.id)) {
        w.write_record([LEFT_ONLY, &c.name, &c.members.len().to_string(), "", "", ""])?;
    }
    for c in rc.iter().filter(|c| !used_r.contains(&c.id)) {
        w.write_record([RIGHT_ONLY, "", "", &c.name, &c.members.len().to_string(), ""])?;
    }
    finish(w)
}

/// Outer join of left and right elements on accepted element matches.
pub fn export_element_sheet(session: &Session, pair: Option<(&str, &str)>) -> Result<String> {
    let mut w = writer();
    w.write_record(ELEMENT_HEADER)?;
    let Some((l, r)) = resolve_pair(session, pair)? else {
        return finish(w);
    };
    let (ls, rs) = (session.schema(l.as_str())?, session.schema(r.as_str())?);
    let (m, flipped) = session.matrix_between(l.as_str(), r.as_str()).expect("pair resolved");
    let concept = |id: &str| session.concept_of(id).map(|c| c.name.clone()).unwrap_or_default();

    let pairs = session.accepted_pairs(l.as_str(), r.as_str())?;
    let mut matched = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let (le, re) = (ls.element(i), rs.element(j));
        let score = if flipped { m.score(j, i) } else { m.score(i, j) };
        let d = session
            .decision(le.id.as_str(), re.id.as_str())
            .expect("accepted pairs come from decisions");
        debug_assert_eq!(d.status, DecisionStatus::Accepted);
        matched.push((
            (concept(le.id.as_str()), le.path.clone(), i),
            (concept(re.id.as_str()), re.path.clone(), j),
            score,
            d.annotation,
        ));
    }
    matched.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    for (lk, rk, score, ann) in &matched {
        w.write_record([
            MATCHED,
            &lk.0,
            &lk.1,
            &rk.0,
            &rk.1,
            &format_score(*score),
            DecisionStatus::Accepted.as_str(),
            ann.as_str(),
        ])?;
    }

    let lm: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let rm: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    let only = |schema: &crate::Schema, used: &BTreeSet<usize>| {
        let mut v: Vec<(String, String, usize)> = (0..schema.element_count())
            .filter(|i| !used.contains(i))
            .map(|i| {
                let e = schema.element(i);
                (concept(e.id.as_str()), e.path.clone(), i)
            })
            .collect();
        v.sort();
        v
    };
    for (c, p, _) in only(ls, &lm) {
        w.write_record([LEFT_ONLY, &c, &p, "", "", "", "", ""])?;
    }
    for (c, p, _) in only(rs, &rm) {
        w.write_record([RIGHT_ONLY, "", "", &c, &p, "", "", ""])?;
    }
    finish(w)
}

/// Every link with score at least `lo`, best first, with per-voter
/// confidences.
pub fn export_matrix(matrix: &MatchMatrix, lo: f64) -> Result<String> {
    if !(lo > -1.0 && lo < 1.0) {
        return Err(Error::Range { lo, hi: 1.0 });
    }
    let mut w = writer();
    let mut header = vec!["left_path".to_owned(), "right_path".to_owned(), "score".to_owned()];
    header.extend(matrix.voters().iter().map(|v| v.as_str().to_owned()));
    w.write_record(&header)?;
    for link in matrix.links_in_range(lo, f64::INFINITY) {
        let mut rec = vec![
            matrix.left().element(link.left).path.clone(),
            matrix.right().element(link.right).path.clone(),
            format_score(link.score),
        ];
        rec.extend(matrix.confidences(link.left, link.right).iter().map(|&c| format_score(c)));
        w.write_record(&rec)?;
    }
    finish(w)
}

fn mode_label(mode: MatchMode) -> String {
    match mode {
        MatchMode::Validated => "validated".into(),
        MatchMode::Automatic { threshold } => format!("automatic, threshold {}", format_score(threshold)),
    }
}

/// Human-readable partition report.
pub fn render_partition(report: &PartitionReport) -> String {
    let mut out = String::new();
    let (l, r) = (&report.left, &report.right);
    let _ = writeln!(out, "PARTITION {} / {} ({})", l.schema_id, r.schema_id, mode_label(report.mode));
    let _ = writeln!(out, "[left] {}: {} elements", l.schema_id, l.element_count);
    let _ = writeln!(out, "COMMON: {} ({}%)", l.common.len(), l.common_percent);
    let _ = writeln!(out, "LEFT_ONLY: {} ({}%)", l.only.len(), l.only_percent);
    let _ = writeln!(out, "[right] {}: {} elements", r.schema_id, r.element_count);
    let _ = writeln!(out, "COMMON: {} ({}%)", r.common.len(), r.common_percent);
    let _ = writeln!(out, "RIGHT_ONLY: {} ({}%)", r.only.len(), r.only_percent);
    let _ = writeln!(out, "MATCHED_PAIRS: {}", report.common_pairs.len());
    out
}

/// Human-readable vocabulary: one section per signature cell, empty cells
/// included.
pub fn render_vocabulary(vocab: &Vocabulary) -> String {
    let mut out = String::new();
    let ids: Vec<&str> = vocab.schema_ids.iter().map(|s| s.as_str()).collect();
    let _ = writeln!(
        out,
        "VOCABULARY {} schemata, {} terms, {} cells: {}",
        ids.len(),
        vocab.terms.len(),
        vocab.cells.len(),
        ids.join(", ")
    );
    for cell in &vocab.cells {
        let sig: Vec<&str> = cell.signature.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(out, "CELL {{{}}}: {} terms", sig.join(", "), cell.terms.len());
        for &t in &cell.terms {
            let term = &vocab.terms[t];
            let members: Vec<&str> = term.members.iter().map(|m| m.as_str()).collect();
            let _ = writeln!(out, "  {} [{}]", term.representative, members.join(", "));
        }
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_document<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::analysis::{partition, MatchMode};
    use crate::engine::MatchConfig;
    use crate::model::{SchemaBuilder, SourceFormat};
    use crate::session::{Annotation, DecisionRequest};

    fn flat(id: &str, names: &[&str]) -> Arc<crate::Schema> {
        let mut b = SchemaBuilder::new(id, id, SourceFormat::Canonical);
        for n in names {
            b.add(None, *n, "", "");
        }
        Arc::new(b.build().unwrap())
    }

    fn accept(s: &mut Session, l: &str, r: &str) {
        s.record_decision(DecisionRequest {
            left_id: l.into(),
            right_id: r.into(),
            status: DecisionStatus::Accepted,
            annotation: Annotation::Equivalent,
            author: "t".into(),
            assignee: String::new(),
            timestamp: chrono::DateTime::from_timestamp(0, 0).unwrap(),
        })
        .unwrap();
    }

    fn toy() -> Session {
        let mut s = Session::new("t", MatchConfig::default()).unwrap();
        s.add_schema(flat("l", &["begin_date", "place"]), "l").unwrap();
        s.add_schema(flat("r", &["start_date", "location"]), "r").unwrap();
        s.compute_matches("l", "r").unwrap();
        s
    }

    #[test]
    fn element_sheet_toy() {
        let mut s = toy();
        accept(&mut s, "l:0", "r:0");
        let csv = export_element_sheet(&s, None).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], ELEMENT_HEADER.join(","));
        assert!(lines[1].starts_with("MATCHED,,begin_date,,start_date,"));
        assert!(lines[1].ends_with(",accepted,equivalent"));
        assert_eq!(lines[2], "LEFT_ONLY,,place,,,,,");
        assert_eq!(lines[3], "RIGHT_ONLY,,,,location,,,");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn empty_exports_are_header_only() {
        let s = Session::new("e", MatchConfig::default()).unwrap();
        assert_eq!(export_element_sheet(&s, None).unwrap(), ELEMENT_HEADER.join(",") + "\n");
        assert_eq!(export_concept_sheet(&s, None).unwrap(), CONCEPT_HEADER.join(",") + "\n");
        assert_eq!(export_concept_sheet(&toy(), None).unwrap().lines().count(), 1);
    }

    #[test]
    fn concept_sheet_outer_join() {
        let mut s = toy();
        s.assign_concept("l", "When", &["l:0".into()]).unwrap();
        s.assign_concept("l", "Where", &["l:1".into()]).unwrap();
        s.assign_concept("r", "Time", &["r:0".into()]).unwrap();
        s.assign_concept("r", "Place", &["r:1".into()]).unwrap();
        accept(&mut s, "l:0", "r:0");
        let csv = export_concept_sheet(&s, None).unwrap();
        assert_eq!(
            csv,
            "row_type,left_concept,left_member_count,right_concept,right_member_count,support\n\
             MATCHED,When,1,Time,1,1\n\
             LEFT_ONLY,Where,1,,,\n\
             RIGHT_ONLY,,,Place,1,\n"
        );
        // reversed orientation swaps the sides
        let rev = export_concept_sheet(&s, Some(("r", "l"))).unwrap();
        assert!(rev.contains("MATCHED,Time,1,When,1,1\n"));
    }

    #[test]
    fn matrix_export() {
        let s = toy();
        let (m, _) = s.matrix_between("l", "r").unwrap();
        let all = export_matrix(m, -1.0 + 1e-9).unwrap();
        let lines: Vec<&str> = all.lines().collect();
        assert_eq!(lines[0], "left_path,right_path,score,name_token,name_edit,doc_token,structure");
        assert_eq!(lines.len(), 5);
        assert_eq!(export_matrix(m, 1.0 - 1e-9).unwrap().lines().count(), 1);
        assert!(export_matrix(m, 1.0).is_err());
        assert_eq!(export_matrix(m, -0.5).unwrap(), export_matrix(m, -0.5).unwrap());
    }

    #[test]
    fn rendered_partition() {
        let s = toy();
        let text = render_partition(&partition(&s, "l", "r", MatchMode::Validated).unwrap());
        assert!(text.contains("COMMON: 0 (0%)\n"));
        assert!(text.contains("RIGHT_ONLY: 2 (100%)\n"));
    }
}
