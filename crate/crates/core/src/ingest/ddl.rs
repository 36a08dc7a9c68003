//! Relational DDL subset.
//!
//! Recognised statements: `CREATE TABLE`, `CREATE VIEW`, and `COMMENT ON
//! TABLE|COLUMN ... IS '...'`. Column constraints and table constraints are
//! skipped. Anything else is skipped up to the next `;` with a warning.

use std::collections::HashMap;

use super::{ParseReport, Parsed};
use crate::error::{Error, Result};
use crate::model::{SchemaBuilder, SchemaId, SourceFormat};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident { text: String, quoted: bool },
    Str(String),
    Num(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

impl Token {
    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Ident { text, quoted: false } if text.eq_ignore_ascii_case(kw))
    }

    fn is_punct(&self, c: char) -> bool {
        self.tok == Tok::Punct(c)
    }

    fn text(&self) -> String {
        match &self.tok {
            Tok::Ident { text, .. } | Tok::Num(text) => text.clone(),
            Tok::Str(s) => format!("'{s}'"),
            Tok::Punct(c) => c.to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            bump!();
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(Error::Syntax {
                        line: tl,
                        col: tc,
                        message: "unterminated block comment".into(),
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
        } else if c == '\'' {
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(Error::Syntax {
                        line: tl,
                        col: tc,
                        message: "unterminated string literal".into(),
                    });
                }
                if chars[i] == '\'' {
                    if chars.get(i + 1) == Some(&'\'') {
                        s.push('\'');
                        bump!();
                        bump!();
                        continue;
                    }
                    bump!();
                    break;
                }
                s.push(chars[i]);
                bump!();
            }
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
        } else if c == '"' || c == '`' || c == '[' {
            let close = if c == '[' { ']' } else { c };
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(Error::Syntax {
                        line: tl,
                        col: tc,
                        message: "unterminated quoted identifier".into(),
                    });
                }
                if chars[i] == close {
                    bump!();
                    break;
                }
                s.push(chars[i]);
                bump!();
            }
            out.push(Token {
                tok: Tok::Ident { text: s, quoted: true },
                line: tl,
                col: tc,
            });
        } else if c.is_alphabetic() || c == '_' || c == '$' || c == '#' || c == '@' {
            let mut s = String::new();
            while i < chars.len()
                && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '$' | '#' | '@'))
            {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token {
                tok: Tok::Ident { text: s, quoted: false },
                line: tl,
                col: tc,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.') {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token {
                tok: Tok::Num(s),
                line: tl,
                col: tc,
            });
        } else {
            out.push(Token {
                tok: Tok::Punct(c),
                line: tl,
                col: tc,
            });
            bump!();
        }
    }
    Ok(out)
}

const TABLE_CONSTRAINTS: &[&str] = &[
    "PRIMARY", "FOREIGN", "UNIQUE", "CONSTRAINT", "CHECK", "KEY", "INDEX", "FULLTEXT", "SPATIAL",
    "EXCLUDE", "PERIOD",
];

const COLUMN_STOP: &[&str] = &[
    "NOT", "NULL", "DEFAULT", "PRIMARY", "REFERENCES", "UNIQUE", "CHECK", "CONSTRAINT", "COLLATE",
    "AUTO_INCREMENT", "AUTOINCREMENT", "GENERATED", "IDENTITY", "COMMENT", "ON", "CHARACTER",
    "ENCODE", "STORAGE",
];

struct Column {
    name: String,
    type_hint: String,
    doc: String,
}

struct Relation {
    name: String,
    doc: String,
    columns: Vec<Column>,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    report: ParseReport,
    eof: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + off)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_kw(kw)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn if_not_exists(&mut self) {
        if self.peek().is_some_and(|t| t.is_kw("IF")) {
            self.pos += 1;
            let _ = self.eat_kw("NOT") && self.eat_kw("EXISTS");
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (line, col) = self.peek().map_or(self.eof, |t| (t.line, t.col));
        Error::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_owned(), |t| format!("`{}`", t.text()));
            Err(self.err(format!("expected `{c}`, found {found}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident { text, .. },
                ..
            }) => {
                self.pos += 1;
                Ok(text.clone())
            }
            Some(t) => Err(self.err(format!("expected {what}, found `{}`", t.text()))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    /// Dotted name; returns all parts.
    fn qualified(&mut self, what: &str) -> Result<Vec<String>> {
        let mut parts = vec![self.ident(what)?];
        while self.eat_punct('.') {
            parts.push(self.ident(what)?);
        }
        Ok(parts)
    }

    fn skip_statement(&mut self) {
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if depth == 0 && t.is_punct(';') {
                self.pos += 1;
                return;
            }
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
            }
            self.pos += 1;
        }
    }

    /// Skips balanced tokens until `,` or `)` at depth zero without consuming it.
    fn skip_to_list_sep(&mut self) -> Result<()> {
        let mut depth = 0i32;
        loop {
            let Some(t) = self.peek() else {
                return Err(self.err("unterminated column list"));
            };
            if depth == 0 && (t.is_punct(',') || t.is_punct(')')) {
                return Ok(());
            }
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
            }
            self.pos += 1;
        }
    }

    fn string_literal(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Token { tok: Tok::Str(s), .. }) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.err(format!("expected string literal for {what}"))),
        }
    }

    fn column_def(&mut self) -> Result<Option<Column>> {
        let first = self.peek().ok_or_else(|| self.err("unterminated column list"))?;
        if TABLE_CONSTRAINTS.iter().any(|kw| first.is_kw(kw)) {
            self.skip_to_list_sep()?;
            return Ok(None);
        }
        if first.is_kw("LIKE") {
            self.report.warn(first.line, first.col, "LIKE clause in column list skipped");
            self.skip_to_list_sep()?;
            return Ok(None);
        }
        let name = self.ident("column name")?;

        let mut type_hint = String::new();
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if depth == 0 {
                if t.is_punct(',') || t.is_punct(')') {
                    break;
                }
                if COLUMN_STOP.iter().any(|kw| t.is_kw(kw)) {
                    break;
                }
            }
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
            }
            let text = t.text();
            let glue = type_hint.is_empty()
                || matches!(text.as_str(), "(" | ")" | ",")
                || type_hint.ends_with('(')
                || type_hint.ends_with(',');
            if !glue {
                type_hint.push(' ');
            }
            type_hint.push_str(&text);
            self.pos += 1;
        }

        let mut doc = String::new();
        let mut depth = 0i32;
        loop {
            let Some(t) = self.peek() else {
                return Err(self.err("unterminated column list"));
            };
            if depth == 0 && (t.is_punct(',') || t.is_punct(')')) {
                break;
            }
            if depth == 0 && t.is_kw("COMMENT") {
                self.pos += 1;
                doc = self.string_literal("column comment")?;
                continue;
            }
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
            }
            self.pos += 1;
        }
        Ok(Some(Column { name, type_hint, doc }))
    }

    fn table_options(&mut self) -> Result<String> {
        let mut doc = String::new();
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if depth == 0 && t.is_punct(';') {
                self.pos += 1;
                break;
            }
            if depth == 0 && t.is_kw("CREATE") {
                break;
            }
            if depth == 0 && t.is_kw("COMMENT") {
                self.pos += 1;
                self.eat_punct('=');
                doc = self.string_literal("table comment")?;
                continue;
            }
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
            }
            self.pos += 1;
        }
        Ok(doc)
    }

    fn create_table(&mut self) -> Result<Relation> {
        self.if_not_exists();
        let name = self.qualified("table name")?.pop().unwrap_or_default();
        self.expect_punct('(')?;
        let mut columns = Vec::new();
        if !self.eat_punct(')') {
            loop {
                if let Some(c) = self.column_def()? {
                    columns.push(c);
                }
                if self.eat_punct(',') {
                    continue;
                }
                self.expect_punct(')')?;
                break;
            }
        }
        let doc = self.table_options()?;
        Ok(Relation { name, doc, columns })
    }

    fn create_view(&mut self) -> Result<Relation> {
        self.if_not_exists();
        let name = self.qualified("view name")?.pop().unwrap_or_default();
        let mut columns = Vec::new();
        let mut explicit = false;
        if self.eat_punct('(') {
            explicit = true;
            loop {
                let cname = self.ident("view column name")?;
                let mut doc = String::new();
                if self.eat_kw("COMMENT") {
                    doc = self.string_literal("column comment")?;
                }
                columns.push(Column {
                    name: cname,
                    type_hint: String::new(),
                    doc,
                });
                if self.eat_punct(',') {
                    continue;
                }
                self.expect_punct(')')?;
                break;
            }
        }
        let mut doc = String::new();
        if self.eat_kw("COMMENT") {
            self.eat_punct('=');
            doc = self.string_literal("view comment")?;
        }
        if !self.eat_kw("AS") {
            return Err(self.err("expected AS in view definition"));
        }
        let body_start = self.pos;
        self.skip_statement();
        if !explicit {
            columns = self.select_list(body_start);
        }
        Ok(Relation { name, doc, columns })
    }

    /// Output column names of the top-level select list starting at `start`.
    fn select_list(&mut self, start: usize) -> Vec<Column> {
        let toks = &self.toks[start..self.pos];
        let Some(sel) = toks.iter().position(|t| t.is_kw("SELECT")) else {
            if let Some(t) = toks.first() {
                self.report.warn(t.line, t.col, "view body without SELECT; no columns derived");
            }
            return Vec::new();
        };
        let mut items: Vec<&[Token]> = Vec::new();
        let mut depth = 0i32;
        let mut item_start = sel + 1;
        let mut end = toks.len();
        for (i, t) in toks.iter().enumerate().skip(sel + 1) {
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
            } else if depth == 0 && (t.is_kw("FROM") || t.is_punct(';')) {
                end = i;
                break;
            } else if depth == 0 && t.is_punct(',') {
                items.push(&toks[item_start..i]);
                item_start = i + 1;
            }
        }
        items.push(&toks[item_start..end]);

        let mut cols = Vec::new();
        for item in items {
            let item: Vec<&Token> = item
                .iter()
                .skip_while(|t| t.is_kw("DISTINCT") || t.is_kw("ALL"))
                .collect();
            let Some(last) = item.last() else { continue };
            if last.is_punct('*') {
                self.report
                    .warn(last.line, last.col, "wildcard in view select list skipped");
                continue;
            }
            match &last.tok {
                Tok::Ident { text, .. } => cols.push(Column {
                    name: text.clone(),
                    type_hint: String::new(),
                    doc: String::new(),
                }),
                _ => self.report.warn(
                    last.line,
                    last.col,
                    "unnamed expression in view select list skipped",
                ),
            }
        }
        cols
    }
}

/// Parses a DDL script into a two-level schema: relations at depth 1 and
/// their columns at depth 2.
pub fn parse_ddl(text: &str, schema_id: impl Into<SchemaId>, name: impl Into<String>) -> Result<Parsed> {
    let toks = lex(text)?;
    let eof = text
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        report: ParseReport::default(),
        eof,
    };

    let mut relations: Vec<Relation> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut late_comments: Vec<(Vec<String>, String, bool, usize, usize)> = Vec::new();

    while let Some(t) = p.peek() {
        if p.eat_punct(';') {
            continue;
        }
        if t.is_kw("CREATE") {
            let kind_pos = p.pos + 1;
            p.pos += 1;
            if p.eat_kw("OR") && !p.eat_kw("REPLACE") {
                return Err(p.err("expected REPLACE after CREATE OR"));
            }
            while p.eat_kw("GLOBAL") || p.eat_kw("LOCAL") || p.eat_kw("TEMPORARY") || p.eat_kw("TEMP") {}
            let rel = if p.eat_kw("TABLE") {
                Some(p.create_table()?)
            } else if p.eat_kw("VIEW") {
                Some(p.create_view()?)
            } else if p.peek_at(0).is_some_and(|t| t.is_kw("MATERIALIZED"))
                && p.peek_at(1).is_some_and(|t| t.is_kw("VIEW"))
            {
                p.pos += 2;
                Some(p.create_view()?)
            } else {
                let what = toks.get(kind_pos).map_or("?".to_owned(), Token::text);
                p.report.warn(t.line, t.col, format!("unsupported statement CREATE {what} skipped"));
                p.skip_statement();
                None
            };
            if let Some(rel) = rel {
                let key = rel.name.to_lowercase();
                if by_name.contains_key(&key) {
                    return Err(Error::DuplicateTable {
                        name: rel.name,
                        line: t.line,
                        col: t.col,
                    });
                }
                by_name.insert(key, relations.len());
                relations.push(rel);
            }
        } else if t.is_kw("COMMENT") && p.peek_at(1).is_some_and(|n| n.is_kw("ON")) {
            p.pos += 2;
            let is_table = if p.eat_kw("TABLE") || p.eat_kw("VIEW") {
                true
            } else if p.eat_kw("COLUMN") {
                false
            } else {
                p.report.warn(t.line, t.col, "unsupported COMMENT ON target skipped");
                p.skip_statement();
                continue;
            };
            let target = p.qualified("comment target")?;
            if !p.eat_kw("IS") {
                return Err(p.err("expected IS in COMMENT ON"));
            }
            let doc = p.string_literal("comment")?;
            late_comments.push((target, doc, is_table, t.line, t.col));
        } else {
            p.report
                .warn(t.line, t.col, format!("unsupported statement `{}` skipped", t.text()));
            p.skip_statement();
        }
    }

    for (target, doc, is_table, line, col) in late_comments {
        let resolved = if is_table {
            target
                .last()
                .and_then(|n| by_name.get(&n.to_lowercase()))
                .map(|&r| {
                    relations[r].doc = doc.clone();
                })
        } else if target.len() >= 2 {
            let table = &target[target.len() - 2];
            let column = &target[target.len() - 1];
            by_name.get(&table.to_lowercase()).and_then(|&r| {
                relations[r]
                    .columns
                    .iter_mut()
                    .find(|c| c.name.eq_ignore_ascii_case(column))
                    .map(|c| c.doc = doc.clone())
            })
        } else {
            None
        };
        if resolved.is_none() {
            p.report.warn(
                line,
                col,
                format!("COMMENT ON target `{}` not found", target.join(".")),
            );
        }
    }

    let mut b = SchemaBuilder::new(schema_id, name, SourceFormat::Ddl);
    for rel in relations {
        let t = b.add(None, rel.name, rel.doc, "");
        for c in rel.columns {
            b.add(Some(t), c.name, c.doc, c.type_hint);
        }
    }
    Ok(Parsed {
        schema: b.build()?,
        report: p.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Parsed {
        parse_ddl(text, "a", "A").unwrap()
    }

    #[test]
    fn single_table() {
        let p = parse("CREATE TABLE All_Event_Vitals (DATE_BEGIN_156 DATE)");
        let s = &p.schema;
        assert_eq!(s.element_count(), 2);
        assert_eq!(s.element(0).name, "All_Event_Vitals");
        assert_eq!(s.element(0).depth, 1);
        assert_eq!(s.element(1).name, "DATE_BEGIN_156");
        assert_eq!(s.element(1).depth, 2);
        assert_eq!(s.element(1).type_hint, "DATE");
        assert_eq!(s.element(1).path, "All_Event_Vitals/DATE_BEGIN_156");
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse("").schema.element_count(), 0);
        assert_eq!(parse("  -- nothing\n/* here */ ;").schema.element_count(), 0);
    }

    #[test]
    fn three_by_four() {
        let mut text = String::new();
        for t in 0..3 {
            text.push_str(&format!(
                "CREATE TABLE t{t} (a INT, b VARCHAR(20) NOT NULL, c DECIMAL(10, 2) DEFAULT 0, d DATE,\n PRIMARY KEY (a));\n"
            ));
        }
        let s = parse(&text).schema;
        assert_eq!(s.element_count(), 15);
        assert_eq!(s.max_depth(), 2);
        assert_eq!(s.element(2).type_hint, "VARCHAR(20)");
        assert_eq!(s.element(3).type_hint, "DECIMAL(10,2)");
    }

    #[test]
    fn comments_become_documentation() {
        let p = parse(
            "CREATE TABLE ev (\n  d DATE COMMENT 'the begin date of the event',\n  x INT\n) COMMENT = 'Events';\n\
             COMMENT ON COLUMN ev.x IS 'it''s x';",
        );
        let s = &p.schema;
        assert_eq!(s.element(0).documentation, "Events");
        assert_eq!(s.element(1).documentation, "the begin date of the event");
        assert_eq!(s.element(2).documentation, "it's x");
        assert!(p.report.is_empty());
    }

    #[test]
    fn views() {
        let s = parse(
            "CREATE VIEW v1 (a, b) AS SELECT 1, 2 FROM dual;\n\
             CREATE OR REPLACE VIEW v2 AS SELECT t.x AS alpha, beta, COUNT(*) AS n FROM t GROUP BY 1;",
        )
        .schema;
        let names: Vec<_> = s.elements().iter().map(|e| e.path.as_str()).collect();
        assert_eq!(names, ["v1", "v1/a", "v1/b", "v2", "v2/alpha", "v2/beta", "v2/n"]);
    }

    #[test]
    fn unsupported_statements_warn() {
        let p = parse("CREATE INDEX i ON t(a);\nINSERT INTO t VALUES (1);\nCREATE TABLE t (a INT);");
        assert_eq!(p.schema.element_count(), 2);
        let report = p.report.to_string();
        assert_eq!(report.lines().count(), 2);
        assert!(report.starts_with("WARN 1:1 "));
        assert!(report.lines().nth(1).unwrap().starts_with("WARN 2:1 "));
    }

    #[test]
    fn duplicate_table() {
        let err = parse_ddl("CREATE TABLE t (a INT);\ncreate table T (b INT);", "a", "A").unwrap_err();
        assert!(matches!(err, Error::DuplicateTable { line: 2, col: 1, .. }), "{err}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_ddl("CREATE TABLE t\n  a INT);", "a", "A").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, col: 3, .. }), "{err}");
        let err = parse_ddl("CREATE TABLE t (a INT COMMENT 'oops);", "a", "A").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, col: 31, .. }), "{err}");
        let err = parse_ddl("CREATE TABLE t (a INT", "a", "A").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }), "{err}");
    }

    #[test]
    fn deterministic_ids() {
        let text = "CREATE TABLE t (a INT, b INT); CREATE TABLE u (c INT);";
        let a = parse(text).schema;
        let b = parse(text).schema;
        assert_eq!(a, b);
        assert_eq!(a.element(3).id.as_str(), "a:3");
    }
}
