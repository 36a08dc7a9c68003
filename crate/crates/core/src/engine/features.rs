//! Per-element precomputed inputs for the voters.

use std::collections::HashMap;

use super::similarity::PREFIX_LEN;
use crate::linguistics::{Linguistics, SourceKind};
use crate::model::Schema;

/// Interns stemmed terms to dense ids and records each term's prefix group.
#[derive(Debug, Default, Clone)]
pub struct Lexicon {
    ids: HashMap<String, u32>,
    prefix_of: Vec<Option<u32>>,
    prefix_ids: HashMap<String, u32>,
}

impl Lexicon {
    pub fn intern(&mut self, term: &str) -> u32 {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.prefix_of.len() as u32;
        let group = if term.chars().count() >= PREFIX_LEN {
            let p: String = term.chars().take(PREFIX_LEN).collect();
            let next = self.prefix_ids.len() as u32;
            Some(*self.prefix_ids.entry(p).or_insert(next))
        } else {
            None
        };
        self.ids.insert(term.to_owned(), id);
        self.prefix_of.push(group);
        id
    }

    pub fn prefixes(&self) -> &[Option<u32>] {
        &self.prefix_of
    }
}

#[derive(Debug, Clone, Default)]
pub struct Features {
    pub name_terms: Vec<u32>,
    pub name_chars: Vec<char>,
    pub doc_terms: Vec<u32>,
    pub neighbor_terms: Vec<u32>,
    /// Parent and children that contribute at least one name term.
    pub neighbor_count: usize,
}

fn term_set(ling: &Linguistics, lex: &mut Lexicon, text: &str, kind: SourceKind) -> Vec<u32> {
    let mut ids: Vec<u32> = ling
        .terms(text, kind)
        .terms
        .iter()
        .map(|t| lex.intern(t))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

fn union_sorted<'a>(sets: impl Iterator<Item = &'a [u32]>) -> Vec<u32> {
    let mut out: Vec<u32> = sets.flatten().copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn neighbors(schema: &Schema, idx: usize) -> impl Iterator<Item = usize> + '_ {
    schema
        .parent(idx)
        .into_iter()
        .chain(schema.children(idx).iter().copied())
}

/// Features for every element of `schema`.
pub fn schema_features(schema: &Schema, ling: &Linguistics, lex: &mut Lexicon) -> Vec<Features> {
    let name_sets: Vec<Vec<u32>> = schema
        .elements()
        .iter()
        .map(|e| term_set(ling, lex, &e.name, SourceKind::Name))
        .collect();
    schema
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| Features {
            name_terms: name_sets[i].clone(),
            name_chars: e.name.to_lowercase().chars().collect(),
            doc_terms: term_set(ling, lex, &e.documentation, SourceKind::Documentation),
            neighbor_terms: union_sorted(neighbors(schema, i).map(|n| name_sets[n].as_slice())),
            neighbor_count: neighbors(schema, i).filter(|&n| !name_sets[n].is_empty()).count(),
        })
        .collect()
}

/// Features for a single element, computing only what it needs.
pub fn element_features(schema: &Schema, idx: usize, ling: &Linguistics, lex: &mut Lexicon) -> Features {
    let e = schema.element(idx);
    let neighbor_sets: Vec<Vec<u32>> = neighbors(schema, idx)
        .map(|n| term_set(ling, lex, &schema.element(n).name, SourceKind::Name))
        .collect();
    Features {
        name_terms: term_set(ling, lex, &e.name, SourceKind::Name),
        name_chars: e.name.to_lowercase().chars().collect(),
        doc_terms: term_set(ling, lex, &e.documentation, SourceKind::Documentation),
        neighbor_terms: union_sorted(neighbor_sets.iter().map(Vec::as_slice)),
        neighbor_count: neighbor_sets.iter().filter(|s| !s.is_empty()).count(),
    }
}
