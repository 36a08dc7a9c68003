//! Match engine: voters, confidence, vote merging and the dense pair matrix.
//!
//! Each voter reports a similarity `s` in `[0, 1]` and an evidence mass
//! `m >= 0`. Its confidence is `(2s - 1) * m / (m + K)`: the evidence ratio
//! picks the sign and the amount of evidence pushes the value towards ±1
//! without reaching it. The merger is the magnitude-weighted mean
//! `Σ c|c| / Σ |c|`, so confident voters dominate and silent ones drop out.

mod config;
pub mod features;
pub mod similarity;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{MatchConfig, DEFAULT_PAIR_BUDGET, DEFAULT_REVIEW_THRESHOLD, DEFAULT_SATURATION};
use features::{element_features, schema_features, Features, Lexicon};
use similarity::{edit_similarity_chars, jaccard_ids, prefix_jaccard_ids};

use crate::error::{Error, Result};
use crate::linguistics::Linguistics;
use crate::model::{ElementId, Schema, SchemaId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoterId {
    /// Jaccard over stemmed name tokens with prefix partial credit.
    NameToken,
    /// Normalized edit similarity of the lowercased raw names.
    NameEdit,
    /// Jaccard over stemmed documentation tokens.
    DocToken,
    /// Jaccard over the name tokens of parent and children.
    Structure,
}

impl VoterId {
    pub const ALL: [VoterId; 4] = [
        VoterId::NameToken,
        VoterId::NameEdit,
        VoterId::DocToken,
        VoterId::Structure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VoterId::NameToken => "name_token",
            VoterId::NameEdit => "name_edit",
            VoterId::DocToken => "doc_token",
            VoterId::Structure => "structure",
        }
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VoterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VoterId::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::UnknownVoter(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoterScore {
    pub voter: VoterId,
    pub similarity: f64,
    pub evidence_mass: f64,
    pub confidence: f64,
}

/// `(2s - 1) * m / (m + k)`, and exactly 0 without evidence.
pub fn confidence(similarity: f64, evidence_mass: f64, saturation: f64) -> f64 {
    if evidence_mass <= 0.0 {
        return 0.0;
    }
    (2.0 * similarity - 1.0) * evidence_mass / (evidence_mass + saturation)
}

/// Confidence-magnitude-weighted mean; 0 when every confidence is 0.
///
/// The quotient is clamped to the constituent range so rounding never moves
/// it outside `[min c, max c]`.
pub fn merge_confidences(confidences: impl IntoIterator<Item = f64>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in confidences {
        num += c * c.abs();
        den += c.abs();
        lo = lo.min(c);
        hi = hi.max(c);
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).clamp(lo, hi)
    }
}

pub fn merge_votes(scores: &[VoterScore]) -> f64 {
    merge_confidences(scores.iter().map(|s| s.confidence))
}

/// `(similarity, evidence_mass)` for one voter over two feature sets.
fn raw_vote(voter: VoterId, a: &Features, b: &Features, lex: &Lexicon, row: &mut Vec<usize>) -> (f64, f64) {
    match voter {
        VoterId::NameToken => (
            prefix_jaccard_ids(&a.name_terms, &b.name_terms, lex.prefixes()),
            (a.name_terms.len() + b.name_terms.len()) as f64,
        ),
        VoterId::NameEdit => (
            edit_similarity_chars(&a.name_chars, &b.name_chars, row),
            a.name_chars.len().min(b.name_chars.len()) as f64 / 4.0,
        ),
        VoterId::DocToken => (
            jaccard_ids(&a.doc_terms, &b.doc_terms),
            a.doc_terms.len().min(b.doc_terms.len()) as f64,
        ),
        VoterId::Structure => (
            jaccard_ids(&a.neighbor_terms, &b.neighbor_terms),
            a.neighbor_count.min(b.neighbor_count) as f64,
        ),
    }
}

/// Lightweight scored pair, addressed by element positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub left: usize,
    pub right: usize,
    pub score: f64,
}

/// Fully explained candidate correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchLink {
    pub left_id: ElementId,
    pub right_id: ElementId,
    pub score: f64,
    pub voter_scores: Vec<VoterScore>,
}

/// Orders links by descending score, then by position.
pub fn sort_links(links: &mut [Link]) {
    links.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.left.cmp(&b.left))
            .then(a.right.cmp(&b.right))
    });
}

/// Voter configuration plus linguistic preprocessing.
#[derive(Debug, Clone)]
pub struct Matcher {
    config: MatchConfig,
    ling: Linguistics,
}

impl Matcher {
    pub fn new(config: MatchConfig) -> Result<Self> {
        config.validate()?;
        let ling = config.linguistics();
        Ok(Self { config, ling })
    }

    pub fn config(&self) -> &MatchConfig {
        &self.config
    }

    pub fn linguistics(&self) -> &Linguistics {
        &self.ling
    }

    /// One voter's opinion on a single pair.
    pub fn vote(&self, voter: VoterId, left: &Schema, li: usize, right: &Schema, ri: usize) -> VoterScore {
        let mut lex = Lexicon::default();
        let a = element_features(left, li, &self.ling, &mut lex);
        let b = element_features(right, ri, &self.ling, &mut lex);
        let (similarity, evidence_mass) = raw_vote(voter, &a, &b, &lex, &mut Vec::new());
        VoterScore {
            voter,
            similarity,
            evidence_mass,
            confidence: confidence(similarity, evidence_mass, self.config.saturation),
        }
    }

    pub fn vote_by_name(&self, voter: &str, left: &Schema, li: usize, right: &Schema, ri: usize) -> Result<VoterScore> {
        Ok(self.vote(voter.parse()?, left, li, right, ri))
    }

    /// Every enabled voter on one pair, plus the merged score.
    pub fn explain(&self, left: &Schema, li: usize, right: &Schema, ri: usize) -> MatchLink {
        let voter_scores: Vec<VoterScore> = self
            .config
            .voters
            .iter()
            .map(|&v| self.vote(v, left, li, right, ri))
            .collect();
        MatchLink {
            left_id: left.element(li).id.clone(),
            right_id: right.element(ri).id.clone(),
            score: merge_votes(&voter_scores),
            voter_scores,
        }
    }

    /// Scores the full cross product. Rows are evaluated in parallel; the
    /// result does not depend on scheduling.
    pub fn run(&self, left: Arc<Schema>, right: Arc<Schema>) -> Result<MatchMatrix> {
        let (rows, cols) = (left.element_count(), right.element_count());
        let pairs = rows as u64 * cols as u64;
        if pairs > self.config.pair_budget {
            return Err(Error::PairBudget {
                pairs,
                budget: self.config.pair_budget,
            });
        }
        let voters = self.config.voters.clone();
        let nv = voters.len();
        let mut lex = Lexicon::default();
        let lf = schema_features(&left, &self.ling, &mut lex);
        let rf = schema_features(&right, &self.ling, &mut lex);

        let mut scores = vec![0.0; rows * cols];
        let mut confidences = vec![0.0; rows * cols * nv];
        if rows > 0 && cols > 0 {
            let k = self.config.saturation;
            scores
                .par_chunks_mut(cols)
                .zip(confidences.par_chunks_mut(cols * nv))
                .enumerate()
                .for_each_init(Vec::new, |row_buf, (i, (srow, crow))| {
                    let a = &lf[i];
                    for (j, b) in rf.iter().enumerate() {
                        let cs = &mut crow[j * nv..(j + 1) * nv];
                        for (slot, &v) in cs.iter_mut().zip(&voters) {
                            let (s, m) = raw_vote(v, a, b, &lex, row_buf);
                            *slot = confidence(s, m, k);
                        }
                        srow[j] = merge_confidences(cs.iter().copied());
                    }
                });
        }

        Ok(MatchMatrix {
            matcher: self.clone(),
            left,
            right,
            scores,
            confidences,
        })
    }
}

/// Scores every pair of `left × right` under `config`.
pub fn match_schemas(left: Arc<Schema>, right: Arc<Schema>, config: &MatchConfig) -> Result<MatchMatrix> {
    Matcher::new(config.clone())?.run(left, right)
}

/// Dense `left × right` merged scores with per-voter confidences.
#[derive(Debug, Clone)]
pub struct MatchMatrix {
    matcher: Matcher,
    left: Arc<Schema>,
    right: Arc<Schema>,
    scores: Vec<f64>,
    confidences: Vec<f64>,
}

impl MatchMatrix {
    /// Wraps externally computed merged scores (row-major, `left × right`).
    /// Per-voter confidences are recorded as 0.
    pub fn with_scores(left: Arc<Schema>, right: Arc<Schema>, config: MatchConfig, scores: Vec<f64>) -> Result<Self> {
        let pairs = left.element_count() * right.element_count();
        if scores.len() != pairs {
            return Err(Error::InvalidArgument(format!(
                "expected {pairs} scores, got {}",
                scores.len()
            )));
        }
        if let Some(bad) = scores.iter().find(|s| !(**s > -1.0 && **s < 1.0)) {
            return Err(Error::InvalidArgument(format!("score {bad} outside (-1, 1)")));
        }
        let matcher = Matcher::new(config)?;
        let confidences = vec![0.0; pairs * matcher.config.voters.len()];
        Ok(Self {
            matcher,
            left,
            right,
            scores,
            confidences,
        })
    }

    pub fn left(&self) -> &Arc<Schema> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Schema> {
        &self.right
    }

    pub fn left_schema_id(&self) -> &SchemaId {
        &self.left.id
    }

    pub fn right_schema_id(&self) -> &SchemaId {
        &self.right.id
    }

    pub fn config(&self) -> &MatchConfig {
        &self.matcher.config
    }

    pub fn voters(&self) -> &[VoterId] {
        &self.matcher.config.voters
    }

    pub fn rows(&self) -> usize {
        self.left.element_count()
    }

    pub fn cols(&self) -> usize {
        self.right.element_count()
    }

    pub fn pair_count(&self) -> usize {
        self.scores.len()
    }

    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.scores[i * c..(i + 1) * c]
    }

    /// Per-voter confidences for one pair, in [`Self::voters`] order.
    pub fn confidences(&self, i: usize, j: usize) -> &[f64] {
        let nv = self.voters().len();
        let at = (i * self.cols() + j) * nv;
        &self.confidences[at..at + nv]
    }

    pub fn link(&self, i: usize, j: usize) -> Link {
        Link {
            left: i,
            right: j,
            score: self.score(i, j),
        }
    }

    /// All pairs in row-major order.
    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        let c = self.cols();
        self.scores.iter().enumerate().map(move |(k, &score)| Link {
            left: k / c,
            right: k % c,
            score,
        })
    }

    /// Pairs with `lo <= score <= hi`, sorted by descending score.
    pub fn links_in_range(&self, lo: f64, hi: f64) -> Vec<Link> {
        let mut v: Vec<Link> = self.links().filter(|l| lo <= l.score && l.score <= hi).collect();
        sort_links(&mut v);
        v
    }

    /// Full voter breakdown (similarity, evidence, confidence) for one pair.
    pub fn explain(&self, i: usize, j: usize) -> MatchLink {
        self.matcher.explain(&self.left, i, &self.right, j)
    }

    pub fn position(&self, left_id: &str, right_id: &str) -> Option<(usize, usize)> {
        Some((self.left.index_of(left_id)?, self.right.index_of(right_id)?))
    }

    /// The same scores with sides swapped.
    pub fn transpose(&self) -> MatchMatrix {
        let (r, c, nv) = (self.rows(), self.cols(), self.voters().len());
        let mut scores = vec![0.0; r * c];
        let mut confidences = vec![0.0; r * c * nv];
        for i in 0..r {
            for j in 0..c {
                scores[j * r + i] = self.scores[i * c + j];
                confidences[(j * r + i) * nv..(j * r + i + 1) * nv]
                    .copy_from_slice(self.confidences(i, j));
            }
        }
        MatchMatrix {
            matcher: self.matcher.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
            scores,
            confidences,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SchemaBuilder, SourceFormat};

    fn schema(id: &str, names: &[(&str, &str)]) -> Arc<Schema> {
        let mut b = SchemaBuilder::new(id, id, SourceFormat::Canonical);
        let root = b.add(None, "Root", "", "");
        for (n, d) in names {
            b.add(Some(root), *n, *d, "");
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_confidences([0.0, 0.0, 0.0]), 0.0);
        assert_eq!(merge_confidences([0.8]), 0.8);
        assert!((merge_confidences([0.8, -0.2]) - 0.60).abs() < 1e-12);
        assert_eq!(merge_confidences(std::iter::empty()), 0.0);
    }

    #[test]
    fn confidence_formula() {
        assert_eq!(confidence(0.9, 0.0, 4.0), 0.0);
        assert!((confidence(1.0, 4.0, 4.0) - 0.5).abs() < 1e-12);
        assert!((confidence(0.0, 12.0, 4.0) + 0.75).abs() < 1e-12);
        assert_eq!(confidence(0.5, 10.0, 4.0), 0.0);
    }

    #[test]
    fn voter_examples() {
        let m = Matcher::new(MatchConfig::default()).unwrap();
        let a = schema("a", &[("DATE_BEGIN_156", ""), ("Event", "")]);
        let b = schema("b", &[("DATETIME_FIRST_INFO", ""), ("Event", "")]);

        let same = m.vote(VoterId::NameToken, &a, 2, &b, 2);
        assert_eq!(same.similarity, 1.0);
        assert!(same.confidence > 0.0);

        let doc = m.vote(VoterId::DocToken, &a, 1, &b, 1);
        assert_eq!(doc.evidence_mass, 0.0);
        assert_eq!(doc.confidence, 0.0);

        let tok = m.vote(VoterId::NameToken, &a, 1, &b, 1);
        assert!((tok.similarity - 0.5 / 4.5).abs() < 1e-12);
        assert_eq!(tok.evidence_mass, 5.0);
        assert!(tok.confidence < 0.0);

        assert!(matches!(m.vote_by_name("bogus", &a, 1, &b, 1), Err(Error::UnknownVoter(_))));
    }

    #[test]
    fn matrix_shape_and_explain_agree() {
        let a = schema("a", &[("order_date", "date the order was placed"), ("total", "")]);
        let b = schema("b", &[("OrderDate", "placed order date"), ("amount", "total amount")]);
        let mm = match_schemas(a.clone(), b.clone(), &MatchConfig::default()).unwrap();
        assert_eq!(mm.pair_count(), 9);
        for i in 0..3 {
            for j in 0..3 {
                let ex = mm.explain(i, j);
                assert_eq!(ex.score, mm.score(i, j));
                let cs: Vec<f64> = ex.voter_scores.iter().map(|v| v.confidence).collect();
                assert_eq!(cs, mm.confidences(i, j));
            }
        }
        assert!(mm.score(1, 1) > mm.score(1, 2));
    }

    #[test]
    fn empty_and_budget() {
        let a = schema("a", &[("x", "")]);
        let e = Arc::new(Schema::empty("e", "E", SourceFormat::Canonical));
        assert_eq!(match_schemas(e.clone(), a.clone(), &MatchConfig::default()).unwrap().pair_count(), 0);
        assert_eq!(match_schemas(a.clone(), e, &MatchConfig::default()).unwrap().pair_count(), 0);
        let cfg = MatchConfig {
            pair_budget: 3,
            ..MatchConfig::default()
        };
        assert!(matches!(match_schemas(a.clone(), a, &cfg), Err(Error::PairBudget { pairs: 4, budget: 3 })));
    }

    #[test]
    fn self_match_diagonal() {
        let a = schema("a", &[("order_date", "when placed"), ("total", "sum")]);
        let mm = match_schemas(a.clone(), a.clone(), &MatchConfig::default()).unwrap();
        for i in 0..a.element_count() {
            let ex = mm.explain(i, i);
            for v in &ex.voter_scores {
                if v.evidence_mass > 0.0 {
                    assert_eq!(v.similarity, 1.0, "{:?}", v);
                }
                assert!(v.confidence >= 0.0);
            }
        }
    }
}
