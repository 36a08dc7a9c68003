//! Overlap statistics over matched schemata: the binary partition of a schema
//! pair, the comprehensive vocabulary of N schemata bucketed into its 2^N−1
//! signature cells, vocabulary distances, clustering and schema search.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::engine::{MatchConfig, Matcher};
use crate::error::{Error, Result};
use crate::model::{ElementId, Schema, SchemaId};
use crate::session::Session;

/// Largest corpus for which all 2^N−1 cells are enumerated.
pub const MAX_VOCABULARY_SCHEMAS: usize = 20;

/// Which links count as matches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MatchMode {
    /// Human-accepted decisions only.
    Validated,
    /// Every link scoring at least `threshold`.
    Automatic { threshold: f64 },
}

/// `round(100 * part / whole)` with halves rounded up; 0 when `whole` is 0.
pub fn percent(part: usize, whole: usize) -> u32 {
    if whole == 0 {
        return 0;
    }
    ((200 * part as u64 + whole as u64) / (2 * whole as u64)) as u32
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SidePartition {
    pub schema_id: SchemaId,
    pub element_count: usize,
    pub common: Vec<ElementId>,
    pub only: Vec<ElementId>,
    pub common_percent: u32,
    pub only_percent: u32,
}

impl SidePartition {
    fn new(schema: &Schema, matched: &BTreeSet<usize>) -> Self {
        let (mut common, mut only) = (Vec::new(), Vec::new());
        for (i, e) in schema.elements().iter().enumerate() {
            if matched.contains(&i) {
                common.push(e.id.clone());
            } else {
                only.push(e.id.clone());
            }
        }
        let n = schema.element_count();
        Self {
            schema_id: schema.id.clone(),
            element_count: n,
            common_percent: percent(common.len(), n),
            only_percent: percent(only.len(), n),
            common,
            only,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub mode: MatchMode,
    pub left: SidePartition,
    pub right: SidePartition,
    /// Matched pairs, oriented left to right.
    pub common_pairs: Vec<(ElementId, ElementId)>,
}

impl PartitionReport {
    pub fn left_only(&self) -> &[ElementId] {
        &self.left.only
    }

    pub fn right_only(&self) -> &[ElementId] {
        &self.right.only
    }
}

/// Matched position pairs between `a` and `b`, oriented `(a, b)` and sorted.
pub fn matched_pairs(session: &Session, a: &str, b: &str, mode: MatchMode) -> Result<Vec<(usize, usize)>> {
    let unknown = || Error::UnknownPair {
        left: a.to_owned(),
        right: b.to_owned(),
    };
    session.schema(a)?;
    session.schema(b)?;
    let (m, flipped) = session.matrix_between(a, b).ok_or_else(unknown)?;
    match mode {
        MatchMode::Validated => session.accepted_pairs(a, b),
        MatchMode::Automatic { threshold } => {
            let mut v: Vec<(usize, usize)> = m
                .links()
                .filter(|l| l.score >= threshold)
                .map(|l| if flipped { (l.right, l.left) } else { (l.left, l.right) })
                .collect();
            v.sort_unstable();
            Ok(v)
        }
    }
}

pub fn partition(session: &Session, left: &str, right: &str, mode: MatchMode) -> Result<PartitionReport> {
    let pairs = matched_pairs(session, left, right, mode)?;
    let (ls, rs) = (session.schema(left)?, session.schema(right)?);
    let lm: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let rm: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    Ok(PartitionReport {
        mode,
        left: SidePartition::new(ls, &lm),
        right: SidePartition::new(rs, &rm),
        common_pairs: pairs
            .iter()
            .map(|&(i, j)| (ls.element(i).id.clone(), rs.element(j).id.clone()))
            .collect(),
    })
}

/// Schemata plus matched pairs for some of their pairings, keyed by
/// `(a, b)` with `a < b` and pairs oriented accordingly.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub schemas: BTreeMap<SchemaId, Arc<Schema>>,
    pub matches: BTreeMap<(SchemaId, SchemaId), Vec<(usize, usize)>>,
}

impl Corpus {
    pub fn add_schema(&mut self, schema: Arc<Schema>) -> Result<()> {
        if let Some(existing) = self.schemas.get(&schema.id) {
            if **existing != *schema {
                return Err(Error::InvalidArgument(format!(
                    "two different schemata share the id `{}`",
                    schema.id
                )));
            }
            return Ok(());
        }
        self.schemas.insert(schema.id.clone(), schema);
        Ok(())
    }

    /// Adds matched pairs oriented `(a, b)`; pairs already present are kept once.
    pub fn add_matches(&mut self, a: &SchemaId, b: &SchemaId, pairs: impl IntoIterator<Item = (usize, usize)>) {
        let (key, flip) = if a <= b {
            ((a.clone(), b.clone()), false)
        } else {
            ((b.clone(), a.clone()), true)
        };
        let entry = self.matches.entry(key).or_default();
        entry.extend(pairs.into_iter().map(|(i, j)| if flip { (j, i) } else { (i, j) }));
        entry.sort_unstable();
        entry.dedup();
    }

    /// Gathers schemata and matches from sessions, one entry per matrix.
    pub fn from_sessions<'a>(sessions: impl IntoIterator<Item = &'a Session>, mode: MatchMode) -> Result<Self> {
        let mut c = Corpus::default();
        for s in sessions {
            for schema in s.schemas() {
                c.add_schema(schema.clone())?;
            }
            for (l, r) in s.pairs() {
                let pairs = matched_pairs(s, l.as_str(), r.as_str(), mode)?;
                c.add_matches(l, r, pairs);
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabularyTerm {
    pub term_id: usize,
    pub members: Vec<ElementId>,
    pub signature: Vec<SchemaId>,
    pub representative: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabularyCell {
    /// Bit `i` set when `schema_ids[i]` is in the signature.
    pub mask: u32,
    pub signature: Vec<SchemaId>,
    pub terms: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vocabulary {
    pub schema_ids: Vec<SchemaId>,
    pub terms: Vec<VocabularyTerm>,
    /// All 2^N−1 cells, smaller signatures first, then by mask.
    pub cells: Vec<VocabularyCell>,
}

impl Vocabulary {
    pub fn cell(&self, signature: &[&str]) -> Option<&VocabularyCell> {
        self.cells.iter().find(|c| {
            c.signature.len() == signature.len() && c.signature.iter().all(|s| signature.contains(&s.as_str()))
        })
    }

    fn touching(&self, id: &SchemaId) -> BTreeSet<usize> {
        self.terms
            .iter()
            .filter(|t| t.signature.contains(id))
            .map(|t| t.term_id)
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Cross-schema terms: connected components of the match graph over all
/// elements of the corpus. Every pairing of the corpus schemata must be
/// present in `corpus.matches`, possibly with no pairs.
pub fn comprehensive_vocabulary(corpus: &Corpus) -> Result<Vocabulary> {
    let ids: Vec<SchemaId> = corpus.schemas.keys().cloned().collect();
    if ids.len() > MAX_VOCABULARY_SCHEMAS {
        return Err(Error::InvalidArgument(format!(
            "{} schemata exceed the vocabulary limit of {MAX_VOCABULARY_SCHEMAS}",
            ids.len()
        )));
    }
    let mut missing = Vec::new();
    for (x, a) in ids.iter().enumerate() {
        for b in &ids[x + 1..] {
            if !corpus.matches.contains_key(&(a.clone(), b.clone())) {
                missing.push((a.to_string(), b.to_string()));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPairs(missing));
    }

    let mut offset = BTreeMap::new();
    let mut total = 0;
    for (id, s) in &corpus.schemas {
        offset.insert(id.clone(), total);
        total += s.element_count();
    }
    let mut uf = UnionFind::new(total);
    for ((a, b), pairs) in &corpus.matches {
        let (Some(&oa), Some(&ob)) = (offset.get(a), offset.get(b)) else {
            return Err(Error::UnknownSchema(
                if offset.contains_key(a) { b } else { a }.to_string(),
            ));
        };
        let (na, nb) = (corpus.schemas[a].element_count(), corpus.schemas[b].element_count());
        for &(i, j) in pairs {
            if i >= na || j >= nb {
                return Err(Error::InvalidArgument(format!("pair ({i}, {j}) out of range for ({a}, {b})")));
            }
            uf.union(oa + i, ob + j);
        }
    }

    // global index -> (schema index, element index); components in order of
    // their smallest global index
    let owners: Vec<(usize, usize)> = corpus
        .schemas
        .values()
        .enumerate()
        .flat_map(|(si, s)| (0..s.element_count()).map(move |e| (si, e)))
        .collect();
    let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for g in 0..total {
        let r = uf.find(g);
        let c = *comp_of_root.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[c].push(g);
    }

    let schemas: Vec<&Arc<Schema>> = corpus.schemas.values().collect();
    let mut terms = Vec::with_capacity(groups.len());
    let mut by_mask: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (term_id, members) in groups.into_iter().enumerate() {
        let mut mask = 0u32;
        let mut rep: Option<&str> = None;
        let mut member_ids = Vec::with_capacity(members.len());
        for g in members {
            let (si, e) = owners[g];
            mask |= 1 << si;
            let el = schemas[si].element(e);
            member_ids.push(el.id.clone());
            let name = el.name.as_str();
            rep = match rep {
                Some(r) if (r.chars().count(), r) <= (name.chars().count(), name) => Some(r),
                _ => Some(name),
            };
        }
        by_mask.entry(mask).or_default().push(term_id);
        terms.push(VocabularyTerm {
            term_id,
            members: member_ids,
            signature: (0..ids.len()).filter(|i| mask >> i & 1 == 1).map(|i| ids[i].clone()).collect(),
            representative: rep.unwrap_or_default().to_owned(),
        });
    }

    let mut masks: Vec<u32> = (1..(1u64 << ids.len()) as u32).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let cells = masks
        .into_iter()
        .map(|mask| VocabularyCell {
            mask,
            signature: (0..ids.len()).filter(|i| mask >> i & 1 == 1).map(|i| ids[i].clone()).collect(),
            terms: by_mask.remove(&mask).unwrap_or_default(),
        })
        .collect();
    Ok(Vocabulary {
        schema_ids: ids,
        terms,
        cells,
    })
}

/// `1 − |terms touching both| / |terms touching either|`; 0 for a schema
/// against itself, 1 when no term touches either.
pub fn overlap_distance(vocab: &Vocabulary, a: &str, b: &str) -> Result<f64> {
    let find = |id: &str| {
        vocab
            .schema_ids
            .iter()
            .find(|s| s.as_str() == id)
            .ok_or_else(|| Error::UnknownSchema(id.to_owned()))
    };
    let (a, b) = (find(a)?, find(b)?);
    if a == b {
        return Ok(0.0);
    }
    let (ta, tb) = (vocab.touching(a), vocab.touching(b));
    let either = ta.union(&tb).count();
    if either == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - ta.intersection(&tb).count() as f64 / either as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub ids: Vec<SchemaId>,
    pub distances: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn new(ids: Vec<SchemaId>, distances: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if distances.len() != n || distances.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("distance matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let d = distances[i][j];
                if !(0.0..=1.0).contains(&d) || d != distances[j][i] || (i == j && d != 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "distance ({}, {}) = {d} breaks symmetry, range or zero diagonal",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        Ok(Self { ids, distances })
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.distances[a][b]
    }
}

#[allow(clippy::needless_range_loop)]
pub fn distance_matrix(vocab: &Vocabulary) -> DistanceMatrix {
    let n = vocab.schema_ids.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = overlap_distance(vocab, vocab.schema_ids[i].as_str(), vocab.schema_ids[j].as_str())
                .expect("ids come from the vocabulary");
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    DistanceMatrix {
        ids: vocab.schema_ids.clone(),
        distances: d,
    }
}

/// One agglomeration step. Nodes `0..n` are the schemata; merge `k` creates
/// node `n + k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub members: Vec<SchemaId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    pub clusters: Vec<Vec<SchemaId>>,
    pub merges: Vec<Merge>,
}

const TIE_EPS: f64 = 1e-12;

/// Average-linkage agglomerative clustering. Ties go to the pair whose
/// smallest schema ids are lexicographically smallest. The flat clusters
/// apply every merge of height at most `cutoff`; `cutoff <= 0` keeps every
/// schema on its own.
pub fn cluster(dm: &DistanceMatrix, cutoff: f64) -> Clustering {
    // leaves sorted by id so the smallest leaf index is the smallest id
    let mut order: Vec<usize> = (0..dm.ids.len()).collect();
    order.sort_by(|&x, &y| dm.ids[x].cmp(&dm.ids[y]));
    let n = order.len();

    // active: (node id, sorted leaf positions into `order`)
    let mut active: Vec<(usize, Vec<usize>)> = (0..n).map(|k| (order[k], vec![k])).collect();
    let mut merges = Vec::new();
    let mut flat: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    let mut cutting = cutoff > 0.0;

    let avg = |x: &[usize], y: &[usize]| {
        let mut s = 0.0;
        for &p in x {
            for &q in y {
                s += dm.get(order[p], order[q]);
            }
        }
        s / (x.len() * y.len()) as f64
    };

    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                let h = avg(&active[x].1, &active[y].1);
                let key = |p: usize, q: usize| {
                    let (u, v) = (active[p].1[0], active[q].1[0]);
                    (u.min(v), u.max(v))
                };
                best = match best {
                    None => Some((h, x, y)),
                    Some((bh, bx, by)) => {
                        if h < bh - TIE_EPS || ((h - bh).abs() <= TIE_EPS && key(x, y) < key(bx, by)) {
                            Some((h, x, y))
                        } else {
                            Some((bh, bx, by))
                        }
                    }
                };
            }
        }
        let (h, x, y) = best.expect("at least two active clusters");
        let (nb, lb) = active.remove(y);
        let (na, la) = active.remove(x);
        let mut leaves: Vec<usize> = la.into_iter().chain(lb).collect();
        leaves.sort_unstable();
        let node = n + merges.len();
        merges.push(Merge {
            a: na.min(nb),
            b: na.max(nb),
            height: h,
            members: leaves.iter().map(|&k| dm.ids[order[k]].clone()).collect(),
        });
        if cutting && h <= cutoff + TIE_EPS {
            flat.retain(|c| !leaves.contains(&c[0]));
            flat.push(leaves.clone());
        } else {
            cutting = false;
        }
        active.push((node, leaves));
    }

    flat.sort();
    Clustering {
        clusters: flat
            .into_iter()
            .map(|c| c.into_iter().map(|k| dm.ids[order[k]].clone()).collect())
            .collect(),
        merges,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchHit {
    pub schema_id: SchemaId,
    pub schema_name: String,
    /// Fraction of query elements whose best link reaches the threshold.
    pub score: f64,
    pub mean_best: f64,
    pub matched: usize,
}

/// Ranks repository schemata by how much of `query` they cover.
pub fn search(query: &Arc<Schema>, repository: &[Arc<Schema>], config: &MatchConfig, threshold: Option<f64>) -> Result<Vec<SearchHit>> {
    let tau = threshold.unwrap_or(config.review_threshold);
    let matcher = Matcher::new(config.clone())?;
    let mut hits = Vec::with_capacity(repository.len());
    for r in repository {
        let m = matcher.run(query.clone(), r.clone())?;
        let best: Vec<f64> = (0..m.rows())
            .map(|i| m.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .filter(|b| b.is_finite())
            .collect();
        let n = query.element_count();
        let matched = best.iter().filter(|&&b| b >= tau).count();
        hits.push(SearchHit {
            schema_id: r.id.clone(),
            schema_name: r.name.clone(),
            score: if n == 0 { 0.0 } else { matched as f64 / n as f64 },
            mean_best: if best.is_empty() { 0.0 } else { best.iter().sum::<f64>() / best.len() as f64 },
            matched,
        });
    }
    hits.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(b.mean_best.total_cmp(&a.mean_best))
            .then_with(|| a.schema_id.cmp(&b.schema_id))
    });
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_ddl;
    use crate::model::{SchemaBuilder, SourceFormat};

    fn flat(id: &str, names: &[&str]) -> Arc<Schema> {
        let mut b = SchemaBuilder::new(id, id, SourceFormat::Canonical);
        for n in names {
            b.add(None, *n, "", "");
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(percent(267, 784), 34);
        assert_eq!(percent(517, 784), 66);
        assert_eq!(percent(0, 0), 0);
        assert_eq!(percent(1, 2), 50);
        assert_eq!(percent(1, 8), 13);
        assert_eq!(percent(5, 5), 100);
    }

    #[test]
    fn partition_modes() {
        let mut s = Session::new("p", MatchConfig::default()).unwrap();
        s.add_schema(flat("a", &["begin_date", "place", "person"]), "a").unwrap();
        s.add_schema(flat("b", &["begin_date", "location"]), "b").unwrap();
        s.compute_matches("a", "b").unwrap();

        let r = partition(&s, "a", "b", MatchMode::Validated).unwrap();
        assert!(r.common_pairs.is_empty());
        assert_eq!(r.left.only.len(), 3);
        assert_eq!((r.right.only.len(), r.right.only_percent, r.right.common_percent), (2, 100, 0));

        s.record_decision(crate::session::DecisionRequest {
            left_id: "b:0".into(),
            right_id: "a:0".into(),
            status: crate::session::DecisionStatus::Accepted,
            annotation: Default::default(),
            author: "x".into(),
            assignee: String::new(),
            timestamp: chrono::DateTime::from_timestamp(0, 0).unwrap(),
        })
        .unwrap();
        let r = partition(&s, "b", "a", MatchMode::Validated).unwrap();
        assert_eq!(r.common_pairs, [("b:0".into(), "a:0".into())]);
        assert_eq!((r.left.common_percent, r.right.common_percent), (50, 33));

        let auto = partition(&s, "a", "b", MatchMode::Automatic { threshold: 0.3 }).unwrap();
        assert!(auto.common_pairs.contains(&("a:0".into(), "b:0".into())));
        for side in [&auto.left, &auto.right] {
            assert_eq!(side.common.len() + side.only.len(), side.element_count);
        }
        assert!(matches!(partition(&s, "a", "zz", MatchMode::Validated), Err(Error::UnknownSchema(_))));
    }

    #[test]
    fn self_match_has_no_only_sets() {
        let a = parse_ddl("CREATE TABLE t (x INT, y INT);", "a", "A").unwrap().schema;
        let mut b = SchemaBuilder::new("b", "B", SourceFormat::Canonical);
        for e in a.elements() {
            let parent = e.parent_id.as_ref().map(|p| a.require(p.as_str()).unwrap());
            b.add(parent, e.name.clone(), e.documentation.clone(), e.type_hint.clone());
        }
        let mut c = Corpus::default();
        c.add_schema(Arc::new(a)).unwrap();
        c.add_schema(Arc::new(b.build().unwrap())).unwrap();
        c.add_matches(&"a".into(), &"b".into(), (0..3).map(|i| (i, i)));
        let v = comprehensive_vocabulary(&c).unwrap();
        assert_eq!(v.cells.len(), 3);
        assert!(v.cell(&["a"]).unwrap().terms.is_empty());
        assert!(v.cell(&["b"]).unwrap().terms.is_empty());
        assert_eq!(v.cell(&["a", "b"]).unwrap().terms.len(), 3);
        assert_eq!(overlap_distance(&v, "a", "b").unwrap(), 0.0);
    }

    #[test]
    fn vocabulary_transitive_terms() {
        let mut c = Corpus::default();
        for (id, names) in [("x", &["date", "begin_date"][..]), ("y", &["start"]), ("z", &["dt", "other"])] {
            c.add_schema(flat(id, names)).unwrap();
        }
        c.add_matches(&"x".into(), &"y".into(), [(1, 0)]);
        c.add_matches(&"z".into(), &"y".into(), [(0, 0)]);
        assert!(matches!(comprehensive_vocabulary(&c), Err(Error::MissingPairs(ref m)) if m == &[("x".to_string(), "z".to_string())]));
        c.add_matches(&"x".into(), &"z".into(), []);
        let v = comprehensive_vocabulary(&c).unwrap();
        assert_eq!(v.cells.len(), 7);
        assert_eq!(v.terms.len(), 3);
        let shared = &v.terms[v.cell(&["x", "y", "z"]).unwrap().terms[0]];
        assert_eq!(shared.members, ["x:1", "y:0", "z:0"].map(ElementId::from));
        assert_eq!(shared.representative, "dt");
        assert_eq!(v.cell(&["x"]).unwrap().terms.len(), 1);
        assert_eq!(v.cell(&["z"]).unwrap().terms.len(), 1);
        assert!(v.cell(&["x", "y"]).unwrap().terms.is_empty());
    }

    #[test]
    fn distances() {
        // 4 terms touch both, 10 touch either
        let names: Vec<String> = (0..7).map(|i| format!("t{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut c = Corpus::default();
        c.add_schema(flat("a", &refs)).unwrap();
        c.add_schema(flat("b", &refs)).unwrap();
        c.add_matches(&"a".into(), &"b".into(), (0..4).map(|i| (i, i)));
        let v = comprehensive_vocabulary(&c).unwrap();
        assert!((overlap_distance(&v, "a", "b").unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(overlap_distance(&v, "a", "a").unwrap(), 0.0);
        assert!(matches!(overlap_distance(&v, "a", "q"), Err(Error::UnknownSchema(_))));

        let mut c = Corpus::default();
        c.add_schema(flat("a", &["x"])).unwrap();
        c.add_schema(flat("b", &[])).unwrap();
        c.add_schema(flat("c", &[])).unwrap();
        for (p, q) in [("a", "b"), ("a", "c"), ("b", "c")] {
            c.add_matches(&p.into(), &q.into(), []);
        }
        let v = comprehensive_vocabulary(&c).unwrap();
        assert_eq!(overlap_distance(&v, "a", "b").unwrap(), 1.0);
        assert_eq!(overlap_distance(&v, "b", "c").unwrap(), 1.0);
        let dm = distance_matrix(&v);
        assert!(DistanceMatrix::new(dm.ids.clone(), dm.distances.clone()).is_ok());
    }

    fn groups() -> DistanceMatrix {
        let ids = ["p", "q", "r", "s"].map(SchemaId::from).to_vec();
        let g = |i: usize| i / 2;
        let d = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| if i == j { 0.0 } else if g(i) == g(j) { 0.1 } else { 0.9 })
                    .collect()
            })
            .collect();
        DistanceMatrix::new(ids, d).unwrap()
    }

    #[test]
    fn clustering() {
        let dm = groups();
        let c = cluster(&dm, 0.5);
        assert_eq!(c.clusters, [vec!["p".into(), "q".into()], vec!["r".into(), "s".into()]] as [Vec<SchemaId>; 2]);
        assert_eq!(c.merges.len(), 3);
        assert_eq!((c.merges[0].a, c.merges[0].b), (0, 1));
        assert_eq!((c.merges[1].a, c.merges[1].b), (2, 3));
        assert!((c.merges[2].height - 0.9).abs() < 1e-12);
        assert_eq!(cluster(&dm, 0.0).clusters.len(), 4);
        assert_eq!(cluster(&dm, 1.0).clusters.len(), 1);
        assert_eq!(cluster(&dm, 0.5), cluster(&dm, 0.5));
        let empty = DistanceMatrix::new(vec![], vec![]).unwrap();
        assert!(cluster(&empty, 1.0).clusters.is_empty());
    }

    #[test]
    fn search_ranking() {
        let query = flat("q", &["begin_date", "event_place", "person_name", "birth_year"]);
        let full = flat("full", &["begin_date", "event_place", "person_name", "birth_year"]);
        let half = flat("half", &["begin_date", "event_place", "zzqx", "vvwk"]);
        let none = flat("none", &["qqq", "xxx"]);
        // identical undocumented leaves score about 0.45, below the default review threshold
        let hits = search(&query, &[none, half, full], &MatchConfig::default(), Some(0.3)).unwrap();
        let order: Vec<&str> = hits.iter().map(|h| h.schema_id.as_str()).collect();
        assert_eq!(order, ["full", "half", "none"]);
        assert_eq!(hits.iter().map(|h| h.score).collect::<Vec<_>>(), [1.0, 0.5, 0.0]);
    }
}
