//! Voter similarities and the vocabulary checked against slow, independent
//! reference implementations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use concordia_core::analysis::{comprehensive_vocabulary, Corpus};
use concordia_core::engine::similarity::{edit_similarity, prefix_jaccard};
use concordia_core::synth::random_schema;
use concordia_core::{MatchConfig, Matcher, Schema, SchemaBuilder, SourceFormat, VoterId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edit distance by plain recursion over prefixes, memoised on (i, j).
fn edit_oracle(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut BTreeMap<(usize, usize), usize>) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let d = if a[i - 1] == b[j - 1] {
            go(a, b, i - 1, j - 1, memo)
        } else {
            1 + go(a, b, i - 1, j, memo)
                .min(go(a, b, i, j - 1, memo))
                .min(go(a, b, i - 1, j - 1, memo))
        };
        memo.insert((i, j), d);
        d
    }
    go(a, b, a.len(), b.len(), &mut BTreeMap::new())
}

fn weight(x: &str, y: &str) -> f64 {
    if x == y {
        return 1.0;
    }
    let (px, py): (Vec<char>, Vec<char>) = (x.chars().take(4).collect(), y.chars().take(4).collect());
    if px.len() == 4 && px == py {
        0.5
    } else {
        0.0
    }
}

/// Best total weight over every one-to-one assignment of `a` into `b`.
fn best_matching(a: &[String], b: &[String], used: &mut Vec<bool>) -> f64 {
    let Some((x, rest)) = a.split_first() else {
        return 0.0;
    };
    let mut best = best_matching(rest, b, used);
    for k in 0..b.len() {
        if !used[k] {
            let w = weight(x, &b[k]);
            if w > 0.0 {
                used[k] = true;
                best = best.max(w + best_matching(rest, b, used));
                used[k] = false;
            }
        }
    }
    best
}

fn prefix_jaccard_oracle(a: &[String], b: &[String]) -> f64 {
    let a: Vec<String> = a.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let b: Vec<String> = b.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let w = best_matching(&a, &b, &mut vec![false; b.len()]);
    w / ((a.len() + b.len()) as f64 - w)
}

const TOKENS: &[&str] = &[
    "date", "datetim", "dates", "dat", "begin", "beginn", "begun", "event", "eventu", "even", "info", "inform",
    "first", "firstli", "vital", "vita",
];

fn token() -> impl Strategy<Value = String> {
    proptest::sample::select(TOKENS).prop_map(str::to_owned)
}

fn single(name: &str) -> Schema {
    let mut b = SchemaBuilder::new("x", "x", SourceFormat::Canonical);
    b.add(None, name, "", "");
    b.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn name_edit_matches_recursive_oracle(a in "[abc]{0,12}", b in "[abc]{0,12}") {
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let longest = ca.len().max(cb.len());
        let expected = if longest == 0 { 1.0 } else { 1.0 - edit_oracle(&ca, &cb) as f64 / longest as f64 };
        prop_assert_eq!(edit_similarity(&a, &b), expected);

        let m = Matcher::new(MatchConfig::default()).unwrap();
        let (l, r) = (single(&a), single(&b));
        let v = m.vote(VoterId::NameEdit, &l, 0, &r, 0);
        prop_assert_eq!(v.similarity, expected);
    }

    #[test]
    fn name_token_matches_assignment_oracle(
        a in proptest::collection::vec(token(), 0..=8),
        b in proptest::collection::vec(token(), 0..=8),
    ) {
        let got = prefix_jaccard(&a, &b);
        let want = prefix_jaccard_oracle(&a, &b);
        prop_assert!((got - want).abs() < 1e-12, "got {got}, oracle {want}");
    }
}

#[test]
fn edit_oracle_sanity() {
    let c = |s: &str| s.chars().collect::<Vec<_>>();
    assert_eq!(edit_oracle(&c("kitten"), &c("sitting")), 3);
    assert_eq!(edit_oracle(&c(""), &c("abc")), 3);
    assert_eq!(edit_oracle(&c("abc"), &c("abc")), 0);
}

/// Connected components of the match graph by breadth-first search, as
/// sets of (schema, element) keyed by their signature.
fn vocabulary_oracle(corpus: &Corpus) -> BTreeMap<BTreeSet<String>, BTreeSet<BTreeSet<String>>> {
    let mut adj: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for s in corpus.schemas.values() {
        for e in s.elements() {
            adj.entry(e.id.to_string()).or_default();
        }
    }
    for ((a, b), pairs) in &corpus.matches {
        for &(i, j) in pairs {
            let x = corpus.schemas[a].element(i).id.to_string();
            let y = corpus.schemas[b].element(j).id.to_string();
            adj.get_mut(&x).unwrap().push(y.clone());
            adj.get_mut(&y).unwrap().push(x);
        }
    }
    let owner = |id: &str| id.split(':').next().unwrap().to_owned();
    let mut seen = BTreeSet::new();
    let mut cells: BTreeMap<BTreeSet<String>, BTreeSet<BTreeSet<String>>> = BTreeMap::new();
    for start in adj.keys() {
        if !seen.insert(start.clone()) {
            continue;
        }
        let mut comp = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(x) = queue.pop_front() {
            for y in &adj[&x] {
                if seen.insert(y.clone()) {
                    comp.insert(y.clone());
                    queue.push_back(y.clone());
                }
            }
        }
        let sig: BTreeSet<String> = comp.iter().map(|m| owner(m)).collect();
        cells.entry(sig).or_default().insert(comp);
    }
    cells
}

fn random_corpus(rng: &mut ChaCha8Rng, n: usize, max_elements: usize) -> Corpus {
    let mut c = Corpus::default();
    let ids: Vec<String> = (0..n).map(|k| format!("s{k}")).collect();
    for id in &ids {
        c.add_schema(Arc::new(random_schema(rng, id, max_elements))).unwrap();
    }
    for x in 0..n {
        for y in x + 1..n {
            let (na, nb) = (c.schemas[ids[x].as_str()].element_count(), c.schemas[ids[y].as_str()].element_count());
            let k = if na * nb == 0 { 0 } else { rng.gen_range(0..=na.min(nb) + 2) };
            let pairs: Vec<(usize, usize)> = (0..k).map(|_| (rng.gen_range(0..na), rng.gen_range(0..nb))).collect();
            c.add_matches(&ids[x].as_str().into(), &ids[y].as_str().into(), pairs);
        }
    }
    c
}

#[test]
fn vocabulary_equals_traversal_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3, 4] {
        for _ in 0..40 {
            let corpus = random_corpus(&mut rng, n, 10);
            let v = comprehensive_vocabulary(&corpus).unwrap();
            assert_eq!(v.cells.len(), (1 << n) - 1);
            let oracle = vocabulary_oracle(&corpus);
            for cell in &v.cells {
                let sig: BTreeSet<String> = cell.signature.iter().map(|s| s.to_string()).collect();
                let got: BTreeSet<BTreeSet<String>> = cell
                    .terms
                    .iter()
                    .map(|&t| v.terms[t].members.iter().map(|m| m.to_string()).collect())
                    .collect();
                assert_eq!(got, oracle.get(&sig).cloned().unwrap_or_default(), "cell {sig:?}");
            }
            // terms partition the elements
            let total: usize = corpus.schemas.values().map(|s| s.element_count()).sum();
            assert_eq!(v.terms.iter().map(|t| t.members.len()).sum::<usize>(), total);
        }
    }
}

#[test]
fn vocabulary_is_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let corpus = random_corpus(&mut rng, 3, 10);
        let base = comprehensive_vocabulary(&corpus).unwrap();
        let mut shuffled = corpus.clone();
        for pairs in shuffled.matches.values_mut() {
            pairs.reverse();
        }
        let mut rebuilt = Corpus::default();
        for s in shuffled.schemas.values().rev() {
            rebuilt.add_schema(s.clone()).unwrap();
        }
        for ((a, b), pairs) in shuffled.matches.iter().rev() {
            // add in the opposite orientation
            rebuilt.add_matches(b, a, pairs.iter().map(|&(i, j)| (j, i)));
        }
        assert_eq!(comprehensive_vocabulary(&rebuilt).unwrap(), base);
    }
}
