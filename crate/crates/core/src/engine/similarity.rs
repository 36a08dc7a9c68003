//! Set and string similarity primitives used by the voters.
//!
//! Token sets are sorted, de-duplicated `u32` term ids; the string-level
//! wrappers intern into a throwaway [`Lexicon`] and take the same path.

use super::features::Lexicon;

/// Number of leading characters two distinct tokens must share to earn
/// partial credit.
pub const PREFIX_LEN: usize = 4;

/// Credit for a prefix-sharing (but unequal) token pair.
pub const PREFIX_CREDIT: f64 = 0.5;

fn contains(sorted: &[u32], x: u32) -> bool {
    sorted.binary_search(&x).is_ok()
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Plain Jaccard; two empty sets score 0.
pub fn jaccard_ids(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let inter = intersection_len(a, b) as f64;
    inter / ((a.len() + b.len()) as f64 - inter)
}

/// Jaccard with partial credit: equal tokens count 1, unequal tokens sharing a
/// [`PREFIX_LEN`]-character prefix count [`PREFIX_CREDIT`], each token used at
/// most once. Exact matches are taken first, which is optimal because any two
/// tokens sharing a prefix with a common token also share it with each other.
/// The remaining tokens pair up within prefix groups, so the best partial
/// matching is the sum over groups of the smaller side's count.
pub fn prefix_jaccard_ids(a: &[u32], b: &[u32], prefix: &[Option<u32>]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let exact = intersection_len(a, b);
    let mut partial = 0usize;
    for (k, &x) in a.iter().enumerate() {
        if contains(b, x) {
            continue;
        }
        let Some(g) = prefix[x as usize] else { continue };
        // count each group once, at its first unmatched occurrence in `a`
        let seen = a[..k]
            .iter()
            .any(|&y| !contains(b, y) && prefix[y as usize] == Some(g));
        if seen {
            continue;
        }
        let in_a = a[k..]
            .iter()
            .filter(|&&y| !contains(b, y) && prefix[y as usize] == Some(g))
            .count();
        let in_b = b
            .iter()
            .filter(|&&y| !contains(a, y) && prefix[y as usize] == Some(g))
            .count();
        partial += in_a.min(in_b);
    }
    let credit = exact as f64 + PREFIX_CREDIT * partial as f64;
    credit / ((a.len() + b.len()) as f64 - credit)
}

/// Levenshtein distance with a caller-provided row buffer.
pub fn levenshtein_with(a: &[char], b: &[char], row: &mut Vec<usize>) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    row.clear();
    row.extend(0..=b.len());
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(ca != cb);
            row[j + 1] = (above + 1).min(row[j] + 1).min(diag + cost);
            diag = above;
        }
    }
    row[b.len()]
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_with(&a, &b, &mut Vec::new())
}

/// `1 - distance / max_len` over already-lowercased characters; two empty
/// strings are identical.
pub fn edit_similarity_chars(a: &[char], b: &[char], row: &mut Vec<usize>) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein_with(a, b, row) as f64 / longest as f64
}

/// Edit similarity of the lowercased strings.
pub fn edit_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.to_lowercase().chars().collect();
    let b: Vec<char> = b.to_lowercase().chars().collect();
    edit_similarity_chars(&a, &b, &mut Vec::new())
}

fn intern_sets<S: AsRef<str>>(a: &[S], b: &[S]) -> (Lexicon, Vec<u32>, Vec<u32>) {
    let mut lex = Lexicon::default();
    let mut ia: Vec<u32> = a.iter().map(|t| lex.intern(t.as_ref())).collect();
    let mut ib: Vec<u32> = b.iter().map(|t| lex.intern(t.as_ref())).collect();
    ia.sort_unstable();
    ia.dedup();
    ib.sort_unstable();
    ib.dedup();
    (lex, ia, ib)
}

/// [`prefix_jaccard_ids`] over token strings (treated as sets).
pub fn prefix_jaccard<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let (lex, ia, ib) = intern_sets(a, b);
    prefix_jaccard_ids(&ia, &ib, lex.prefixes())
}

/// [`jaccard_ids`] over token strings (treated as sets).
pub fn jaccard<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let (_, ia, ib) = intern_sets(a, b);
    jaccard_ids(&ia, &ib)
}
