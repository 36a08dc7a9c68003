//! Tokenization, stopwording and stemming of element names and documentation.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::SchemaElement;

/// English function words. Content words that often appear in element names
/// ("all", "first", "date", "type", ...) are deliberately absent.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "am", "an", "and", "any", "are", "as",
    "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
    "can", "could", "did", "do", "does", "doing", "down", "during", "each", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
    "more", "most", "my", "myself", "nor", "of", "off", "on", "once", "only", "or", "other",
    "ought", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
    "will", "with", "would", "you", "your", "yours", "yourself", "yourselves",
];

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Porter-family suffix stripping, iterated to a fixed point so that
/// `stem(stem(x)) == stem(x)`.
pub fn stem(token: &str) -> String {
    let mut cur = token.to_owned();
    loop {
        let next = stemmer().stem(&cur).into_owned();
        if next == cur || next.is_empty() {
            return cur;
        }
        cur = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Name,
    Documentation,
}

/// Stemmed tokens of one element field, sorted (multiset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermBag {
    pub terms: Vec<String>,
    pub source_kind: SourceKind,
}

impl TermBag {
    /// Distinct terms in sorted order.
    pub fn distinct(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.terms.iter().map(String::as_str).collect();
        v.dedup();
        v
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Upper,
    Lower,
    Digit,
    Other,
}

fn class(c: char) -> CharClass {
    if c.is_numeric() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else if c.is_alphabetic() {
        CharClass::Lower
    } else {
        CharClass::Other
    }
}

/// Splits an alphanumeric run at case and letter/digit transitions.
/// `XMLFileName2` → `XML`, `File`, `Name`, `2`.
fn split_run(run: &[char], out: &mut Vec<String>) {
    let mut start = 0;
    for i in 1..run.len() {
        let (prev, cur) = (class(run[i - 1]), class(run[i]));
        let boundary = match (prev, cur) {
            (CharClass::Lower, CharClass::Upper) => true,
            (CharClass::Digit, CharClass::Upper | CharClass::Lower) => true,
            (CharClass::Upper | CharClass::Lower, CharClass::Digit) => true,
            (CharClass::Upper, CharClass::Upper) => {
                run.get(i + 1).is_some_and(|&n| class(n) == CharClass::Lower)
            }
            _ => false,
        };
        if boundary {
            out.push(run[start..i].iter().collect());
            start = i;
        }
    }
    if start < run.len() {
        out.push(run[start..].iter().collect());
    }
}

/// Linguistic preprocessing configured with a stopword list.
#[derive(Debug, Clone)]
pub struct Linguistics {
    stopwords: HashSet<String>,
}

impl Default for Linguistics {
    fn default() -> Self {
        Self::with_stopwords(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl Linguistics {
    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            stopwords: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    /// Reads a one-token-per-line stopword file; blank lines and `#` comments
    /// are ignored.
    pub fn from_stopword_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::with_stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Lowercased tokens with all-digit tokens and stopwords removed.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        let mut raw = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if !chars[i].is_alphanumeric() {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            split_run(&chars[start..i], &mut raw);
        }
        raw.into_iter()
            .map(|t| t.to_lowercase())
            .filter(|t| !t.chars().all(char::is_numeric))
            .filter(|t| !self.is_stopword(t))
            .collect()
    }

    pub fn terms(&self, text: &str, kind: SourceKind) -> TermBag {
        let mut terms: Vec<String> = self
            .tokenize(text)
            .iter()
            .map(|t| stem(t))
            .filter(|t| !t.is_empty() && !t.chars().all(char::is_numeric))
            .collect();
        terms.sort();
        TermBag {
            terms,
            source_kind: kind,
        }
    }

    pub fn term_bag(&self, element: &SchemaElement, kind: SourceKind) -> TermBag {
        match kind {
            SourceKind::Name => self.terms(&element.name, kind),
            SourceKind::Documentation => self.terms(&element.documentation, kind),
        }
    }
}

/// [`Linguistics::tokenize`] with the built-in stopword list.
pub fn tokenize(text: &str) -> Vec<String> {
    static DEFAULT: OnceLock<Linguistics> = OnceLock::new();
    DEFAULT.get_or_init(Linguistics::default).tokenize(text)
}
