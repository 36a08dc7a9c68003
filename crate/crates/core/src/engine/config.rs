use std::path::Path;

use serde::{Deserialize, Serialize};

use super::VoterId;
use crate::error::{Error, Result};
use crate::linguistics::Linguistics;

pub const DEFAULT_SATURATION: f64 = 4.0;
pub const DEFAULT_PAIR_BUDGET: u64 = 5_000_000;
pub const DEFAULT_REVIEW_THRESHOLD: f64 = 0.5;

/// Engine settings. Loaded from TOML:
///
/// ```toml
/// voters = ["name_token", "name_edit", "doc_token", "structure"]
/// saturation = 4.0          # K in m / (m + K)
/// pair_budget = 5000000
/// review_threshold = 0.5
/// stopwords_file = "stopwords.txt"   # optional, relative to the config file
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    pub voters: Vec<VoterId>,
    #[serde(alias = "k")]
    pub saturation: f64,
    pub pair_budget: u64,
    pub review_threshold: f64,
    /// Replaces the built-in stopword list when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<Vec<String>>,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            voters: VoterId::ALL.to_vec(),
            saturation: DEFAULT_SATURATION,
            pair_budget: DEFAULT_PAIR_BUDGET,
            review_threshold: DEFAULT_REVIEW_THRESHOLD,
            stopwords: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    voters: Option<Vec<VoterId>>,
    #[serde(alias = "k")]
    saturation: Option<f64>,
    pair_budget: Option<u64>,
    review_threshold: Option<f64>,
    stopwords: Option<Vec<String>>,
    stopwords_file: Option<String>,
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.voters.is_empty() {
            return Err(Error::Config("at least one voter must be enabled".into()));
        }
        let mut seen = self.voters.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.voters.len() {
            return Err(Error::Config("voters listed more than once".into()));
        }
        if !(self.saturation.is_finite() && self.saturation > 0.0) {
            return Err(Error::Config(format!("saturation must be > 0, got {}", self.saturation)));
        }
        if !(self.review_threshold > -1.0 && self.review_threshold < 1.0) {
            return Err(Error::Config(format!(
                "review_threshold must lie in (-1, 1), got {}",
                self.review_threshold
            )));
        }
        Ok(())
    }

    /// Parses TOML; `stopwords_file` is resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = MatchConfig::default();
        let mut config = MatchConfig {
            voters: raw.voters.unwrap_or(d.voters),
            saturation: raw.saturation.unwrap_or(d.saturation),
            pair_budget: raw.pair_budget.unwrap_or(d.pair_budget),
            review_threshold: raw.review_threshold.unwrap_or(d.review_threshold),
            stopwords: raw.stopwords,
        };
        if let Some(file) = raw.stopwords_file {
            let path = match base_dir {
                Some(d) => d.join(&file),
                None => file.into(),
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("stopwords file {}: {e}", path.display())))?;
            config.stopwords = Some(
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(str::to_owned)
                    .collect(),
            );
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, path.parent())
    }

    pub fn linguistics(&self) -> Linguistics {
        match &self.stopwords {
            Some(words) => Linguistics::with_stopwords(words),
            None => Linguistics::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_toml() {
        let c = MatchConfig::from_toml("voters = [\"name_token\", \"doc_token\"]\nk = 2.5\npair_budget = 10\n", None)
            .unwrap();
        assert_eq!(c.voters, [VoterId::NameToken, VoterId::DocToken]);
        assert_eq!(c.saturation, 2.5);
        assert_eq!(c.pair_budget, 10);
        assert_eq!(c.review_threshold, DEFAULT_REVIEW_THRESHOLD);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(MatchConfig::from_toml("voters = [\"nope\"]", None).is_err());
        assert!(MatchConfig::from_toml("saturation = 0.0", None).is_err());
        assert!(MatchConfig::from_toml("voters = []", None).is_err());
        assert!(MatchConfig::from_toml("review_threshold = 1.0", None).is_err());
        assert!(MatchConfig::from_toml("colour = 1", None).is_err());
    }

    #[test]
    fn stopwords_file_is_resolved() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("stop.txt"), "# mine\nevent\n\nthe\n").unwrap();
        let c = MatchConfig::from_toml("stopwords_file = \"stop.txt\"", Some(dir.path())).unwrap();
        assert_eq!(c.stopwords.as_deref().unwrap(), ["event", "the"]);
        assert_eq!(c.linguistics().tokenize("The Event Date"), ["date"]);
    }
}
