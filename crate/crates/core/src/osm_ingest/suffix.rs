use serde::Deserialize;

use super::OsmError;

const DEFAULT_SUFFIXES: &[&str] = &[
    "Street",
    "Avenue",
    "Boulevard",
    "Circle",
    "Court",
    "Drive",
    "Expressway",
    "Freeway",
    "Highway",
    "Lane",
    "Parkway",
    "Place",
    "Road",
    "Way",
];

/// Recognized road-type suffixes, stored in canonical capitalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixVocabulary {
    words: Vec<String>,
}

#[derive(Deserialize)]
struct VocabularyFile {
    suffixes: Vec<String>,
}

impl Default for SuffixVocabulary {
    fn default() -> Self {
        Self {
            words: DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl SuffixVocabulary {
    pub fn new<I, S>(words: I) -> Result<Self, OsmError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for w in words {
            let w: String = w.into();
            let w = w.trim().to_string();
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(OsmError::Vocabulary(format!(
                    "suffix {w:?} must be a single non-empty token"
                )));
            }
            if !out.iter().any(|o| o.eq_ignore_ascii_case(&w)) {
                out.push(w);
            }
        }
        Ok(Self { words: out })
    }

    /// Parses a TOML document of the form `suffixes = ["Street", ...]`.
    pub fn from_toml(text: &str) -> Result<Self, OsmError> {
        let file: VocabularyFile = toml::from_str(text).map_err(|e| OsmError::Vocabulary(e.to_string()))?;
        Self::new(file.suffixes)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Canonical form of `token` if it is in the vocabulary (case-insensitive).
    pub fn canonical(&self, token: &str) -> Option<&str> {
        self.words
            .iter()
            .find(|w| w.to_lowercase() == token.to_lowercase())
            .map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.canonical(word).is_some()
    }

    /// Last whitespace-delimited token of `name`, if it is a known suffix.
    pub fn suffix_of(&self, name: &str) -> Option<String> {
        let last = name.split_whitespace().last()?;
        self.canonical(last).map(str::to_string)
    }
}

/// [`SuffixVocabulary::suffix_of`] against the default vocabulary.
pub fn road_suffix(name: &str) -> Option<String> {
    SuffixVocabulary::default().suffix_of(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_examples() {
        assert_eq!(road_suffix("Main Street").as_deref(), Some("Street"));
        assert_eq!(road_suffix("Patricia Circle").as_deref(), Some("Circle"));
        assert_eq!(road_suffix("Oregon Expressway").as_deref(), Some("Expressway"));
        assert_eq!(road_suffix("Broadway"), None);
    }

    #[test]
    fn case_insensitive_canonical_output() {
        assert_eq!(road_suffix("elm STREET").as_deref(), Some("Street"));
        assert_eq!(road_suffix("  Ocean   drive  ").as_deref(), Some("Drive"));
    }

    #[test]
    fn empty_and_non_final_tokens() {
        assert_eq!(road_suffix(""), None);
        assert_eq!(road_suffix("   "), None);
        assert_eq!(road_suffix("Street Market"), None);
    }

    #[test]
    fn toml_vocabulary() {
        let v = SuffixVocabulary::from_toml(r#"suffixes = ["Terrace", "Alley", "alley"]"#).unwrap();
        assert_eq!(v.words(), &["Terrace".to_string(), "Alley".to_string()]);
        assert_eq!(v.suffix_of("Rose terrace").as_deref(), Some("Terrace"));
        assert_eq!(v.suffix_of("Main Street"), None);
        assert!(SuffixVocabulary::from_toml(r#"suffixes = ["Two Words"]"#).is_err());
        assert!(SuffixVocabulary::from_toml("nope = 1").is_err());
    }
}
