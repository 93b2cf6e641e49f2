use std::collections::BTreeSet;

use crate::corpus::{BoundarySet, Narrative, Pause, ProsodicPhrase};
use crate::error::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../../data/cues.txt");

/// Lowercase single-token cue words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueLexicon {
    words: BTreeSet<String>,
    provenance: String,
}

impl CueLexicon {
    pub fn new<I, S>(words: I, provenance: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for w in words {
            let w = w.as_ref().trim();
            if w.is_empty() {
                continue;
            }
            if w.chars().any(char::is_whitespace) {
                return Err(Error::schema("cue lexicon", format!("{w:?} is not a single token")));
            }
            set.insert(w.to_lowercase());
        }
        if set.is_empty() {
            return Err(Error::schema("cue lexicon", "lexicon is empty"));
        }
        Ok(Self {
            words: set,
            provenance: provenance.into(),
        })
    }

    /// One word per line; `#` starts a comment.
    pub fn parse(text: &str, provenance: impl Into<String>) -> Result<Self> {
        let words = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or_default());
        Self::new(words, provenance)
    }

    pub fn default_lexicon() -> Self {
        Self::parse(DEFAULT_LEXICON, "builtin").expect("bundled lexicon is valid")
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn union(&self, other: &CueLexicon) -> CueLexicon {
        CueLexicon {
            words: self.words.union(&other.words).cloned().collect(),
            provenance: format!("{}+{}", self.provenance, other.provenance),
        }
    }
}

impl Default for CueLexicon {
    fn default() -> Self {
        Self::default_lexicon()
    }
}

const TRAILING: &[char] = &['.', ',', ';', ':', '!', '?', ']', ')', '"', '\''];

/// Matching form of a transcript token: lowercase, lengthening hyphens
/// removed, surrounding punctuation stripped. Pause marks and tokens with
/// nothing left (`:::`, `..`) yield `None`.
pub fn normalize_token(token: &str) -> Option<String> {
    if Pause::parse_mark(token).is_some() {
        return None;
    }
    let word: String = token
        .trim_end_matches(TRAILING)
        .trim_start_matches(['[', '(', '"'])
        .chars()
        .filter(|&c| c != '-')
        .flat_map(char::to_lowercase)
        .collect();
    let word = word.trim_end_matches(TRAILING);
    (!word.is_empty()).then(|| word.to_string())
}

pub fn first_lexical_token(phrase: &ProsodicPhrase) -> Option<String> {
    phrase.text.iter().find_map(|t| normalize_token(t))
}

/// Sites whose following phrase opens with a cue word.
pub fn cue_segment(narrative: &Narrative, lexicon: &CueLexicon) -> BoundarySet {
    let sites = narrative
        .phrases()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, p)| first_lexical_token(p).is_some_and(|w| lexicon.contains(&w)))
        .map(|(k, _)| k - 1);
    BoundarySet::new(narrative.id(), narrative.site_count(), sites)
        .expect("sites come from the narrative")
}
