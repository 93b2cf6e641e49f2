use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Position of a prosodic phrase, rendered `sentence.phrase` (e.g. `3.3`).
///
/// The derived ordering compares sentence first, then phrase, which is
/// transcript order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhraseId {
    pub sentence: u32,
    pub phrase: u32,
}

impl PhraseId {
    pub fn new(sentence: u32, phrase: u32) -> Self {
        Self { sentence, phrase }
    }
}

impl fmt::Display for PhraseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.sentence, self.phrase)
    }
}

impl FromStr for PhraseId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (sentence, phrase) = s
            .split_once('.')
            .ok_or_else(|| format!("phrase id {s:?} is not of the form s.p"))?;
        let parse = |part: &str| -> std::result::Result<u32, String> {
            match part.parse::<u32>() {
                Ok(v) if v > 0 && !part.starts_with('+') => Ok(v),
                _ => Err(format!("phrase id {s:?}: {part:?} is not a positive integer")),
            }
        };
        Ok(Self::new(parse(sentence)?, parse(phrase)?))
    }
}

impl Serialize for PhraseId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhraseId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Silence preceding a phrase. Truncated marks such as `[.35+` keep their
/// numeric prefix and set `truncated`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pause {
    pub seconds: f64,
    pub truncated: bool,
}

impl Pause {
    /// Parses a bracketed pause mark: `[.35]`, `[2.95`, `[.35+`, `[1.0`.
    /// Returns `None` for anything that is not a pause mark.
    pub fn parse_mark(token: &str) -> Option<Pause> {
        let body = token.strip_prefix('[')?;
        let body = body.strip_suffix(']').unwrap_or(body);
        let (body, truncated) = match body.strip_suffix('+') {
            Some(b) => (b, true),
            None => (body, false),
        };
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
            return None;
        }
        let seconds: f64 = body.parse().ok()?;
        Some(Pause { seconds, truncated })
    }

    /// A pause counts as present when it has positive duration or was
    /// truncated in transcription.
    pub fn is_present(&self) -> bool {
        self.seconds > 0.0 || self.truncated
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProsodicPhrase {
    pub id: PhraseId,
    /// Surface tokens; case, lengthening hyphens and phrase-internal pause
    /// marks are kept as transcribed.
    pub text: Vec<String>,
    pub pause_before: Option<Pause>,
    pub sentence_final: bool,
}

/// An ordered transcript of prosodic phrases. Boundary site `k` lies between
/// phrases `k` and `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Narrative {
    id: String,
    phrases: Vec<ProsodicPhrase>,
}

#[derive(Serialize, Deserialize)]
struct PhraseRecord {
    id: PhraseId,
    #[serde(default)]
    sentence_final: bool,
    #[serde(default)]
    pause_before: Option<f64>,
    #[serde(default)]
    pause_truncated: bool,
    text: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TranscriptRecord {
    narrative_id: String,
    phrases: Vec<PhraseRecord>,
}

impl Narrative {
    pub fn new(id: impl Into<String>, phrases: Vec<ProsodicPhrase>) -> Result<Self> {
        let id = id.into();
        if phrases.is_empty() {
            return Err(Error::schema("phrases", "empty phrase list"));
        }
        if phrases.len() < 2 {
            return Err(Error::schema(
                "phrases",
                "fewer than 2 phrases (no boundary sites)",
            ));
        }
        for (k, p) in phrases.iter().enumerate() {
            let loc = format!("phrases[{k}] ({})", p.id);
            if p.text.is_empty() {
                return Err(Error::schema(loc, "text is empty"));
            }
            if let Some(pause) = p.pause_before {
                if !pause.seconds.is_finite() || pause.seconds < 0.0 {
                    return Err(Error::schema(
                        loc,
                        format!("pause_before {} is not a finite non-negative duration", pause.seconds),
                    ));
                }
            }
            if k > 0 && phrases[k - 1].id >= p.id {
                return Err(Error::schema(
                    loc,
                    format!(
                        "phrase ids out of order: {} does not follow {}",
                        p.id,
                        phrases[k - 1].id
                    ),
                ));
            }
        }
        Ok(Self { id, phrases })
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let record: TranscriptRecord =
            serde_json::from_reader(reader).map_err(|e| Error::json("transcript", e))?;
        let phrases = record
            .phrases
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                let pause_before = match (r.pause_before, r.pause_truncated) {
                    (Some(seconds), truncated) => Some(Pause { seconds, truncated }),
                    (None, false) => None,
                    (None, true) => {
                        return Err(Error::schema(
                            format!("phrases[{k}] ({})", r.id),
                            "pause_truncated set without pause_before",
                        ))
                    }
                };
                Ok(ProsodicPhrase {
                    id: r.id,
                    text: r.text,
                    pause_before,
                    sentence_final: r.sentence_final,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(record.narrative_id, phrases)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Self::from_reader(bytes)
    }

    pub fn to_json(&self) -> String {
        let record = TranscriptRecord {
            narrative_id: self.id.clone(),
            phrases: self
                .phrases
                .iter()
                .map(|p| PhraseRecord {
                    id: p.id,
                    sentence_final: p.sentence_final,
                    pause_before: p.pause_before.map(|x| x.seconds),
                    pause_truncated: p.pause_before.is_some_and(|x| x.truncated),
                    text: p.text.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&record).expect("transcript serializes")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn phrases(&self) -> &[ProsodicPhrase] {
        &self.phrases
    }

    pub fn site_count(&self) -> usize {
        self.phrases.len() - 1
    }

    pub fn phrase_index(&self, id: PhraseId) -> Option<usize> {
        self.phrases.binary_search_by(|p| p.id.cmp(&id)).ok()
    }

    /// Flanking phrases of site `k`.
    pub fn site_phrases(&self, site: usize) -> Option<(PhraseId, PhraseId)> {
        if site >= self.site_count() {
            return None;
        }
        Some((self.phrases[site].id, self.phrases[site + 1].id))
    }

    /// `3.3→4.1` style label for site `k`.
    pub fn site_label(&self, site: usize) -> Option<String> {
        self.site_phrases(site).map(|(a, b)| format!("{a}→{b}"))
    }

    /// Site index between two adjacent phrases.
    pub fn site_between(&self, before: PhraseId, after: PhraseId) -> Option<usize> {
        let k = self.phrase_index(before)?;
        (self.phrases.get(k + 1)?.id == after).then_some(k)
    }
}
