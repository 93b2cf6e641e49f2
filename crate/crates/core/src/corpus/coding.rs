use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Narrative, PhraseId};
use crate::error::{Error, Result};

/// One of the five inferrability relations. The toolkit treats them as
/// opaque labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationTag {
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl fmt::Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            RelationTag::R1 => 1,
            RelationTag::R2 => 2,
            RelationTag::R3 => 3,
            RelationTag::R4 => 4,
            RelationTag::R5 => 5,
        };
        write!(f, "r{n}")
    }
}

impl FromStr for RelationTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "r1" => Ok(RelationTag::R1),
            "r2" => Ok(RelationTag::R2),
            "r3" => Ok(RelationTag::R3),
            "r4" => Ok(RelationTag::R4),
            "r5" => Ok(RelationTag::R5),
            other => Err(format!("relation tag {other:?} is not one of r1..r5")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InferentialRelation {
    pub source: u32,
    pub tag: RelationTag,
    pub target: u32,
}

/// The `<FIC, NP, i, I>` coding of one referential noun phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferentialNp {
    pub fic: u32,
    pub surface: String,
    pub referent: u32,
    pub inferential: Vec<InferentialRelation>,
    /// Third-person definite pronoun.
    pub pronoun3: bool,
}

/// A functionally independent clause and the phrases it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fic {
    pub index: u32,
    pub nps: Vec<ReferentialNp>,
    pub span: (PhraseId, PhraseId),
    /// Phrase positions in the narrative for `span`.
    pub phrase_range: (usize, usize),
}

/// Where the boundary between FIC `n` and FIC `n + 1` falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteLink {
    /// A prosodic boundary site.
    Site(usize),
    /// Both clauses share the phrase at this position; there is no site.
    IntraPhrase { phrase: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FicCoding {
    narrative_id: String,
    fics: Vec<Fic>,
    site_map: Vec<SiteLink>,
    site_count: usize,
}

#[derive(Serialize, Deserialize)]
struct NpRecord {
    form: String,
    referent: u32,
    #[serde(default)]
    pronoun3: bool,
    #[serde(default)]
    inferential: Vec<(u32, String, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fic: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct FicRecord {
    index: u32,
    span: (PhraseId, PhraseId),
    #[serde(default)]
    nps: Vec<NpRecord>,
}

#[derive(Serialize, Deserialize)]
struct CodingRecord {
    narrative_id: String,
    fics: Vec<FicRecord>,
}

impl FicCoding {
    pub fn from_reader(reader: impl Read, narrative: &Narrative) -> Result<Self> {
        let record: CodingRecord =
            serde_json::from_reader(reader).map_err(|e| Error::json("FIC coding", e))?;
        Self::from_record(record, narrative)
    }

    pub fn from_json(bytes: &[u8], narrative: &Narrative) -> Result<Self> {
        Self::from_reader(bytes, narrative)
    }

    fn from_record(record: CodingRecord, narrative: &Narrative) -> Result<Self> {
        if record.narrative_id != narrative.id() {
            return Err(Error::schema(
                "narrative_id",
                format!(
                    "coding is for {:?}, narrative is {:?}",
                    record.narrative_id,
                    narrative.id()
                ),
            ));
        }
        if record.fics.is_empty() {
            return Err(Error::schema("fics", "no FICs"));
        }
        let mut fics = Vec::with_capacity(record.fics.len());
        for (k, f) in record.fics.into_iter().enumerate() {
            let loc = format!("fics[{k}] (FIC {})", f.index);
            if f.index == 0 {
                return Err(Error::schema(loc, "FIC index must be positive"));
            }
            if let Some(prev) = fics.last().map(|p: &Fic| p.index) {
                if f.index != prev + 1 {
                    return Err(Error::schema(
                        loc,
                        format!("non-contiguous FIC indices: {} follows {prev}", f.index),
                    ));
                }
            }
            let locate = |id: PhraseId| {
                narrative
                    .phrase_index(id)
                    .ok_or_else(|| Error::schema(&loc, format!("unknown phrase id {id}")))
            };
            let range = (locate(f.span.0)?, locate(f.span.1)?);
            if range.0 > range.1 {
                return Err(Error::schema(&loc, "span ends before it starts"));
            }
            let mut nps = Vec::with_capacity(f.nps.len());
            for (m, np) in f.nps.into_iter().enumerate() {
                let np_loc = format!("{loc}.nps[{m}] ({:?})", np.form);
                if let Some(declared) = np.fic {
                    if declared != f.index {
                        return Err(Error::schema(
                            np_loc,
                            format!("NP references FIC {declared} but is listed under FIC {}", f.index),
                        ));
                    }
                }
                if np.referent == 0 {
                    return Err(Error::schema(np_loc, "referent index must be positive"));
                }
                let inferential = np
                    .inferential
                    .into_iter()
                    .map(|(source, tag, target)| {
                        let tag = tag.parse().map_err(|e: String| Error::schema(&np_loc, e))?;
                        if source != np.referent {
                            return Err(Error::schema(
                                &np_loc,
                                format!(
                                    "inferential relation source {source} differs from referent {}",
                                    np.referent
                                ),
                            ));
                        }
                        Ok(InferentialRelation { source, tag, target })
                    })
                    .collect::<Result<Vec<_>>>()?;
                nps.push(ReferentialNp {
                    fic: f.index,
                    surface: np.form,
                    referent: np.referent,
                    inferential,
                    pronoun3: np.pronoun3,
                });
            }
            fics.push(Fic {
                index: f.index,
                nps,
                span: f.span,
                phrase_range: range,
            });
        }

        let mut site_map = Vec::with_capacity(fics.len().saturating_sub(1));
        for pair in fics.windows(2) {
            let (end, start) = (pair[0].phrase_range.1, pair[1].phrase_range.0);
            let link = if start < end {
                return Err(Error::schema(
                    format!("FIC {}", pair[1].index),
                    format!("span starts before the end of FIC {}", pair[0].index),
                ));
            } else if start == end {
                SiteLink::IntraPhrase { phrase: end }
            } else {
                // Uncoded phrases in between: the boundary precedes the clause
                // that opens the next segment.
                SiteLink::Site(start - 1)
            };
            site_map.push(link);
        }

        Ok(Self {
            narrative_id: record.narrative_id,
            fics,
            site_map,
            site_count: narrative.site_count(),
        })
    }

    pub fn to_json(&self) -> String {
        let record = CodingRecord {
            narrative_id: self.narrative_id.clone(),
            fics: self
                .fics
                .iter()
                .map(|f| FicRecord {
                    index: f.index,
                    span: f.span,
                    nps: f
                        .nps
                        .iter()
                        .map(|np| NpRecord {
                            form: np.surface.clone(),
                            referent: np.referent,
                            pronoun3: np.pronoun3,
                            inferential: np
                                .inferential
                                .iter()
                                .map(|r| (r.source, r.tag.to_string(), r.target))
                                .collect(),
                            fic: None,
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&record).expect("coding serializes")
    }

    pub fn narrative_id(&self) -> &str {
        &self.narrative_id
    }

    /// Boundary sites of the narrative this coding was loaded against.
    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn fics(&self) -> &[Fic] {
        &self.fics
    }

    /// Index of `fic` within `fics()`.
    pub fn position(&self, fic: u32) -> Option<usize> {
        let first = self.fics.first()?.index;
        let pos = fic.checked_sub(first)? as usize;
        (pos < self.fics.len()).then_some(pos)
    }

    /// Site link for the adjacent pair `(left, left + 1)`.
    pub fn site_link(&self, left: u32) -> Option<SiteLink> {
        self.site_map.get(self.position(left)?).copied()
    }

    /// Site links in FIC order: entry `k` is the pair `(fics[k], fics[k+1])`.
    pub fn site_map(&self) -> &[SiteLink] {
        &self.site_map
    }
}
